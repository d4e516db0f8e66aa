/**
 * Copyright 2026 The votekit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef VOTEKIT_FEATURES_HPP_
#define VOTEKIT_FEATURES_HPP_

// Hashed unigram + bigram term-frequency features.
//
// Tokenization: UTF-8 is decoded, text is lowercased (ASCII, Latin-1,
// Latin Extended-A, Greek and Cyrillic capitals), and split on whitespace and
// punctuation code points. Each unigram is hashed as its UTF-8 bytes and each
// bigram as "left right" joined by one space, with 64-bit FNV-1a. The feature
// index is the low 18 bits of the hash. Byte-oriented hashing keeps indices
// identical on every platform.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace votekit {

inline constexpr unsigned kFeatureBits = 18;
inline constexpr std::size_t kFeatureDim = std::size_t{1} << kFeatureBits;

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint32_t feature_index(std::string_view token) noexcept {
  return static_cast<std::uint32_t>(fnv1a64(token) & (kFeatureDim - 1));
}

/// Sparse (index, term frequency) pairs sorted by index, no duplicates, values > 0.
class FeatureVector {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  FeatureVector() = default;

  /// Sorts and merges repeated indices by summing.
  explicit FeatureVector(std::vector<Entry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    std::size_t out = 0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (out > 0 && entries_[out - 1].first == entries_[i].first) {
        entries_[out - 1].second += entries_[i].second;
      } else {
        entries_[out++] = entries_[i];
      }
    }
    entries_.resize(out);
  }

  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::vector<Entry> entries_;
};

namespace detail {

struct Decoded {
  char32_t cp = 0;
  bool valid = true;  // false: cp holds a single undecodable byte
};

/// Decodes one code point at `pos`, advancing it.
inline Decoded next_code_point(std::string_view s, std::size_t& pos) noexcept {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return {b0, true};
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  }
  if (len == 0 || pos + len > s.size()) {
    ++pos;
    return {b0, false};
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return {b0, false};
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return {cp, true};
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

constexpr bool is_separator(char32_t c) noexcept {
  if (c < 0x80) {
    return c <= 0x20 || c == 0x7F || (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  switch (c) {
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
    case 0xFEFF:
    case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
      return true;
    default:
      break;
  }
  return (c >= 0x80 && c <= 0x9F) ||      // C1 controls
         (c >= 0x2000 && c <= 0x200B) ||  // spaces, zero-width space
         (c >= 0x2010 && c <= 0x2027) ||  // dashes, quotes, ellipsis
         (c >= 0x2030 && c <= 0x205E) ||  // general punctuation
         (c >= 0x3001 && c <= 0x3003) || (c >= 0x3008 && c <= 0x3011) ||
         (c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20);
}

constexpr char32_t to_lower(char32_t c) noexcept {
  if (c >= 'A' && c <= 'Z') return c + 0x20;
  if (c < 0xC0) return c;
  if (c <= 0xDE) return c == 0xD7 ? c : c + 0x20;
  if (c >= 0x100 && c <= 0x17F) {
    if (c == 0x178) return 0xFF;
    const bool even_upper = (c <= 0x12F) || (c >= 0x132 && c <= 0x137) || (c >= 0x14A && c <= 0x177);
    const bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    if (even_upper && c % 2 == 0) return c + 1;
    if (odd_upper && c % 2 == 1) return c + 1;
    return c;
  }
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  return c;
}

}  // namespace detail

/// Lowercased tokens in text order. Undecodable bytes are kept raw inside tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto [cp, valid] = detail::next_code_point(text, pos);
    if (!valid) {
      current += static_cast<char>(cp);
    } else if (detail::is_separator(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      detail::append_utf8(current, detail::to_lower(cp));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

/// Hashed unigram and bigram term frequencies.
inline FeatureVector featurize(std::string_view text) {
  const auto tokens = tokenize(text);
  std::vector<FeatureVector::Entry> entries;
  entries.reserve(tokens.size() * 2);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    entries.emplace_back(feature_index(tokens[i]), 1.0);
    if (i + 1 < tokens.size()) entries.emplace_back(feature_index(tokens[i] + ' ' + tokens[i + 1]), 1.0);
  }
  return FeatureVector(std::move(entries));
}

}  // namespace votekit

#endif  // VOTEKIT_FEATURES_HPP_
