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

#ifndef VOTEKIT_CORPUS_HPP_
#define VOTEKIT_CORPUS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "votekit/error.hpp"
#include "votekit/random.hpp"
#include "votekit/tsv.hpp"

namespace votekit {

/// Binary class. SelfReported (1) is the positive class for every metric.
enum class ClassLabel : std::uint8_t { NonSelfReported = 0, SelfReported = 1 };

constexpr int to_int(ClassLabel label) noexcept { return static_cast<int>(label); }

constexpr ClassLabel label_from_bool(bool positive) noexcept {
  return positive ? ClassLabel::SelfReported : ClassLabel::NonSelfReported;
}

/// Accepts exactly "0" or "1".
inline std::optional<ClassLabel> parse_label(std::string_view text) noexcept {
  if (text == "0") return ClassLabel::NonSelfReported;
  if (text == "1") return ClassLabel::SelfReported;
  return std::nullopt;
}

struct LabeledExample {
  std::string id;
  std::string text;
  std::optional<ClassLabel> label;  // empty in unlabeled corpora

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

namespace detail {
inline bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  });
}
}  // namespace detail

/// Ordered, immutable collection of examples from one split.
class LabeledCorpus {
 public:
  LabeledCorpus() = default;

  /// Validates id uniqueness, non-blank text, and that labels are present
  /// on every example (labeled) or on none (unlabeled).
  LabeledCorpus(std::string split_name, std::vector<LabeledExample> examples, bool labeled)
      : split_name_(std::move(split_name)), examples_(std::move(examples)), labeled_(labeled) {
    index_.reserve(examples_.size());
    for (std::size_t i = 0; i < examples_.size(); ++i) {
      const auto& ex = examples_[i];
      if (ex.id.empty()) throw ValidationError("example " + std::to_string(i) + " has an empty id");
      if (detail::is_blank(ex.text)) throw ValidationError("example '" + ex.id + "' has empty text");
      if (ex.label.has_value() != labeled_) {
        throw ValidationError("example '" + ex.id + (labeled_ ? "' is missing a label" : "' carries a label in an unlabeled corpus"));
      }
      if (!index_.emplace(ex.id, i).second) throw ValidationError("duplicate id '" + ex.id + "'");
    }
  }

  const std::string& split_name() const noexcept { return split_name_; }
  std::span<const LabeledExample> examples() const noexcept { return examples_; }
  std::size_t size() const noexcept { return examples_.size(); }
  bool empty() const noexcept { return examples_.empty(); }
  bool labeled() const noexcept { return labeled_; }

  const LabeledExample& operator[](std::size_t i) const { return examples_[i]; }

  const LabeledExample* find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &examples_[it->second];
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(examples_.size());
    for (const auto& ex : examples_) out.push_back(ex.id);
    return out;
  }

  /// id -> label map for the metrics module. Requires a labeled corpus.
  std::map<std::string, ClassLabel> labels_by_id() const {
    if (!labeled_) throw ValidationError("corpus '" + split_name_ + "' is unlabeled");
    std::map<std::string, ClassLabel> out;
    for (const auto& ex : examples_) out.emplace(ex.id, *ex.label);
    return out;
  }

  friend bool operator==(const LabeledCorpus& a, const LabeledCorpus& b) {
    return a.split_name_ == b.split_name_ && a.labeled_ == b.labeled_ && a.examples_ == b.examples_;
  }

 private:
  std::string split_name_;
  std::vector<LabeledExample> examples_;
  bool labeled_ = true;
  std::unordered_map<std::string, std::size_t> index_;
};

struct ClassDistribution {
  std::size_t negatives = 0;
  std::size_t positives = 0;
  std::size_t total = 0;
  double positive_rate = 0.0;
};

inline const std::vector<std::string>& labeled_corpus_header() {
  static const std::vector<std::string> h{"id", "text", "label"};
  return h;
}

inline const std::vector<std::string>& unlabeled_corpus_header() {
  static const std::vector<std::string> h{"id", "text"};
  return h;
}

/// Parses corpus TSV text. Text fields are unescaped (\t, \n, \r, \\) and otherwise kept verbatim.
inline LabeledCorpus parse_corpus(std::string_view content, const std::string& source, bool labeled,
                                  std::string split_name) {
  const auto doc = tsv::parse(content, source, labeled ? 3 : 2);
  tsv::require_header(doc, labeled ? labeled_corpus_header() : unlabeled_corpus_header());
  std::vector<LabeledExample> examples;
  examples.reserve(doc.rows.size());
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& row : doc.rows) {
    LabeledExample ex;
    ex.id = row.fields[0];
    ex.text = tsv::unescape(row.fields[1]);
    if (ex.id.empty()) throw ValidationError(source + ":" + std::to_string(row.line) + ": empty id");
    if (auto [it, fresh] = seen.emplace(ex.id, row.line); !fresh) {
      throw ValidationError(source + ":" + std::to_string(row.line) + ": duplicate id '" + ex.id +
                            "' (first seen on line " + std::to_string(it->second) + ")");
    }
    if (labeled) {
      ex.label = parse_label(row.fields[2]);
      if (!ex.label) {
        throw ValidationError(source + ":" + std::to_string(row.line) + ": label '" + row.fields[2] +
                              "' for id '" + ex.id + "' is not 0 or 1");
      }
    }
    if (detail::is_blank(ex.text)) {
      throw ValidationError(source + ":" + std::to_string(row.line) + ": empty text for id '" + ex.id + "'");
    }
    examples.push_back(std::move(ex));
  }
  return LabeledCorpus(std::move(split_name), std::move(examples), labeled);
}

/// Loads a corpus TSV. The split name defaults to the file stem ("train.tsv" -> "train").
inline LabeledCorpus load_corpus(const std::filesystem::path& path, bool labeled,
                                 std::optional<std::string> split_name = std::nullopt) {
  const std::string content = tsv::read_file(path);
  return parse_corpus(content, path.string(), labeled, split_name.value_or(path.stem().string()));
}

/// True when the file header carries a label column.
inline bool corpus_file_is_labeled(const std::filesystem::path& path) {
  return tsv::read_header(path) == labeled_corpus_header();
}

inline std::string format_corpus(const LabeledCorpus& corpus) {
  std::string out = corpus.labeled() ? "id\ttext\tlabel\n" : "id\ttext\n";
  for (const auto& ex : corpus.examples()) {
    out += ex.id;
    out += '\t';
    out += tsv::escape(ex.text);
    if (corpus.labeled()) {
      out += '\t';
      out += static_cast<char>('0' + to_int(*ex.label));
    }
    out += '\n';
  }
  return out;
}

inline void save_corpus(const std::filesystem::path& path, const LabeledCorpus& corpus) {
  tsv::write_file_atomic(path, format_corpus(corpus));
}

inline ClassDistribution corpus_stats(const LabeledCorpus& corpus) {
  if (!corpus.labeled()) throw ValidationError("corpus '" + corpus.split_name() + "' is unlabeled");
  if (corpus.empty()) throw ValidationError("corpus '" + corpus.split_name() + "' has no examples");
  ClassDistribution d;
  for (const auto& ex : corpus.examples()) {
    if (*ex.label == ClassLabel::SelfReported) {
      ++d.positives;
    } else {
      ++d.negatives;
    }
  }
  d.total = d.negatives + d.positives;
  d.positive_rate = static_cast<double>(d.positives) / static_cast<double>(d.total);
  return d;
}

/// Sums distributions, e.g. for an overall row across splits.
inline ClassDistribution combine(std::span<const ClassDistribution> parts) {
  ClassDistribution d;
  for (const auto& p : parts) {
    d.negatives += p.negatives;
    d.positives += p.positives;
  }
  d.total = d.negatives + d.positives;
  d.positive_rate = d.total ? static_cast<double>(d.positives) / static_cast<double>(d.total) : 0.0;
  return d;
}

struct SplitParts {
  LabeledCorpus first;
  LabeledCorpus second;
};

/// Per-class seeded split. The first part receives round(fraction * class size)
/// examples of each class; both parts keep the input order.
inline SplitParts stratified_split(const LabeledCorpus& corpus, double fraction, std::uint64_t seed,
                                   std::string first_name = {}, std::string second_name = {}) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ValidationError("split fraction must lie in (0, 1)");
  if (!corpus.labeled()) throw ValidationError("cannot stratify an unlabeled corpus");
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < corpus.size(); ++i) by_class[to_int(*corpus[i].label)].push_back(i);
  if (by_class[0].empty() || by_class[1].empty()) {
    throw ValidationError("stratified split needs at least one example of each class");
  }
  Rng rng(seed);
  std::vector<bool> in_first(corpus.size(), false);
  for (auto& members : by_class) {
    rng.shuffle(members);
    const auto take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
    for (std::size_t k = 0; k < take; ++k) in_first[members[k]] = true;
  }
  std::vector<LabeledExample> a, b;
  for (std::size_t i = 0; i < corpus.size(); ++i) (in_first[i] ? a : b).push_back(corpus[i]);
  if (first_name.empty()) first_name = corpus.split_name() + ".part0";
  if (second_name.empty()) second_name = corpus.split_name() + ".part1";
  return {LabeledCorpus(std::move(first_name), std::move(a), true),
          LabeledCorpus(std::move(second_name), std::move(b), true)};
}

}  // namespace votekit

#endif  // VOTEKIT_CORPUS_HPP_
