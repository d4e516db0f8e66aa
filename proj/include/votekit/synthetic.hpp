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

#ifndef VOTEKIT_SYNTHETIC_HPP_
#define VOTEKIT_SYNTHETIC_HPP_

// Seeded synthetic tweet corpora for desk-scale runs.
//
// Each example draws a label (exact positive count = round(size * positive_rate)),
// then a length uniformly in [min_tokens, max_tokens]. Every token is a signal
// token with probability signal_rate, otherwise a neutral word. A signal token
// comes from the example's own class vocabulary, except with probability
// flip_rate it comes from the opposite class vocabulary.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "votekit/corpus.hpp"
#include "votekit/error.hpp"
#include "votekit/random.hpp"

namespace votekit::synthetic {

struct Vocabulary {
  std::vector<std::string_view> positive;
  std::vector<std::string_view> negative;
  std::vector<std::string_view> neutral;
};

inline const Vocabulary& vocabulary() {
  static const Vocabulary v{
      {"hit", "me", "my", "boyfriend", "husband", "ex", "choked", "slapped", "scared", "hurt", "bruises",
       "threatened", "pushed", "grabbed", "yelled", "afraid", "left", "escaped", "abused", "controlling",
       "punched", "locked", "phone", "survived", "myself", "i", "was", "he", "kicked", "crying"},
      {"news", "report", "awareness", "campaign", "police", "statistics", "study", "charity", "policy",
       "article", "october", "month", "hotline", "support", "victims", "survey", "government", "law", "watch",
       "documentary", "celebrity", "trial", "court", "sentenced", "women", "men", "shelter", "donate", "share",
       "retweet"},
      {"the", "a", "and", "to", "of", "in", "is", "it", "that", "for", "on", "with", "this", "so", "just",
       "day", "time", "people", "today", "really", "know", "think", "about", "what", "when", "never", "always",
       "home", "night", "friends", "life", "love", "thing", "still", "years", "out", "up", "all", "like",
       "back", "but", "not", "they", "from", "one", "how", "more", "get", "would", "good", "there", "been",
       "now", "can", "some", "every", "even", "right", "much", "too", "lol", "omg", "tho", "ok", "yes", "no",
       "why", "who", "after", "before", "again", "over", "into", "only", "other", "new", "any", "its", "then",
       "here"}};
  return v;
}

struct Config {
  std::size_t size = 0;
  double positive_rate = 0.11;
  double signal_rate = 0.5;
  double flip_rate = 0.2;
  std::size_t min_tokens = 10;
  std::size_t max_tokens = 20;
  std::uint64_t seed = 0;
  std::string split_name = "synthetic";
  std::string id_prefix = "s";
};

/// Number of positives for a requested size and rate.
inline std::size_t positive_count(const Config& config) {
  return static_cast<std::size_t>(std::llround(config.positive_rate * static_cast<double>(config.size)));
}

/// Corpus with exactly `positives` label-1 examples among `config.size`.
inline LabeledCorpus generate_with_counts(const Config& config, std::size_t positives) {
  if (positives > config.size) throw ValidationError("more positives than examples");
  if (!(config.signal_rate >= 0.0 && config.signal_rate <= 1.0) || !(config.flip_rate >= 0.0 && config.flip_rate <= 1.0)) {
    throw ValidationError("signal and flip rates must lie in [0, 1]");
  }
  if (config.min_tokens < 1 || config.max_tokens < config.min_tokens) throw ValidationError("bad token length range");
  const auto& vocab = vocabulary();
  Rng rng(config.seed);
  std::vector<char> is_positive(config.size, 0);
  for (std::size_t i = 0; i < positives; ++i) is_positive[i] = 1;
  rng.shuffle(is_positive);

  const std::size_t width = std::to_string(config.size).size();
  std::vector<LabeledExample> examples;
  examples.reserve(config.size);
  for (std::size_t i = 0; i < config.size; ++i) {
    const bool positive = is_positive[i] != 0;
    const std::size_t length = config.min_tokens + rng.below(config.max_tokens - config.min_tokens + 1);
    std::string text;
    for (std::size_t t = 0; t < length; ++t) {
      const std::vector<std::string_view>* pool = &vocab.neutral;
      if (rng.bernoulli(config.signal_rate)) {
        const bool own = !rng.bernoulli(config.flip_rate);
        pool = (positive == own) ? &vocab.positive : &vocab.negative;
      }
      const auto word = (*pool)[rng.below(pool->size())];
      if (t) text += ' ';
      text += word;
    }
    text[0] = static_cast<char>(text[0] >= 'a' && text[0] <= 'z' ? text[0] - 0x20 : text[0]);
    std::string id = std::to_string(i);
    id = config.id_prefix + std::string(width - id.size(), '0') + id;
    examples.push_back({std::move(id), std::move(text), label_from_bool(positive)});
  }
  return LabeledCorpus(config.split_name, std::move(examples), true);
}

inline LabeledCorpus generate(const Config& config) { return generate_with_counts(config, positive_count(config)); }

}  // namespace votekit::synthetic

#endif  // VOTEKIT_SYNTHETIC_HPP_
