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

#ifndef VOTEKIT_METRICS_HPP_
#define VOTEKIT_METRICS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "votekit/corpus.hpp"
#include "votekit/error.hpp"
#include "votekit/tsv.hpp"

namespace votekit {

/// Binary confusion counts with label 1 as the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn_ = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn_ + tn; }
  std::size_t actual_positives() const noexcept { return tp + fn_; }
  std::size_t actual_negatives() const noexcept { return fp + tn; }

  void add(ClassLabel predicted, ClassLabel actual) noexcept {
    const bool p = predicted == ClassLabel::SelfReported;
    const bool a = actual == ClassLabel::SelfReported;
    if (p && a) {
      ++tp;
    } else if (p) {
      ++fp;
    } else if (a) {
      ++fn_;
    } else {
      ++tn;
    }
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

enum class Metric { Precision, Recall, F1, Accuracy };

inline constexpr std::array<Metric, 4> kAllMetrics{Metric::Precision, Metric::Recall, Metric::F1, Metric::Accuracy};

constexpr std::string_view metric_name(Metric m) noexcept {
  switch (m) {
    case Metric::Precision: return "precision";
    case Metric::Recall: return "recall";
    case Metric::F1: return "f1";
    case Metric::Accuracy: return "accuracy";
  }
  return "?";
}

struct Score {
  Metric metric = Metric::F1;
  double value = 0.0;
};

/// All four scalar scores of one evaluation.
struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;

  double get(Metric m) const noexcept {
    switch (m) {
      case Metric::Precision: return precision;
      case Metric::Recall: return recall;
      case Metric::F1: return f1;
      case Metric::Accuracy: return accuracy;
    }
    return 0.0;
  }
};

struct ScoreSummary {
  double mean = 0.0;
  double stdev = 0.0;  // sample (n - 1); 0 for n == 1
  std::size_t n = 0;
};

namespace detail {
inline std::string list_ids(const std::vector<std::string>& ids) {
  constexpr std::size_t kShown = 10;
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) out += (i ? ", " : "") + ids[i];
  if (ids.size() > kShown) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}
}  // namespace detail

/// Tallies predictions against gold labels. Key sets must match exactly.
inline ConfusionMatrix confusion_matrix(const std::map<std::string, ClassLabel>& predictions,
                                        const std::map<std::string, ClassLabel>& labels) {
  if (labels.empty() && predictions.empty()) throw ValidationError("confusion matrix over an empty set");
  std::vector<std::string> missing, extra;
  auto p = predictions.begin();
  auto l = labels.begin();
  while (p != predictions.end() || l != labels.end()) {
    if (l == labels.end() || (p != predictions.end() && p->first < l->first)) {
      extra.push_back((p++)->first);
    } else if (p == predictions.end() || l->first < p->first) {
      missing.push_back((l++)->first);
    } else {
      ++p;
      ++l;
    }
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "prediction ids do not match label ids";
    if (!missing.empty()) msg += "; missing predictions for: " + detail::list_ids(missing);
    if (!extra.empty()) msg += "; predictions for unknown ids: " + detail::list_ids(extra);
    throw ValidationError(msg);
  }
  ConfusionMatrix cm;
  for (const auto& [id, actual] : labels) cm.add(predictions.at(id), actual);
  return cm;
}

/// Harmonic mean of precision and recall; 0 when both are 0.
inline double f1_from_pr(double precision, double recall) {
  if (!(precision >= 0.0 && precision <= 1.0) || !(recall >= 0.0 && recall <= 1.0)) {
    throw ValidationError("precision and recall must lie in [0, 1]");
  }
  const double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

namespace detail {
inline double ratio_or_zero(std::size_t num, std::size_t den) noexcept {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace detail

/// Standard definitions; any zero denominator yields 0.
inline Score score_from_confusion(const ConfusionMatrix& cm, Metric metric) {
  const double precision = detail::ratio_or_zero(cm.tp, cm.tp + cm.fp);
  const double recall = detail::ratio_or_zero(cm.tp, cm.tp + cm.fn_);
  switch (metric) {
    case Metric::Precision: return {metric, precision};
    case Metric::Recall: return {metric, recall};
    case Metric::F1: return {metric, f1_from_pr(precision, recall)};
    case Metric::Accuracy: return {metric, detail::ratio_or_zero(cm.tp + cm.tn, cm.total())};
  }
  return {metric, 0.0};
}

inline Scores all_scores(const ConfusionMatrix& cm) {
  return {score_from_confusion(cm, Metric::Precision).value, score_from_confusion(cm, Metric::Recall).value,
          score_from_confusion(cm, Metric::F1).value, score_from_confusion(cm, Metric::Accuracy).value};
}

/// Mean and sample standard deviation. Inputs are summed in sorted order
/// around the minimum, so the result does not depend on input order and a
/// constant input gives exactly that value with stdev 0.
inline ScoreSummary aggregate_scores(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("cannot aggregate an empty score list");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double ref = sorted.front();
  double shift = 0.0;
  for (double s : sorted) shift += s - ref;
  ScoreSummary out;
  out.n = sorted.size();
  out.mean = ref + shift / n;
  if (sorted.size() > 1) {
    double ss = 0.0;
    for (double s : sorted) ss += (s - out.mean) * (s - out.mean);
    out.stdev = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

/// Two-by-two grid, rows are actual classes, columns are predicted classes.
inline std::string render_confusion_grid(const ConfusionMatrix& cm) {
  const std::string cells[2][2] = {{std::to_string(cm.tn), std::to_string(cm.fp)},
                                   {std::to_string(cm.fn_), std::to_string(cm.tp)}};
  std::size_t width = std::string("predicted 0").size();
  for (const auto& row : cells)
    for (const auto& c : row) width = std::max(width, c.size());
  const std::string row_head[2] = {"actual 0 (non-self-reported)", "actual 1 (self-reported)"};
  const std::size_t head = row_head[0].size();
  auto pad_left = [](const std::string& s, std::size_t w) { return std::string(w - s.size(), ' ') + s; };
  auto pad_right = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
  std::string out = pad_right("", head) + "  " + pad_left("predicted 0", width) + "  " +
                    pad_left("predicted 1", width) + "  " + pad_left("total", width) + "\n";
  const std::size_t row_total[2] = {cm.actual_negatives(), cm.actual_positives()};
  for (int r = 0; r < 2; ++r) {
    out += pad_right(row_head[r], head) + "  " + pad_left(cells[r][0], width) + "  " + pad_left(cells[r][1], width) +
           "  " + pad_left(std::to_string(row_total[r]), width) + "\n";
  }
  return out;
}

/// Mean row and stdev row under a column label, like a results table.
inline std::string render_summary(const ScoreSummary& summary, std::string_view label, int digits = 3) {
  const std::string mean = tsv::format_fixed(summary.mean, digits);
  const std::string stdev = tsv::format_fixed(summary.stdev, digits);
  const std::size_t width = std::max({label.size(), mean.size(), stdev.size()});
  auto col = [width](std::string_view s) { return std::string(width - s.size(), ' ') + std::string(s); };
  return "       " + col(label) + "\nMean   " + col(mean) + "\nStdev  " + col(stdev) + "\n";
}

}  // namespace votekit

#endif  // VOTEKIT_METRICS_HPP_
