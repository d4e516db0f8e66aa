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

#ifndef VOTEKIT_MEMBERS_HPP_
#define VOTEKIT_MEMBERS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "votekit/corpus.hpp"
#include "votekit/ensemble.hpp"
#include "votekit/error.hpp"
#include "votekit/features.hpp"
#include "votekit/metrics.hpp"
#include "votekit/probability_table.hpp"
#include "votekit/random.hpp"
#include "votekit/tsv.hpp"

namespace votekit {

/// Numerically stable logistic function.
inline double sigmoid(double s) noexcept {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

/// ln(1 + e^s) without overflow.
inline double softplus(double s) noexcept { return std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s))); }

/// Hashed-feature logistic regression.
struct MemberModel {
  std::string member_id;
  std::vector<double> weights = std::vector<double>(kFeatureDim, 0.0);
  double bias = 0.0;

  static MemberModel zero(std::string id) {
    MemberModel m;
    m.member_id = std::move(id);
    return m;
  }

  double score(const FeatureVector& x) const noexcept {
    double s = bias;
    for (const auto& [j, v] : x.entries()) s += weights[j] * v;
    return s;
  }

  bool finite() const noexcept {
    return std::isfinite(bias) && std::all_of(weights.begin(), weights.end(), [](double w) { return std::isfinite(w); });
  }

  friend bool operator==(const MemberModel&, const MemberModel&) = default;
};

struct TrainingExample {
  FeatureVector features;
  ClassLabel label = ClassLabel::NonSelfReported;
};

inline std::vector<TrainingExample> featurize_corpus(const LabeledCorpus& corpus) {
  if (!corpus.labeled()) throw ValidationError("corpus '" + corpus.split_name() + "' is unlabeled");
  std::vector<TrainingExample> out;
  out.reserve(corpus.size());
  for (const auto& ex : corpus.examples()) out.push_back({featurize(ex.text), *ex.label});
  return out;
}

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> weight_gradient;  // length kFeatureDim
  double bias_gradient = 0.0;
};

namespace detail {
inline double squared_norm(std::span<const double> w) noexcept {
  double s = 0.0;
  for (double x : w) s += x * x;
  return s;
}

/// -[y ln sigma(s) + (1 - y) ln(1 - sigma(s))] = softplus(s) - y s
inline double example_loss(double s, ClassLabel y) noexcept {
  return softplus(s) - (y == ClassLabel::SelfReported ? s : 0.0);
}
}  // namespace detail

/// Mean logistic loss plus (l2 / 2) ||w||^2. The bias is not regularized.
inline double logistic_loss(const MemberModel& model, std::span<const TrainingExample> batch, double l2) {
  if (batch.empty()) throw ValidationError("loss over an empty batch");
  double total = 0.0;
  for (const auto& ex : batch) total += detail::example_loss(model.score(ex.features), ex.label);
  return total / static_cast<double>(batch.size()) + 0.5 * l2 * detail::squared_norm(model.weights);
}

inline LossAndGradient loss_and_gradient(const MemberModel& model, std::span<const TrainingExample> batch, double l2) {
  if (batch.empty()) throw ValidationError("loss over an empty batch");
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  LossAndGradient out;
  out.weight_gradient.resize(model.weights.size());
  for (std::size_t j = 0; j < model.weights.size(); ++j) out.weight_gradient[j] = l2 * model.weights[j];
  double total = 0.0;
  for (const auto& ex : batch) {
    const double s = model.score(ex.features);
    total += detail::example_loss(s, ex.label);
    const double residual = (sigmoid(s) - (ex.label == ClassLabel::SelfReported ? 1.0 : 0.0)) * inv_n;
    for (const auto& [j, v] : ex.features.entries()) out.weight_gradient[j] += residual * v;
    out.bias_gradient += residual;
  }
  out.loss = total * inv_n + 0.5 * l2 * detail::squared_norm(model.weights);
  if (!std::isfinite(out.loss)) throw ValidationError("loss is not finite");
  return out;
}

enum class SelectionMetric { F1, Accuracy };

constexpr std::string_view selection_name(SelectionMetric m) noexcept {
  return m == SelectionMetric::F1 ? "f1" : "accuracy";
}

inline std::optional<SelectionMetric> parse_selection(std::string_view text) noexcept {
  if (text == "f1") return SelectionMetric::F1;
  if (text == "accuracy") return SelectionMetric::Accuracy;
  return std::nullopt;
}

struct TrainConfig {
  std::size_t epochs = 20;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  SelectionMetric selection_metric = SelectionMetric::F1;

  void validate() const {
    if (epochs < 1) throw ValidationError("epochs must be at least 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ValidationError("learning rate must be positive");
    if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ValidationError("l2 must be non-negative");
    if (!(learning_rate * l2 < 1.0)) throw ValidationError("learning_rate * l2 must be below 1");
  }
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean per-example loss seen during the epoch, before each update
  double val_f1 = 0.0;
  double val_accuracy = 0.0;

  double metric(SelectionMetric m) const noexcept { return m == SelectionMetric::F1 ? val_f1 : val_accuracy; }
  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

/// Per-epoch validation trace. records[i].epoch == i.
struct EpochHistory {
  std::vector<EpochRecord> records;

  friend bool operator==(const EpochHistory&, const EpochHistory&) = default;
};

/// Argmax of the chosen metric; the earliest epoch wins ties.
inline std::size_t select_best_epoch(const EpochHistory& history, SelectionMetric metric) {
  if (history.records.empty()) throw ValidationError("cannot select from an empty epoch history");
  std::size_t best = 0;
  for (std::size_t i = 1; i < history.records.size(); ++i) {
    if (history.records[i].metric(metric) > history.records[best].metric(metric)) best = i;
  }
  return history.records[best].epoch;
}

/// Probabilities strictly inside (0, 1).
inline double predict_probability(const MemberModel& model, const FeatureVector& x) noexcept {
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(sigmoid(model.score(x)), lo, hi);
}

/// P(y = 1 | x) for every example, in corpus order.
inline ProbabilityTable predict_proba(const MemberModel& model, const LabeledCorpus& corpus) {
  std::vector<ProbabilityTable::Entry> entries;
  entries.reserve(corpus.size());
  for (const auto& ex : corpus.examples()) entries.emplace_back(ex.id, predict_probability(model, featurize(ex.text)));
  return ProbabilityTable(model.member_id, std::move(entries));
}

/// Ingests a probability TSV produced outside the toolkit (e.g. by a transformer).
inline ProbabilityTable load_external_probabilities(const std::filesystem::path& path,
                                                    std::optional<std::string> member_id = std::nullopt) {
  return load_probability_table(path, std::move(member_id));
}

struct TrainedMember {
  MemberModel model;
  EpochHistory history;
  std::size_t selected_epoch = 0;
};

namespace detail {

/// Weights stored as scale * v so the L2 shrink of every SGD step is O(1).
class ScaledWeights {
 public:
  ScaledWeights() : v_(kFeatureDim, 0.0) {}

  double dot(const FeatureVector& x) const noexcept {
    double s = 0.0;
    for (const auto& [j, value] : x.entries()) s += v_[j] * value;
    return scale_ * s;
  }

  void shrink(double factor) {
    scale_ *= factor;
    if (scale_ < 1e-9) {
      for (double& w : v_) w *= scale_;
      scale_ = 1.0;
    }
  }

  void add(const FeatureVector& x, double coeff) noexcept {
    const double c = coeff / scale_;
    for (const auto& [j, value] : x.entries()) v_[j] += c * value;
  }

  std::vector<double> materialize() const {
    std::vector<double> w(v_.size());
    for (std::size_t j = 0; j < v_.size(); ++j) w[j] = scale_ * v_[j];
    return w;
  }

 private:
  std::vector<double> v_;
  double scale_ = 1.0;
};

struct Snapshot {
  std::vector<std::pair<std::uint32_t, double>> nonzero;
  double bias = 0.0;
};

inline Snapshot take_snapshot(const std::vector<double>& weights, double bias) {
  Snapshot snap;
  snap.bias = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] != 0.0) snap.nonzero.emplace_back(static_cast<std::uint32_t>(j), weights[j]);
  }
  return snap;
}

inline ConfusionMatrix evaluate_member(std::span<const TrainingExample> data, const std::vector<double>& weights,
                                       double bias) {
  ConfusionMatrix cm;
  for (const auto& ex : data) {
    double s = bias;
    for (const auto& [j, v] : ex.features.entries()) s += weights[j] * v;
    cm.add(hard_label(sigmoid(s)), ex.label);
  }
  return cm;
}

}  // namespace detail

/// Per-example SGD over seeded shuffles, recording validation F1 and accuracy
/// after every epoch, then returning the snapshot of the best epoch under
/// config.selection_metric. Deterministic for a fixed seed.
inline TrainedMember train_member(const LabeledCorpus& train, const LabeledCorpus& validation, const TrainConfig& config,
                                  std::string member_id = "member") {
  config.validate();
  const auto train_set = featurize_corpus(train);
  const auto val_set = featurize_corpus(validation);
  if (val_set.empty()) throw ValidationError("validation corpus is empty");
  const auto positives = static_cast<std::size_t>(std::count_if(
      train_set.begin(), train_set.end(), [](const auto& ex) { return ex.label == ClassLabel::SelfReported; }));
  if (positives == 0 || positives == train_set.size()) {
    throw ValidationError("training corpus must contain both classes");
  }

  Rng rng(config.seed);
  detail::ScaledWeights weights;
  double bias = 0.0;
  const double shrink = 1.0 - config.learning_rate * config.l2;
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  EpochHistory history;
  std::vector<detail::Snapshot> snapshots;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t idx : order) {
      const auto& ex = train_set[idx];
      const double s = weights.dot(ex.features) + bias;
      loss_sum += detail::example_loss(s, ex.label);
      const double residual = sigmoid(s) - (ex.label == ClassLabel::SelfReported ? 1.0 : 0.0);
      weights.shrink(shrink);
      weights.add(ex.features, -config.learning_rate * residual);
      bias -= config.learning_rate * residual;
    }
    const double mean_loss = loss_sum / static_cast<double>(train_set.size());
    if (!std::isfinite(mean_loss) || !std::isfinite(bias)) {
      throw ValidationError("training loss became non-finite in epoch " + std::to_string(epoch));
    }
    const auto dense = weights.materialize();
    const auto cm = detail::evaluate_member(val_set, dense, bias);
    history.records.push_back({epoch, mean_loss, score_from_confusion(cm, Metric::F1).value,
                               score_from_confusion(cm, Metric::Accuracy).value});
    snapshots.push_back(detail::take_snapshot(dense, bias));
  }

  TrainedMember out;
  out.selected_epoch = select_best_epoch(history, config.selection_metric);
  out.history = std::move(history);
  out.model = MemberModel::zero(std::move(member_id));
  const auto& snap = snapshots[out.selected_epoch];
  for (const auto& [j, w] : snap.nonzero) out.model.weights[j] = w;
  out.model.bias = snap.bias;
  if (!out.model.finite()) throw ValidationError("trained parameters are not finite");
  return out;
}

// History TSV: header "epoch<TAB>train_loss<TAB>val_f1<TAB>val_accuracy<TAB>selected".

inline std::string format_history(const EpochHistory& history, std::size_t selected_epoch) {
  std::string out = "epoch\ttrain_loss\tval_f1\tval_accuracy\tselected\n";
  for (const auto& r : history.records) {
    out += std::to_string(r.epoch) + "\t" + tsv::format_double(r.train_loss) + "\t" + tsv::format_double(r.val_f1) +
           "\t" + tsv::format_double(r.val_accuracy) + "\t" + (r.epoch == selected_epoch ? "1" : "0") + "\n";
  }
  return out;
}

// Model snapshot, a line-oriented text container:
//
//   votekit-model<TAB>1
//   member_id<TAB><id>
//   dim<TAB>262144
//   bias<TAB><double>
//   nonzero<TAB><k>
//   <index><TAB><weight>      (k lines, ascending index)
//
// Doubles use the shortest round-trip decimal form, so save/load is exact.

inline constexpr int kModelFormatVersion = 1;

inline std::string format_model(const MemberModel& model) {
  std::size_t nonzero = 0;
  for (double w : model.weights) nonzero += (w != 0.0);
  std::string out = "votekit-model\t" + std::to_string(kModelFormatVersion) + "\n";
  out += "member_id\t" + model.member_id + "\n";
  out += "dim\t" + std::to_string(model.weights.size()) + "\n";
  out += "bias\t" + tsv::format_double(model.bias) + "\n";
  out += "nonzero\t" + std::to_string(nonzero) + "\n";
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    if (model.weights[j] != 0.0) out += std::to_string(j) + "\t" + tsv::format_double(model.weights[j]) + "\n";
  }
  return out;
}

inline MemberModel parse_model(std::string_view content, const std::string& source) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start < content.size();) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    lines.push_back(content.substr(start, end - start));
    start = end + 1;
  }
  auto field = [&](std::size_t i, std::string_view key) -> std::string_view {
    if (i >= lines.size()) throw ParseError(source, i + 1, "truncated model file, expected '" + std::string(key) + "'");
    const auto parts = tsv::split(lines[i]);
    if (parts.size() != 2 || parts[0] != key) throw ParseError(source, i + 1, "expected '" + std::string(key) + "'");
    return parts[1];
  };
  auto to_size = [&](std::string_view text, std::size_t line) {
    double v = 0.0;
    if (!tsv::parse_double(text, v) || v < 0 || v != std::floor(v) || v > 1e15) {
      throw ParseError(source, line, "'" + std::string(text) + "' is not a count");
    }
    return static_cast<std::size_t>(v);
  };
  if (field(0, "votekit-model") != std::to_string(kModelFormatVersion)) {
    throw ParseError(source, 1, "unsupported model format version");
  }
  MemberModel model = MemberModel::zero(std::string(field(1, "member_id")));
  if (to_size(field(2, "dim"), 3) != kFeatureDim) throw ParseError(source, 3, "feature dimension mismatch");
  if (!tsv::parse_double(field(3, "bias"), model.bias) || !std::isfinite(model.bias)) {
    throw ParseError(source, 4, "bad bias");
  }
  const std::size_t nonzero = to_size(field(4, "nonzero"), 5);
  if (lines.size() != 5 + nonzero) throw ParseError(source, lines.size(), "weight count does not match 'nonzero'");
  for (std::size_t k = 0; k < nonzero; ++k) {
    const std::size_t line = 6 + k;
    const auto parts = tsv::split(lines[5 + k]);
    double w = 0.0;
    if (parts.size() != 2 || !tsv::parse_double(parts[1], w) || !std::isfinite(w)) {
      throw ParseError(source, line, "expected '<index><TAB><weight>'");
    }
    const std::size_t j = to_size(parts[0], line);
    if (j >= kFeatureDim) throw ParseError(source, line, "feature index out of range");
    model.weights[j] = w;
  }
  return model;
}

inline void save_model(const std::filesystem::path& path, const MemberModel& model) {
  tsv::write_file_atomic(path, format_model(model));
}

inline MemberModel load_model(const std::filesystem::path& path) {
  return parse_model(tsv::read_file(path), path.string());
}

}  // namespace votekit

#endif  // VOTEKIT_MEMBERS_HPP_
