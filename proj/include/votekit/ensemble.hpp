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

#ifndef VOTEKIT_ENSEMBLE_HPP_
#define VOTEKIT_ENSEMBLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "votekit/corpus.hpp"
#include "votekit/error.hpp"
#include "votekit/metrics.hpp"
#include "votekit/probability_table.hpp"
#include "votekit/tsv.hpp"

namespace votekit {

/// Probability at or above which the positive class is chosen.
inline constexpr double kDecisionThreshold = 0.5;

/// Thresholds a member probability; 0.5 goes to the positive class.
constexpr ClassLabel hard_label(double p_positive) noexcept {
  return label_from_bool(p_positive >= kDecisionThreshold);
}

/// Picks the more probable class given P(y=1|x); P(y=0|x) is 1 - p_positive. Ties go positive.
inline ClassLabel decide(double p_positive) {
  if (!(p_positive >= 0.0 && p_positive <= 1.0)) throw ValidationError("probability outside [0, 1]");
  return hard_label(p_positive);
}

/// Modal label; an even split returns the positive class.
inline ClassLabel majority_vote(std::span<const ClassLabel> votes) {
  if (votes.empty()) throw ValidationError("majority vote over no members");
  const auto positives = static_cast<std::size_t>(
      std::count(votes.begin(), votes.end(), ClassLabel::SelfReported));
  return label_from_bool(2 * positives >= votes.size());
}

/// Ordered members with non-negative, unnormalized weights.
class EnsembleSpec {
 public:
  EnsembleSpec() = default;

  EnsembleSpec(std::vector<std::string> members, std::vector<double> weights)
      : members_(std::move(members)), weights_(std::move(weights)) {
    if (members_.empty()) throw ValidationError("ensemble needs at least one member");
    if (members_.size() != weights_.size()) {
      throw ValidationError("ensemble has " + std::to_string(members_.size()) + " members but " +
                            std::to_string(weights_.size()) + " weights");
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (members_[i].empty()) throw ValidationError("ensemble member id is empty");
      if (!seen.insert(members_[i]).second) throw ValidationError("duplicate ensemble member '" + members_[i] + "'");
      if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
        throw ValidationError("weight of member '" + members_[i] + "' must be finite and non-negative");
      }
      weight_sum_ += weights_[i];
    }
    if (!(weight_sum_ > 0.0)) {
      throw ValidationError("all ensemble weights are zero; use majority voting (hard mode) instead");
    }
    equal_weights_ = std::all_of(weights_.begin(), weights_.end(), [&](double w) { return w == weights_.front(); });
  }

  /// a_i = 1 for every member.
  static EnsembleSpec uniform(std::vector<std::string> members) {
    std::vector<double> ones(members.size(), 1.0);
    return EnsembleSpec(std::move(members), std::move(ones));
  }

  std::span<const std::string> members() const noexcept { return members_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return members_.size(); }
  double weight_sum() const noexcept { return weight_sum_; }
  bool equal_weights() const noexcept { return equal_weights_; }

  friend bool operator==(const EnsembleSpec& a, const EnsembleSpec& b) {
    return a.members_ == b.members_ && a.weights_ == b.weights_;
  }

 private:
  std::vector<std::string> members_;
  std::vector<double> weights_;
  double weight_sum_ = 0.0;
  bool equal_weights_ = true;
};

/// Normalized weighted combination sum(a_i p_i) / sum(a_i).
///
/// The result is clamped to [min p_i, max p_i], which the exact value always
/// satisfies, so rounding can never push it outside the convex hull. Equal
/// weights reduce to the plain mean.
inline double soft_predict_proba(const EnsembleSpec& spec, std::span<const double> probs) {
  if (probs.size() != spec.size()) {
    throw ValidationError("expected " + std::to_string(spec.size()) + " member probabilities, got " +
                          std::to_string(probs.size()));
  }
  double lo = 1.0, hi = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("member probability outside [0, 1]");
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  const auto weights = spec.weights();
  double value = 0.0;
  if (spec.equal_weights()) {
    for (double p : probs) value += p;
    value /= static_cast<double>(probs.size());
  } else {
    for (std::size_t i = 0; i < probs.size(); ++i) value += weights[i] * probs[i];
    value /= spec.weight_sum();
  }
  return std::clamp(value, lo, hi);
}

enum class VoteMode { Soft, Hard };

constexpr std::string_view mode_name(VoteMode mode) noexcept { return mode == VoteMode::Soft ? "soft" : "hard"; }

struct MemberContribution {
  std::string member_id;
  double probability = 0.0;
  double weight = 0.0;
};

struct EnsembleVerdict {
  std::string id;
  double p_positive = 0.0;
  ClassLabel label = ClassLabel::NonSelfReported;
  std::vector<MemberContribution> per_member;

  double p_negative() const noexcept { return 1.0 - p_positive; }
};

namespace detail {

inline void require_unique_members(std::span<const ProbabilityTable> tables) {
  std::set<std::string> seen;
  for (const auto& t : tables) {
    if (!seen.insert(t.member_id()).second) throw ValidationError("duplicate member table '" + t.member_id() + "'");
  }
}

inline double member_f1(const ProbabilityTable& table, const LabeledCorpus& corpus) {
  std::map<std::string, ClassLabel> predictions;
  for (const auto& [id, p] : table.entries()) predictions.emplace(id, hard_label(p));
  return score_from_confusion(confusion_matrix(predictions, corpus.labels_by_id()), Metric::F1).value;
}

}  // namespace detail

/// Validation F1 of each member's thresholded predictions, in table order.
/// Each table must cover exactly the validation ids.
inline std::vector<double> member_f1_scores(std::span<const ProbabilityTable> tables, const LabeledCorpus& validation) {
  if (!validation.labeled()) throw ValidationError("validation corpus must be labeled");
  if (validation.empty()) throw ValidationError("validation corpus is empty");
  detail::require_unique_members(tables);
  const auto ids = validation.ids();
  std::vector<double> out;
  out.reserve(tables.size());
  for (const auto& t : tables) {
    t.require_exact_coverage(ids);
    out.push_back(detail::member_f1(t, validation));
  }
  return out;
}

/// a_i = validation F1 of member i. All-zero weights are an error.
inline EnsembleSpec fit_weights(std::span<const ProbabilityTable> tables, const LabeledCorpus& validation) {
  if (tables.empty()) throw ValidationError("fit_weights needs at least one member table");
  auto weights = member_f1_scores(tables, validation);
  std::vector<std::string> members;
  for (const auto& t : tables) members.push_back(t.member_id());
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) {
    throw ValidationError(
        "every member has validation F1 = 0, so F1 weights are undefined; "
        "fall back to majority voting (hard mode)");
  }
  return EnsembleSpec(std::move(members), std::move(weights));
}

/// Per-id verdicts over `ids`. Tables are matched to spec members by member id.
/// Hard mode ignores the weights: p_positive is the share of positive votes.
inline std::vector<EnsembleVerdict> predict_ensemble(const EnsembleSpec& spec, std::span<const ProbabilityTable> tables,
                                                     std::span<const std::string> ids, VoteMode mode) {
  detail::require_unique_members(tables);
  std::vector<ProbabilityTable> ordered;
  ordered.reserve(spec.size());
  for (const auto& member : spec.members()) {
    const auto it = std::find_if(tables.begin(), tables.end(), [&](const auto& t) { return t.member_id() == member; });
    if (it == tables.end()) throw ValidationError("no probability table for ensemble member '" + member + "'");
    ordered.push_back(it->restrict_to(ids));
  }
  if (tables.size() != spec.size()) {
    throw ValidationError(std::to_string(tables.size()) + " member tables supplied for a " +
                          std::to_string(spec.size()) + "-member ensemble");
  }
  const auto uniform = EnsembleSpec::uniform({spec.members().begin(), spec.members().end()});
  std::vector<EnsembleVerdict> verdicts;
  verdicts.reserve(ids.size());
  std::vector<double> probs(spec.size());
  std::vector<double> votes(spec.size());
  for (std::size_t row = 0; row < ids.size(); ++row) {
    EnsembleVerdict v;
    v.id = ids[row];
    for (std::size_t m = 0; m < spec.size(); ++m) {
      probs[m] = ordered[m].entries()[row].second;
      const double weight = mode == VoteMode::Soft ? spec.weights()[m] : 1.0;
      v.per_member.push_back({spec.members()[m], probs[m], weight});
    }
    if (mode == VoteMode::Soft) {
      v.p_positive = soft_predict_proba(spec, probs);
      v.label = decide(v.p_positive);
    } else {
      std::vector<ClassLabel> hard(spec.size());
      for (std::size_t m = 0; m < spec.size(); ++m) {
        hard[m] = hard_label(probs[m]);
        votes[m] = static_cast<double>(to_int(hard[m]));
      }
      v.p_positive = soft_predict_proba(uniform, votes);
      v.label = majority_vote(hard);
    }
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

struct EnsembleEvaluation {
  std::vector<EnsembleVerdict> verdicts;
  ConfusionMatrix confusion;
  Scores scores;
};

inline EnsembleEvaluation evaluate_ensemble(const EnsembleSpec& spec, std::span<const ProbabilityTable> tables,
                                            const LabeledCorpus& labeled, VoteMode mode) {
  if (!labeled.labeled()) throw ValidationError("evaluation corpus '" + labeled.split_name() + "' is unlabeled");
  if (labeled.empty()) throw ValidationError("evaluation corpus '" + labeled.split_name() + "' is empty");
  const auto ids = labeled.ids();
  EnsembleEvaluation out;
  out.verdicts = predict_ensemble(spec, tables, ids, mode);
  std::map<std::string, ClassLabel> predictions;
  for (const auto& v : out.verdicts) predictions.emplace(v.id, v.label);
  out.confusion = confusion_matrix(predictions, labeled.labels_by_id());
  out.scores = all_scores(out.confusion);
  return out;
}

// Ensemble spec file: header "member_id<TAB>weight", one member per row, order significant.

inline std::string format_ensemble_spec(const EnsembleSpec& spec) {
  std::string out = "member_id\tweight\n";
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out += spec.members()[i] + "\t" + tsv::format_double(spec.weights()[i]) + "\n";
  }
  return out;
}

inline EnsembleSpec parse_ensemble_spec(std::string_view content, const std::string& source) {
  const auto doc = tsv::parse(content, source, 2);
  tsv::require_header(doc, {"member_id", "weight"});
  std::vector<std::string> members;
  std::vector<double> weights;
  for (const auto& row : doc.rows) {
    double w = 0.0;
    if (!tsv::parse_double(row.fields[1], w)) {
      throw ParseError(source, row.line, "'" + row.fields[1] + "' is not a decimal weight");
    }
    members.push_back(row.fields[0]);
    weights.push_back(w);
  }
  return EnsembleSpec(std::move(members), std::move(weights));
}

inline EnsembleSpec load_ensemble_spec(const std::filesystem::path& path) {
  return parse_ensemble_spec(tsv::read_file(path), path.string());
}

inline void save_ensemble_spec(const std::filesystem::path& path, const EnsembleSpec& spec) {
  tsv::write_file_atomic(path, format_ensemble_spec(spec));
}

// Verdict file: header "id<TAB>p_positive<TAB>label".

inline std::string format_verdicts(std::span<const EnsembleVerdict> verdicts) {
  std::string out = "id\tp_positive\tlabel\n";
  for (const auto& v : verdicts) {
    out += v.id + "\t" + tsv::format_double(v.p_positive) + "\t" + std::to_string(to_int(v.label)) + "\n";
  }
  return out;
}

inline std::vector<EnsembleVerdict> parse_verdicts(std::string_view content, const std::string& source) {
  const auto doc = tsv::parse(content, source, 3);
  tsv::require_header(doc, {"id", "p_positive", "label"});
  std::vector<EnsembleVerdict> out;
  std::set<std::string> seen;
  for (const auto& row : doc.rows) {
    EnsembleVerdict v;
    v.id = row.fields[0];
    if (!tsv::parse_double(row.fields[1], v.p_positive) || !(v.p_positive >= 0.0 && v.p_positive <= 1.0)) {
      throw ParseError(source, row.line, "'" + row.fields[1] + "' is not a probability");
    }
    const auto label = parse_label(row.fields[2]);
    if (!label) throw ParseError(source, row.line, "label '" + row.fields[2] + "' is not 0 or 1");
    v.label = *label;
    if (v.label != hard_label(v.p_positive)) {
      throw ValidationError(source + ":" + std::to_string(row.line) + ": label disagrees with p_positive for '" +
                            v.id + "'");
    }
    if (!seen.insert(v.id).second) {
      throw ValidationError(source + ":" + std::to_string(row.line) + ": duplicate id '" + v.id + "'");
    }
    out.push_back(std::move(v));
  }
  return out;
}

inline std::vector<EnsembleVerdict> load_verdicts(const std::filesystem::path& path) {
  return parse_verdicts(tsv::read_file(path), path.string());
}

inline void save_verdicts(const std::filesystem::path& path, std::span<const EnsembleVerdict> verdicts) {
  tsv::write_file_atomic(path, format_verdicts(verdicts));
}

}  // namespace votekit

#endif  // VOTEKIT_ENSEMBLE_HPP_
