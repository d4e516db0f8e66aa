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

#ifndef VOTEKIT_REPORT_HPP_
#define VOTEKIT_REPORT_HPP_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "votekit/ensemble.hpp"
#include "votekit/metrics.hpp"
#include "votekit/tsv.hpp"

namespace votekit {

/// Everything an evaluation report shows. Rendered as text for people and as
/// key/value TSV for tools.
struct EvaluationReport {
  VoteMode mode = VoteMode::Soft;
  std::string corpus_name;
  ConfusionMatrix confusion;
  Scores scores;
  std::vector<std::pair<std::string, double>> member_f1;  // validation F1 per member, may be empty
};

inline std::optional<ScoreSummary> member_summary(const EvaluationReport& report) {
  if (report.member_f1.empty()) return std::nullopt;
  std::vector<double> values;
  for (const auto& [id, f1] : report.member_f1) values.push_back(f1);
  return aggregate_scores(values);
}

inline std::string render_report_text(const EvaluationReport& report) {
  std::size_t width = 10;
  for (const auto& [id, f1] : report.member_f1) width = std::max(width, id.size());
  auto key = [width](const std::string& k) { return "  " + k + std::string(width + 2 - k.size(), ' '); };

  std::string out = "ensemble evaluation\n";
  out += key("mode") + std::string(mode_name(report.mode)) + "\n";
  out += key("corpus") + report.corpus_name + " (" + std::to_string(report.confusion.total()) + " examples)\n\n";
  out += "scores\n";
  for (Metric m : kAllMetrics) out += key(std::string(metric_name(m))) + tsv::format_fixed(report.scores.get(m), 3) + "\n";
  if (const auto summary = member_summary(report)) {
    out += "\nmember validation F1 (n = " + std::to_string(summary->n) + ")\n";
    for (const auto& [id, f1] : report.member_f1) out += key(id) + tsv::format_fixed(f1, 3) + "\n";
    out += "\n" + render_summary(*summary, "F1");
  }
  out += "\nconfusion matrix (rows: actual, columns: predicted)\n";
  out += render_confusion_grid(report.confusion);
  return out;
}

inline std::string render_report_tsv(const EvaluationReport& report) {
  std::string out = "key\tvalue\n";
  auto row = [&out](const std::string& k, const std::string& v) { out += k + "\t" + v + "\n"; };
  row("mode", std::string(mode_name(report.mode)));
  row("corpus", report.corpus_name);
  row("examples", std::to_string(report.confusion.total()));
  row("tp", std::to_string(report.confusion.tp));
  row("fp", std::to_string(report.confusion.fp));
  row("fn", std::to_string(report.confusion.fn_));
  row("tn", std::to_string(report.confusion.tn));
  for (Metric m : kAllMetrics) row(std::string(metric_name(m)), tsv::format_double(report.scores.get(m)));
  if (const auto summary = member_summary(report)) {
    for (const auto& [id, f1] : report.member_f1) row("member_f1:" + id, tsv::format_double(f1));
    row("member_f1_mean", tsv::format_double(summary->mean));
    row("member_f1_stdev", tsv::format_double(summary->stdev));
    row("member_f1_n", std::to_string(summary->n));
  }
  return out;
}

}  // namespace votekit

#endif  // VOTEKIT_REPORT_HPP_
