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

#ifndef VOTEKIT_PROBABILITY_TABLE_HPP_
#define VOTEKIT_PROBABILITY_TABLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "votekit/error.hpp"
#include "votekit/tsv.hpp"

namespace votekit {

/// One member's positive-class probability per example id, in insertion order.
class ProbabilityTable {
 public:
  using Entry = std::pair<std::string, double>;

  ProbabilityTable() = default;

  ProbabilityTable(std::string member_id, std::vector<Entry> entries)
      : member_id_(std::move(member_id)), entries_(std::move(entries)) {
    index_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& [id, p] = entries_[i];
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("member '" + member_id_ + "': probability for '" + id + "' is outside [0, 1]");
      }
      if (!index_.emplace(id, i).second) {
        throw ValidationError("member '" + member_id_ + "': duplicate id '" + id + "'");
      }
    }
  }

  const std::string& member_id() const noexcept { return member_id_; }
  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  std::optional<double> find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].second;
  }

  double at(std::string_view id) const {
    if (auto p = find(id)) return *p;
    throw ValidationError("member '" + member_id_ + "' has no probability for id '" + std::string(id) + "'");
  }

  /// Subtable over `ids`, in that order. Every id must be present.
  ProbabilityTable restrict_to(std::span<const std::string> ids) const {
    std::vector<Entry> out;
    out.reserve(ids.size());
    std::vector<std::string> missing;
    for (const auto& id : ids) {
      if (auto p = find(id)) {
        out.emplace_back(id, *p);
      } else {
        missing.push_back(id);
      }
    }
    if (!missing.empty()) {
      throw ValidationError("member '" + member_id_ + "' is missing probabilities for " +
                            std::to_string(missing.size()) + " id(s), first '" + missing.front() + "'");
    }
    return ProbabilityTable(member_id_, std::move(out));
  }

  /// Error unless the table's id set equals `ids` exactly.
  void require_exact_coverage(std::span<const std::string> ids) const {
    (void)restrict_to(ids);
    if (ids.size() != entries_.size()) {
      throw ValidationError("member '" + member_id_ + "' covers " + std::to_string(entries_.size()) +
                            " ids, expected exactly " + std::to_string(ids.size()));
    }
  }

  friend bool operator==(const ProbabilityTable& a, const ProbabilityTable& b) {
    return a.member_id_ == b.member_id_ && a.entries_ == b.entries_;
  }

 private:
  std::string member_id_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Values this far outside [0, 1] are clamped; anything further is rejected.
inline constexpr double kProbabilityTolerance = 1e-9;

inline ProbabilityTable parse_probability_table(std::string_view content, const std::string& source,
                                                std::string member_id) {
  const auto doc = tsv::parse(content, source, 2);
  tsv::require_header(doc, {"id", "prob_positive"});
  std::vector<ProbabilityTable::Entry> entries;
  entries.reserve(doc.rows.size());
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& row : doc.rows) {
    const std::string& id = row.fields[0];
    if (id.empty()) throw ParseError(source, row.line, "empty id");
    double p = 0.0;
    if (!tsv::parse_double(row.fields[1], p) || !std::isfinite(p)) {
      throw ParseError(source, row.line, "'" + row.fields[1] + "' is not a decimal probability");
    }
    if (p < -kProbabilityTolerance || p > 1.0 + kProbabilityTolerance) {
      throw ValidationError(source + ":" + std::to_string(row.line) + ": probability " + row.fields[1] +
                            " for id '" + id + "' is outside [0, 1]");
    }
    p = std::clamp(p, 0.0, 1.0);
    if (auto [it, fresh] = seen.emplace(id, row.line); !fresh) {
      throw ValidationError(source + ":" + std::to_string(row.line) + ": duplicate id '" + id +
                            "' (first seen on line " + std::to_string(it->second) + ")");
    }
    entries.emplace_back(id, p);
  }
  return ProbabilityTable(std::move(member_id), std::move(entries));
}

/// Default member id for a table file: the file name up to its first dot
/// ("member3.val.probs.tsv" -> "member3").
inline std::string member_id_from_path(const std::filesystem::path& path) {
  const std::string name = path.filename().string();
  const auto dot = name.find('.');
  return dot == 0 ? name : name.substr(0, dot);
}

inline ProbabilityTable load_probability_table(const std::filesystem::path& path,
                                               std::optional<std::string> member_id = std::nullopt) {
  return parse_probability_table(tsv::read_file(path), path.string(), member_id.value_or(member_id_from_path(path)));
}

inline std::string format_probability_table(const ProbabilityTable& table) {
  std::string out = "id\tprob_positive\n";
  for (const auto& [id, p] : table.entries()) {
    out += id;
    out += '\t';
    out += tsv::format_double(p);
    out += '\n';
  }
  return out;
}

inline void save_probability_table(const std::filesystem::path& path, const ProbabilityTable& table) {
  tsv::write_file_atomic(path, format_probability_table(table));
}

}  // namespace votekit

#endif  // VOTEKIT_PROBABILITY_TABLE_HPP_
