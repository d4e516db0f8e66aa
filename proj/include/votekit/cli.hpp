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

#ifndef VOTEKIT_CLI_HPP_
#define VOTEKIT_CLI_HPP_

// Command-line front end. run() takes the argument vector and output streams
// so the whole tool can be driven in-process by tests.
//
// Exit codes: 0 success, 1 validation error, 2 I/O, parse or usage error.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "votekit/corpus.hpp"
#include "votekit/ensemble.hpp"
#include "votekit/error.hpp"
#include "votekit/members.hpp"
#include "votekit/metrics.hpp"
#include "votekit/probability_table.hpp"
#include "votekit/report.hpp"
#include "votekit/synthetic.hpp"
#include "votekit/tsv.hpp"

namespace votekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Workspace root plus the run seed. Every path a command touches must
/// resolve inside the workspace; relative paths are taken relative to it.
class RunManifest {
 public:
  RunManifest(std::filesystem::path workspace, std::uint64_t seed)
      : workspace_(std::filesystem::weakly_canonical(std::filesystem::absolute(workspace))), seed_(seed) {}

  const std::filesystem::path& workspace() const noexcept { return workspace_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    namespace fs = std::filesystem;
    const fs::path full = fs::weakly_canonical(p.is_absolute() ? p : workspace_ / p);
    const auto rel = full.lexically_relative(workspace_);
    if (rel.empty() || *rel.begin() == "..") {
      throw ValidationError("path '" + p.string() + "' lies outside the workspace " + workspace_.string());
    }
    return full;
  }

  /// Workspace-relative spelling, used in manifests so they do not depend on where the workspace lives.
  std::string relative(const std::filesystem::path& resolved) const {
    return resolved.lexically_relative(workspace_).generic_string();
  }

 private:
  std::filesystem::path workspace_;
  std::uint64_t seed_;
};

namespace detail {

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

inline VoteMode parse_mode(const std::string& text) {
  if (text == "soft") return VoteMode::Soft;
  if (text == "hard") return VoteMode::Hard;
  throw ValidationError("mode must be 'soft' or 'hard'");
}

inline std::string pad(const std::string& s, std::size_t width, bool left) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

inline std::vector<ProbabilityTable> load_tables(const RunManifest& run, const std::vector<std::string>& paths) {
  std::vector<ProbabilityTable> tables;
  for (const auto& p : paths) tables.push_back(load_external_probabilities(run.resolve(p)));
  return tables;
}

inline LabeledCorpus load_any_corpus(const RunManifest& run, const std::string& path) {
  const auto resolved = run.resolve(path);
  return load_corpus(resolved, corpus_file_is_labeled(resolved));
}

// ---- stats ----------------------------------------------------------------

struct StatsArgs {
  std::vector<std::string> corpora;
  std::string format = "text";
};

inline int cmd_stats(const RunManifest& run, const StatsArgs& args, Streams io) {
  std::vector<std::pair<std::string, ClassDistribution>> rows;
  for (const auto& path : args.corpora) {
    const auto corpus = load_any_corpus(run, path);
    rows.emplace_back(corpus.split_name(), corpus_stats(corpus));
  }
  if (rows.size() > 1) {
    std::vector<ClassDistribution> parts;
    for (const auto& [name, d] : rows) parts.push_back(d);
    rows.emplace_back("overall", combine(parts));
  }
  if (args.format == "tsv") {
    io.out << "split\tnegatives\tpositives\ttotal\tpositive_rate\n";
    for (const auto& [name, d] : rows) {
      io.out << name << '\t' << d.negatives << '\t' << d.positives << '\t' << d.total << '\t'
             << tsv::format_double(d.positive_rate) << '\n';
    }
    return kExitOk;
  }
  std::size_t name_width = 5;
  for (const auto& [name, d] : rows) name_width = std::max(name_width, name.size());
  io.out << pad("split", name_width, true) << "  " << pad("negatives", 9, false) << "  " << pad("positives", 9, false)
         << "  " << pad("total", 7, false) << "  " << pad("positive_rate", 13, false) << '\n';
  for (const auto& [name, d] : rows) {
    io.out << pad(name, name_width, true) << "  " << pad(std::to_string(d.negatives), 9, false) << "  "
           << pad(std::to_string(d.positives), 9, false) << "  " << pad(std::to_string(d.total), 7, false) << "  "
           << pad(tsv::format_fixed(d.positive_rate, 4), 13, false) << '\n';
  }
  return kExitOk;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  synthetic::Config config;
  std::optional<std::size_t> positives;
  std::string out;
};

inline int cmd_synth(const RunManifest& run, SynthArgs args, Streams io) {
  args.config.seed = run.seed();
  const auto out = run.resolve(args.out);
  const auto corpus = args.positives ? synthetic::generate_with_counts(args.config, *args.positives)
                                     : synthetic::generate(args.config);
  save_corpus(out, corpus);
  const auto d = corpus_stats(corpus);
  io.err << "wrote " << d.total << " examples (" << d.positives << " positive) to " << out.string() << '\n';
  return kExitOk;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string train;
  std::string val;
  std::size_t members = 5;
  TrainConfig config;
  std::string select = "f1";
  std::string out_dir = "members";
};

inline int cmd_train(const RunManifest& run, TrainArgs args, Streams io) {
  const auto selection = parse_selection(args.select);
  if (!selection) throw ValidationError("--select must be 'f1' or 'accuracy'");
  if (args.members < 1) throw ValidationError("--members must be at least 1");
  args.config.selection_metric = *selection;
  args.config.validate();
  const auto train_path = run.resolve(args.train);
  const auto val_path = run.resolve(args.val);
  const auto out_dir = run.resolve(args.out_dir);
  const auto train = load_corpus(train_path, true);
  const auto val = load_corpus(val_path, true);

  // Members are independent; each trains on its own thread, results are consumed in member order.
  std::vector<std::future<TrainedMember>> jobs;
  for (std::size_t k = 0; k < args.members; ++k) {
    TrainConfig cfg = args.config;
    cfg.seed = run.seed() + k;
    jobs.push_back(std::async(std::launch::async, [&train, &val, cfg, k] {
      return train_member(train, val, cfg, "member" + std::to_string(k));
    }));
  }

  nlohmann::ordered_json manifest;
  manifest["workspace_seed"] = run.seed();
  manifest["train"] = run.relative(train_path);
  manifest["validation"] = run.relative(val_path);
  manifest["config"] = {{"epochs", args.config.epochs},
                        {"learning_rate", args.config.learning_rate},
                        {"l2", args.config.l2},
                        {"select", std::string(selection_name(args.config.selection_metric))}};
  manifest["members"] = nlohmann::ordered_json::array();

  io.out << "member\tseed\tselected_epoch\tval_f1\tval_accuracy\n";
  for (std::size_t k = 0; k < args.members; ++k) {
    const TrainedMember member = jobs[k].get();
    const std::string id = member.model.member_id;
    const auto model_path = out_dir / (id + ".model");
    const auto history_path = out_dir / (id + ".history.tsv");
    const auto probs_path = out_dir / (id + ".val.probs.tsv");
    save_model(model_path, member.model);
    tsv::write_file_atomic(history_path, format_history(member.history, member.selected_epoch));
    save_probability_table(probs_path, predict_proba(member.model, val));
    const auto& rec = member.history.records[member.selected_epoch];
    io.out << id << '\t' << run.seed() + k << '\t' << member.selected_epoch << '\t' << tsv::format_double(rec.val_f1)
           << '\t' << tsv::format_double(rec.val_accuracy) << '\n';
    manifest["members"].push_back({{"id", id},
                                   {"seed", run.seed() + k},
                                   {"selected_epoch", member.selected_epoch},
                                   {"model", run.relative(model_path)},
                                   {"history", run.relative(history_path)},
                                   {"val_probs", run.relative(probs_path)}});
  }
  tsv::write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

// ---- predict --------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::vector<std::string> corpora;
  std::string out;
  std::string member_id;
};

inline int cmd_predict(const RunManifest& run, const PredictArgs& args, Streams io) {
  auto model = load_model(run.resolve(args.model));
  if (!args.member_id.empty()) model.member_id = args.member_id;
  std::vector<ProbabilityTable::Entry> entries;
  for (const auto& path : args.corpora) {
    const auto table = predict_proba(model, load_any_corpus(run, path));
    entries.insert(entries.end(), table.entries().begin(), table.entries().end());
  }
  const ProbabilityTable merged(model.member_id, std::move(entries));
  const auto out = run.resolve(args.out);
  save_probability_table(out, merged);
  io.err << "wrote " << merged.size() << " probabilities for " << merged.member_id() << " to " << out.string() << '\n';
  return kExitOk;
}

// ---- fit-weights ----------------------------------------------------------

struct FitArgs {
  std::string val;
  std::vector<std::string> probs;
  std::string out;
};

inline std::vector<ProbabilityTable> restrict_all(const std::vector<ProbabilityTable>& tables,
                                                  const LabeledCorpus& corpus) {
  const auto ids = corpus.ids();
  std::vector<ProbabilityTable> out;
  for (const auto& t : tables) out.push_back(t.restrict_to(ids));
  return out;
}

inline int cmd_fit_weights(const RunManifest& run, const FitArgs& args, Streams io) {
  const auto val = load_corpus(run.resolve(args.val), true);
  const auto tables = restrict_all(load_tables(run, args.probs), val);
  const auto spec = fit_weights(tables, val);
  const std::string text = format_ensemble_spec(spec);
  if (!args.out.empty()) tsv::write_file_atomic(run.resolve(args.out), text);
  io.out << text;
  return kExitOk;
}

// ---- ensemble -------------------------------------------------------------

struct EnsembleArgs {
  std::string val;
  std::string eval;
  std::vector<std::string> probs;
  std::string mode = "soft";
  std::string spec;
  std::string out_dir = "ensemble";
};

inline int cmd_ensemble(const RunManifest& run, const EnsembleArgs& args, Streams io) {
  const VoteMode mode = parse_mode(args.mode);
  const auto val = load_corpus(run.resolve(args.val), true);
  const auto target = args.eval.empty() ? val : load_any_corpus(run, args.eval);
  const auto out_dir = run.resolve(args.out_dir);
  const auto tables = load_tables(run, args.probs);
  const auto val_tables = restrict_all(tables, val);

  const auto member_f1 = member_f1_scores(val_tables, val);
  std::vector<std::string> member_ids;
  for (const auto& t : val_tables) member_ids.push_back(t.member_id());

  EnsembleSpec spec;
  if (!args.spec.empty()) {
    spec = load_ensemble_spec(run.resolve(args.spec));
  } else if (mode == VoteMode::Soft) {
    spec = fit_weights(val_tables, val);
    save_ensemble_spec(out_dir / "spec.tsv", spec);
  } else {
    spec = EnsembleSpec::uniform(member_ids);
  }

  const auto ids = target.ids();
  const auto verdicts = predict_ensemble(spec, tables, ids, mode);
  save_verdicts(out_dir / "verdicts.tsv", verdicts);

  if (!target.labeled()) {
    io.err << "corpus '" << target.split_name() << "' is unlabeled; wrote verdicts only\n";
    return kExitOk;
  }
  std::map<std::string, ClassLabel> predictions;
  for (const auto& v : verdicts) predictions.emplace(v.id, v.label);
  EvaluationReport report;
  report.mode = mode;
  report.corpus_name = target.split_name();
  report.confusion = confusion_matrix(predictions, target.labels_by_id());
  report.scores = all_scores(report.confusion);
  for (std::size_t i = 0; i < member_ids.size(); ++i) report.member_f1.emplace_back(member_ids[i], member_f1[i]);
  const auto text = render_report_text(report);
  tsv::write_file_atomic(out_dir / "report.txt", text);
  tsv::write_file_atomic(out_dir / "report.tsv", render_report_tsv(report));
  io.out << text;
  return kExitOk;
}

// ---- report ---------------------------------------------------------------

struct ReportArgs {
  std::string verdicts;
  std::string corpus;
  std::string spec;
  std::string mode = "soft";
  std::string format = "text";
};

/// Re-renders a report from a verdict file. With --spec, the spec weights are
/// shown as the member F1 scores (they are F1s when produced by fit-weights).
inline int cmd_report(const RunManifest& run, const ReportArgs& args, Streams io) {
  EvaluationReport report;
  report.mode = parse_mode(args.mode);
  const auto corpus = load_corpus(run.resolve(args.corpus), true);
  report.corpus_name = corpus.split_name();
  std::map<std::string, ClassLabel> predictions;
  for (const auto& v : load_verdicts(run.resolve(args.verdicts))) predictions.emplace(v.id, v.label);
  report.confusion = confusion_matrix(predictions, corpus.labels_by_id());
  report.scores = all_scores(report.confusion);
  if (!args.spec.empty()) {
    const auto spec = load_ensemble_spec(run.resolve(args.spec));
    for (std::size_t i = 0; i < spec.size(); ++i) report.member_f1.emplace_back(spec.members()[i], spec.weights()[i]);
  }
  io.out << (args.format == "tsv" ? render_report_tsv(report) : render_report_text(report));
  return kExitOk;
}

}  // namespace detail

/// Runs the tool. args[0] is the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"votekit: F1-weighted soft-voting ensembles for binary text classification"};
  app.require_subcommand(1);
  std::string workspace = ".";
  std::uint64_t seed = 0;
  app.add_option("--workspace", workspace, "Root directory; every path must resolve inside it")->capture_default_str();
  app.add_option("--seed", seed, "Base seed for data generation and training")->capture_default_str();

  detail::StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Class distribution of labeled corpora");
  stats_cmd->add_option("corpus", stats.corpora, "Corpus TSV files")->required();
  stats_cmd->add_option("--format", stats.format)->check(CLI::IsMember({"text", "tsv"}))->capture_default_str();

  detail::SynthArgs synth;
  synth.config.split_name = "";
  auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic labeled corpus");
  synth_cmd->add_option("--size", synth.config.size, "Number of examples")->required();
  synth_cmd->add_option("--positive-rate", synth.config.positive_rate)->capture_default_str();
  synth_cmd->add_option("--positives", synth.positives, "Exact positive count (overrides --positive-rate)");
  synth_cmd->add_option("--signal-rate", synth.config.signal_rate)->capture_default_str();
  synth_cmd->add_option("--flip-rate", synth.config.flip_rate)->capture_default_str();
  synth_cmd->add_option("--min-tokens", synth.config.min_tokens)->capture_default_str();
  synth_cmd->add_option("--max-tokens", synth.config.max_tokens)->capture_default_str();
  synth_cmd->add_option("--id-prefix", synth.config.id_prefix)->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output corpus TSV")->required();

  detail::TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train seeded members with best-epoch selection");
  train_cmd->add_option("--train", train.train, "Labeled training corpus")->required();
  train_cmd->add_option("--val", train.val, "Labeled validation corpus")->required();
  train_cmd->add_option("--members", train.members)->capture_default_str();
  train_cmd->add_option("--epochs", train.config.epochs)->capture_default_str();
  train_cmd->add_option("--learning-rate", train.config.learning_rate)->capture_default_str();
  train_cmd->add_option("--l2", train.config.l2)->capture_default_str();
  train_cmd->add_option("--select", train.select, "Epoch selection metric")
      ->check(CLI::IsMember({"f1", "accuracy"}))
      ->capture_default_str();
  train_cmd->add_option("--out-dir", train.out_dir)->capture_default_str();

  detail::PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Write a member's probability table for corpora");
  predict_cmd->add_option("--model", predict.model)->required();
  predict_cmd->add_option("--corpus", predict.corpora)->required();
  predict_cmd->add_option("--out", predict.out)->required();
  predict_cmd->add_option("--member-id", predict.member_id, "Override the member id stored in the model");

  detail::FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit-weights", "Set each member's weight to its validation F1");
  fit_cmd->add_option("--val", fit.val)->required();
  fit_cmd->add_option("--probs", fit.probs, "Member probability tables")->required();
  fit_cmd->add_option("--out", fit.out, "Ensemble spec TSV");

  detail::EnsembleArgs ens;
  auto* ens_cmd = app.add_subcommand("ensemble", "Fit weights, vote, and report");
  ens_cmd->add_option("--val", ens.val)->required();
  ens_cmd->add_option("--eval", ens.eval, "Corpus to evaluate (defaults to --val)");
  ens_cmd->add_option("--probs", ens.probs, "Member probability tables covering --val and --eval")->required();
  ens_cmd->add_option("--mode", ens.mode)->check(CLI::IsMember({"soft", "hard"}))->capture_default_str();
  ens_cmd->add_option("--spec", ens.spec, "Use this ensemble spec instead of fitting one");
  ens_cmd->add_option("--out-dir", ens.out_dir)->capture_default_str();

  detail::ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Render an evaluation report from a verdict file");
  report_cmd->add_option("--verdicts", report.verdicts)->required();
  report_cmd->add_option("--corpus", report.corpus)->required();
  report_cmd->add_option("--spec", report.spec);
  report_cmd->add_option("--mode", report.mode)->check(CLI::IsMember({"soft", "hard"}))->capture_default_str();
  report_cmd->add_option("--format", report.format)->check(CLI::IsMember({"text", "tsv"}))->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitIo;
  }

  const detail::Streams io{out, err};
  try {
    const RunManifest manifest(workspace, seed);
    if (*stats_cmd) return detail::cmd_stats(manifest, stats, io);
    if (*synth_cmd) {
      if (synth.config.split_name.empty()) synth.config.split_name = std::filesystem::path(synth.out).stem().string();
      return detail::cmd_synth(manifest, synth, io);
    }
    if (*train_cmd) return detail::cmd_train(manifest, train, io);
    if (*predict_cmd) return detail::cmd_predict(manifest, predict, io);
    if (*fit_cmd) return detail::cmd_fit_weights(manifest, fit, io);
    if (*ens_cmd) return detail::cmd_ensemble(manifest, ens, io);
    if (*report_cmd) return detail::cmd_report(manifest, report, io);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitIo;
}

}  // namespace votekit::cli

#endif  // VOTEKIT_CLI_HPP_
