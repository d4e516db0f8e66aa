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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "votekit/features.hpp"
#include "votekit/members.hpp"
#include "votekit/random.hpp"

using namespace votekit;

namespace {

void write(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

const std::vector<std::string> kFiller{"today", "really", "so", "that", "was", "the", "night", "again", "just", "ok"};

/// Positives always contain "hit", negatives always contain "news"; filler is shared.
LabeledCorpus toy_corpus(const std::string& name, std::size_t size, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledExample> ex;
  for (std::size_t i = 0; i < size; ++i) {
    const bool positive = rng.below(4) == 0 || i == 0;
    std::string text = positive ? "hit" : "news";
    const auto extra = 2 + rng.below(5);
    for (std::uint64_t k = 0; k < extra; ++k) text += " " + kFiller[rng.below(kFiller.size())];
    ex.push_back({name + std::to_string(i), text, label_from_bool(positive)});
  }
  ex.push_back({name + "-neg", "news " + kFiller[0], ClassLabel::NonSelfReported});
  return LabeledCorpus(name, std::move(ex), true);
}

std::set<std::string> tokens_of(const LabeledCorpus& c, ClassLabel label) {
  std::set<std::string> out;
  for (const auto& ex : c.examples()) {
    if (*ex.label != label) continue;
    std::string word;
    for (char ch : ex.text + " ") {
      if (ch == ' ') {
        if (!word.empty()) out.insert(word);
        word.clear();
      } else {
        word += ch;
      }
    }
  }
  return out;
}

}  // namespace

// ---- featurize ------------------------------------------------------------

TEST(Fnv1a, PublishedTestVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Featurize, UnigramsPlusBigrams) {
  const auto fv = featurize("I am scared");
  EXPECT_EQ(fv.size(), 5u);
  for (const auto& [j, v] : fv.entries()) {
    EXPECT_LT(j, kFeatureDim);
    EXPECT_EQ(v, 1.0);
  }
  std::set<std::uint32_t> expected{feature_index("i"), feature_index("am"), feature_index("scared"),
                                   feature_index("i am"), feature_index("am scared")};
  std::set<std::uint32_t> got;
  for (const auto& [j, v] : fv.entries()) got.insert(j);
  EXPECT_EQ(got, expected);
}

TEST(Featurize, EmptyTextGivesEmptyVector) {
  EXPECT_TRUE(featurize("").empty());
  EXPECT_TRUE(featurize("  ...!!  ").empty());
}

TEST(Featurize, CaseFolds) {
  EXPECT_EQ(featurize("Scared"), featurize("scared"));
  EXPECT_EQ(featurize("ÇA VA"), featurize("ça va"));
  EXPECT_EQ(featurize("ΦΟΒΟΣ"), featurize("φοβοσ"));
}

TEST(Featurize, TermFrequenciesAccumulate) {
  const auto fv = featurize("no no no");
  // "no" x3 and "no no" x2
  ASSERT_EQ(fv.size(), 2u);
  for (const auto& [j, v] : fv.entries()) EXPECT_EQ(v, j == feature_index("no") ? 3.0 : 2.0);
}

TEST(Tokenize, SplitsOnUnicodePunctuationAndSpace) {
  EXPECT_EQ(tokenize("Ça VA\u2014bien"), (std::vector<std::string>{"ça", "va", "bien"}));
  EXPECT_EQ(tokenize("don't #MeToo @someone"), (std::vector<std::string>{"don", "t", "metoo", "someone"}));
  EXPECT_EQ(tokenize("a b　c“d”"), (std::vector<std::string>{"a", "b", "c", "d"}));
  EXPECT_EQ(tokenize("emoji\U0001F622 ok"), (std::vector<std::string>{"emoji\U0001F622", "ok"}));
}

TEST(Tokenize, InvalidUtf8BytesStayInTokens) {
  const std::string bad = std::string("ab") + char(0xFF) + "c d";
  const auto toks = tokenize(bad);
  ASSERT_EQ(toks.size(), 2u);
  EXPECT_EQ(toks[0], bad.substr(0, 4));
}

TEST(Featurize, PureFunction) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    std::string text;
    for (int k = 0; k < 8; ++k) text += kFiller[rng.below(kFiller.size())] + " ";
    EXPECT_EQ(featurize(text), featurize(std::string(text)));
  }
}

// ---- loss and gradient ----------------------------------------------------

TEST(Loss, ZeroModelIsLnTwo) {
  const auto model = MemberModel::zero("z");
  std::vector<TrainingExample> batch{{featurize("hit me"), ClassLabel::SelfReported},
                                     {featurize("news"), ClassLabel::NonSelfReported}};
  const auto lg = loss_and_gradient(model, batch, 0.0);
  EXPECT_NEAR(lg.loss, std::log(2.0), 1e-15);
  EXPECT_EQ(lg.weight_gradient.size(), kFeatureDim);
}

TEST(Loss, EmptyBatchIsAnError) {
  EXPECT_THROW((void)loss_and_gradient(MemberModel::zero("z"), {}, 0.0), ValidationError);
}

TEST(Loss, StableForLargeScores) {
  auto model = MemberModel::zero("big");
  model.bias = 1000.0;
  std::vector<TrainingExample> batch{{featurize("x"), ClassLabel::NonSelfReported},
                                     {featurize("y"), ClassLabel::SelfReported}};
  auto lg = loss_and_gradient(model, batch, 0.0);
  EXPECT_NEAR(lg.loss, 500.0, 1e-9);
  model.bias = -1000.0;
  lg = loss_and_gradient(model, batch, 0.0);
  EXPECT_NEAR(lg.loss, 500.0, 1e-9);
  EXPECT_TRUE(std::isfinite(lg.bias_gradient));
}

TEST(Loss, DuplicatingBatchLeavesLossAndGradientUnchanged) {
  Rng rng(10);
  auto model = MemberModel::zero("m");
  std::vector<TrainingExample> batch;
  for (int i = 0; i < 6; ++i) {
    batch.push_back({featurize(kFiller[rng.below(kFiller.size())] + " " + kFiller[rng.below(kFiller.size())]),
                     label_from_bool(i % 2 == 0)});
  }
  for (const auto& ex : batch)
    for (const auto& [j, v] : ex.features.entries()) model.weights[j] = rng.uniform() - 0.5;
  auto doubled = batch;
  doubled.insert(doubled.end(), batch.begin(), batch.end());
  const auto a = loss_and_gradient(model, batch, 0.01);
  const auto b = loss_and_gradient(model, doubled, 0.01);
  EXPECT_NEAR(a.loss, b.loss, 1e-14);
  EXPECT_NEAR(a.bias_gradient, b.bias_gradient, 1e-15);
  for (const auto& ex : batch)
    for (const auto& [j, v] : ex.features.entries()) EXPECT_NEAR(a.weight_gradient[j], b.weight_gradient[j], 1e-15);
}

TEST(Loss, GradientMatchesCentralDifferences) {
  Rng rng(2024);
  const std::vector<std::string> words{"hit", "me", "news", "report", "scared", "today", "he", "left", "police", "so"};
  double worst = 0.0;
  for (int instance = 0; instance < 20; ++instance) {
    auto model = MemberModel::zero("fd");
    model.bias = rng.uniform() - 0.5;
    std::vector<TrainingExample> batch;
    std::vector<oracle::SparseExample> plain;
    std::set<std::uint32_t> coords;
    for (int i = 0; i < 10; ++i) {
      std::string text;
      const auto len = 1 + rng.below(6);
      for (std::uint64_t k = 0; k < len; ++k) text += words[rng.below(words.size())] + " ";
      const auto label = label_from_bool(rng.below(2) == 1);
      batch.push_back({featurize(text), label});
      oracle::SparseExample ex;
      ex.y = to_int(label);
      for (const auto& [j, v] : batch.back().features.entries()) {
        ex.x.emplace_back(j, v);
        coords.insert(j);
      }
      plain.push_back(ex);
    }
    for (auto j : coords) model.weights[j] = rng.uniform() - 0.5;
    for (int k = 0; k < 5; ++k) {
      const auto j = static_cast<std::uint32_t>(rng.below(kFeatureDim));
      model.weights[j] = rng.uniform() - 0.5;
      coords.insert(j);
    }
    const double l2 = 0.01 * rng.uniform();
    const auto lg = loss_and_gradient(model, batch, l2);
    EXPECT_NEAR(lg.loss, oracle::naive_loss(model.weights, model.bias, plain, l2), 1e-12);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8}); };
    for (auto j : coords) {
      const double fd = oracle::central_difference(model.weights, model.bias, plain, l2, j, 1e-5);
      worst = std::max(worst, rel(lg.weight_gradient[j], fd));
    }
    const double fd_bias = oracle::central_difference(model.weights, model.bias, plain, l2, kFeatureDim, 1e-5);
    worst = std::max(worst, rel(lg.bias_gradient, fd_bias));
  }
  EXPECT_LT(worst, 1e-4);
}

// ---- epoch selection ------------------------------------------------------

EpochHistory f1_trace(const std::vector<double>& f1s) {
  EpochHistory h;
  for (std::size_t i = 0; i < f1s.size(); ++i) h.records.push_back({i, 0.0, f1s[i], 0.5});
  return h;
}

TEST(SelectBestEpoch, EarliestTieWins) {
  EXPECT_EQ(select_best_epoch(f1_trace({0.70, 0.75, 0.74, 0.75}), SelectionMetric::F1), 1u);
  EXPECT_EQ(select_best_epoch(f1_trace({0.3}), SelectionMetric::F1), 0u);
  EXPECT_THROW((void)select_best_epoch(EpochHistory{}, SelectionMetric::F1), ValidationError);
}

TEST(SelectBestEpoch, MatchesLinearScanOracle) {
  Rng rng(55);
  for (int trial = 0; trial < 500; ++trial) {
    EpochHistory h;
    std::vector<double> f1, acc;
    for (std::size_t e = 0; e < 20; ++e) {
      f1.push_back(static_cast<double>(rng.below(8)) / 8.0);
      acc.push_back(static_cast<double>(rng.below(8)) / 8.0);
      h.records.push_back({e, 0.0, f1.back(), acc.back()});
    }
    EXPECT_EQ(select_best_epoch(h, SelectionMetric::F1), oracle::linear_scan_argmax(f1));
    EXPECT_EQ(select_best_epoch(h, SelectionMetric::Accuracy), oracle::linear_scan_argmax(acc));
  }
}

TEST(SelectBestEpoch, ImbalancedValidationSplitsF1FromAccuracy) {
  // 100 validation tweets, 5 positive. Epoch 0 predicts everything negative;
  // epoch 1 finds 4 positives at the cost of 6 false alarms.
  const ConfusionMatrix all_negative{0, 0, 5, 95};
  const ConfusionMatrix eager{4, 6, 1, 89};
  EpochHistory h;
  for (const auto& [e, cm] : std::vector<std::pair<std::size_t, ConfusionMatrix>>{{0, all_negative}, {1, eager}}) {
    h.records.push_back({e, 0.0, score_from_confusion(cm, Metric::F1).value,
                         score_from_confusion(cm, Metric::Accuracy).value});
  }
  EXPECT_EQ(h.records[0].val_accuracy, 0.95);
  EXPECT_EQ(h.records[1].val_accuracy, 0.93);
  EXPECT_EQ(select_best_epoch(h, SelectionMetric::Accuracy), 0u);
  EXPECT_EQ(select_best_epoch(h, SelectionMetric::F1), 1u);
}

// ---- training -------------------------------------------------------------

TEST(TrainMember, SeparableToyReachesPerfectF1) {
  const auto train = toy_corpus("tr", 200, 1);
  const auto val = toy_corpus("va", 80, 2);
  // Separability: the class-marker tokens never cross classes.
  const auto pos = tokens_of(train, ClassLabel::SelfReported);
  const auto neg = tokens_of(train, ClassLabel::NonSelfReported);
  ASSERT_TRUE(pos.count("hit") && !neg.count("hit"));
  ASSERT_TRUE(neg.count("news") && !pos.count("news"));

  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.seed = 3;
  const auto member = train_member(train, val, cfg, "toy");
  EXPECT_EQ(member.history.records.size(), 10u);
  EXPECT_EQ(member.history.records[member.selected_epoch].val_f1, 1.0);

  const auto table = predict_proba(member.model, val);
  ASSERT_EQ(table.size(), val.size());
  std::map<std::string, ClassLabel> preds;
  for (std::size_t i = 0; i < val.size(); ++i) {
    EXPECT_EQ(table.entries()[i].first, val[i].id);
    preds.emplace(val[i].id, hard_label(table.entries()[i].second));
  }
  EXPECT_EQ(score_from_confusion(confusion_matrix(preds, val.labels_by_id()), Metric::F1).value, 1.0);

  const auto own = predict_proba(member.model, train);
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (*train[i].label == ClassLabel::SelfReported) {
      EXPECT_GT(own.entries()[i].second, 0.5);
    }
  }
}

TEST(TrainMember, DeterministicForSeed) {
  const auto train = toy_corpus("tr", 150, 4);
  const auto val = toy_corpus("va", 50, 5);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 11;
  const auto a = train_member(train, val, cfg);
  const auto b = train_member(train, val, cfg);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.history, b.history);
  cfg.seed = 12;
  const auto c = train_member(train, val, cfg);
  EXPECT_NE(a.history.records[0].train_loss, c.history.records[0].train_loss);
}

TEST(TrainMember, SelectedEpochDominatesHistory) {
  const auto train = toy_corpus("tr", 120, 6);
  const auto val = toy_corpus("va", 40, 7);
  for (auto metric : {SelectionMetric::F1, SelectionMetric::Accuracy}) {
    TrainConfig cfg;
    cfg.epochs = 8;
    cfg.selection_metric = metric;
    const auto m = train_member(train, val, cfg);
    for (const auto& r : m.history.records) {
      EXPECT_GE(m.history.records[m.selected_epoch].metric(metric), r.metric(metric));
      EXPECT_GE(r.val_f1, 0.0);
      EXPECT_LE(r.val_accuracy, 1.0);
    }
  }
}

/// Training data where "hit me" marks positives, and a validation set whose
/// few positives are outnumbered by "hit me again" negatives that look the
/// same to the model.
std::pair<LabeledCorpus, LabeledCorpus> imbalanced_selection_corpora() {
  std::vector<LabeledExample> tr, va;
  for (int i = 0; i < 10; ++i) tr.push_back({"p" + std::to_string(i), "hit me", ClassLabel::SelfReported});
  for (int i = 0; i < 90; ++i) tr.push_back({"n" + std::to_string(i), "news today", ClassLabel::NonSelfReported});
  for (int i = 0; i < 2; ++i) va.push_back({"vp" + std::to_string(i), "hit me", ClassLabel::SelfReported});
  for (int i = 0; i < 3; ++i) va.push_back({"vh" + std::to_string(i), "hit me again", ClassLabel::NonSelfReported});
  for (int i = 0; i < 95; ++i) va.push_back({"vn" + std::to_string(i), "news today", ClassLabel::NonSelfReported});
  return {LabeledCorpus("train", std::move(tr), true), LabeledCorpus("val", std::move(va), true)};
}

TEST(TrainMember, F1AndAccuracySelectionPickDifferentSnapshots) {
  const auto [train, val] = imbalanced_selection_corpora();
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.learning_rate = 0.005;
  cfg.seed = 1;
  cfg.selection_metric = SelectionMetric::F1;
  const auto by_f1 = train_member(train, val, cfg);
  cfg.selection_metric = SelectionMetric::Accuracy;
  const auto by_acc = train_member(train, val, cfg);
  EXPECT_EQ(by_f1.history, by_acc.history);
  EXPECT_NE(by_f1.selected_epoch, by_acc.selected_epoch);
  EXPECT_NE(by_f1.model, by_acc.model);
  // Accuracy keeps an all-negative epoch (98/100); F1 keeps one that finds the positives.
  EXPECT_EQ(by_acc.history.records[by_acc.selected_epoch].val_f1, 0.0);
  EXPECT_GT(by_f1.history.records[by_f1.selected_epoch].val_f1, 0.5);
}

TEST(TrainMember, RejectsSingleClassTrainingAndBadConfig) {
  std::vector<LabeledExample> one{{"a", "x", ClassLabel::NonSelfReported}, {"b", "y", ClassLabel::NonSelfReported}};
  const LabeledCorpus train("t", one, true);
  EXPECT_THROW((void)train_member(train, train, TrainConfig{}), ValidationError);
  const auto ok = toy_corpus("t", 20, 1);
  TrainConfig bad;
  bad.epochs = 0;
  EXPECT_THROW((void)train_member(ok, ok, bad), ValidationError);
  bad = TrainConfig{};
  bad.learning_rate = 0.0;
  EXPECT_THROW((void)train_member(ok, ok, bad), ValidationError);
}

TEST(TrainMember, DivergenceIsReported) {
  const auto train = toy_corpus("t", 40, 2);
  TrainConfig cfg;
  cfg.learning_rate = 1e308;
  cfg.l2 = 0.0;
  EXPECT_THROW((void)train_member(train, train, cfg), ValidationError);
}

// ---- prediction and files -------------------------------------------------

TEST(PredictProba, ZeroModelIsOneHalf) {
  const auto c = toy_corpus("c", 10, 3);
  const auto table = predict_proba(MemberModel::zero("z"), c);
  ASSERT_EQ(table.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(table.entries()[i].first, c[i].id);
    EXPECT_EQ(table.entries()[i].second, 0.5);
  }
}

TEST(PredictProba, StrictlyInsideUnitInterval) {
  auto model = MemberModel::zero("sat");
  const auto c = toy_corpus("c", 10, 3);
  for (double b : {-800.0, -40.0, 40.0, 800.0}) {
    model.bias = b;
    for (const auto& [id, p] : predict_proba(model, c).entries()) {
      EXPECT_GT(p, 0.0);
      EXPECT_LT(p, 1.0);
    }
  }
}

TEST(ExternalProbabilities, LoadsAndValidates) {
  TempDir dir;
  write(dir / "m.tsv", "id\tprob_positive\nt1\t0.91\nt2\t0.07\n");
  const auto t = load_external_probabilities(dir / "m.tsv");
  EXPECT_EQ(t.member_id(), "m");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.at("t1"), 0.91);

  write(dir / "r.tsv", "id\tprob_positive\nt1\t0.5\nt3\t1.2\n");
  try {
    (void)load_external_probabilities(dir / "r.tsv");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("t3"), std::string::npos);
  }

  write(dir / "tol.tsv", "id\tprob_positive\na\t1.0000000001\nb\t-0.0000000005\n");
  const auto tol = load_external_probabilities(dir / "tol.tsv");
  EXPECT_EQ(tol.at("a"), 1.0);
  EXPECT_EQ(tol.at("b"), 0.0);

  write(dir / "dup.tsv", "id\tprob_positive\na\t0.1\na\t0.2\n");
  EXPECT_THROW((void)load_external_probabilities(dir / "dup.tsv"), ValidationError);

  write(dir / "bad.tsv", "id\tprob_positive\na\t0.1\nb\n");
  try {
    (void)load_external_probabilities(dir / "bad.tsv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ExternalProbabilities, WrittenTablesReloadExactly) {
  TempDir dir;
  Rng rng(9);
  std::vector<ProbabilityTable::Entry> e;
  for (int i = 0; i < 200; ++i) e.emplace_back("id" + std::to_string(i), rng.uniform());
  const ProbabilityTable table("exp", e);
  save_probability_table(dir / "exp.probs.tsv", table);
  EXPECT_EQ(load_external_probabilities(dir / "exp.probs.tsv"), table);
}

TEST(ModelFile, RoundTripsExactly) {
  TempDir dir;
  const auto train = toy_corpus("tr", 60, 8);
  TrainConfig cfg;
  cfg.epochs = 3;
  const auto m = train_member(train, train, cfg, "rt").model;
  save_model(dir / "rt.model", m);
  EXPECT_EQ(load_model(dir / "rt.model"), m);
  write(dir / "bad.model", "votekit-model\t2\n");
  EXPECT_THROW((void)load_model(dir / "bad.model"), ParseError);
}
