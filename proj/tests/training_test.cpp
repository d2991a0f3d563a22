// Copyright 2026 The morphalign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "test_util.hpp"

namespace morphalign {
namespace {

Bitext random_corpus(std::mt19937_64& rng, std::size_t pairs) {
  std::vector<std::string> src, tgt;
  const std::vector<std::string> sv{"A", "B", "C", "ne-", "-ta"}, tv{"a", "b", "c", "d"};
  std::uniform_int_distribution<int> len(1, 3);
  for (std::size_t k = 0; k < pairs; ++k) {
    std::string s, t;
    for (int i = len(rng); i > 0; --i) s += sv[rng() % sv.size()] + " ";
    for (int j = len(rng); j > 0; --j) t += tv[rng() % tv.size()] + " ";
    src.push_back(s);
    tgt.push_back(t);
  }
  return testing::bitext_from_lines(src, tgt);
}

/// One EM step by enumerating every alignment of every pair.
struct OracleStep {
  std::map<std::pair<TokenId, TokenId>, double> t;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, double> a;
  double loglik = 0.0;
};

OracleStep oracle_em_step(const Bitext& b, const ModelParams& p, Stage s) {
  std::map<std::pair<TokenId, TokenId>, double> tc;
  std::map<TokenId, double> tz;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, double> ac;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, double> az;
  OracleStep out;
  const bool null = p.config.use_null;
  for (const auto& pair : b.pairs) {
    const std::size_t l = pair.source.size(), m = pair.target.size();
    std::vector<std::pair<std::vector<Cept>, double>> all;
    double z = 0.0;
    testing::enumerate_alignments(l, m, null, [&](const std::vector<Cept>& a) {
      const double w = testing::oracle_joint_lexical(p, s, pair.source, pair.target, a);
      all.emplace_back(a, w);
      z += w;
    });
    out.loglik += std::log(z);
    for (const auto& [a, w] : all) {
      for (std::size_t j = 1; j <= m; ++j) {
        const Cept i = a[j - 1];
        const TokenId e = i ? pair.source[i - 1] : kNullId, f = pair.target[j - 1];
        tc[{e, f}] += w / z;
        tz[e] += w / z;
        ac[{i, j, l, m}] += w / z;
        az[{j, l, m}] += w / z;
      }
    }
  }
  for (const auto& [k, c] : tc) out.t[k] = c / tz[k.first];
  for (const auto& [k, c] : ac) {
    const auto [i, j, l, m] = k;
    out.a[k] = c / az[{j, l, m}];
  }
  return out;
}

TEST(M1Em, HandExecutedStepFavoursTheSharedTarget) {
  auto b = testing::bitext_from_lines({"A B", "A C"}, {"a b", "a c"});
  ModelConfig cfg;
  cfg.use_null = false;
  auto p = init_uniform(b, cfg);
  m1_em_iteration(b, p);
  const auto A = b.src_vocab.encode("A");
  const auto& t = *p.ttable[0];
  // Posteriors are all 1/2, so c(a|A) = 1 and c(b|A) = c(c|A) = 1/2.
  EXPECT_DOUBLE_EQ(t.prob(A, b.tgt_vocab.encode("a")), 0.5);
  EXPECT_DOUBLE_EQ(t.prob(A, b.tgt_vocab.encode("b")), 0.25);
  EXPECT_GT(t.prob(A, b.tgt_vocab.encode("a")), t.prob(A, b.tgt_vocab.encode("b")));
}

TEST(M1Em, DegenerateSinglePairWithoutNull) {
  auto b = testing::bitext_from_lines({"x"}, {"y"});
  ModelConfig cfg;
  cfg.use_null = false;
  auto p = init_uniform(b, cfg);
  for (int it = 0; it < 3; ++it) EXPECT_DOUBLE_EQ(m1_em_iteration(b, p), 0.0);
  EXPECT_DOUBLE_EQ(p.ttable[0]->prob(1, 1), 1.0);
}

TEST(M1Em, MatchesBruteForceEnumeration) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto b = random_corpus(rng, 6);
    ModelConfig cfg;
    cfg.use_null = trial % 3 != 0;
    auto p = init_uniform(b, cfg);
    m1_em_iteration(b, p);  // move away from the uniform start
    const auto oracle = oracle_em_step(b, p, Stage::M1);
    const double ll = m1_em_iteration(b, p);
    EXPECT_NEAR(ll, oracle.loglik, 1e-9);
    for (const auto& [k, v] : oracle.t) EXPECT_NEAR(p.ttable[0]->prob(k.first, k.second), v, 1e-12);
  }
}

TEST(M2Em, MatchesBruteForceEnumeration) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    auto b = random_corpus(rng, 6);
    ModelConfig cfg;
    cfg.use_null = trial % 3 != 0;
    auto p = init_uniform(b, cfg);
    m1_em_iteration(b, p);
    m2_em_iteration(b, p);
    const auto oracle = oracle_em_step(b, p, Stage::M2);
    const double ll = m2_em_iteration(b, p);
    EXPECT_NEAR(ll, oracle.loglik, 1e-9);
    for (const auto& [k, v] : oracle.t) EXPECT_NEAR(p.ttable[1]->prob(k.first, k.second), v, 1e-12);
    for (const auto& [k, v] : oracle.a) {
      const auto [i, j, l, m] = k;
      EXPECT_NEAR(p.atable->prob(i, j, l, m), v, 1e-12);
    }
  }
}

TEST(M2Em, UniformAlignmentTableReproducesModelOnePosteriors) {
  auto b = testing::synth_bitext();
  auto p1 = init_uniform(b);
  m1_em_iteration(b, p1);
  auto p2 = p1;
  m1_em_iteration(b, p1);
  m2_em_iteration(b, p2);
  const auto& t1 = p1.ttable[0]->values();
  const auto& t2 = p2.ttable[1]->values();
  ASSERT_EQ(t1.size(), t2.size());
  for (std::size_t k = 0; k < t1.size(); ++k) EXPECT_NEAR(t1[k], t2[k], 1e-12);
}

TEST(LexicalEm, LikelihoodIsNonDecreasingOnTheFixture) {
  auto b = testing::synth_bitext();
  auto p = init_uniform(b);
  std::vector<double> ll;
  for (int it = 0; it < 5; ++it) ll.push_back(m1_em_iteration(b, p));
  for (int it = 0; it < 5; ++it) ll.push_back(m2_em_iteration(b, p));
  for (std::size_t k = 1; k < ll.size(); ++k) EXPECT_GE(ll[k], ll[k - 1] - 1e-10) << k;
}

void expect_normalized(const ModelParams& p) {
  const auto s = static_cast<std::size_t>(index_of(p.stage));
  const auto& t = *p.ttable[s];
  for (TokenId e = 0; e < t.rows(); ++e) {
    auto row = t.row_probs(e);
    if (row.empty()) continue;
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9) << "t row " << e;
  }
  if (p.atable) {
    for (const auto& [key, off] : p.atable->blocks()) {
      const auto [l, m] = key;
      for (std::size_t j = 1; j <= m; ++j) {
        double sum = 0;
        for (std::size_t i = 0; i <= l; ++i) sum += p.atable->prob(i, j, l, m);
        EXPECT_NEAR(sum, 1.0, 1e-9);
      }
    }
  }
  if (p.stage == Stage::M3 || p.stage == Stage::M4) {
    const auto& n = *p.fertility[s - 2];
    for (TokenId e = 0; e < n.rows(); ++e) {
      auto row = n.row(e);
      EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9);
    }
    EXPECT_NEAR(n.p0 + n.p1, 1.0, 1e-15);
  }
  if (p.stage == Stage::M3) {
    for (const auto& [key, off] : p.distortion3->blocks()) {
      const auto [l, m] = key;
      for (std::size_t i = 1; i <= l; ++i) {
        double sum = 0;
        for (std::size_t j = 1; j <= m; ++j) sum += p.distortion3->prob(j, i, l, m);
        EXPECT_NEAR(sum, 1.0, 1e-9);
      }
    }
  }
  if (p.stage == Stage::M4) {
    const auto& d = *p.distortion4;
    const auto& h = d.head_values();
    for (std::size_t r = 0; r < h.size() / d.head_width(); ++r)
      EXPECT_NEAR(std::accumulate(h.begin() + long(r * d.head_width()),
                                  h.begin() + long((r + 1) * d.head_width()), 0.0),
                  1.0, 1e-9);
    const auto& nh = d.nonhead_values();
    for (std::size_t r = 0; r < nh.size() / d.nonhead_width(); ++r)
      EXPECT_NEAR(std::accumulate(nh.begin() + long(r * d.nonhead_width()),
                                  nh.begin() + long((r + 1) * d.nonhead_width()), 0.0),
                  1.0, 1e-9);
  }
}

TEST(Train, EveryMStepLeavesDistributionsNormalized) {
  auto b = testing::synth_bitext();
  TrainOptions opts;
  int events = 0;
  opts.on_iteration = [&](const IterationEvent& ev) {
    ++events;
    expect_normalized(ev.params);
  };
  auto p = train(b, TrainSchedule::standard(), opts);
  EXPECT_EQ(events, 16);
  EXPECT_EQ(p.stage, Stage::M4);
  for (Stage s : kAllStages) EXPECT_TRUE(p.has_stage(s));
}

TEST(Train, ModelOneOnlySchedule) {
  auto b = testing::synth_bitext();
  std::vector<double> ll;
  TrainOptions opts;
  opts.on_iteration = [&](const IterationEvent& ev) { ll.push_back(ev.log_likelihood); };
  auto p = train(b, TrainSchedule::parse("1:5"), opts);
  EXPECT_EQ(p.stage, Stage::M1);
  EXPECT_FALSE(p.has_stage(Stage::M2));
  for (std::size_t k = 1; k < ll.size(); ++k) EXPECT_GE(ll[k], ll[k - 1] - 1e-10);
}

TEST(Train, SkippedStageIsEnteredWithAWarning) {
  auto b = testing::synth_bitext();
  std::vector<std::string> warnings;
  TrainOptions opts;
  opts.on_warning = [&](const std::string& w) { warnings.push_back(w); };
  auto p = train(b, TrainSchedule::parse("2:1"), opts);
  EXPECT_EQ(p.stage, Stage::M2);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("m1"), std::string::npos);
}

TEST(Train, EmptyCorpusIsATrainingError) {
  Bitext empty;
  EXPECT_THROW(train(empty, TrainSchedule::standard()), EmptyCorpus);
}

TEST(Train, ScheduleValidation) {
  EXPECT_THROW(TrainSchedule::parse(""), ScheduleError);
  EXPECT_THROW(TrainSchedule::parse("2:1,1:1"), ScheduleError);
  EXPECT_THROW(TrainSchedule::parse("1:0"), ScheduleError);
  EXPECT_THROW(TrainSchedule::parse("5:1"), ScheduleError);
  EXPECT_THROW(TrainSchedule::parse("1:x"), ScheduleError);
  EXPECT_EQ(TrainSchedule::parse("m1:5,M2:5,3:3,4:3"), TrainSchedule::standard());
  EXPECT_EQ(TrainSchedule::standard().str(), "1:5,2:5,3:3,4:3");
}

TEST(Train, ResultDoesNotDependOnShardOrThreadCount) {
  auto b = testing::synth_bitext();
  TrainOptions one, many;
  one.exec = ExecPolicy{1, 1};
  many.exec = ExecPolicy{4, 8};
  std::vector<double> ll1, ll8;
  one.on_iteration = [&](const IterationEvent& ev) { ll1.push_back(ev.log_likelihood); };
  many.on_iteration = [&](const IterationEvent& ev) { ll8.push_back(ev.log_likelihood); };
  auto p1 = train(b, TrainSchedule::standard(), one);
  auto p8 = train(b, TrainSchedule::standard(), many);
  ASSERT_EQ(ll1.size(), ll8.size());
  for (std::size_t k = 0; k < ll1.size(); ++k) EXPECT_NEAR(ll1[k], ll8[k], 1e-9);
  const auto& a = p1.ttable[3]->values();
  const auto& c = p8.ttable[3]->values();
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], c[k], 1e-9);
}

TEST(Train, SameThreadCountIsBitIdentical) {
  auto b = testing::synth_bitext();
  TrainOptions opts;
  opts.exec = ExecPolicy{4, 8};
  EXPECT_EQ(train(b, TrainSchedule::standard(), opts), train(b, TrainSchedule::standard(), opts));
}

TEST(TransferToM3, OneToOneViterbiGivesUnitFertility) {
  auto b = testing::bitext_from_lines({"a b", "a", "b"}, {"x y", "x", "y"});
  auto p = train(b, TrainSchedule::parse("1:5,2:5"));
  transfer_to_m3(b, p);
  for (const char* s : {"a", "b"}) EXPECT_DOUBLE_EQ(p.fertility[0]->prob(b.src_vocab.encode(s), 1), 1.0);
  EXPECT_DOUBLE_EQ(p.fertility[0]->p1, p.config.p1_init);
  expect_normalized(p);
}

TEST(TransferToM3, NeverAlignedTypesKeepZeroFertility) {
  // "the" co-occurs with x only next to a, which wins every position.
  auto b = testing::bitext_from_lines({"a", "a the"}, {"x", "x"});
  auto p = train(b, TrainSchedule::parse("1:10,2:5"));
  transfer_to_m3(b, p);
  EXPECT_DOUBLE_EQ(p.fertility[0]->prob(b.src_vocab.encode("the"), 0), 1.0);
}

TEST(M4Em, FirstCeptDisplacementIsMeasuredFromZero) {
  // Every pair is a single word aligned to a single word, so every head
  // displacement is +1 once fertility and NULL are settled.
  auto b = testing::bitext_from_lines({"a", "b", "a"}, {"x", "y", "x"});
  TrainOptions opts;
  opts.config.smoothing = 0.0;
  auto p = train(b, TrainSchedule::parse("1:3,2:3,3:2,4:2"), opts);
  const auto& d = *p.distortion4;
  EXPECT_NEAR(d.head(1, 0, 0), 1.0, 1e-9);
  EXPECT_NEAR(d.head(0, 0, 0), 0.0, 1e-12);
}

}  // namespace
}  // namespace morphalign
