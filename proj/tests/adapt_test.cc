// tests/adapt_test.cc

// Copyright 2026  splda-vb authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "splda/adapt.h"
#include "test_util.h"

namespace splda {
namespace {

using testing::MakeScenario;
using testing::MaxRelDiff;

class QuietLog : public ::testing::Environment {
 public:
  void SetUp() override { SetLogLevel(LogLevel::kQuiet); }
};
const auto *const kQuiet =
    ::testing::AddGlobalTestEnvironment(new QuietLog);

TEST(Adapt, PruneColumnsRenormalizes) {
  MatrixXd r(3, 3);
  r << 0.5, 0.25, 0.25,  //
      0.0, 0.0, 1.0,     //
      0.2, 0.6, 0.2;
  const MatrixXd p = PruneColumns(r, {0, 1});
  ASSERT_EQ(p.cols(), 2);
  EXPECT_NEAR(p(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(p(1, 0), 0.5);  // no mass left: uniform
  EXPECT_NEAR(p(2, 1), 0.75, 1e-15);
  EXPECT_THROW(PruneColumns(r, {}), SpldaError);
}

TEST(Adapt, MergeAndCosine) {
  MatrixXd r(2, 3);
  r << 0.2, 0.3, 0.5,  //
      0.6, 0.1, 0.3;
  const MatrixXd m = MergeColumns(r, 0, 2);
  ASSERT_EQ(m.cols(), 2);
  EXPECT_DOUBLE_EQ(m(0, 0), 0.7);
  EXPECT_DOUBLE_EQ(m(1, 1), 0.1);
  EXPECT_NEAR(ColumnCosine(r, 0, 0), 1.0, 1e-15);
  MatrixXd z = r;
  z.col(1).setZero();
  EXPECT_EQ(ColumnCosine(z, 0, 1), 0.0);
}

TEST(Adapt, ConfigValidation) {
  RunConfig c;
  EXPECT_NO_THROW(c.Validate());
  auto bad = [](auto mutate) {
    RunConfig x;
    mutate(x);
    EXPECT_THROW(x.Validate(), SpldaError);
  };
  bad([](RunConfig &x) { x.m_init = 0; });
  bad([](RunConfig &x) { x.eta = 1.5; });
  bad([](RunConfig &x) { x.kappa = 0.0; });
  bad([](RunConfig &x) {
    x.anneal.enabled = true;
    x.anneal.kappa0 = 0.0;
  });
  bad([](RunConfig &x) {
    x.anneal.enabled = true;
    x.anneal.growth = 0.9;
  });
  bad([](RunConfig &x) {
    x.variant = Variant::kBayes;
    x.sampler.enabled = true;
  });
  bad([](RunConfig &x) { x.sweep_m = {3, 0}; });
}

TEST(Adapt, NamesRoundTrip) {
  for (Variant v : {Variant::kPoint, Variant::kBayes})
    EXPECT_EQ(ParseVariant(VariantName(v)), v);
  for (InitMethod m : {InitMethod::kAhc, InitMethod::kRandomY,
                       InitMethod::kOracle, InitMethod::kUniformPi})
    EXPECT_EQ(ParseInitMethod(InitMethodName(m)), m);
  for (SampleStrategy s :
       {SampleStrategy::kBestSample, SampleStrategy::kAverageAccumulators})
    EXPECT_EQ(ParseSampleStrategy(SampleStrategyName(s)), s);
  EXPECT_THROW(ParseVariant("full"), SpldaError);
}

TEST(Adapt, InitResponsibilitiesAreRowStochastic) {
  const auto sc = MakeScenario(6, 2, 5, 10, 3.0, 1);
  const Corpus corpus = Corpus::Build(sc.synth.data);
  for (InitMethod m : {InitMethod::kAhc, InitMethod::kRandomY,
                       InitMethod::kOracle, InitMethod::kUniformPi}) {
    RunConfig cfg;
    cfg.init_method = m;
    const MatrixXd r =
        InitResponsibilities(corpus, sc.init, cfg, 5, &sc.synth.labels);
    ASSERT_EQ(r.cols(), 5);
    EXPECT_NO_THROW(ValidateResponsibilities(r, corpus.phi)) << InitMethodName(m);
  }
  RunConfig oracle;
  oracle.init_method = InitMethod::kOracle;
  EXPECT_THROW(InitResponsibilities(corpus, sc.init, oracle, 5, nullptr),
               SpldaError);
}

TEST(Adapt, WellSeparatedSpeakersAreRecovered) {
  // Seed chosen so the closest pair of true speakers is > 8 noise std apart.
  const auto sc = MakeScenario(6, 2, 5, 15, 8.0, 7);
  const SpldaModel &tm = sc.synth.model;
  for (Index i = 0; i < 5; ++i)
    for (Index j = i + 1; j < 5; ++j) {
      const VectorXd e = tm.V * (sc.synth.y.col(i) - sc.synth.y.col(j));
      ASSERT_GT(std::sqrt(e.dot(tm.W * e)), 8.0);
    }
  RunConfig cfg;
  cfg.m_init = 9;
  const RunReport rep =
      RunAdaptation(sc.synth.data, sc.init, Hyperparams{}, cfg);
  EXPECT_EQ(rep.final_state.NumClusters(), 5);
  EXPECT_DOUBLE_EQ(ClusteringMetrics(rep.labels, sc.synth.labels).ari, 1.0);
  EXPECT_FALSE(rep.events.empty());
  EXPECT_EQ(rep.elbo.size(), rep.num_clusters.size());
  EXPECT_EQ(rep.elbo.size(), rep.kappa.size());
}

TEST(Adapt, DeterministicForFixedSeed) {
  const auto sc = MakeScenario(6, 2, 5, 10, 2.0, 3);
  RunConfig cfg;
  cfg.init_method = InitMethod::kRandomY;
  cfg.sampler.enabled = true;
  cfg.sampler.num_samples = 4;
  cfg.seed = 17;
  const RunReport a = RunAdaptation(sc.synth.data, sc.init, Hyperparams{}, cfg);
  const RunReport b = RunAdaptation(sc.synth.data, sc.init, Hyperparams{}, cfg);
  EXPECT_EQ(a.elbo, b.elbo);
  EXPECT_EQ(a.labels, b.labels);
  cfg.seed = 18;
  const RunReport c = RunAdaptation(sc.synth.data, sc.init, Hyperparams{}, cfg);
  EXPECT_NE(a.elbo, c.elbo);
}

TEST(Adapt, MInitLargerThanDataIsClamped) {
  const auto sc = MakeScenario(4, 1, 2, 3, 3.0, 4);
  RunConfig cfg;
  cfg.m_init = 50;
  const RunReport rep =
      RunAdaptation(sc.synth.data, sc.init, Hyperparams{}, cfg);
  EXPECT_LE(rep.num_clusters.front(), 6);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(Adapt, AnnealingReachesTarget) {
  const auto sc = MakeScenario(6, 2, 5, 10, 2.0, 5);
  RunConfig cfg;
  cfg.anneal.enabled = true;
  cfg.anneal.kappa0 = 0.1;
  cfg.anneal.growth = 1.5;
  const RunReport rep =
      RunAdaptation(sc.synth.data, sc.init, Hyperparams{}, cfg);
  EXPECT_DOUBLE_EQ(rep.kappa.front(), 0.1);
  EXPECT_DOUBLE_EQ(rep.kappa.back(), 1.0);
  for (std::size_t t = 1; t < rep.kappa.size(); ++t)
    EXPECT_GE(rep.kappa[t], rep.kappa[t - 1]);
}

TEST(Adapt, DrawAssignmentsFollowResponsibilities) {
  MatrixXd r(2, 3);
  r << 1.0, 0.0, 0.0,  //
      0.0, 0.25, 0.75;
  const auto draws = DrawAssignments(r, 4000, 3);
  ASSERT_EQ(draws.size(), 4000u);
  int twos = 0;
  for (const auto &d : draws) {
    EXPECT_EQ(d[0], 0);
    EXPECT_NE(d[1], 0);
    twos += d[1] == 2;
  }
  EXPECT_NEAR(twos / 4000.0, 0.75, 0.03);
  EXPECT_EQ(DrawAssignments(r, 10, 3), DrawAssignments(r, 10, 3));
}

TEST(Adapt, SpeakerCountSweepPicksBestBound) {
  const auto sc = MakeScenario(6, 2, 4, 12, 6.0, 6);
  RunConfig cfg;
  cfg.prune_merge = false;
  const SweepResult sw =
      SelectSpeakerCount(sc.synth.data, sc.init, Hyperparams{}, cfg, {2, 4, 6});
  ASSERT_EQ(sw.runs.size(), 3u);
  for (const auto &r : sw.runs)
    EXPECT_LE(r.final_elbo.total,
              sw.runs[static_cast<std::size_t>(sw.best)].final_elbo.total);
  EXPECT_EQ(sw.m_values[static_cast<std::size_t>(sw.best)], 4);
}

TEST(Adapt, BayesRunIsMonotoneAndFinite) {
  const auto sc = MakeScenario(6, 2, 5, 10, 3.0, 7);
  RunConfig cfg;
  cfg.variant = Variant::kBayes;
  cfg.prune_merge = false;
  cfg.eta = 0.5;
  const RunReport rep =
      RunAdaptation(sc.synth.data, sc.init, Hyperparams{}, cfg);
  ASSERT_TRUE(rep.final_state.bayes.has_value());
  for (std::size_t t = 1; t < rep.elbo.size(); ++t)
    EXPECT_GE(rep.elbo[t], rep.elbo[t - 1] - 1e-8 * std::abs(rep.elbo[t - 1]));
}

}  // namespace
}  // namespace splda
