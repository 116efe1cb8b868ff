// tests/vb_bayes_test.cc

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

#include <gtest/gtest.h>

#include "splda/adapt.h"
#include "splda/special.h"
#include "splda/vb-bayes.h"
#include "test_util.h"

namespace splda {
namespace {

using testing::MakeScenario;
using testing::MaxRelDiff;
using testing::RandomGaussian;
using testing::RandomSpd;

VbState BayesState(const Corpus &corpus, const SpldaModel &model, Index m,
                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  VbState st = testing::RandomPointState(corpus, model, m, &rng);
  ResolveHyperparams(corpus, &st.hyper);
  st.bayes = InitBayesPosterior(model, st.hyper);
  return st;
}

TEST(VbBayes, SweepNeverLowersTheBound) {
  const auto sc = MakeScenario(6, 2, 6, 12, 2.0, 1);
  const Corpus corpus = Corpus::Build(sc.synth.data);
  for (double eta : {1.0, 0.4}) {
    VbState st = BayesState(corpus, sc.init, 5, 1);
    BayesSweepOptions opts;
    opts.eta = eta;
    opts.optimize_alpha = true;
    opts.optimize_mu = true;
    opts.optimize_tau0 = true;
    double prev = -INFINITY;
    for (int it = 0; it < 20; ++it) {
      BayesSweep(corpus, opts, 1.0, &st);
      const double e = ElboBayes(corpus, st, eta).total;
      ASSERT_TRUE(std::isfinite(e));
      if (it > 0) EXPECT_GE(e, prev - 1e-9 * std::abs(prev)) << "iter " << it;
      prev = e;
    }
  }
}

TEST(VbBayes, ElboTermsSumToTotal) {
  const auto sc = MakeScenario(6, 2, 5, 10, 2.0, 2);
  const Corpus corpus = Corpus::Build(sc.synth.data);
  VbState st = BayesState(corpus, sc.init, 4, 2);
  BayesSweep(corpus, BayesSweepOptions{}, 1.0, &st);
  const ElboBreakdown e = ElboBayes(corpus, st, 0.7);
  double sum = 0.0;
  for (const auto &t : e.terms) sum += t.value;
  EXPECT_NEAR(sum, e.total, 1e-9 * std::abs(e.total));
}

TEST(VbBayes, WishartExpectations) {
  std::mt19937_64 rng(3);
  const MatrixXd k = RandomSpd(3, &rng, 2.0);
  const WishartPosterior w = WishartPosterior::FromInverseScale(k, 7.0);
  EXPECT_LT(MaxRelDiff(w.mean, 7.0 * k.inverse()), 1e-12);
  // E ln|W| = sum_i psi((dof + 1 - i) / 2) + d ln 2 - ln|K|.
  double ref = 3.0 * std::log(2.0) - std::log(k.determinant());
  for (int i = 1; i <= 3; ++i) ref += Digamma((7.0 + 1.0 - i) / 2.0);
  EXPECT_NEAR(w.e_log_det, ref, 1e-12);
}

TEST(VbBayes, AlphaPosteriorShapeAndRate) {
  std::mt19937_64 rng(4);
  const MatrixXd vt = RandomGaussian(5, 3, &rng);
  const RowPosteriorVtilde rows = RowPosteriorVtilde::PointMass(vt);
  const AlphaPosterior a = UpdateQAlpha(rows, 2.0, 3.0, 1.0);
  EXPECT_DOUBLE_EQ(a.a_prime, 2.0 + 2.5);
  for (Index q = 0; q < 2; ++q)
    EXPECT_NEAR(a.b_prime(q), 3.0 + 0.5 * vt.col(q).squaredNorm(), 1e-13);
  EXPECT_NEAR(a.LogMean()(0), Digamma(4.5) - std::log(a.b_prime(0)), 1e-14);
}

TEST(VbBayes, ColumnNormsIncludeCovariance) {
  std::mt19937_64 rng(5);
  RowPosteriorVtilde rows;
  rows.mean = RandomGaussian(3, 3, &rng);
  for (int r = 0; r < 3; ++r) {
    rows.cov.push_back(RandomSpd(3, &rng, 0.2));
    rows.precision.push_back(rows.cov.back().inverse());
  }
  rows.log_det_precision = VectorXd::Zero(3);
  const VectorXd cn = ExpectedColumnNorms(rows);
  for (Index q = 0; q < 2; ++q) {
    double ref = rows.mean.col(q).squaredNorm();
    for (int r = 0; r < 3; ++r) ref += rows.cov[static_cast<std::size_t>(r)](q, q);
    EXPECT_NEAR(cn(q), ref, 1e-13);
  }
}

TEST(VbBayes, HyperMuOptimum) {
  std::mt19937_64 rng(6);
  const RowPosteriorVtilde rows =
      RowPosteriorVtilde::PointMass(RandomGaussian(6, 2, &rng));
  const MuHyperResult iso = OptimizeHyperMu(rows, true);
  ASSERT_EQ(iso.beta.size(), 6);
  EXPECT_LT(MaxRelDiff(iso.mu0, rows.MuMean()), 1e-12);
  EXPECT_TRUE(iso.clamped);  // zero spread around a point mass
}

}  // namespace
}  // namespace splda
