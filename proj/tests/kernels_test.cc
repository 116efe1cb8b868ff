// tests/kernels_test.cc

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
#include <limits>

#include <gtest/gtest.h>

#include "splda/kernels.h"
#include "test_util.h"

namespace splda::kernels {
namespace {

using splda::testing::MaxRelDiff;
using splda::testing::RandomGaussian;
using splda::testing::RandomResp;
using splda::testing::RandomSpd;

// Sizes straddling the row block so partial blocks are exercised.
class KernelSizes : public ::testing::TestWithParam<Index> {};

TEST_P(KernelSizes, ParallelMatchesSerial) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  const Index n = GetParam(), d = 7, m = 5;
  const MatrixXd phi = RandomGaussian(n, d, &rng);
  const MatrixXd r = RandomResp(n, m, &rng);

  const FirstOrder a = AccumulateFirstOrderSerial(r, phi);
  const FirstOrder b = AccumulateFirstOrder(r, phi);
  EXPECT_LT(MaxRelDiff(a.n, b.n), 1e-13);
  EXPECT_LT(MaxRelDiff(a.f, b.f), 1e-13);

  const MatrixXd s = Scatter(phi);
  EXPECT_LT(MaxRelDiff(ScatterSerial(phi), s), 1e-13);
  EXPECT_EQ(s, s.transpose());

  ScoreParams p;
  p.offset = RandomGaussian(d, 1, &rng).col(0);
  p.precision = RandomSpd(d, &rng);
  p.linear = RandomGaussian(d, m, &rng);
  p.speaker_const = RandomGaussian(m, 1, &rng).col(0);
  p.constant = -3.0;
  const MatrixXd gs = GaussianScores(phi, p);
  EXPECT_LT(MaxRelDiff(GaussianScoresSerial(phi, p), gs), 1e-13);
  const VectorXd x = phi.row(n - 1).transpose() - p.offset;
  EXPECT_NEAR(gs(n - 1, 2),
              p.constant - 0.5 * x.dot(p.precision * x) +
                  x.dot(p.linear.col(2)) + p.speaker_const(2),
              1e-10 * (1.0 + std::abs(gs(n - 1, 2))));

  const MatrixXd sm = SoftmaxRows(gs, 0.7);
  EXPECT_LT(MaxRelDiff(SoftmaxRowsSerial(gs, 0.7), sm), 1e-14);
  for (Index j = 0; j < n; ++j) EXPECT_NEAR(sm.row(j).sum(), 1.0, 1e-14);
}

INSTANTIATE_TEST_SUITE_P(Blocks, KernelSizes,
                         ::testing::Values(1, 255, 256, 257, 1000));

TEST(Kernels, RepeatableBitForBit) {
  std::mt19937_64 rng(9);
  const MatrixXd phi = RandomGaussian(900, 6, &rng);
  const MatrixXd r = RandomResp(900, 4, &rng);
  EXPECT_EQ(AccumulateFirstOrder(r, phi).f, AccumulateFirstOrder(r, phi).f);
  EXPECT_EQ(Scatter(phi), Scatter(phi));
}

TEST(Kernels, SoftmaxExtremes) {
  MatrixXd lr(2, 3);
  lr << 1000.0, 0.0, -1000.0, -std::numeric_limits<double>::infinity(), 0.0,
      0.0;
  const MatrixXd sm = SoftmaxRows(lr, 1.0);
  EXPECT_DOUBLE_EQ(sm(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(sm(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(sm(1, 1), 0.5);
  // Small kappa flattens.
  const MatrixXd flat = SoftmaxRows(lr.topRows(1) * 1e-6, 1e-6);
  EXPECT_NEAR(flat(0, 0), 1.0 / 3.0, 1e-8);

  MatrixXd bad = MatrixXd::Constant(1, 2, -std::numeric_limits<double>::infinity());
  EXPECT_THROW(SoftmaxRows(bad, 1.0), SpldaError);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(SoftmaxRows(bad, 1.0), SpldaError);
}

TEST(Kernels, ParallelForRethrows) {
  EXPECT_THROW(ParallelFor(10,
                           [](Index i) {
                             if (i == 7) throw SpldaError("boom");
                           }),
               SpldaError);
  std::vector<int> hit(50, 0);
  ParallelFor(50, [&](Index i) { hit[static_cast<std::size_t>(i)] = 1; });
  EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 50);
}

}  // namespace
}  // namespace splda::kernels
