// tests/synth_test.cc

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

#include "splda/synth.h"
#include "test_util.h"

namespace splda {
namespace {

using testing::MaxRelDiff;
using testing::RandomGaussian;

TEST(Synth, ShapesAndDeterminism) {
  SynthSpec s;
  s.dim = 5;
  s.speaker_dim = 2;
  s.num_speakers = 4;
  s.min_per_speaker = 3;
  s.max_per_speaker = 7;
  s.num_sup_speakers = 3;
  s.seed = 11;
  const SynthData a = Generate(s), b = Generate(s);
  EXPECT_EQ(a.data.phi, b.data.phi);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.data.phi.cols(), 5);
  EXPECT_EQ(a.y.rows(), 2);
  EXPECT_EQ(a.y.cols(), 4);
  EXPECT_EQ(static_cast<Index>(a.labels.size()), a.data.phi.rows());
  EXPECT_EQ(a.data.phi_d.rows(), 30);
  EXPECT_GE(a.data.phi.rows(), 12);
  EXPECT_LE(a.data.phi.rows(), 28);
  s.seed = 12;
  EXPECT_NE(Generate(s).data.phi, a.data.phi);
}

TEST(Synth, RandomModelStructure) {
  std::mt19937_64 rng(2);
  const SpldaModel m = RandomModel(6, 3, 2.5, 0.5, &rng);
  // V = s Q with orthonormal Q.
  EXPECT_LT(MaxRelDiff(m.V.transpose() * m.V, 6.25 * MatrixXd::Identity(3, 3)),
            1e-12);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.W.inverse());
  EXPECT_GE(es.eigenvalues().minCoeff(), 0.25 * 0.5 - 1e-12);
  EXPECT_LE(es.eigenvalues().maxCoeff(), 0.25 * 1.5 + 1e-12);
  EXPECT_EQ(RandomModel(6, 3, 2.5, 0.0, &rng).W.size(), 0);
}

TEST(Synth, EmpiricalMomentsMatchModel) {
  SynthSpec s;
  s.dim = 3;
  s.speaker_dim = 1;
  s.num_speakers = 3000;
  s.min_per_speaker = s.max_per_speaker = 1;
  s.seed = 3;
  const SynthData d = Generate(s);
  const MarginalParams mp = ComputeMarginalParams(d.model);
  const VectorXd mean = d.data.phi.colwise().mean();
  const MatrixXd c = d.data.phi.rowwise() - mean.transpose();
  const MatrixXd cov = c.transpose() * c / (c.rows() - 1.0);
  EXPECT_LT((mean - mp.mean).norm(), 0.1);
  EXPECT_LT((cov - mp.cov).norm() / mp.cov.norm(), 0.1);
}

TEST(Synth, ScorerMatchesJointGaussianLlr) {
  std::mt19937_64 rng(4);
  const SpldaModel m = RandomModel(5, 2, 2.0, 1.0, &rng);
  const PairwiseScorer sc(m);
  const MatrixXd phi = RandomGaussian(6, 5, &rng);
  const MatrixXd all = sc.ScoreAll(phi);
  EXPECT_EQ(all, all.transpose());
  for (Index i = 0; i < 6; ++i)
    for (Index j = i + 1; j < 6; ++j) {
      const double ref = PairwiseLlr(m, phi.row(i).transpose(),
                                     phi.row(j).transpose());
      EXPECT_NEAR(all(i, j), ref, 1e-9 * (1.0 + std::abs(ref)));
    }
}

TEST(Synth, AhcOnBlockSimilarity) {
  MatrixXd s = MatrixXd::Constant(6, 6, -5.0);
  for (int blk : {0, 2, 4}) s.block(blk, blk, 2, 2).setConstant(3.0);
  const std::vector<int> labels = AhcAverageLinkage(s, 3);
  EXPECT_EQ(labels, (std::vector<int>{0, 0, 1, 1, 2, 2}));
  EXPECT_EQ(AhcAverageLinkage(s, 1), std::vector<int>(6, 0));
}

TEST(Metrics, AriAndPurity) {
  const std::vector<int> t = {0, 0, 0, 1, 1, 1};
  EXPECT_DOUBLE_EQ(ClusteringMetrics(t, t).ari, 1.0);
  // Label permutation does not matter.
  EXPECT_DOUBLE_EQ(ClusteringMetrics({5, 5, 5, 2, 2, 2}, t).ari, 1.0);
  // Contingency [[2, 1], [0, 3]].
  const MetricReport r = ClusteringMetrics({0, 0, 1, 1, 1, 1}, t);
  // sum C(n_ij,2)=1+3=4, a: C(2,2)+C(4,2)=7, b: 3+3=6, C(6,2)=15.
  const double expected = (4.0 - 7.0 * 6.0 / 15.0) /
                          (0.5 * (7.0 + 6.0) - 7.0 * 6.0 / 15.0);
  EXPECT_NEAR(r.ari, expected, 1e-14);
  EXPECT_NEAR(r.purity, 5.0 / 6.0, 1e-15);
  EXPECT_THROW(ClusteringMetrics({0, 1}, t), SpldaError);
}

}  // namespace
}  // namespace splda
