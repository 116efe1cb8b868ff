// tests/oracle_test.cc

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

#include "splda/oracle.h"
#include "test_util.h"

namespace splda {
namespace {

using testing::MaxRelDiff;
using testing::RandomSpd;

TEST(Oracle, FdGradientOfQuadratic) {
  std::mt19937_64 rng(1);
  const MatrixXd a = RandomSpd(4, &rng);
  const VectorXd b = VectorXd::LinSpaced(4, -1.0, 2.0);
  auto f = [&](const VectorXd &x) { return 0.5 * x.dot(a * x) - b.dot(x); };
  const VectorXd x = VectorXd::LinSpaced(4, 0.3, 0.9);
  const VectorXd grad = a * x - b;
  const FdReport r = FdGradientCheck(f, x, 1e-5, &grad);
  EXPECT_LT(r.max_residual, 1e-8);
  EXPECT_LT(MaxRelDiff(r.gradient, grad), 1e-7);
  // Zero-gradient check fires away from the optimum.
  EXPECT_GT(FdGradientCheck(f, x, 1e-5).max_residual, 1e-2);
  EXPECT_LT(FdGradientCheck(f, a.ldlt().solve(b), 1e-5).max_residual, 1e-8);
}

TEST(Oracle, McMomentsOfEachFamily) {
  std::mt19937_64 rng(2);
  DrawSpec spec;
  const MatrixXd k = RandomSpd(2, &rng, 3.0);
  spec.wishart = DrawSpec::Wishart{k, 6.0};
  VectorXd alpha(3);
  alpha << 1.0, 2.0, 5.0;
  spec.dirichlet = alpha;
  spec.gamma = DrawSpec::Gamma{3.0, VectorXd::Constant(2, 2.0)};
  spec.gaussian = DrawSpec::Gaussian{VectorXd::Ones(2), RandomSpd(2, &rng)};
  auto integrand = [](const Draw &d) {
    VectorXd out(4 + 3 + 2 + 2);
    out << Eigen::Map<const VectorXd>(d.wishart.data(), 4), d.dirichlet,
        d.gamma, d.gaussian;
    return out;
  };
  const McResult mc = McExpectation(spec, integrand, 50000, 3);
  const MatrixXd wmean = 6.0 * k.inverse();
  VectorXd expect(11);
  expect << Eigen::Map<const VectorXd>(wmean.data(), 4), alpha / alpha.sum(),
      VectorXd::Constant(2, 1.5), VectorXd::Ones(2);
  for (Index i = 0; i < 11; ++i)
    EXPECT_LT(std::abs(mc.estimate(i) - expect(i)), 4.0 * mc.std_error(i))
        << "component " << i;
  EXPECT_EQ(mc.draws, 50000);
  const McResult again = McExpectation(spec, integrand, 50000, 3);
  EXPECT_EQ(mc.estimate, again.estimate);
}

}  // namespace
}  // namespace splda
