// include/splda/oracle.h

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

#ifndef SPLDA_ORACLE_H_
#define SPLDA_ORACLE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "splda/common.h"

// Test oracles that share nothing with the inference code beyond basic
// linear algebra: central-difference gradients and Monte-Carlo expectations.

namespace splda {

struct FdReport {
  VectorXd gradient;       // central-difference estimate
  double scale = 1.0;      // gradient scale used for the relative residual
  double max_residual = 0.0;  // max_i |g_i - analytic_i| / scale
  Index worst = -1;
};

/// Central differences of `f` at `x` with step h_i = step * (1 + |x_i|).
/// The analytic gradient defaults to zero (a stationarity check).  `scale`
/// defaults to (|f(x)| + 1) / (max|x_i| + 1).
FdReport FdGradientCheck(const std::function<double(const VectorXd &)> &f,
                         const VectorXd &x, double step,
                         const VectorXd *analytic = nullptr,
                         std::optional<double> scale = std::nullopt);

/// Distributions the Monte-Carlo oracle can draw from.  Any subset may be
/// set; each draw samples every set component independently.
struct DrawSpec {
  struct RowGaussians {
    MatrixXd mean;              // rows are means
    std::vector<MatrixXd> cov;  // one covariance per row
  };
  struct Wishart {
    MatrixXd inverse_scale;  // K; the scale matrix is K^-1
    double dof = 0.0;
  };
  struct Gaussian {
    VectorXd mean;
    MatrixXd cov;
  };
  struct Gamma {
    double shape = 1.0;
    VectorXd rate;
  };
  std::optional<RowGaussians> rows;
  std::optional<Wishart> wishart;
  std::optional<Gaussian> gaussian;
  std::optional<VectorXd> dirichlet;
  std::optional<Gamma> gamma;
};

struct Draw {
  MatrixXd rows;
  MatrixXd wishart;
  VectorXd gaussian;
  VectorXd dirichlet;
  VectorXd gamma;
};

struct McResult {
  VectorXd estimate;
  VectorXd std_error;
  Index draws = 0;
};

/// Sample mean and standard error of a vector-valued integrand.  Draws are
/// generated in fixed chunks with their own seeded streams, so the result
/// depends only on (spec, integrand, n_draws, seed).
McResult McExpectation(const DrawSpec &spec,
                       const std::function<VectorXd(const Draw &)> &integrand,
                       Index n_draws, std::uint64_t seed);

}  // namespace splda

#endif  // SPLDA_ORACLE_H_
