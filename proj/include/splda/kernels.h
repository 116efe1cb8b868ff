// include/splda/kernels.h

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

#ifndef SPLDA_KERNELS_H_
#define SPLDA_KERNELS_H_

#include <exception>

#include "splda/common.h"

// Data-parallel inner loops.  Each kernel has a plain serial reference
// (suffix Serial) kept for tests and benchmarks, and a parallel version.
// Parallel reductions work on fixed row blocks combined by a pairwise tree
// in block order, so results do not depend on the number of threads.

namespace splda::kernels {

inline constexpr Index kRowBlock = 256;

int NumThreads();

/// Runs fn(i) for i in [0, n) across threads; the first exception thrown by
/// any iteration is rethrown after the loop.
template <typename Fn>
void ParallelFor(Index n, Fn &&fn) {
  std::exception_ptr err;
#ifdef SPLDA_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (Index i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#ifdef SPLDA_HAVE_OPENMP
#pragma omp critical(splda_parallel_for)
#endif
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

struct FirstOrder {
  VectorXd n;  // length M
  MatrixXd f;  // d x M
};

FirstOrder AccumulateFirstOrderSerial(const MatrixXd &resp,
                                      const MatrixXd &phi);
FirstOrder AccumulateFirstOrder(const MatrixXd &resp, const MatrixXd &phi);

/// sum_j phi_j phi_j^T, exactly symmetric.
MatrixXd ScatterSerial(const MatrixXd &phi);
MatrixXd Scatter(const MatrixXd &phi);

/// Per-vector, per-speaker Gaussian-form scores
///   out(j, i) = constant - 1/2 x_j^T A x_j + x_j^T b_i + k_i,
/// with x_j = phi_j - offset.  Both responsibility updates reduce to this.
struct ScoreParams {
  VectorXd offset;          // d
  MatrixXd precision;       // A, d x d
  MatrixXd linear;          // b, d x M
  VectorXd speaker_const;   // k, M
  double constant = 0.0;
};

MatrixXd GaussianScoresSerial(const MatrixXd &phi, const ScoreParams &p);
MatrixXd GaussianScores(const MatrixXd &phi, const ScoreParams &p);

/// Row-wise softmax of kappa * log_rho with max subtraction.  Rows whose
/// maximum is -inf or NaN throw.
MatrixXd SoftmaxRowsSerial(const MatrixXd &log_rho, double kappa);
MatrixXd SoftmaxRows(const MatrixXd &log_rho, double kappa);

}  // namespace splda::kernels

#endif  // SPLDA_KERNELS_H_
