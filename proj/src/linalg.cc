// src/linalg.cc

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

#include "splda/linalg.h"

#include <cmath>
#include <limits>

namespace splda {

namespace {
constexpr double kJitterScale = 1e-10;

bool FactorOk(const Eigen::LLT<MatrixXd> &llt) {
  if (llt.info() != Eigen::Success) return false;
  const auto diag = llt.matrixLLT().diagonal();
  for (Index i = 0; i < diag.size(); ++i)
    if (!(diag(i) > 0.0) || !std::isfinite(diag(i))) return false;
  return true;
}
}  // namespace

Eigen::LLT<MatrixXd> Cholesky(const MatrixXd &a, std::string_view what) {
  SPLDA_CHECK(a.rows() == a.cols(), what << ": Cholesky of non-square "
                                         << a.rows() << "x" << a.cols()
                                         << " matrix");
  SPLDA_CHECK(AllFinite(a), what << ": matrix has non-finite entries");
  Eigen::LLT<MatrixXd> llt(a);
  if (FactorOk(llt)) return llt;
  const double trace = a.trace();
  const double jitter = kJitterScale * trace / static_cast<double>(a.rows());
  if (jitter > 0.0) {
    MatrixXd loaded = a;
    loaded.diagonal().array() += jitter;
    llt.compute(loaded);
    if (FactorOk(llt)) {
      SPLDA_WARN(what << ": Cholesky needed diagonal jitter " << jitter);
      return llt;
    }
  }
  SPLDA_ERR(what << ": matrix is not positive definite (trace " << trace
                 << ", dim " << a.rows() << ")");
}

double LogDet(const Eigen::LLT<MatrixXd> &llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double LogDetSpd(const MatrixXd &a, std::string_view what) {
  return LogDet(Cholesky(a, what));
}

MatrixXd InverseSpd(const MatrixXd &a, std::string_view what) {
  MatrixXd inv = Cholesky(a, what).solve(
      MatrixXd::Identity(a.rows(), a.cols()));
  Symmetrize(&inv);
  return inv;
}

void Symmetrize(MatrixXd *a) {
  const Index n = a->rows();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double v = 0.5 * ((*a)(i, j) + (*a)(j, i));
      (*a)(i, j) = v;
      (*a)(j, i) = v;
    }
  }
}

double MaxAsymmetry(const MatrixXd &a) {
  if (a.size() == 0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff();
}

MatrixXd CholeskyFactor(const MatrixXd &a, std::string_view what) {
  return Cholesky(a, what).matrixL();
}

double ConditionNumber(const MatrixXd &a) {
  if (a.size() == 0) return 1.0;
  Eigen::JacobiSVD<MatrixXd> svd(a);
  const auto &s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

bool AllFinite(const MatrixXd &a) { return a.allFinite(); }

}  // namespace splda
