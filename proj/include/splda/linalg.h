// include/splda/linalg.h

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

#ifndef SPLDA_LINALG_H_
#define SPLDA_LINALG_H_

#include <string_view>

#include "splda/common.h"

namespace splda {

/// Cholesky factorization of a symmetric matrix.  If the first attempt fails
/// the diagonal is loaded once with 1e-10 * tr(A) / dim; a second failure
/// throws, naming `what`.
Eigen::LLT<MatrixXd> Cholesky(const MatrixXd &a, std::string_view what);

/// ln|A| from a Cholesky factor (twice the sum of log pivots).
double LogDet(const Eigen::LLT<MatrixXd> &llt);

/// ln|A| for a symmetric positive definite matrix.
double LogDetSpd(const MatrixXd &a, std::string_view what);

/// Inverse of a symmetric positive definite matrix, returned exactly
/// symmetric.
MatrixXd InverseSpd(const MatrixXd &a, std::string_view what);

/// A <- (A + A^T) / 2.  The result is bitwise symmetric.
void Symmetrize(MatrixXd *a);

double MaxAsymmetry(const MatrixXd &a);

/// Lower-triangular T with T T^T = A.
MatrixXd CholeskyFactor(const MatrixXd &a, std::string_view what);

/// 2-norm condition number via SVD; meant for small systems.
double ConditionNumber(const MatrixXd &a);

bool AllFinite(const MatrixXd &a);

}  // namespace splda

#endif  // SPLDA_LINALG_H_
