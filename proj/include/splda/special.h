// include/splda/special.h

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

#ifndef SPLDA_SPECIAL_H_
#define SPLDA_SPECIAL_H_

#include "splda/common.h"

namespace splda {

double Digamma(double x);
double Trigamma(double x);
double LogGamma(double x);

/// ln Gamma_dim(x) = dim(dim-1)/4 ln(pi) + sum_{i=1..dim} ln Gamma(x + (1-i)/2).
double LogMultivariateGamma(double x, int dim);

/// ln C(tau) = ln Gamma(sum tau) - sum ln Gamma(tau_i), the Dirichlet
/// normalizer.  Zero for an empty vector.
double LogDirichletNormalizer(const VectorXd &tau);

/// ln C for the symmetric Dirichlet with m components of weight tau0.
double LogSymmetricDirichletNormalizer(double tau0, Index m);

/// Entropy of Gamma(shape, rate).
double GammaEntropy(double shape, double rate);

}  // namespace splda

#endif  // SPLDA_SPECIAL_H_
