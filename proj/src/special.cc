// src/special.cc

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

#include "splda/special.h"

#include <cmath>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace splda {

double Digamma(double x) {
  SPLDA_CHECK(x > 0.0, "Digamma: argument " << x << " must be positive");
  return boost::math::digamma(x);
}

double Trigamma(double x) {
  SPLDA_CHECK(x > 0.0, "Trigamma: argument " << x << " must be positive");
  return boost::math::trigamma(x);
}

double LogGamma(double x) {
  SPLDA_CHECK(x > 0.0, "LogGamma: argument " << x << " must be positive");
  return boost::math::lgamma(x);
}

double LogMultivariateGamma(double x, int dim) {
  SPLDA_CHECK(x > 0.5 * (dim - 1),
              "LogMultivariateGamma: need x > (dim-1)/2, got x=" << x
                                                                 << " dim="
                                                                 << dim);
  double acc = 0.25 * dim * (dim - 1) * std::log(M_PI);
  for (int i = 1; i <= dim; ++i) acc += LogGamma(x + 0.5 * (1 - i));
  return acc;
}

double LogDirichletNormalizer(const VectorXd &tau) {
  if (tau.size() == 0) return 0.0;
  double acc = LogGamma(tau.sum());
  for (Index i = 0; i < tau.size(); ++i) acc -= LogGamma(tau(i));
  return acc;
}

double LogSymmetricDirichletNormalizer(double tau0, Index m) {
  if (m == 0) return 0.0;
  return LogGamma(static_cast<double>(m) * tau0) -
         static_cast<double>(m) * LogGamma(tau0);
}

double GammaEntropy(double shape, double rate) {
  return shape - std::log(rate) + LogGamma(shape) +
         (1.0 - shape) * Digamma(shape);
}

}  // namespace splda
