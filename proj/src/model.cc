// src/model.cc

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

#include "splda/model.h"

#include <cmath>

#include "splda/linalg.h"

namespace splda {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

MatrixXd SpldaModel::Vtilde() const {
  MatrixXd vt(Dim(), SpeakerDim() + 1);
  vt.leftCols(SpeakerDim()) = V;
  vt.col(SpeakerDim()) = mu;
  return vt;
}

SpldaModel SpldaModel::FromVtilde(const MatrixXd &vtilde, MatrixXd w) {
  SPLDA_CHECK(vtilde.cols() >= 1, "Vtilde needs at least the mean column");
  SpldaModel m;
  m.V = vtilde.leftCols(vtilde.cols() - 1);
  m.mu = vtilde.col(vtilde.cols() - 1);
  m.W = std::move(w);
  return m;
}

void SpldaModel::Validate() const {
  const Index d = Dim();
  SPLDA_CHECK(d >= 1, "model dimension must be positive");
  SPLDA_CHECK(V.rows() == d, "V has " << V.rows() << " rows, expected " << d);
  SPLDA_CHECK(SpeakerDim() <= d,
              "speaker dimension " << SpeakerDim() << " exceeds d=" << d);
  SPLDA_CHECK(W.rows() == d && W.cols() == d,
              "W is " << W.rows() << "x" << W.cols() << ", expected " << d
                      << "x" << d);
  SPLDA_CHECK(mu.allFinite() && V.allFinite() && W.allFinite(),
              "model has non-finite entries");
  SPLDA_CHECK(MaxAsymmetry(W) == 0.0,
              "W is not symmetric (max asymmetry " << MaxAsymmetry(W) << ")");
  Cholesky(W, "model W");
}

Index Dataset::Dim() const {
  return phi.rows() > 0 ? phi.cols() : phi_d.cols();
}

Index Dataset::NumSupervisedSpeakers() const {
  int mx = -1;
  for (int l : labels_d) mx = std::max(mx, l);
  return mx + 1;
}

void Dataset::Validate() const {
  SPLDA_CHECK(phi.rows() == 0 || phi_d.rows() == 0 ||
                  phi.cols() == phi_d.cols(),
              "supervised and unsupervised i-vectors differ in dimension ("
                  << phi_d.cols() << " vs " << phi.cols() << ")");
  SPLDA_CHECK(phi.allFinite(), "unsupervised i-vectors contain NaN/Inf");
  SPLDA_CHECK(phi_d.allFinite(), "supervised i-vectors contain NaN/Inf");
  SPLDA_CHECK(static_cast<Index>(labels_d.size()) == phi_d.rows(),
              labels_d.size() << " labels for " << phi_d.rows()
                              << " supervised i-vectors");
  const Index md = NumSupervisedSpeakers();
  std::vector<int> counts(static_cast<std::size_t>(std::max<Index>(md, 0)), 0);
  for (int l : labels_d) {
    SPLDA_CHECK(l >= 0, "negative supervised label " << l);
    ++counts[static_cast<std::size_t>(l)];
  }
  for (Index i = 0; i < md; ++i)
    SPLDA_CHECK(counts[static_cast<std::size_t>(i)] > 0,
                "supervised speaker " << i << " has no i-vectors");
}

MarginalParams ComputeMarginalParams(const SpldaModel &model) {
  MatrixXd cov = model.V * model.V.transpose() +
                 InverseSpd(model.W, "ComputeMarginalParams: W");
  Symmetrize(&cov);
  return {model.mu, std::move(cov)};
}

double CondLogLik(const SpeakerStats &stats, const VectorXd &y,
                  const SpldaModel &model) {
  SPLDA_CHECK(stats.centered && stats.center == model.mu,
              "CondLogLik: statistics must be centered on the model mean");
  SPLDA_CHECK(stats.HasSecondOrder(), "CondLogLik: needs second order stats");
  if (stats.n == 0.0) return 0.0;
  const Index d = model.Dim();
  const double logdet_w = LogDetSpd(model.W, "CondLogLik: W");
  const MatrixXd vtw = model.V.transpose() * model.W;
  const VectorXd vy = model.V * y;
  return 0.5 * stats.n * (logdet_w - d * kLog2Pi) -
         0.5 * (model.W.cwiseProduct(stats.s_bar)).sum() +
         y.dot(vtw * stats.f_bar) - 0.5 * stats.n * vy.dot(model.W * vy);
}

double CondLogLikAugmented(const SpeakerStats &stats, const VectorXd &y,
                           const SpldaModel &model) {
  SPLDA_CHECK(stats.HasSecondOrder(),
              "CondLogLikAugmented: needs second order stats");
  if (stats.n == 0.0) return 0.0;
  const Index d = model.Dim();
  const double logdet_w = LogDetSpd(model.W, "CondLogLikAugmented: W");
  VectorXd yt(y.size() + 1);
  yt << y, 1.0;
  const VectorXd m = model.Vtilde() * yt;
  const MatrixXd inner = stats.s - 2.0 * stats.f * m.transpose() +
                         stats.n * m * m.transpose();
  return 0.5 * stats.n * (logdet_w - d * kLog2Pi) -
         0.5 * (model.W * inner).trace();
}

}  // namespace splda
