// src/posteriors.cc

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

#include "splda/posteriors.h"

#include <cmath>
#include <limits>

#include "splda/kernels.h"
#include "splda/linalg.h"
#include "splda/special.h"

namespace splda {

VectorXd SpeakerPosterior::AugmentedMean() const {
  VectorXd out(mean.size() + 1);
  out << mean, 1.0;
  return out;
}

MatrixXd SpeakerPosterior::AugmentedSecondMoment() const {
  const Index k = mean.size();
  MatrixXd out(k + 1, k + 1);
  out.topLeftCorner(k, k) = second_moment;
  out.topRightCorner(k, 1) = mean;
  out.bottomLeftCorner(1, k) = mean.transpose();
  out(k, k) = 1.0;
  return out;
}

SpeakerPosterior SpeakerPosterior::FromPrecision(VectorXd mean,
                                                 MatrixXd precision) {
  SpeakerPosterior p;
  auto llt = Cholesky(precision, "speaker posterior precision");
  p.log_det_precision = LogDet(llt);
  p.cov = llt.solve(MatrixXd::Identity(precision.rows(), precision.cols()));
  Symmetrize(&p.cov);
  p.mean = std::move(mean);
  p.precision = std::move(precision);
  p.second_moment = p.cov + p.mean * p.mean.transpose();
  Symmetrize(&p.second_moment);
  return p;
}

SpeakerPosterior SpeakerPosterior::PointMass(VectorXd mean) {
  SpeakerPosterior p;
  const Index k = mean.size();
  p.cov = MatrixXd::Zero(k, k);
  p.second_moment = mean * mean.transpose();
  p.mean = std::move(mean);
  p.log_det_precision = std::numeric_limits<double>::infinity();
  return p;
}

DirichletPosterior DirichletPosterior::FromTau(VectorXd tau) {
  DirichletPosterior d;
  d.e_log_pi.resize(tau.size());
  if (tau.size() > 0) {
    const double psi_total = Digamma(tau.sum());
    for (Index i = 0; i < tau.size(); ++i)
      d.e_log_pi(i) = Digamma(tau(i)) - psi_total;
  }
  d.tau = std::move(tau);
  return d;
}

RowPosteriorVtilde RowPosteriorVtilde::PointMass(const MatrixXd &vtilde) {
  RowPosteriorVtilde rows;
  rows.mean = vtilde;
  const Index k = vtilde.cols();
  rows.cov.assign(static_cast<std::size_t>(vtilde.rows()),
                  MatrixXd::Zero(k, k));
  rows.log_det_precision =
      VectorXd::Constant(vtilde.rows(), std::numeric_limits<double>::infinity());
  return rows;
}

VectorXd AlphaPosterior::Mean() const {
  return (a_prime / b_prime.array()).matrix();
}

VectorXd AlphaPosterior::LogMean() const {
  return (Digamma(a_prime) - b_prime.array().log()).matrix();
}

WishartPosterior WishartPosterior::FromInverseScale(MatrixXd k, double dof) {
  const Index d = k.rows();
  SPLDA_CHECK(dof > static_cast<double>(d) - 1.0,
              "Wishart degrees of freedom " << dof << " must exceed d-1 = "
                                            << d - 1);
  WishartPosterior w;
  Symmetrize(&k);
  auto llt = Cholesky(k, "Wishart inverse scale K");
  w.mean = dof * llt.solve(MatrixXd::Identity(d, d));
  Symmetrize(&w.mean);
  double acc = static_cast<double>(d) * std::log(2.0) - LogDet(llt);
  for (Index i = 1; i <= d; ++i)
    acc += Digamma(0.5 * (dof + 1.0 - static_cast<double>(i)));
  w.e_log_det = acc;
  w.k = std::move(k);
  w.dof = dof;
  return w;
}

WishartPosterior WishartPosterior::PointMass(const MatrixXd &w) {
  WishartPosterior out;
  out.mean = w;
  out.e_log_det = LogDetSpd(w, "point-mass W");
  out.dof = std::numeric_limits<double>::infinity();
  out.point_mass = true;
  return out;
}

Corpus Corpus::Build(const Dataset &data) {
  data.Validate();
  Corpus c;
  c.dim = data.Dim();
  c.phi = data.phi;
  if (c.phi.rows() == 0) c.phi.resize(0, c.dim);
  c.scatter = kernels::Scatter(c.phi);
  c.phi_d = data.phi_d;
  if (c.phi_d.rows() == 0) c.phi_d.resize(0, c.dim);
  c.labels_d = data.labels_d;
  c.sup = AccumulateHardStats(c.labels_d, data.NumSupervisedSpeakers(),
                              c.phi_d, true);
  return c;
}

void ElboBreakdown::Add(std::string name, double value) {
  terms.push_back({std::move(name), value});
  total += value;
}

double ElboBreakdown::Term(const std::string &name) const {
  for (const auto &t : terms)
    if (t.name == name) return t.value;
  SPLDA_ERR("no ELBO term named '" << name << "'");
}

}  // namespace splda
