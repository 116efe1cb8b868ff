// src/vb-point.cc

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

#include "splda/vb-point.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splda/kernels.h"
#include "splda/linalg.h"
#include "splda/special.h"

namespace splda {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kMaxConditionNumber = 1e14;
constexpr double kDegenerateResidual = 1e-12;

// Newton on ln(tau0).
constexpr double kNewtonTol = 1e-10;
constexpr int kNewtonMaxIter = 100;
constexpr double kMaxLogStep = 3.0;
constexpr double kLogClamp = 230.0;

MatrixXd CenteredFirstOrder(const MatrixXd &f, const VectorXd &n,
                            const VectorXd &mu) {
  return f - mu * n.transpose();
}

}  // namespace

SpeakerPosteriors UpdateQy(const VectorXd &n, const MatrixXd &f_bar,
                           const SpldaModel &model, double kappa) {
  SPLDA_CHECK(kappa > 0.0 && kappa <= 1.0, "kappa " << kappa
                                                    << " outside (0, 1]");
  SPLDA_CHECK(f_bar.cols() == n.size() && f_bar.rows() == model.Dim(),
              "UpdateQy: stats are " << f_bar.rows() << "x" << f_bar.cols()
                                     << " for " << n.size() << " speakers");
  const Index k = model.SpeakerDim();
  const MatrixXd vtw = model.V.transpose() * model.W;
  MatrixXd vtwv = vtw * model.V;
  Symmetrize(&vtwv);
  SpeakerPosteriors out(static_cast<std::size_t>(n.size()));
  kernels::ParallelFor(n.size(), [&](Index i) {
    MatrixXd l = MatrixXd::Identity(k, k) + n(i) * vtwv;
    auto llt = Cholesky(l, "q(y) precision");
    VectorXd mean = llt.solve(vtw * f_bar.col(i));
    if (kappa != 1.0) l *= kappa;
    out[static_cast<std::size_t>(i)] =
        SpeakerPosterior::FromPrecision(std::move(mean), std::move(l));
  });
  return out;
}

Responsibilities NormalizeLogRho(MatrixXd log_rho, double kappa) {
  SPLDA_CHECK(kappa > 0.0 && kappa <= 1.0, "kappa " << kappa
                                                    << " outside (0, 1]");
  Responsibilities out;
  if (log_rho.cols() == 0) {
    SPLDA_CHECK(log_rho.rows() == 0,
                log_rho.rows() << " i-vectors but no clusters to assign");
    out.r = log_rho;
  } else {
    out.r = kernels::SoftmaxRows(log_rho, kappa);
  }
  out.log_rho = std::move(log_rho);
  return out;
}

Responsibilities UpdateQTheta(const MatrixXd &phi, const SpeakerPosteriors &y,
                              const SpldaModel &model,
                              const DirichletPosterior &dir, double kappa) {
  const Index m = static_cast<Index>(y.size());
  SPLDA_CHECK(dir.e_log_pi.size() == m, "q(pi) has " << dir.e_log_pi.size()
                                                     << " components, q(Y) "
                                                     << m);
  const Index d = model.Dim();
  MatrixXd vtwv = model.V.transpose() * model.W * model.V;
  Symmetrize(&vtwv);
  kernels::ScoreParams p;
  p.offset = model.mu;
  p.precision = model.W;
  p.linear.resize(d, m);
  p.speaker_const.resize(m);
  const MatrixXd wv = model.W * model.V;
  for (Index i = 0; i < m; ++i) {
    const auto &yi = y[static_cast<std::size_t>(i)];
    p.linear.col(i) = wv * yi.mean;
    p.speaker_const(i) =
        -0.5 * vtwv.cwiseProduct(yi.second_moment).sum() + dir.e_log_pi(i);
  }
  p.constant = 0.5 * (LogDetSpd(model.W, "q(theta): W") - d * kLog2Pi);
  return NormalizeLogRho(kernels::GaussianScores(phi, p), kappa);
}

DirichletPosterior UpdateQPi(const VectorXd &expected_counts, double tau0,
                             double kappa) {
  SPLDA_CHECK(tau0 > 0.0, "tau0 " << tau0 << " must be positive");
  SPLDA_CHECK(kappa > 0.0 && kappa <= 1.0, "kappa " << kappa
                                                    << " outside (0, 1]");
  VectorXd tau(expected_counts.size());
  for (Index i = 0; i < tau.size(); ++i) {
    const double c = expected_counts(i);
    SPLDA_CHECK(c >= 0.0, "negative expected count " << c);
    if (kappa == 1.0) {
      tau(i) = c + tau0;
    } else {
      tau(i) = kappa * (c + tau0 - 1.0) + 1.0;
      SPLDA_CHECK(tau(i) > 0.0,
                  "annealed Dirichlet count " << tau(i) << " for cluster " << i
                                              << " is not positive; raise "
                                                 "kappa or tau0");
    }
  }
  return DirichletPosterior::FromTau(std::move(tau));
}

YAccumulators AccumulateY(const VectorXd &n, const MatrixXd &f,
                          const SpeakerPosteriors &y, Index speaker_dim) {
  SPLDA_CHECK(static_cast<Index>(y.size()) == n.size(),
              y.size() << " speaker posteriors for " << n.size()
                       << " speakers");
  const Index k = speaker_dim;
  YAccumulators acc;
  acc.c_tilde = MatrixXd::Zero(f.rows(), k + 1);
  acc.r_tilde = MatrixXd::Zero(k + 1, k + 1);
  acc.rho = MatrixXd::Zero(k, k);
  acc.mean_sum = VectorXd::Zero(k);
  for (Index i = 0; i < n.size(); ++i) {
    const auto &yi = y[static_cast<std::size_t>(i)];
    acc.c_tilde.noalias() += f.col(i) * yi.AugmentedMean().transpose();
    acc.r_tilde += n(i) * yi.AugmentedSecondMoment();
    acc.rho += yi.second_moment;
    acc.mean_sum += yi.mean;
  }
  Symmetrize(&acc.r_tilde);
  Symmetrize(&acc.rho);
  return acc;
}

double ExpectedDataLogLik(double e_n, const MatrixXd &e_s,
                          const MatrixXd &c_tilde, const MatrixXd &r_tilde,
                          const MatrixXd &vtilde, const MatrixXd &w) {
  if (e_n == 0.0) return 0.0;
  const Index d = w.rows();
  const MatrixXd cv = c_tilde * vtilde.transpose();
  const MatrixXd inner =
      e_s - cv - cv.transpose() + vtilde * r_tilde * vtilde.transpose();
  return 0.5 * e_n * (LogDetSpd(w, "data term: W") - d * kLog2Pi) -
         0.5 * w.cwiseProduct(inner).sum();
}

void AddLatentTerms(const Corpus &corpus, const VbState &state,
                    double sup_weight, ElboBreakdown *elbo) {
  const Index k = state.model.SpeakerDim();
  auto prior = [&](const SpeakerPosteriors &ys) {
    double acc = -0.5 * static_cast<double>(ys.size() * k) * kLog2Pi;
    for (const auto &y : ys) acc -= 0.5 * y.second_moment.trace();
    return acc;
  };
  auto entropy = [&](const SpeakerPosteriors &ys) {
    double acc = 0.5 * static_cast<double>(ys.size() * k) * (kLog2Pi + 1.0);
    for (const auto &y : ys) {
      SPLDA_CHECK(std::isfinite(y.log_det_precision),
                  "speaker posterior has no finite precision");
      acc -= 0.5 * y.log_det_precision;
    }
    return acc;
  };

  const MatrixXd &r = state.resp.r;
  const Index m = r.cols();
  SPLDA_CHECK(static_cast<Index>(state.y.size()) == m &&
                  state.dir.tau.size() == m,
              "inconsistent cluster count: r has " << m << " columns, q(Y) "
                                                   << state.y.size()
                                                   << ", q(pi) "
                                                   << state.dir.tau.size());
  const VectorXd counts = r.colwise().sum().transpose();
  const VectorXd &elp = state.dir.e_log_pi;
  const double tau0 = state.hyper.tau0;

  double h_theta = 0.0;
  for (Index j = 0; j < r.rows(); ++j)
    for (Index i = 0; i < m; ++i)
      if (r(j, i) > 0.0) h_theta -= r(j, i) * std::log(r(j, i));

  elbo->Add("E[ln P(Y)]", prior(state.y));
  elbo->Add("E[ln P(Y_d)]", sup_weight * prior(state.y_d));
  elbo->Add("E[ln P(theta|pi)]", counts.dot(elp));
  elbo->Add("E[ln P(pi)]", LogSymmetricDirichletNormalizer(tau0, m) +
                               (tau0 - 1.0) * elp.sum());
  elbo->Add("-E[ln q(Y)]", entropy(state.y));
  elbo->Add("-E[ln q(Y_d)]", sup_weight * entropy(state.y_d));
  elbo->Add("-E[ln q(theta)]", h_theta);
  elbo->Add("-E[ln q(pi)]",
            -LogDirichletNormalizer(state.dir.tau) -
                (state.dir.tau.array() - 1.0).matrix().dot(elp));
  (void)corpus;
}

ElboBreakdown ElboPoint(const Corpus &corpus, const VbState &state) {
  const SpldaModel &model = state.model;
  const Index k = model.SpeakerDim();
  const MatrixXd vt = model.Vtilde();
  ElboBreakdown elbo;

  kernels::FirstOrder fo =
      kernels::AccumulateFirstOrder(state.resp.r, corpus.phi);
  const YAccumulators acc = AccumulateY(fo.n, fo.f, state.y, k);
  elbo.Add("E[ln P(Phi|Y,theta)]",
           ExpectedDataLogLik(fo.n.sum(), corpus.scatter, acc.c_tilde,
                              acc.r_tilde, vt, model.W));

  const SuffStats &sup = corpus.sup;
  const YAccumulators acc_d = AccumulateY(sup.n, sup.f, state.y_d, k);
  elbo.Add("E[ln P(Phi_d|Y_d)]",
           ExpectedDataLogLik(sup.total_n, sup.s, acc_d.c_tilde,
                              acc_d.r_tilde, vt, model.W));

  AddLatentTerms(corpus, state, 1.0, &elbo);
  return elbo;
}

MatrixXd MstepVtilde(const MatrixXd &c_tilde, const MatrixXd &r_tilde,
                     const MatrixXd &c_tilde_d, const MatrixXd &r_tilde_d,
                     double eta) {
  SPLDA_CHECK(eta >= 0.0 && eta <= 1.0, "eta " << eta << " outside [0, 1]");
  const MatrixXd c_prime = c_tilde + eta * c_tilde_d;
  MatrixXd r_prime = r_tilde + eta * r_tilde_d;
  Symmetrize(&r_prime);
  const double cond = ConditionNumber(r_prime);
  SPLDA_CHECK(cond <= kMaxConditionNumber,
              "Vtilde M-step: R' is singular (condition number " << cond
                                                                 << ")");
  return r_prime.ldlt().solve(c_prime.transpose()).transpose();
}

MatrixXd ResidualScatter(const MatrixXd &e_s, const MatrixXd &s_d,
                         const MatrixXd &c_prime, const MatrixXd &r_prime,
                         const MatrixXd &vtilde, double eta) {
  const MatrixXd cv = c_prime * vtilde.transpose();
  MatrixXd k = e_s + eta * s_d - cv - cv.transpose() +
               vtilde * r_prime * vtilde.transpose();
  Symmetrize(&k);
  return k;
}

MatrixXd MstepW(const MatrixXd &e_s, const MatrixXd &s_d,
                const MatrixXd &c_prime, const MatrixXd &r_prime,
                const MatrixXd &vtilde, double e_n, double n_d, double eta) {
  const Index d = e_s.rows();
  const double n_prime = e_n + eta * n_d;
  SPLDA_CHECK(n_prime > static_cast<double>(d),
              "W M-step: effective count " << n_prime
                                           << " must exceed the dimension "
                                           << d);
  MatrixXd cov =
      ResidualScatter(e_s, s_d, c_prime, r_prime, vtilde, eta) / n_prime;
  const double scale = (e_s + eta * s_d).trace() / (n_prime * d);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  SPLDA_CHECK(lo > kDegenerateResidual * scale,
              "W M-step: residual covariance is degenerate (smallest "
              "eigenvalue "
                  << lo << ", data scale " << scale
                  << "); the data have no within-speaker variability");
  return InverseSpd(cov, "W M-step: residual covariance");
}

double MstepObjective(const Corpus &corpus, const YAccumulators &acc,
                      const YAccumulators &acc_d, double e_n, double eta,
                      const MatrixXd &vtilde, const MatrixXd &w) {
  return ExpectedDataLogLik(e_n, corpus.scatter, acc.c_tilde, acc.r_tilde,
                            vtilde, w) +
         eta * ExpectedDataLogLik(corpus.sup.total_n, corpus.sup.s,
                                  acc_d.c_tilde, acc_d.r_tilde, vtilde, w);
}

NewtonResult MstepTau0(const VectorXd &e_log_pi, double tau0_init) {
  const Index m = e_log_pi.size();
  SPLDA_CHECK(m >= 2, "tau0 update needs at least 2 clusters, got " << m);
  SPLDA_CHECK(tau0_init > 0.0, "tau0 start " << tau0_init
                                             << " must be positive");
  const double g = e_log_pi.mean();
  SPLDA_CHECK(g < 0.0, "mean E[ln pi] = " << g << " must be negative");
  const double md = static_cast<double>(m);
  auto f = [&](double u) {
    const double t = std::exp(u);
    return Digamma(md * t) - Digamma(t) + g;
  };

  double u = std::clamp(std::log(tau0_init), -kLogClamp, kLogClamp);
  double fu = f(u);
  NewtonResult res;
  for (res.iterations = 0; res.iterations < kNewtonMaxIter; ++res.iterations) {
    if (std::abs(fu) < kNewtonTol) break;
    const double t = std::exp(u);
    const double deriv = t * (md * Trigamma(md * t) - Trigamma(t));
    double step = deriv != 0.0 ? -fu / deriv : 0.0;
    if (!std::isfinite(step)) step = fu > 0.0 ? kMaxLogStep : -kMaxLogStep;
    step = std::clamp(step, -kMaxLogStep, kMaxLogStep);
    double u_new = u, f_new = fu;
    for (int bt = 0; bt < 40; ++bt) {
      u_new = std::clamp(u + step, -kLogClamp, kLogClamp);
      f_new = f(u_new);
      if (std::abs(f_new) < std::abs(fu)) break;
      step *= 0.5;
    }
    if (!(std::abs(f_new) < std::abs(fu))) break;
    u = u_new;
    fu = f_new;
  }
  res.value = std::exp(u);
  res.residual = std::abs(fu);
  res.converged = res.residual < kNewtonTol;
  if (!res.converged)
    SPLDA_WARN("tau0 Newton stopped at residual " << res.residual << " after "
                                                  << res.iterations
                                                  << " iterations");
  return res;
}

MinDivergenceResult MinDivergence(const SpeakerPosteriors &y,
                                  const SpeakerPosteriors &y_d,
                                  const SpldaModel &model, double eta) {
  const Index k = model.SpeakerDim();
  const double weight =
      static_cast<double>(y.size()) + eta * static_cast<double>(y_d.size());
  SPLDA_CHECK(weight > 0.0, "minimum divergence needs speaker posteriors");
  VectorXd mean_sum = VectorXd::Zero(k), mean_sum_d = VectorXd::Zero(k);
  MatrixXd rho = MatrixXd::Zero(k, k), rho_d = MatrixXd::Zero(k, k);
  for (const auto &p : y) {
    mean_sum += p.mean;
    rho += p.second_moment;
  }
  for (const auto &p : y_d) {
    mean_sum_d += p.mean;
    rho_d += p.second_moment;
  }
  MinDivergenceResult res;
  res.mu_y = (mean_sum + eta * mean_sum_d) / weight;
  res.sigma_y = (rho + eta * rho_d) / weight - res.mu_y * res.mu_y.transpose();
  Symmetrize(&res.sigma_y);
  res.factor = CholeskyFactor(res.sigma_y, "minimum divergence: Sigma_y");
  res.model.mu = model.mu + model.V * res.mu_y;
  res.model.V = model.V * res.factor;
  res.model.W = model.W;
  return res;
}

SpeakerPosterior TransformPosterior(const SpeakerPosterior &p,
                                    const VectorXd &mu_y,
                                    const MatrixXd &factor) {
  const auto tri = factor.triangularView<Eigen::Lower>();
  VectorXd mean = tri.solve(p.mean - mu_y);
  if (p.precision.size() == 0) return SpeakerPosterior::PointMass(mean);
  MatrixXd prec = factor.transpose() * p.precision * factor;
  Symmetrize(&prec);
  return SpeakerPosterior::FromPrecision(std::move(mean), std::move(prec));
}

SpeakerPosteriors SupervisedPosteriors(const Corpus &corpus,
                                       const SpldaModel &model, double kappa) {
  const SuffStats &sup = corpus.sup;
  return UpdateQy(sup.n, CenteredFirstOrder(sup.f, sup.n, model.mu), model,
                  kappa);
}

void PointEstep(const Corpus &corpus, double kappa, VbState *state) {
  const SpldaModel &model = state->model;
  if (state->NumClusters() > 0) {
    kernels::FirstOrder fo =
        kernels::AccumulateFirstOrder(state->resp.r, corpus.phi);
    state->y = UpdateQy(fo.n, CenteredFirstOrder(fo.f, fo.n, model.mu), model,
                        kappa);
  }
  state->y_d = SupervisedPosteriors(corpus, model, kappa);
  state->resp = UpdateQTheta(corpus.phi, state->y, model, state->dir, kappa);
  const VectorXd counts = state->resp.r.colwise().sum().transpose();
  state->dir = UpdateQPi(counts, state->hyper.tau0, kappa);
}

void PointMstep(const Corpus &corpus, const PointMstepOptions &opts,
                VbState *state, const YAccumulators *override_acc) {
  const Index k = state->model.SpeakerDim();
  kernels::FirstOrder fo =
      kernels::AccumulateFirstOrder(state->resp.r, corpus.phi);
  const YAccumulators acc =
      override_acc ? *override_acc : AccumulateY(fo.n, fo.f, state->y, k);
  const SuffStats &sup = corpus.sup;
  const YAccumulators acc_d = AccumulateY(sup.n, sup.f, state->y_d, k);
  const double eta = opts.eta;

  const MatrixXd vt =
      MstepVtilde(acc.c_tilde, acc.r_tilde, acc_d.c_tilde, acc_d.r_tilde, eta);
  const MatrixXd c_prime = acc.c_tilde + eta * acc_d.c_tilde;
  MatrixXd r_prime = acc.r_tilde + eta * acc_d.r_tilde;
  Symmetrize(&r_prime);
  MatrixXd w = MstepW(corpus.scatter, sup.s, c_prime, r_prime, vt,
                      fo.n.sum(), sup.total_n, eta);
  state->model = SpldaModel::FromVtilde(vt, std::move(w));

  if (opts.min_divergence) {
    MinDivergenceResult md =
        MinDivergence(state->y, state->y_d, state->model, eta);
    for (auto &p : state->y) p = TransformPosterior(p, md.mu_y, md.factor);
    for (auto &p : state->y_d) p = TransformPosterior(p, md.mu_y, md.factor);
    state->model = std::move(md.model);
  }
  if (opts.optimize_tau0 && state->NumClusters() >= 2) {
    state->hyper.tau0 = MstepTau0(state->dir.e_log_pi, state->hyper.tau0).value;
  }
}

}  // namespace splda
