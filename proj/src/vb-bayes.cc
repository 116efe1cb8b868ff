// src/vb-bayes.cc

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

#include "splda/vb-bayes.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splda/kernels.h"
#include "splda/linalg.h"
#include "splda/special.h"

namespace splda {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNewtonTol = 1e-10;
constexpr int kNewtonMaxIter = 100;
constexpr double kMaxLogStep = 3.0;
constexpr double kAlphaShapeMax = 1e6;
constexpr double kBetaMax = 1e8;

void CheckKappa(double kappa) {
  SPLDA_CHECK(kappa > 0.0 && kappa <= 1.0, "kappa " << kappa
                                                    << " outside (0, 1]");
}

}  // namespace

MatrixXd BayesExpectations::EVtWV() const {
  const Index k = SpeakerDim();
  return e_vtwvt.topLeftCorner(k, k);
}

VectorXd BayesExpectations::EVtWMu() const {
  const Index k = SpeakerDim();
  return e_vtwvt.topRightCorner(k, 1);
}

BayesExpectations ComputeExpectations(const BayesPosterior &post) {
  const RowPosteriorVtilde &rows = post.rows;
  BayesExpectations ex;
  ex.vt_mean = rows.mean;
  ex.w_mean = post.wishart.mean;
  ex.e_log_det_w = post.wishart.e_log_det;
  ex.e_vtwvt = rows.mean.transpose() * ex.w_mean * rows.mean;
  for (Index r = 0; r < rows.Dim(); ++r)
    ex.e_vtwvt += ex.w_mean(r, r) * rows.cov[static_cast<std::size_t>(r)];
  Symmetrize(&ex.e_vtwvt);
  return ex;
}

VectorXd RowTraceTerms(const RowPosteriorVtilde &rows, const MatrixXd &r) {
  VectorXd rho(rows.Dim());
  for (Index i = 0; i < rows.Dim(); ++i)
    rho(i) = r.cwiseProduct(rows.cov[static_cast<std::size_t>(i)]).sum();
  return rho;
}

MatrixXd ExpectedVtRVt(const RowPosteriorVtilde &rows, const MatrixXd &r) {
  MatrixXd out = rows.mean * r * rows.mean.transpose();
  out.diagonal() += RowTraceTerms(rows, r);
  Symmetrize(&out);
  return out;
}

SpeakerPosteriors UpdateQyBayes(const VectorXd &n, const MatrixXd &f,
                                const BayesExpectations &ex, double kappa) {
  CheckKappa(kappa);
  const Index k = ex.SpeakerDim();
  SPLDA_CHECK(f.cols() == n.size() && f.rows() == ex.vt_mean.rows(),
              "UpdateQyBayes: stats are " << f.rows() << "x" << f.cols()
                                          << " for " << n.size()
                                          << " speakers");
  const MatrixXd vtw = ex.vt_mean.leftCols(k).transpose() * ex.w_mean;
  const MatrixXd evtwv = ex.EVtWV();
  const VectorXd evtwmu = ex.EVtWMu();
  SpeakerPosteriors out(static_cast<std::size_t>(n.size()));
  kernels::ParallelFor(n.size(), [&](Index i) {
    MatrixXd l = MatrixXd::Identity(k, k) + n(i) * evtwv;
    auto llt = Cholesky(l, "q(y) precision");
    VectorXd mean = llt.solve(vtw * f.col(i) - n(i) * evtwmu);
    if (kappa != 1.0) l *= kappa;
    out[static_cast<std::size_t>(i)] =
        SpeakerPosterior::FromPrecision(std::move(mean), std::move(l));
  });
  return out;
}

Responsibilities UpdateQThetaBayes(const MatrixXd &phi,
                                   const SpeakerPosteriors &y,
                                   const BayesExpectations &ex,
                                   const DirichletPosterior &dir,
                                   double kappa) {
  const Index m = static_cast<Index>(y.size());
  const Index d = ex.vt_mean.rows();
  SPLDA_CHECK(dir.e_log_pi.size() == m, "q(pi) has " << dir.e_log_pi.size()
                                                     << " components, q(Y) "
                                                     << m);
  kernels::ScoreParams p;
  p.offset = VectorXd::Zero(d);
  p.precision = ex.w_mean;
  p.linear.resize(d, m);
  p.speaker_const.resize(m);
  const MatrixXd wvt = ex.w_mean * ex.vt_mean;
  for (Index i = 0; i < m; ++i) {
    const auto &yi = y[static_cast<std::size_t>(i)];
    p.linear.col(i) = wvt * yi.AugmentedMean();
    p.speaker_const(i) =
        -0.5 * ex.e_vtwvt.cwiseProduct(yi.AugmentedSecondMoment()).sum() +
        dir.e_log_pi(i);
  }
  p.constant = 0.5 * (ex.e_log_det_w - d * kLog2Pi);
  return NormalizeLogRho(kernels::GaussianScores(phi, p), kappa);
}

RowPosteriorVtilde UpdateQVtildeRows(const MatrixXd &c_prime,
                                     const MatrixXd &r_prime,
                                     const MatrixXd &w_mean,
                                     const VectorXd &alpha_mean,
                                     const VectorXd &mu0,
                                     const VectorXd &beta,
                                     const RowPosteriorVtilde &current,
                                     double kappa) {
  CheckKappa(kappa);
  const Index d = c_prime.rows();
  const Index kt = c_prime.cols();
  const Index k = kt - 1;
  SPLDA_CHECK(alpha_mean.size() == k && mu0.size() == d && beta.size() == d &&
                  current.mean.rows() == d && current.mean.cols() == kt,
              "UpdateQVtildeRows: inconsistent shapes");
  RowPosteriorVtilde rows;
  rows.mean = current.mean;
  rows.precision.resize(static_cast<std::size_t>(d));
  rows.cov.resize(static_cast<std::size_t>(d));
  rows.log_det_precision.resize(d);
  for (Index r = 0; r < d; ++r) {
    VectorXd prior_diag(kt);
    prior_diag << alpha_mean, beta(r);
    MatrixXd l = w_mean(r, r) * r_prime;
    l.diagonal() += prior_diag;
    Symmetrize(&l);
    VectorXd rhs = w_mean(r, r) * c_prime.row(r).transpose();
    for (Index s = 0; s < d; ++s) {
      if (s == r || w_mean(r, s) == 0.0) continue;
      rhs += w_mean(r, s) * (c_prime.row(s).transpose() -
                             r_prime * rows.mean.row(s).transpose());
    }
    rhs(k) += beta(r) * mu0(r);
    auto llt = Cholesky(l, "q(Vt) row precision");
    rows.mean.row(r) = llt.solve(rhs).transpose();
    if (kappa != 1.0) {
      l *= kappa;
      llt.compute(l);
    }
    rows.log_det_precision(r) = LogDet(llt);
    MatrixXd cov = llt.solve(MatrixXd::Identity(kt, kt));
    Symmetrize(&cov);
    rows.cov[static_cast<std::size_t>(r)] = std::move(cov);
    rows.precision[static_cast<std::size_t>(r)] = std::move(l);
  }
  return rows;
}

VectorXd ExpectedColumnNorms(const RowPosteriorVtilde &rows) {
  const Index k = rows.SpeakerDim();
  VectorXd out = VectorXd::Zero(k);
  for (Index r = 0; r < rows.Dim(); ++r) {
    const MatrixXd &cov = rows.cov[static_cast<std::size_t>(r)];
    for (Index q = 0; q < k; ++q)
      out(q) += cov(q, q) + rows.mean(r, q) * rows.mean(r, q);
  }
  return out;
}

AlphaPosterior UpdateQAlpha(const RowPosteriorVtilde &rows, double a_alpha,
                            double b_alpha, double kappa) {
  CheckKappa(kappa);
  SPLDA_CHECK(a_alpha > 0.0 && b_alpha > 0.0,
              "alpha prior (" << a_alpha << ", " << b_alpha
                              << ") must be positive");
  const double half_d = 0.5 * static_cast<double>(rows.Dim());
  const VectorXd norms = ExpectedColumnNorms(rows);
  AlphaPosterior out;
  if (kappa == 1.0) {
    out.a_prime = a_alpha + half_d;
    out.b_prime = (b_alpha + 0.5 * norms.array()).matrix();
  } else {
    out.a_prime = kappa * (a_alpha + half_d - 1.0) + 1.0;
    out.b_prime = (kappa * (b_alpha + 0.5 * norms.array())).matrix();
  }
  SPLDA_CHECK(out.a_prime > 0.0, "annealed alpha shape " << out.a_prime
                                                         << " not positive");
  return out;
}

MatrixXd WishartInverseScale(const MatrixXd &e_s, const MatrixXd &s_d,
                             const MatrixXd &c_prime, const MatrixXd &r_prime,
                             const RowPosteriorVtilde &rows, double eta) {
  const MatrixXd cv = c_prime * rows.mean.transpose();
  MatrixXd k =
      e_s + eta * s_d - cv - cv.transpose() + ExpectedVtRVt(rows, r_prime);
  Symmetrize(&k);
  return k;
}

WishartPosterior UpdateQWishart(const MatrixXd &e_s, const MatrixXd &s_d,
                                const MatrixXd &c_prime,
                                const MatrixXd &r_prime,
                                const RowPosteriorVtilde &rows, double e_n,
                                double n_d, double eta, double kappa) {
  CheckKappa(kappa);
  const double d = static_cast<double>(e_s.rows());
  const double n_prime = e_n + eta * n_d;
  MatrixXd k = WishartInverseScale(e_s, s_d, c_prime, r_prime, rows, eta);
  if (kappa == 1.0) {
    SPLDA_CHECK(n_prime > d, "q(W): effective count "
                                 << n_prime << " must exceed dimension " << d
                                 << "; add data or raise eta");
    return WishartPosterior::FromInverseScale(std::move(k), n_prime);
  }
  const double dof = kappa * (n_prime - d - 1.0) + d + 1.0;
  SPLDA_CHECK(dof > d, "q(W): annealed degrees of freedom "
                           << dof << " must exceed dimension " << d
                           << "; raise kappa or add data");
  k *= kappa;
  return WishartPosterior::FromInverseScale(std::move(k), dof);
}

double ExpectedDataLogLikBayes(double e_n, const MatrixXd &e_s,
                               const MatrixXd &c_tilde,
                               const MatrixXd &r_tilde,
                               const RowPosteriorVtilde &rows,
                               const WishartPosterior &w) {
  if (e_n == 0.0) return 0.0;
  const Index d = e_s.rows();
  const MatrixXd cv = c_tilde * rows.mean.transpose();
  const MatrixXd inner = e_s - cv - cv.transpose() + ExpectedVtRVt(rows, r_tilde);
  return 0.5 * e_n * (w.e_log_det - d * kLog2Pi) -
         0.5 * w.mean.cwiseProduct(inner).sum();
}

ElboBreakdown ElboBayes(const Corpus &corpus, const VbState &state,
                        double eta) {
  SPLDA_CHECK(state.bayes.has_value(), "ElboBayes: no parameter posteriors");
  const BayesPosterior &bp = *state.bayes;
  const RowPosteriorVtilde &rows = bp.rows;
  const WishartPosterior &wp = bp.wishart;
  SPLDA_CHECK(!rows.IsPointMass() && !wp.point_mass,
              "ElboBayes: parameter posteriors are still point masses; run a "
              "sweep first");
  const Hyperparams &hp = state.hyper;
  const Index d = rows.Dim();
  const Index k = rows.SpeakerDim();
  const double dd = static_cast<double>(d), kd = static_cast<double>(k);
  ElboBreakdown elbo;

  kernels::FirstOrder fo =
      kernels::AccumulateFirstOrder(state.resp.r, corpus.phi);
  const YAccumulators acc = AccumulateY(fo.n, fo.f, state.y, k);
  elbo.Add("E[ln P(Phi|Y,theta)]",
           ExpectedDataLogLikBayes(fo.n.sum(), corpus.scatter, acc.c_tilde,
                                   acc.r_tilde, rows, wp));
  const SuffStats &sup = corpus.sup;
  const YAccumulators acc_d = AccumulateY(sup.n, sup.f, state.y_d, k);
  elbo.Add("E[ln P(Phi_d|Y_d)]",
           eta * ExpectedDataLogLikBayes(sup.total_n, sup.s, acc_d.c_tilde,
                                         acc_d.r_tilde, rows, wp));
  AddLatentTerms(corpus, state, eta, &elbo);

  const VectorXd e_alpha = bp.alpha.Mean();
  const VectorXd e_log_alpha = bp.alpha.LogMean();
  const VectorXd norms = ExpectedColumnNorms(rows);
  elbo.Add("E[ln P(V|alpha)]", -0.5 * kd * dd * kLog2Pi +
                                   0.5 * dd * e_log_alpha.sum() -
                                   0.5 * e_alpha.dot(norms));
  elbo.Add("E[ln P(alpha)]",
           kd * (hp.a_alpha * std::log(hp.b_alpha) - LogGamma(hp.a_alpha)) +
               (hp.a_alpha - 1.0) * e_log_alpha.sum() -
               hp.b_alpha * e_alpha.sum());
  double mu_term = -0.5 * dd * kLog2Pi;
  for (Index r = 0; r < d; ++r) {
    const double m = rows.mean(r, k);
    const double var = rows.cov[static_cast<std::size_t>(r)](k, k);
    mu_term += 0.5 * std::log(hp.beta(r)) -
               0.5 * hp.beta(r) * (var + (m - hp.mu0(r)) * (m - hp.mu0(r)));
  }
  elbo.Add("E[ln P(mu)]", mu_term);
  elbo.Add("E[ln P(W)]", -0.5 * (dd + 1.0) * wp.e_log_det);

  elbo.Add("-E[ln q(Vt)]", 0.5 * dd * (kd + 1.0) * (kLog2Pi + 1.0) -
                               0.5 * rows.log_det_precision.sum());
  double h_alpha = 0.0;
  for (Index q = 0; q < k; ++q)
    h_alpha += GammaEntropy(bp.alpha.a_prime, bp.alpha.b_prime(q));
  elbo.Add("-E[ln q(alpha)]", h_alpha);
  // ln B(K^-1, N) = N/2 ln|K| - N d/2 ln 2 - ln Gamma_d(N/2)
  const double n = wp.dof;
  const double log_b = 0.5 * n * LogDetSpd(wp.k, "q(W) inverse scale") -
                       0.5 * n * dd * std::log(2.0) -
                       LogMultivariateGamma(0.5 * n, static_cast<int>(d));
  elbo.Add("-E[ln q(W)]",
           -log_b - 0.5 * (n - dd - 1.0) * wp.e_log_det + 0.5 * n * dd);
  return elbo;
}

AlphaHyperResult OptimizeHyperAlpha(const AlphaPosterior &alpha,
                                    double a_init) {
  const Index k = alpha.b_prime.size();
  SPLDA_CHECK(k >= 1, "alpha hyperparameters need n_y >= 1");
  SPLDA_CHECK(a_init > 0.0, "a_alpha start " << a_init
                                             << " must be positive");
  const double mean_alpha = alpha.Mean().mean();
  const double c = alpha.LogMean().mean();
  const double gap = std::log(mean_alpha) - c;
  auto f = [&](double u) {
    const double a = std::exp(u);
    return Digamma(a) - u + gap;
  };
  const double u_max = std::log(kAlphaShapeMax);

  AlphaHyperResult res;
  double u = std::min(std::log(a_init), u_max);
  double fu = f(u);
  NewtonResult &nr = res.newton;
  for (nr.iterations = 0; nr.iterations < kNewtonMaxIter; ++nr.iterations) {
    if (std::abs(fu) < kNewtonTol) break;
    if (u >= u_max && fu < 0.0) {
      res.clamped = true;
      break;
    }
    const double a = std::exp(u);
    const double deriv = a * Trigamma(a) - 1.0;
    double step = deriv != 0.0 ? -fu / deriv : kMaxLogStep;
    if (!std::isfinite(step)) step = fu < 0.0 ? kMaxLogStep : -kMaxLogStep;
    step = std::clamp(step, -kMaxLogStep, kMaxLogStep);
    double u_new = u, f_new = fu;
    for (int bt = 0; bt < 40; ++bt) {
      u_new = std::min(u + step, u_max);
      f_new = f(u_new);
      if (std::abs(f_new) < std::abs(fu)) break;
      step *= 0.5;
    }
    if (!(std::abs(f_new) < std::abs(fu))) break;
    u = u_new;
    fu = f_new;
  }
  nr.value = std::exp(u);
  nr.residual = std::abs(fu);
  nr.converged = nr.residual < kNewtonTol;
  if (res.clamped) {
    SPLDA_WARN("a_alpha clamped at " << kAlphaShapeMax
                                     << "; E[alpha] moments carry no spread");
  } else if (!nr.converged) {
    SPLDA_WARN("a_alpha Newton stopped at residual " << nr.residual
                                                     << " after "
                                                     << nr.iterations
                                                     << " iterations");
  }
  res.a = nr.value;
  res.b = res.a / mean_alpha;
  return res;
}

MuHyperResult OptimizeHyperMu(const RowPosteriorVtilde &rows, bool isotropic) {
  const Index d = rows.Dim();
  const Index k = rows.SpeakerDim();
  MuHyperResult res;
  res.mu0 = rows.MuMean();
  VectorXd inv(d);
  for (Index r = 0; r < d; ++r) {
    const double m = rows.mean(r, k);
    const double var = rows.cov[static_cast<std::size_t>(r)](k, k);
    inv(r) = var + m * m - 2.0 * res.mu0(r) * m + res.mu0(r) * res.mu0(r);
  }
  auto to_beta = [&](double v) {
    if (!(v > 1.0 / kBetaMax)) {
      res.clamped = true;
      return kBetaMax;
    }
    return 1.0 / v;
  };
  res.beta.resize(d);
  if (isotropic) {
    res.beta.setConstant(to_beta(inv.mean()));
  } else {
    for (Index r = 0; r < d; ++r) res.beta(r) = to_beta(inv(r));
  }
  if (res.clamped) SPLDA_WARN("beta clamped at " << kBetaMax);
  return res;
}

void ResolveHyperparams(const Corpus &corpus, Hyperparams *hyper) {
  const Index d = corpus.Dim();
  const MatrixXd &src =
      corpus.NumSupVectors() > 0 ? corpus.phi_d : corpus.phi;
  SPLDA_CHECK(src.rows() > 0, "no data to set the mu prior from");
  const VectorXd mean = src.colwise().mean().transpose();
  if (hyper->mu0.size() == 0) hyper->mu0 = mean;
  if (hyper->beta.size() == 0) {
    const MatrixXd centered = src.rowwise() - mean.transpose();
    const double tr =
        centered.squaredNorm() / static_cast<double>(std::max<Index>(
                                     src.rows() - 1, 1));
    SPLDA_CHECK(tr > 0.0, "data have zero variance; set beta explicitly");
    hyper->beta = VectorXd::Constant(d, 1e-2 * static_cast<double>(d) / tr);
  } else if (hyper->beta.size() == 1 && d > 1) {
    hyper->beta = VectorXd::Constant(d, hyper->beta(0));
  }
  SPLDA_CHECK(hyper->mu0.size() == d && hyper->beta.size() == d,
              "mu prior has length " << hyper->mu0.size() << "/"
                                     << hyper->beta.size() << ", expected "
                                     << d);
  SPLDA_CHECK((hyper->beta.array() > 0.0).all(), "beta must be positive");
}

BayesPosterior InitBayesPosterior(const SpldaModel &model,
                                  const Hyperparams &hyper) {
  model.Validate();
  const Index d = model.Dim();
  BayesPosterior bp;
  bp.rows = RowPosteriorVtilde::PointMass(model.Vtilde());
  bp.wishart = WishartPosterior::PointMass(model.W);
  bp.alpha.a_prime = hyper.a_alpha + 0.5 * static_cast<double>(d);
  bp.alpha.b_prime.resize(model.SpeakerDim());
  for (Index q = 0; q < model.SpeakerDim(); ++q) {
    const double sq = std::max(model.V.col(q).squaredNorm(), 1e-12);
    bp.alpha.b_prime(q) = bp.alpha.a_prime * sq / static_cast<double>(d);
  }
  return bp;
}

void BayesSweep(const Corpus &corpus, const BayesSweepOptions &opts,
                double kappa, VbState *state) {
  SPLDA_CHECK(state->bayes.has_value(), "BayesSweep: no parameter posteriors");
  BayesPosterior &bp = *state->bayes;
  Hyperparams &hp = state->hyper;
  const Index k = bp.rows.SpeakerDim();
  const double eta = opts.eta;
  const SuffStats &sup = corpus.sup;

  const BayesExpectations ex = ComputeExpectations(bp);
  if (state->NumClusters() > 0) {
    kernels::FirstOrder fo =
        kernels::AccumulateFirstOrder(state->resp.r, corpus.phi);
    state->y = UpdateQyBayes(fo.n, fo.f, ex, kappa);
  }
  state->y_d = UpdateQyBayes(sup.n, sup.f, ex, kappa);
  state->resp =
      UpdateQThetaBayes(corpus.phi, state->y, ex, state->dir, kappa);
  state->dir = UpdateQPi(state->resp.r.colwise().sum().transpose(), hp.tau0,
                         kappa);

  kernels::FirstOrder fo =
      kernels::AccumulateFirstOrder(state->resp.r, corpus.phi);
  const YAccumulators acc = AccumulateY(fo.n, fo.f, state->y, k);
  const YAccumulators acc_d = AccumulateY(sup.n, sup.f, state->y_d, k);
  const MatrixXd c_prime = acc.c_tilde + eta * acc_d.c_tilde;
  MatrixXd r_prime = acc.r_tilde + eta * acc_d.r_tilde;
  Symmetrize(&r_prime);

  bp.rows = UpdateQVtildeRows(c_prime, r_prime, bp.wishart.mean,
                              bp.alpha.Mean(), hp.mu0, hp.beta, bp.rows,
                              kappa);
  bp.alpha = UpdateQAlpha(bp.rows, hp.a_alpha, hp.b_alpha, kappa);
  bp.wishart = UpdateQWishart(corpus.scatter, sup.s, c_prime, r_prime,
                              bp.rows, fo.n.sum(), sup.total_n, eta, kappa);

  if (opts.optimize_alpha && k >= 1) {
    const AlphaHyperResult ar = OptimizeHyperAlpha(bp.alpha, hp.a_alpha);
    hp.a_alpha = ar.a;
    hp.b_alpha = ar.b;
  }
  if (opts.optimize_mu) {
    MuHyperResult mr = OptimizeHyperMu(bp.rows, hp.beta_isotropic);
    hp.mu0 = std::move(mr.mu0);
    hp.beta = std::move(mr.beta);
  }
  if (opts.optimize_tau0 && state->NumClusters() >= 2)
    hp.tau0 = MstepTau0(state->dir.e_log_pi, hp.tau0).value;

  state->model.mu = bp.rows.MuMean();
  state->model.V = bp.rows.VMean();
  state->model.W = bp.wishart.mean;
}

}  // namespace splda
