// include/splda/vb-bayes.h

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

#ifndef SPLDA_VB_BAYES_H_
#define SPLDA_VB_BAYES_H_

#include "splda/common.h"
#include "splda/posteriors.h"
#include "splda/vb-point.h"

// Variational Bayes with posteriors over the model parameters.  Rows of
// [V | mu] get Gaussian posteriors and W a Wishart one.  The columns of V
// carry Gamma-distributed precisions alpha.

namespace splda {

/// Moments of q(Vt) q(W) used by the speaker-side updates.
struct BayesExpectations {
  MatrixXd vt_mean;   // E[Vt], d x (n_y + 1)
  MatrixXd w_mean;    // E[W]
  double e_log_det_w = 0.0;
  MatrixXd e_vtwvt;   // E[Vt^T W Vt] = sum_r w_rr Sigma_r + Vt^T W Vt

  Index SpeakerDim() const { return vt_mean.cols() - 1; }
  MatrixXd EVtWV() const;   // top-left n_y x n_y block
  VectorXd EVtWMu() const;  // top-right column
};

BayesExpectations ComputeExpectations(const BayesPosterior &post);

/// rho_r = sum(R o Sigma_r) for every row posterior.
VectorXd RowTraceTerms(const RowPosteriorVtilde &rows, const MatrixXd &r);

/// E[Vt R Vt^T] = E[Vt] R E[Vt]^T + diag(rho).
MatrixXd ExpectedVtRVt(const RowPosteriorVtilde &rows, const MatrixXd &r);

/// q(y_i): L = I + N_i E[V^T W V],
/// mean = L^-1 (E[V]^T E[W] F_i - N_i E[V^T W mu]).  `f` is raw, d x M.
SpeakerPosteriors UpdateQyBayes(const VectorXd &n, const MatrixXd &f,
                                const BayesExpectations &ex, double kappa);

Responsibilities UpdateQThetaBayes(const MatrixXd &phi,
                                   const SpeakerPosteriors &y,
                                   const BayesExpectations &ex,
                                   const DirichletPosterior &dir,
                                   double kappa);

/// One ascending Gauss-Seidel sweep over the rows of Vt.  `current` supplies
/// the neighbour means for rows not yet visited.  alpha_mean holds E[alpha];
/// mu0 and beta the prior on mu.
RowPosteriorVtilde UpdateQVtildeRows(const MatrixXd &c_prime,
                                     const MatrixXd &r_prime,
                                     const MatrixXd &w_mean,
                                     const VectorXd &alpha_mean,
                                     const VectorXd &mu0,
                                     const VectorXd &beta,
                                     const RowPosteriorVtilde &current,
                                     double kappa);

/// E[v_q^T v_q] for every column of V.
VectorXd ExpectedColumnNorms(const RowPosteriorVtilde &rows);

AlphaPosterior UpdateQAlpha(const RowPosteriorVtilde &rows, double a_alpha,
                            double b_alpha, double kappa);

/// Inverse scale K = E[S] + eta S_d - C' E[Vt]^T - E[Vt] C'^T + E[Vt R' Vt^T].
MatrixXd WishartInverseScale(const MatrixXd &e_s, const MatrixXd &s_d,
                             const MatrixXd &c_prime, const MatrixXd &r_prime,
                             const RowPosteriorVtilde &rows, double eta);

WishartPosterior UpdateQWishart(const MatrixXd &e_s, const MatrixXd &s_d,
                                const MatrixXd &c_prime,
                                const MatrixXd &r_prime,
                                const RowPosteriorVtilde &rows, double e_n,
                                double n_d, double eta, double kappa);

/// E[ln P(Phi | ...)] under q(Vt) q(W).
double ExpectedDataLogLikBayes(double e_n, const MatrixXd &e_s,
                               const MatrixXd &c_tilde,
                               const MatrixXd &r_tilde,
                               const RowPosteriorVtilde &rows,
                               const WishartPosterior &w);

/// The full bound; supervised terms are weighted by eta.
ElboBreakdown ElboBayes(const Corpus &corpus, const VbState &state,
                        double eta);

struct AlphaHyperResult {
  double a = 0.0;
  double b = 0.0;
  NewtonResult newton;
  bool clamped = false;
};

/// Maximizes the bound over (a_alpha, b_alpha): solves
/// psi(a) - ln a + ln mean(E[alpha]) - mean(E[ln alpha]) = 0, b = a / mean.
AlphaHyperResult OptimizeHyperAlpha(const AlphaPosterior &alpha,
                                    double a_init);

struct MuHyperResult {
  VectorXd mu0;
  VectorXd beta;
  bool clamped = false;
};

MuHyperResult OptimizeHyperMu(const RowPosteriorVtilde &rows, bool isotropic);

/// Fills unset mu0/beta with defaults taken from the supervised data (or
/// the unsupervised data when there is none).
void ResolveHyperparams(const Corpus &corpus, Hyperparams *hyper);

/// Starts q(Vt), q(W) as point masses on `model` and q(alpha) with
/// E[alpha_q] = d / |v_q|^2.
BayesPosterior InitBayesPosterior(const SpldaModel &model,
                                  const Hyperparams &hyper);

struct BayesSweepOptions {
  double eta = 1.0;
  bool optimize_alpha = false;
  bool optimize_mu = false;
  bool optimize_tau0 = false;
};

/// q(Y, Y_d) -> q(theta) -> q(pi) -> rows of q(Vt) -> q(alpha) -> q(W),
/// then the enabled hyperparameter updates.  state->model is refreshed with
/// posterior means.
void BayesSweep(const Corpus &corpus, const BayesSweepOptions &opts,
                double kappa, VbState *state);

}  // namespace splda

#endif  // SPLDA_VB_BAYES_H_
