// include/splda/vb-point.h

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

#ifndef SPLDA_VB_POINT_H_
#define SPLDA_VB_POINT_H_

#include "splda/common.h"
#include "splda/posteriors.h"

// Variational Bayes with point estimates of mu, V and W.  The q-updates
// follow the mean-field factorization q(Y, Y_d) q(theta) q(pi); the model
// parameters are re-estimated by maximizing the bound.

namespace splda {

/// q(y_i) for every speaker: L = I + N_i V^T W V, mean = L^-1 V^T W Fbar_i.
/// The returned precision is kappa * L.  `f_bar` is d x M, centered on mu.
SpeakerPosteriors UpdateQy(const VectorXd &n, const MatrixXd &f_bar,
                           const SpldaModel &model, double kappa);

/// q(theta) given q(Y) and q(pi); log-scores kept for the bound.
Responsibilities UpdateQTheta(const MatrixXd &phi, const SpeakerPosteriors &y,
                              const SpldaModel &model,
                              const DirichletPosterior &dir, double kappa);

/// Tempered row softmax of precomputed log-scores.
Responsibilities NormalizeLogRho(MatrixXd log_rho, double kappa);

/// tau_i = E[N_i] + tau0, or kappa (E[N_i] + tau0 - 1) + 1 when annealing.
DirichletPosterior UpdateQPi(const VectorXd &expected_counts, double tau0,
                             double kappa);

/// Accumulators over speaker posteriors:
///   c_tilde = sum_i F_i E[yt_i]^T, r_tilde = sum_i N_i E[yt_i yt_i^T],
///   rho = sum_i E[y_i y_i^T], mean_sum = sum_i E[y_i].
struct YAccumulators {
  MatrixXd c_tilde;
  MatrixXd r_tilde;
  MatrixXd rho;
  VectorXd mean_sum;
};

YAccumulators AccumulateY(const VectorXd &n, const MatrixXd &f,
                          const SpeakerPosteriors &y, Index speaker_dim);

/// E[ln P(Phi | Y, theta)] for a point Vtilde, W:
///   N/2 ln|W/2pi| - 1/2 tr(W (S - 2 C Vt^T + Vt R Vt^T)).
double ExpectedDataLogLik(double e_n, const MatrixXd &e_s,
                          const MatrixXd &c_tilde, const MatrixXd &r_tilde,
                          const MatrixXd &vtilde, const MatrixXd &w);

/// Terms of the bound shared by both variants (Y priors and entropies,
/// theta and pi terms).  `sup_weight` multiplies the supervised Y terms.
void AddLatentTerms(const Corpus &corpus, const VbState &state,
                    double sup_weight, ElboBreakdown *elbo);

/// The ten-term lower bound for the point-estimate model (no eta).
ElboBreakdown ElboPoint(const Corpus &corpus, const VbState &state);

/// Vt = C' R'^-1 with C' = C + eta C_d, R' = R + eta R_d.
MatrixXd MstepVtilde(const MatrixXd &c_tilde, const MatrixXd &r_tilde,
                     const MatrixXd &c_tilde_d, const MatrixXd &r_tilde_d,
                     double eta);

/// Residual scatter K = E[S] + eta S_d - C' Vt^T - Vt C'^T + Vt R' Vt^T.
MatrixXd ResidualScatter(const MatrixXd &e_s, const MatrixXd &s_d,
                         const MatrixXd &c_prime, const MatrixXd &r_prime,
                         const MatrixXd &vtilde, double eta);

/// W = ((E[N] + eta N_d)^-1 K)^-1.
MatrixXd MstepW(const MatrixXd &e_s, const MatrixXd &s_d,
                const MatrixXd &c_prime, const MatrixXd &r_prime,
                const MatrixXd &vtilde, double e_n, double n_d, double eta);

/// The eta-weighted part of the bound that depends on (Vt, W); used for
/// M-step stationarity checks.
double MstepObjective(const Corpus &corpus, const YAccumulators &acc,
                      const YAccumulators &acc_d, double e_n, double eta,
                      const MatrixXd &vtilde, const MatrixXd &w);

struct NewtonResult {
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Solves psi(M tau0) - psi(tau0) + g = 0, g = mean E[ln pi_i], by Newton
/// steps on ln tau0.
NewtonResult MstepTau0(const VectorXd &e_log_pi, double tau0_init);

struct MinDivergenceResult {
  SpldaModel model;
  VectorXd mu_y;
  MatrixXd sigma_y;
  MatrixXd factor;  // lower Cholesky factor of sigma_y
};

/// Fits a general Gaussian prior to the speaker posteriors and folds it into
/// the model: mu' = mu + V mu_y, V' = V T with T T^T = Sigma_y.
MinDivergenceResult MinDivergence(const SpeakerPosteriors &y,
                                  const SpeakerPosteriors &y_d,
                                  const SpldaModel &model, double eta);

/// Expresses q(y) in the coordinates of the transformed model,
/// y' = T^-1 (y - mu_y).
SpeakerPosterior TransformPosterior(const SpeakerPosterior &p,
                                    const VectorXd &mu_y,
                                    const MatrixXd &factor);

/// q(Y, Y_d) -> q(theta) -> q(pi) at the given kappa.
void PointEstep(const Corpus &corpus, double kappa, VbState *state);

struct PointMstepOptions {
  double eta = 1.0;
  bool min_divergence = true;
  bool optimize_tau0 = false;
};

/// Vt and W M-steps, then optional minimum divergence and tau0 update.
/// When `override_acc` is given it replaces the unsupervised accumulators
/// (used by the sampling hybrid).
void PointMstep(const Corpus &corpus, const PointMstepOptions &opts,
                VbState *state, const YAccumulators *override_acc = nullptr);

/// Posteriors of the supervised speakers under the current model.
SpeakerPosteriors SupervisedPosteriors(const Corpus &corpus,
                                       const SpldaModel &model, double kappa);

}  // namespace splda

#endif  // SPLDA_VB_POINT_H_
