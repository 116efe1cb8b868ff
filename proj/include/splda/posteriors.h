// include/splda/posteriors.h

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

#ifndef SPLDA_POSTERIORS_H_
#define SPLDA_POSTERIORS_H_

#include <optional>
#include <string>
#include <vector>

#include "splda/common.h"
#include "splda/model.h"
#include "splda/stats.h"

namespace splda {

/// Gaussian q(y_i).  `precision` already includes the annealing factor, so
/// cov = precision^-1 is the covariance actually used in expectations.
struct SpeakerPosterior {
  VectorXd mean;
  MatrixXd precision;
  MatrixXd cov;
  MatrixXd second_moment;  // E[y y^T] = cov + mean mean^T
  double log_det_precision = 0.0;

  /// E[yt] with yt = [y; 1].
  VectorXd AugmentedMean() const;
  /// E[yt yt^T] = [E[y y^T], E[y]; E[y]^T, 1].
  MatrixXd AugmentedSecondMoment() const;

  static SpeakerPosterior FromPrecision(VectorXd mean, MatrixXd precision);
  /// Zero-covariance posterior; only valid as an initializer.
  static SpeakerPosterior PointMass(VectorXd mean);
};

using SpeakerPosteriors = std::vector<SpeakerPosterior>;

/// q(theta): r = row-softmax(kappa * log_rho).
struct Responsibilities {
  MatrixXd r;        // N x M
  MatrixXd log_rho;  // N x M, untempered
};

/// q(pi) = Dir(tau) with E[ln pi_i] = psi(tau_i) - psi(sum tau) cached.
struct DirichletPosterior {
  VectorXd tau;
  VectorXd e_log_pi;

  static DirichletPosterior FromTau(VectorXd tau);
};

/// Row-wise Gaussians over the rows of [V | mu].  Covariances are the
/// (annealed) inverses of the precisions.
struct RowPosteriorVtilde {
  MatrixXd mean;                     // d x (n_y + 1), row r = mean of row r
  std::vector<MatrixXd> precision;   // d of (n_y+1)^2, empty for point mass
  std::vector<MatrixXd> cov;         // d of (n_y+1)^2
  VectorXd log_det_precision;        // d

  Index Dim() const { return mean.rows(); }
  Index SpeakerDim() const { return mean.cols() - 1; }
  MatrixXd VMean() const { return mean.leftCols(SpeakerDim()); }
  VectorXd MuMean() const { return mean.col(SpeakerDim()); }
  bool IsPointMass() const { return precision.empty(); }

  static RowPosteriorVtilde PointMass(const MatrixXd &vtilde);
};

/// Independent Gamma(a', b'_q) posteriors on the eigenvoice precisions.
struct AlphaPosterior {
  double a_prime = 1.0;
  VectorXd b_prime;

  VectorXd Mean() const;     // a' / b'_q
  VectorXd LogMean() const;  // psi(a') - ln b'_q
};

/// q(W) = Wishart(K^-1, dof), with K the inverse scale already divided
/// through by the annealing factor.  A point-mass instance only carries the
/// expectation caches.
struct WishartPosterior {
  MatrixXd k;
  double dof = 0.0;
  MatrixXd mean;           // E[W] = dof K^-1
  double e_log_det = 0.0;  // E[ln|W|]
  bool point_mass = false;

  Index Dim() const { return mean.rows(); }
  static WishartPosterior FromInverseScale(MatrixXd k, double dof);
  static WishartPosterior PointMass(const MatrixXd &w);
};

struct BayesPosterior {
  RowPosteriorVtilde rows;
  AlphaPosterior alpha;
  WishartPosterior wishart;
};

struct Hyperparams {
  double tau0 = 1.0;
  double a_alpha = 1e-3;
  double b_alpha = 1e-3;
  VectorXd mu0;   // prior mean of mu; empty means "mean of supervised data"
  VectorXd beta;  // prior precision of mu per dimension; empty means default
  bool beta_isotropic = true;
};

/// Data-side constants of a run: the i-vectors, their global scatter, and
/// hard statistics of the supervised set.
struct Corpus {
  MatrixXd phi;
  MatrixXd scatter;  // sum_j phi_j phi_j^T over the unsupervised set
  MatrixXd phi_d;
  std::vector<int> labels_d;
  SuffStats sup;     // hard per-speaker N_d, F_d and global S_d

  Index Dim() const { return dim; }
  Index NumVectors() const { return phi.rows(); }
  Index NumSupVectors() const { return phi_d.rows(); }
  Index NumSupSpeakers() const { return sup.NumSpeakers(); }

  static Corpus Build(const Dataset &data);

  Index dim = 0;
};

/// Everything one VB iteration reads and writes.
struct VbState {
  SpldaModel model;  // point estimate, or posterior means in the Bayes case
  Responsibilities resp;
  SpeakerPosteriors y;    // unsupervised clusters
  SpeakerPosteriors y_d;  // supervised speakers
  DirichletPosterior dir;
  std::optional<BayesPosterior> bayes;
  Hyperparams hyper;

  Index NumClusters() const { return resp.r.cols(); }
};

struct ElboTerm {
  std::string name;
  double value = 0.0;  // signed contribution to the total
};

struct ElboBreakdown {
  std::vector<ElboTerm> terms;
  double total = 0.0;

  void Add(std::string name, double value);
  double Term(const std::string &name) const;
};

}  // namespace splda

#endif  // SPLDA_POSTERIORS_H_
