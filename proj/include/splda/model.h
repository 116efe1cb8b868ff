// include/splda/model.h

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

#ifndef SPLDA_MODEL_H_
#define SPLDA_MODEL_H_

#include <vector>

#include "splda/common.h"
#include "splda/stats.h"

namespace splda {

/// Simplified PLDA: phi = mu + V y + eps, y ~ N(0, I), eps ~ N(0, W^-1).
struct SpldaModel {
  VectorXd mu;  // speaker-independent mean, length d
  MatrixXd V;   // eigenvoices, d x n_y
  MatrixXd W;   // within-class precision, d x d

  Index Dim() const { return mu.size(); }
  Index SpeakerDim() const { return V.cols(); }

  /// [V | mu], the augmented loading matrix acting on [y; 1].
  MatrixXd Vtilde() const;
  static SpldaModel FromVtilde(const MatrixXd &vtilde, MatrixXd w);

  /// Checks shapes, n_y <= d, symmetry of W and that W factors.
  void Validate() const;
};

/// Supervised (labelled) and unsupervised i-vectors, one per row.
struct Dataset {
  MatrixXd phi;                // N x d
  MatrixXd phi_d;              // N_d x d
  std::vector<int> labels_d;   // N_d speaker ids in [0, M_d)

  Index Dim() const;
  Index NumSupervisedSpeakers() const;
  void Validate() const;
};

struct MarginalParams {
  VectorXd mean;
  MatrixXd cov;
};

/// Distribution of a single i-vector with y integrated out:
/// N(mu, V V^T + W^-1).
MarginalParams ComputeMarginalParams(const SpldaModel &model);

/// ln P(Phi_i | y_i, theta, mu, V, W) from centered statistics:
///   N/2 ln|W/2pi| - 1/2 tr(W Sbar) + y^T V^T W Fbar - N/2 y^T V^T W V y.
/// `stats` must be centered on model.mu and carry Sbar.
double CondLogLik(const SpeakerStats &stats, const VectorXd &y,
                  const SpldaModel &model);

/// Same quantity from raw statistics with the augmented loading matrix:
///   N/2 ln|W/2pi| - 1/2 tr(W (S - 2 F yt^T Vt^T + N Vt yt yt^T Vt^T)).
double CondLogLikAugmented(const SpeakerStats &stats, const VectorXd &y,
                           const SpldaModel &model);

}  // namespace splda

#endif  // SPLDA_MODEL_H_
