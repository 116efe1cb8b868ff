// include/splda/synth.h

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

#ifndef SPLDA_SYNTH_H_
#define SPLDA_SYNTH_H_

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "splda/common.h"
#include "splda/model.h"

namespace splda {

struct SynthSpec {
  Index dim = 10;
  Index speaker_dim = 2;
  Index num_speakers = 10;
  Index min_per_speaker = 10;  // vectors per speaker drawn uniformly from
  Index max_per_speaker = 10;  // [min, max]
  Index num_sup_speakers = 0;
  Index sup_min_per_speaker = 10;
  Index sup_max_per_speaker = 10;
  double eigenvoice_scale = 1.0;
  double noise_scale = 1.0;  // 0 gives noiseless data and no usable W
  std::optional<SpldaModel> model;  // overrides the random model
  std::uint64_t seed = 1;

  void Validate() const;
};

struct SynthData {
  Dataset data;
  std::vector<int> labels;  // true speaker of each unsupervised row
  SpldaModel model;         // W is empty when noise_scale == 0
  MatrixXd y;               // true factors, n_y x num_speakers
  bool has_precision = true;
};

/// Random model: V = s_v Q with orthonormal Q, W^-1 = s_n^2 U diag(l) U^T
/// with l uniform in [0.5, 1.5], mu ~ N(0, I).  W is left empty for s_n = 0.
SpldaModel RandomModel(Index dim, Index speaker_dim, double eigenvoice_scale,
                       double noise_scale, std::mt19937_64 *rng);

SynthData Generate(const SynthSpec &spec);

/// Same-speaker log-likelihood ratio of two i-vectors, built directly from
/// the 2d-dimensional joint Gaussian.
double PairwiseLlr(const SpldaModel &model, const VectorXd &a,
                   const VectorXd &b);

/// The same score reduced to quadratic forms, for scoring many pairs:
///   llr = 1/2 a^T Q a + 1/2 b^T Q b + a^T P b + c   (centered on mu).
class PairwiseScorer {
 public:
  explicit PairwiseScorer(const SpldaModel &model);
  double Score(const VectorXd &a, const VectorXd &b) const;
  /// Symmetric N x N matrix of scores between rows of phi.
  MatrixXd ScoreAll(const MatrixXd &phi) const;

 private:
  VectorXd mu_;
  MatrixXd q_;
  MatrixXd p_;
  double c_ = 0.0;
};

/// Average-linkage agglomeration on a similarity matrix, cut at
/// `num_clusters`.  Labels are numbered by first appearance.
std::vector<int> AhcAverageLinkage(const MatrixXd &similarity,
                                   Index num_clusters);

struct MetricReport {
  double ari = 0.0;
  double purity = 0.0;
  MatrixXd confusion;  // predicted cluster x true cluster counts
};

MetricReport ClusteringMetrics(const std::vector<int> &pred,
                               const std::vector<int> &truth);

}  // namespace splda

#endif  // SPLDA_SYNTH_H_
