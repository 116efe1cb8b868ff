// include/splda/stats.h

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

#ifndef SPLDA_STATS_H_
#define SPLDA_STATS_H_

#include <vector>

#include "splda/common.h"

namespace splda {

/// Statistics of one speaker.  `s` and `s_bar` are only filled when the
/// second-order statistic was requested for that speaker.
struct SpeakerStats {
  double n = 0.0;
  VectorXd f;
  MatrixXd s;
  bool centered = false;
  VectorXd center;
  VectorXd f_bar;
  MatrixXd s_bar;

  bool HasSecondOrder() const { return s.size() > 0; }
};

/// Zeroth and first order statistics per speaker plus the global second
/// order statistic S = sum_i S_i.  Per-speaker S_i is not stored; use
/// AccumulateSpeakerStats when it is needed.
struct SuffStats {
  VectorXd n;  // length M
  MatrixXd f;  // d x M, column i is F_i
  MatrixXd s;  // d x d, empty unless requested

  double total_n = 0.0;
  VectorXd total_f;

  bool centered = false;
  VectorXd center;
  MatrixXd f_bar;        // F_i - N_i mu
  VectorXd total_f_bar;
  MatrixXd s_bar;        // S - mu F^T - F mu^T + N mu mu^T

  Index NumSpeakers() const { return n.size(); }
  Index Dim() const { return f.rows(); }
  bool HasSecondOrder() const { return s.size() > 0; }

  /// View of speaker i without second order terms.
  SpeakerStats Speaker(Index i) const;
};

/// Checks that `resp` has one non-negative row per row of `phi`, each
/// summing to one within 1e-9.
void ValidateResponsibilities(const MatrixXd &resp, const MatrixXd &phi);

/// N_i = sum_j r_ji, F_i = sum_j r_ji phi_j and, if requested,
/// S = sum_j phi_j phi_j^T.
SuffStats AccumulateStats(const MatrixXd &resp, const MatrixXd &phi,
                          bool with_second_order);

/// Hard-label version; labels in [0, num_speakers).
SuffStats AccumulateHardStats(const std::vector<int> &labels,
                              Index num_speakers, const MatrixXd &phi,
                              bool with_second_order);

/// One speaker including S_i = sum_j r_ji phi_j phi_j^T.
SpeakerStats AccumulateSpeakerStats(const MatrixXd &resp, const MatrixXd &phi,
                                    Index speaker);

/// Fills the centered fields against `mu`.  Computed from the raw fields, so
/// applying it twice with the same mu gives the same result.
SuffStats CenterStats(SuffStats stats, const VectorXd &mu);
SpeakerStats CenterSpeakerStats(SpeakerStats stats, const VectorXd &mu);

/// One-hot N x M matrix from labels.
MatrixXd OneHot(const std::vector<int> &labels, Index num_speakers);

}  // namespace splda

#endif  // SPLDA_STATS_H_
