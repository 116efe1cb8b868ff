// src/stats.cc

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

#include "splda/stats.h"

#include <cmath>

#include "splda/kernels.h"

namespace splda {

namespace {
constexpr double kRowSumTol = 1e-9;
}

SpeakerStats SuffStats::Speaker(Index i) const {
  SPLDA_CHECK(i >= 0 && i < NumSpeakers(),
              "speaker index " << i << " out of range [0, " << NumSpeakers()
                               << ")");
  SpeakerStats out;
  out.n = n(i);
  out.f = f.col(i);
  if (centered) {
    out.centered = true;
    out.center = center;
    out.f_bar = f_bar.col(i);
  }
  return out;
}

void ValidateResponsibilities(const MatrixXd &resp, const MatrixXd &phi) {
  SPLDA_CHECK(resp.rows() == phi.rows(),
              "shape mismatch: responsibilities are "
                  << resp.rows() << "x" << resp.cols() << " but phi is "
                  << phi.rows() << "x" << phi.cols());
  SPLDA_CHECK(phi.allFinite(), "phi has non-finite entries");
  for (Index j = 0; j < resp.rows(); ++j) {
    double total = 0.0;
    for (Index i = 0; i < resp.cols(); ++i) {
      const double r = resp(j, i);
      SPLDA_CHECK(std::isfinite(r) && r >= 0.0,
                  "negative or non-finite responsibility " << r << " at ("
                                                           << j << ", " << i
                                                           << ")");
      total += r;
    }
    SPLDA_CHECK(std::abs(total - 1.0) <= kRowSumTol,
                "responsibility row " << j << " sums to " << total);
  }
}

SuffStats AccumulateStats(const MatrixXd &resp, const MatrixXd &phi,
                          bool with_second_order) {
  ValidateResponsibilities(resp, phi);
  kernels::FirstOrder fo = kernels::AccumulateFirstOrder(resp, phi);
  SuffStats out;
  out.n = std::move(fo.n);
  out.f = std::move(fo.f);
  out.total_n = out.n.sum();
  out.total_f = out.f.rowwise().sum();
  if (with_second_order) out.s = kernels::Scatter(phi);
  return out;
}

MatrixXd OneHot(const std::vector<int> &labels, Index num_speakers) {
  MatrixXd r = MatrixXd::Zero(static_cast<Index>(labels.size()), num_speakers);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const int l = labels[j];
    SPLDA_CHECK(l >= 0 && l < num_speakers,
                "label " << l << " at row " << j << " outside [0, "
                         << num_speakers << ")");
    r(static_cast<Index>(j), l) = 1.0;
  }
  return r;
}

SuffStats AccumulateHardStats(const std::vector<int> &labels,
                              Index num_speakers, const MatrixXd &phi,
                              bool with_second_order) {
  SPLDA_CHECK(static_cast<Index>(labels.size()) == phi.rows(),
              "shape mismatch: " << labels.size() << " labels for "
                                 << phi.rows() << " rows");
  return AccumulateStats(OneHot(labels, num_speakers), phi, with_second_order);
}

SpeakerStats AccumulateSpeakerStats(const MatrixXd &resp, const MatrixXd &phi,
                                    Index speaker) {
  ValidateResponsibilities(resp, phi);
  SPLDA_CHECK(speaker >= 0 && speaker < resp.cols(),
              "speaker " << speaker << " out of range");
  const Index d = phi.cols();
  SpeakerStats out;
  out.f = VectorXd::Zero(d);
  out.s = MatrixXd::Zero(d, d);
  for (Index j = 0; j < phi.rows(); ++j) {
    const double r = resp(j, speaker);
    if (r == 0.0) continue;
    out.n += r;
    out.f += r * phi.row(j).transpose();
    out.s.noalias() += r * phi.row(j).transpose() * phi.row(j);
  }
  return out;
}

SuffStats CenterStats(SuffStats stats, const VectorXd &mu) {
  SPLDA_CHECK(mu.size() == stats.Dim(), "CenterStats: mu has length "
                                            << mu.size() << ", stats have dim "
                                            << stats.Dim());
  stats.centered = true;
  stats.center = mu;
  stats.f_bar = stats.f - mu * stats.n.transpose();
  stats.total_f_bar = stats.total_f - stats.total_n * mu;
  if (stats.HasSecondOrder()) {
    const MatrixXd cross = mu * stats.total_f.transpose();
    stats.s_bar = stats.s - cross - cross.transpose() +
                  stats.total_n * mu * mu.transpose();
  }
  return stats;
}

SpeakerStats CenterSpeakerStats(SpeakerStats stats, const VectorXd &mu) {
  SPLDA_CHECK(mu.size() == stats.f.size(),
              "CenterSpeakerStats: mu has length " << mu.size()
                                                   << ", stats have dim "
                                                   << stats.f.size());
  stats.centered = true;
  stats.center = mu;
  stats.f_bar = stats.f - stats.n * mu;
  if (stats.HasSecondOrder()) {
    const MatrixXd cross = mu * stats.f.transpose();
    stats.s_bar =
        stats.s - cross - cross.transpose() + stats.n * mu * mu.transpose();
  }
  return stats;
}

}  // namespace splda
