// src/synth.cc

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

#include "splda/synth.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "splda/linalg.h"

namespace splda {

namespace {

MatrixXd Gaussian(Index rows, Index cols, std::mt19937_64 *rng) {
  std::normal_distribution<double> n01;
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = n01(*rng);
  return m;
}

MatrixXd RandomOrthonormal(Index rows, Index cols, std::mt19937_64 *rng) {
  Eigen::HouseholderQR<MatrixXd> qr(Gaussian(rows, rows, rng));
  return qr.householderQ() * MatrixXd::Identity(rows, cols);
}

Index DrawCount(Index lo, Index hi, std::mt19937_64 *rng) {
  if (lo == hi) return lo;
  std::uniform_int_distribution<Index> u(lo, hi);
  return u(*rng);
}

std::vector<int> Canonical(const std::vector<int> &labels, Index *count) {
  std::map<int, int> ids;
  std::vector<int> out(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) {
    auto it = ids.emplace(labels[j], static_cast<int>(ids.size())).first;
    out[j] = it->second;
  }
  *count = static_cast<Index>(ids.size());
  return out;
}

double Choose2(double n) { return 0.5 * n * (n - 1.0); }

}  // namespace

void SynthSpec::Validate() const {
  SPLDA_CHECK(dim >= 1 && speaker_dim >= 1 && speaker_dim <= dim,
              "synth: need 1 <= n_y <= d (got n_y=" << speaker_dim
                                                    << ", d=" << dim << ")");
  SPLDA_CHECK(num_speakers >= 0 && num_sup_speakers >= 0,
              "synth: speaker counts must be non-negative");
  SPLDA_CHECK(num_speakers + num_sup_speakers >= 1,
              "synth: need at least one speaker");
  SPLDA_CHECK(min_per_speaker >= 1 && max_per_speaker >= min_per_speaker,
              "synth: bad vectors-per-speaker range [" << min_per_speaker
                                                       << ", "
                                                       << max_per_speaker
                                                       << "]");
  SPLDA_CHECK(num_sup_speakers == 0 ||
                  (sup_min_per_speaker >= 1 &&
                   sup_max_per_speaker >= sup_min_per_speaker),
              "synth: bad supervised vectors-per-speaker range");
  if (model) {
    model->Validate();
    SPLDA_CHECK(model->Dim() == dim && model->SpeakerDim() == speaker_dim,
                "synth: provided model is " << model->Dim() << "x"
                                            << model->SpeakerDim()
                                            << ", spec says " << dim << "x"
                                            << speaker_dim);
  } else {
    SPLDA_CHECK(eigenvoice_scale >= 0.0 && noise_scale >= 0.0,
                "synth: scales must be non-negative");
  }
}

SpldaModel RandomModel(Index dim, Index speaker_dim, double eigenvoice_scale,
                       double noise_scale, std::mt19937_64 *rng) {
  SpldaModel m;
  m.mu = Gaussian(dim, 1, rng).col(0);
  m.V = eigenvoice_scale * RandomOrthonormal(dim, speaker_dim, rng);
  const MatrixXd u = RandomOrthonormal(dim, dim, rng);
  std::uniform_real_distribution<double> lam(0.5, 1.5);
  VectorXd l(dim);
  for (Index i = 0; i < dim; ++i) l(i) = lam(*rng);
  if (noise_scale > 0.0) {
    const VectorXd prec =
        (1.0 / (noise_scale * noise_scale * l.array())).matrix();
    m.W = u * prec.asDiagonal() * u.transpose();
    Symmetrize(&m.W);
  }
  return m;
}

SynthData Generate(const SynthSpec &spec) {
  spec.Validate();
  std::mt19937_64 rng(spec.seed);
  SynthData out;
  if (spec.model) {
    out.model = *spec.model;
  } else {
    out.model = RandomModel(spec.dim, spec.speaker_dim, spec.eigenvoice_scale,
                            spec.noise_scale, &rng);
  }
  const Index d = spec.dim;
  const bool noiseless = out.model.W.size() == 0;
  out.has_precision = !noiseless;
  // Noise factor with L L^T = W^-1.
  MatrixXd noise_factor;
  if (!noiseless)
    noise_factor = CholeskyFactor(InverseSpd(out.model.W, "synth: W"),
                                  "synth: W^-1");

  auto draw_set = [&](Index speakers, Index lo, Index hi, MatrixXd *phi,
                      std::vector<int> *labels, MatrixXd *factors) {
    std::vector<Index> counts(static_cast<std::size_t>(speakers));
    Index total = 0;
    for (auto &c : counts) {
      c = DrawCount(lo, hi, &rng);
      total += c;
    }
    *factors = Gaussian(spec.speaker_dim, speakers, &rng);
    phi->resize(total, d);
    labels->clear();
    Index row = 0;
    for (Index i = 0; i < speakers; ++i) {
      const VectorXd center = out.model.mu + out.model.V * factors->col(i);
      for (Index c = 0; c < counts[static_cast<std::size_t>(i)]; ++c) {
        VectorXd x = center;
        if (!noiseless) x += noise_factor * Gaussian(d, 1, &rng).col(0);
        phi->row(row++) = x.transpose();
        labels->push_back(static_cast<int>(i));
      }
    }
  };

  draw_set(spec.num_speakers, spec.min_per_speaker, spec.max_per_speaker,
           &out.data.phi, &out.labels, &out.y);
  MatrixXd y_d;
  draw_set(spec.num_sup_speakers, spec.sup_min_per_speaker,
           spec.sup_max_per_speaker, &out.data.phi_d, &out.data.labels_d,
           &y_d);
  return out;
}

double PairwiseLlr(const SpldaModel &model, const VectorXd &a,
                   const VectorXd &b) {
  const Index d = model.Dim();
  const MatrixXd ac = model.V * model.V.transpose();
  const MatrixXd tot = ac + InverseSpd(model.W, "PairwiseLlr: W");
  MatrixXd joint(2 * d, 2 * d);
  joint << tot, ac, ac, tot;
  VectorXd x(2 * d);
  x << a - model.mu, b - model.mu;
  auto lj = Cholesky(joint, "PairwiseLlr: joint covariance");
  auto lt = Cholesky(tot, "PairwiseLlr: marginal covariance");
  const double same = -0.5 * LogDet(lj) - 0.5 * x.dot(lj.solve(x));
  const VectorXd xa = a - model.mu, xb = b - model.mu;
  const double diff = -LogDet(lt) - 0.5 * xa.dot(lt.solve(xa)) -
                      0.5 * xb.dot(lt.solve(xb));
  return same - diff;
}

PairwiseScorer::PairwiseScorer(const SpldaModel &model) : mu_(model.mu) {
  model.Validate();
  const Index d = model.Dim();
  const MatrixXd ac = model.V * model.V.transpose();
  const MatrixXd tot = ac + InverseSpd(model.W, "PairwiseScorer: W");
  MatrixXd joint(2 * d, 2 * d);
  joint << tot, ac, ac, tot;
  auto lj = Cholesky(joint, "PairwiseScorer: joint covariance");
  auto lt = Cholesky(tot, "PairwiseScorer: marginal covariance");
  const MatrixXd jinv = lj.solve(MatrixXd::Identity(2 * d, 2 * d));
  const MatrixXd tinv = lt.solve(MatrixXd::Identity(d, d));
  q_ = tinv - jinv.topLeftCorner(d, d);
  Symmetrize(&q_);
  p_ = -jinv.topRightCorner(d, d);
  c_ = -0.5 * LogDet(lj) + LogDet(lt);
}

double PairwiseScorer::Score(const VectorXd &a, const VectorXd &b) const {
  const VectorXd xa = a - mu_, xb = b - mu_;
  return 0.5 * xa.dot(q_ * xa) + 0.5 * xb.dot(q_ * xb) + xa.dot(p_ * xb) + c_;
}

MatrixXd PairwiseScorer::ScoreAll(const MatrixXd &phi) const {
  const MatrixXd x = phi.rowwise() - mu_.transpose();
  const VectorXd self = 0.5 * (x * q_).cwiseProduct(x).rowwise().sum();
  MatrixXd s = x * p_ * x.transpose();
  s.colwise() += self;
  s.rowwise() += self.transpose();
  s.array() += c_;
  Symmetrize(&s);
  return s;
}

std::vector<int> AhcAverageLinkage(const MatrixXd &similarity,
                                   Index num_clusters) {
  const Index n = similarity.rows();
  SPLDA_CHECK(similarity.cols() == n, "AHC: similarity matrix not square");
  SPLDA_CHECK(num_clusters >= 1 && num_clusters <= n,
              "AHC: cannot cut " << n << " items into " << num_clusters
                                 << " clusters");
  // Sum of pairwise similarities between active clusters, and sizes.
  MatrixXd link = similarity;
  std::vector<double> size(static_cast<std::size_t>(n), 1.0);
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  std::vector<int> owner(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) owner[static_cast<std::size_t>(i)] = i;

  for (Index clusters = n; clusters > num_clusters; --clusters) {
    double best = -std::numeric_limits<double>::infinity();
    Index bi = -1, bj = -1;
    for (Index i = 0; i < n; ++i) {
      if (!active[static_cast<std::size_t>(i)]) continue;
      for (Index j = i + 1; j < n; ++j) {
        if (!active[static_cast<std::size_t>(j)]) continue;
        const double avg = link(i, j) / (size[static_cast<std::size_t>(i)] *
                                         size[static_cast<std::size_t>(j)]);
        if (avg > best) {
          best = avg;
          bi = i;
          bj = j;
        }
      }
    }
    SPLDA_CHECK(bi >= 0, "AHC: similarity matrix has no finite entries");
    for (Index k = 0; k < n; ++k) {
      link(bi, k) += link(bj, k);
      link(k, bi) = link(bi, k);
    }
    size[static_cast<std::size_t>(bi)] += size[static_cast<std::size_t>(bj)];
    active[static_cast<std::size_t>(bj)] = false;
    for (auto &o : owner)
      if (o == bj) o = static_cast<int>(bi);
  }
  Index count = 0;
  return Canonical(owner, &count);
}

MetricReport ClusteringMetrics(const std::vector<int> &pred,
                               const std::vector<int> &truth) {
  SPLDA_CHECK(pred.size() == truth.size(),
              "label length mismatch: " << pred.size() << " predicted vs "
                                        << truth.size() << " true");
  SPLDA_CHECK(!pred.empty(), "no labels to compare");
  Index np = 0, nt = 0;
  const std::vector<int> p = Canonical(pred, &np);
  const std::vector<int> t = Canonical(truth, &nt);
  MetricReport rep;
  rep.confusion = MatrixXd::Zero(np, nt);
  for (std::size_t j = 0; j < p.size(); ++j) rep.confusion(p[j], t[j]) += 1.0;

  const double n = static_cast<double>(p.size());
  double index = 0.0, a = 0.0, b = 0.0;
  for (Index i = 0; i < np; ++i)
    for (Index j = 0; j < nt; ++j) index += Choose2(rep.confusion(i, j));
  for (Index i = 0; i < np; ++i) a += Choose2(rep.confusion.row(i).sum());
  for (Index j = 0; j < nt; ++j) b += Choose2(rep.confusion.col(j).sum());
  const double total = Choose2(n);
  const double expected = total > 0.0 ? a * b / total : 0.0;
  const double max_index = 0.5 * (a + b);
  if (max_index == expected) {
    // Both partitions trivial in the same way (or n = 1).
    rep.ari = (a == b) ? 1.0 : 0.0;
  } else {
    rep.ari = (index - expected) / (max_index - expected);
  }
  double majority = 0.0;
  for (Index i = 0; i < np; ++i) majority += rep.confusion.row(i).maxCoeff();
  rep.purity = majority / n;
  return rep;
}

}  // namespace splda
