// src/adapt.cc

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

#include "splda/adapt.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "splda/linalg.h"
#include "splda/rng.h"
#include "splda/synth.h"
#include "splda/vb-bayes.h"

namespace splda {

namespace {

// Stream ids for the different random consumers of one run.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kSamplerStream = 2;

double StartKappa(const RunConfig &cfg) {
  return cfg.anneal.enabled ? cfg.anneal.kappa0 : cfg.kappa;
}

std::vector<int> HardLabels(const MatrixXd &r) {
  std::vector<int> out(static_cast<std::size_t>(r.rows()), 0);
  for (Index j = 0; j < r.rows(); ++j) {
    Index best = 0;
    for (Index i = 1; i < r.cols(); ++i)
      if (r(j, i) > r(j, best)) best = i;
    out[static_cast<std::size_t>(j)] = static_cast<int>(best);
  }
  return out;
}

VectorXd ColumnSums(const MatrixXd &r) {
  return r.colwise().sum().transpose();
}

// New state over the columns of `r`; column c inherits q(y) from
// `source[c]` of the old state.
VbState Restructure(const VbState &st, MatrixXd r,
                    const std::vector<Index> &source, double kappa) {
  VbState out = st;
  out.resp.log_rho.resize(r.rows(), static_cast<Index>(source.size()));
  out.y.clear();
  for (std::size_t c = 0; c < source.size(); ++c) {
    out.resp.log_rho.col(static_cast<Index>(c)) =
        st.resp.log_rho.col(source[c]);
    out.y.push_back(st.y[static_cast<std::size_t>(source[c])]);
  }
  out.resp.r = std::move(r);
  out.dir = UpdateQPi(ColumnSums(out.resp.r), st.hyper.tau0, kappa);
  return out;
}

bool Acceptable(double candidate, double baseline, double tol) {
  return candidate >= baseline - tol * std::abs(baseline);
}

std::string Describe(const std::vector<Index> &cols) {
  std::string s;
  for (Index c : cols) s += (s.empty() ? "" : ",") + std::to_string(c);
  return s;
}

std::uint64_t IterSeed(std::uint64_t seed, int iter) {
  std::mt19937_64 rng = SubstreamRng(seed, kSamplerStream);
  rng.discard(static_cast<unsigned long long>(iter));
  return rng();
}

}  // namespace

void RunConfig::Validate() const {
  SPLDA_CHECK(m_init >= 1, "M_init must be at least 1, got " << m_init);
  SPLDA_CHECK(!anneal.enabled ||
                  (anneal.kappa0 > 0.0 && anneal.kappa0 <= 1.0),
              "kappa0 " << anneal.kappa0 << " outside (0, 1]");
  SPLDA_CHECK(!anneal.enabled || anneal.growth >= 1.0,
              "anneal growth " << anneal.growth << " must be >= 1");
  SPLDA_CHECK(!anneal.enabled ||
                  (anneal.kappa_max >= anneal.kappa0 &&
                   anneal.kappa_max <= 1.0),
              "kappa_max " << anneal.kappa_max << " outside [kappa0, 1]");
  SPLDA_CHECK(prune_threshold >= 0.0 && merge_threshold >= 0.0,
              "prune/merge thresholds must be non-negative");
  SPLDA_CHECK(prune_every >= 1, "prune_every must be at least 1");
  SPLDA_CHECK(elbo_tol >= 0.0, "elbo_tol must be non-negative");
  SPLDA_CHECK(max_iter >= 1, "max_iter must be at least 1");
  SPLDA_CHECK(eta >= 0.0 && eta <= 1.0, "eta " << eta << " outside [0, 1]");
  SPLDA_CHECK(kappa > 0.0 && kappa <= 1.0, "kappa " << kappa
                                                    << " outside (0, 1]");
  SPLDA_CHECK(!sampler.enabled || sampler.num_samples >= 1,
              "sampler needs at least one sample");
  SPLDA_CHECK(!sampler.enabled || variant == Variant::kPoint,
              "the sampling hybrid is only available for variant=point");
  for (Index m : sweep_m) SPLDA_CHECK(m >= 1, "sweep M values must be >= 1");
}

const char *VariantName(Variant v) {
  return v == Variant::kPoint ? "point" : "bayes";
}

const char *InitMethodName(InitMethod m) {
  switch (m) {
    case InitMethod::kAhc: return "ahc";
    case InitMethod::kRandomY: return "random_y";
    case InitMethod::kOracle: return "oracle";
    case InitMethod::kUniformPi: return "uniform_pi";
  }
  return "?";
}

const char *SampleStrategyName(SampleStrategy s) {
  return s == SampleStrategy::kBestSample ? "best_sample"
                                          : "average_accumulators";
}

Variant ParseVariant(const std::string &s) {
  if (s == "point") return Variant::kPoint;
  if (s == "bayes") return Variant::kBayes;
  SPLDA_ERR("unknown variant '" << s << "' (expected point or bayes)");
}

InitMethod ParseInitMethod(const std::string &s) {
  if (s == "ahc") return InitMethod::kAhc;
  if (s == "random_y") return InitMethod::kRandomY;
  if (s == "oracle") return InitMethod::kOracle;
  if (s == "uniform_pi") return InitMethod::kUniformPi;
  SPLDA_ERR("unknown init method '"
            << s << "' (expected ahc, random_y, oracle or uniform_pi)");
}

SampleStrategy ParseSampleStrategy(const std::string &s) {
  if (s == "best_sample") return SampleStrategy::kBestSample;
  if (s == "average_accumulators") return SampleStrategy::kAverageAccumulators;
  SPLDA_ERR("unknown sampling strategy '"
            << s << "' (expected best_sample or average_accumulators)");
}

bool RunReport::RestructuredAfter(int iter) const {
  for (const auto &e : events)
    if (e.iter == iter && (e.kind == "prune" || e.kind == "merge"))
      return true;
  return false;
}

MatrixXd InitResponsibilities(const Corpus &corpus, const SpldaModel &model,
                              const RunConfig &cfg, Index m,
                              const std::vector<int> *oracle_labels) {
  const Index n = corpus.NumVectors();
  switch (cfg.init_method) {
    case InitMethod::kOracle: {
      SPLDA_CHECK(oracle_labels != nullptr,
                  "oracle initialization requested without labels");
      SPLDA_CHECK(static_cast<Index>(oracle_labels->size()) == n,
                  oracle_labels->size() << " oracle labels for " << n
                                        << " i-vectors");
      int mx = -1;
      for (int l : *oracle_labels) mx = std::max(mx, l);
      return OneHot(*oracle_labels, mx + 1);
    }
    case InitMethod::kUniformPi:
      return MatrixXd::Constant(n, m, 1.0 / static_cast<double>(m));
    case InitMethod::kAhc: {
      const MatrixXd scores = PairwiseScorer(model).ScoreAll(corpus.phi);
      return OneHot(AhcAverageLinkage(scores, m), m);
    }
    case InitMethod::kRandomY: {
      std::mt19937_64 rng = SubstreamRng(cfg.seed, kInitStream);
      std::normal_distribution<double> n01;
      SpeakerPosteriors y;
      for (Index i = 0; i < m; ++i) {
        VectorXd v(model.SpeakerDim());
        for (Index q = 0; q < v.size(); ++q) v(q) = n01(rng);
        y.push_back(SpeakerPosterior::PointMass(std::move(v)));
      }
      // Any symmetric q(pi) leaves the softmax unchanged.
      const DirichletPosterior dir =
          DirichletPosterior::FromTau(VectorXd::Constant(m, 1.0));
      return UpdateQTheta(corpus.phi, y, model, dir, StartKappa(cfg)).r;
    }
  }
  SPLDA_ERR("unhandled init method");
}

MatrixXd PruneColumns(const MatrixXd &r, const std::vector<Index> &keep) {
  SPLDA_CHECK(!keep.empty() || r.rows() == 0,
              "all clusters pruned; the prune threshold is too aggressive");
  MatrixXd out(r.rows(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    SPLDA_CHECK(keep[c] >= 0 && keep[c] < r.cols(),
                "column " << keep[c] << " out of range");
    out.col(static_cast<Index>(c)) = r.col(keep[c]);
  }
  for (Index j = 0; j < out.rows(); ++j) {
    const double s = out.row(j).sum();
    if (s > 0.0)
      out.row(j) /= s;
    else
      out.row(j).setConstant(1.0 / static_cast<double>(out.cols()));
  }
  return out;
}

MatrixXd MergeColumns(const MatrixXd &r, Index i, Index j) {
  SPLDA_CHECK(i != j && i >= 0 && j >= 0 && i < r.cols() && j < r.cols(),
              "cannot merge columns " << i << " and " << j);
  MatrixXd out(r.rows(), r.cols() - 1);
  Index c = 0;
  for (Index k = 0; k < r.cols(); ++k) {
    if (k == j) continue;
    out.col(c) = r.col(k);
    if (k == i) out.col(c) += r.col(j);
    ++c;
  }
  return out;
}

double ColumnCosine(const MatrixXd &r, Index i, Index j) {
  const double ni = r.col(i).norm(), nj = r.col(j).norm();
  if (ni == 0.0 || nj == 0.0) return 0.0;
  return r.col(i).dot(r.col(j)) / (ni * nj);
}

void RunSweep(const Corpus &corpus, const RunConfig &cfg, double kappa,
              int iter, VbState *state) {
  if (cfg.variant == Variant::kBayes) {
    BayesSweepOptions opts;
    opts.eta = cfg.eta;
    opts.optimize_alpha = cfg.optimize_alpha;
    opts.optimize_mu = cfg.optimize_mu;
    opts.optimize_tau0 = cfg.optimize_tau0;
    BayesSweep(corpus, opts, kappa, state);
    return;
  }
  PointEstep(corpus, kappa, state);
  if (!cfg.update_params) return;
  PointMstepOptions opts;
  opts.eta = cfg.eta;
  opts.min_divergence = cfg.min_divergence;
  opts.optimize_tau0 = cfg.optimize_tau0;
  if (cfg.sampler.enabled && state->NumClusters() > 0) {
    const SamplingOutcome s = ApplySampling(corpus, *state, cfg.sampler,
                                            kappa, IterSeed(cfg.seed, iter));
    PointMstep(corpus, opts, state, &s.acc);
  } else {
    PointMstep(corpus, opts, state);
  }
}

ElboBreakdown ComputeElbo(const Corpus &corpus, const RunConfig &cfg,
                          const VbState &state) {
  return cfg.variant == Variant::kBayes ? ElboBayes(corpus, state, cfg.eta)
                                        : ElboPoint(corpus, state);
}

bool PruneAndMerge(const Corpus &corpus, const RunConfig &cfg, double kappa,
                   int iter, double current_elbo, VbState *state,
                   RunReport *report) {
  bool changed = false;
  double baseline = current_elbo;
  auto try_candidate = [&](VbState cand, const std::string &kind,
                           const std::string &detail) {
    RunSweep(corpus, cfg, kappa, iter, &cand);
    const double e = ComputeElbo(corpus, cfg, cand).total;
    if (std::isfinite(e) && Acceptable(e, baseline, cfg.elbo_tol)) {
      *state = std::move(cand);
      baseline = e;
      changed = true;
      report->events.push_back({iter, kind, detail});
      return true;
    }
    report->events.push_back({iter, "reject-" + kind, detail});
    return false;
  };

  // Columns with no mass at all go unconditionally.
  {
    const MatrixXd &r = state->resp.r;
    std::vector<Index> keep, gone;
    for (Index i = 0; i < r.cols(); ++i)
      (r.col(i).maxCoeff() > 0.0 ? keep : gone).push_back(i);
    if (!gone.empty()) {
      *state = Restructure(*state, PruneColumns(r, keep), keep, kappa);
      report->events.push_back({iter, "prune", "empty " + Describe(gone)});
      baseline = ComputeElbo(corpus, cfg, *state).total;
      changed = true;
    }
  }

  // Small clusters: all at once, then one by one from the smallest.
  {
    const VectorXd counts = ColumnSums(state->resp.r);
    std::vector<Index> small;
    for (Index i = 0; i < counts.size(); ++i)
      if (counts(i) < cfg.prune_threshold) small.push_back(i);
    SPLDA_CHECK(static_cast<Index>(small.size()) < counts.size() ||
                    counts.size() == 0,
                "all " << counts.size()
                       << " clusters are below prune_threshold="
                       << cfg.prune_threshold);
    std::sort(small.begin(), small.end(),
              [&](Index a, Index b) { return counts(a) < counts(b); });
    auto keep_without = [&](const std::vector<Index> &drop) {
      std::vector<Index> keep;
      for (Index i = 0; i < counts.size(); ++i)
        if (std::find(drop.begin(), drop.end(), i) == drop.end())
          keep.push_back(i);
      return keep;
    };
    if (!small.empty()) {
      const std::vector<Index> keep = keep_without(small);
      const bool all_ok = try_candidate(
          Restructure(*state, PruneColumns(state->resp.r, keep), keep, kappa),
          "prune", Describe(small));
      if (!all_ok && small.size() > 1) {
        // Indices refer to the unchanged state until one is accepted.
        const std::vector<Index> keep1 = keep_without({small.front()});
        try_candidate(Restructure(*state, PruneColumns(state->resp.r, keep1),
                                  keep1, kappa),
                      "prune", Describe({small.front()}));
      }
    }
  }

  // Merges, best pair first; rejected pairs are skipped until the next
  // accepted change renumbers the columns.
  std::set<std::pair<Index, Index>> rejected;
  for (Index attempt = 0; attempt < state->NumClusters(); ++attempt) {
    const MatrixXd &r = state->resp.r;
    double best = cfg.merge_threshold;
    Index bi = -1, bj = -1;
    for (Index i = 0; i < r.cols(); ++i)
      for (Index j = i + 1; j < r.cols(); ++j) {
        if (rejected.count({i, j})) continue;
        const double c = ColumnCosine(r, i, j);
        if (c > best) {
          best = c;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) break;
    std::vector<Index> source;
    for (Index k = 0; k < r.cols(); ++k)
      if (k != bj) source.push_back(k);
    const std::string detail = std::to_string(bi) + "+" + std::to_string(bj);
    if (try_candidate(
            Restructure(*state, MergeColumns(r, bi, bj), source, kappa),
            "merge", detail)) {
      rejected.clear();
    } else {
      rejected.insert({bi, bj});
    }
  }
  return changed;
}

RunReport RunAdaptation(const Dataset &data, const SpldaModel &model_init,
                        const Hyperparams &hyper, const RunConfig &cfg,
                        const std::vector<int> *oracle_labels) {
  cfg.Validate();
  model_init.Validate();
  const Corpus corpus = Corpus::Build(data);
  SPLDA_CHECK(model_init.Dim() == corpus.Dim(),
              "dimension mismatch between model (d=" << model_init.Dim()
                                                     << ") and data (d="
                                                     << corpus.Dim() << ")");
  SPLDA_CHECK(hyper.tau0 > 0.0, "tau0 must be positive");
  RunReport rep;
  double kappa = StartKappa(cfg);

  VbState st;
  st.model = model_init;
  st.hyper = hyper;
  const Index n = corpus.NumVectors();
  Index m = 0;
  if (n > 0) {
    m = cfg.m_init;
    if (m > n) {
      rep.warnings.push_back("M_init " + std::to_string(m) +
                             " exceeds the number of i-vectors; using " +
                             std::to_string(n));
      m = n;
    }
    st.resp.r = InitResponsibilities(corpus, model_init, cfg, m, oracle_labels);
  } else {
    st.resp.r.resize(0, 0);
  }
  st.resp.log_rho = MatrixXd::Zero(st.resp.r.rows(), st.resp.r.cols());
  st.dir = UpdateQPi(ColumnSums(st.resp.r), st.hyper.tau0, kappa);
  if (cfg.variant == Variant::kBayes) {
    ResolveHyperparams(corpus, &st.hyper);
    st.bayes = InitBayesPosterior(model_init, st.hyper);
  }

  const double kappa_target =
      cfg.anneal.enabled ? cfg.anneal.kappa_max : cfg.kappa;
  ElboBreakdown elbo;
  for (int it = 0; it < cfg.max_iter; ++it) {
    RunSweep(corpus, cfg, kappa, it, &st);
    elbo = ComputeElbo(corpus, cfg, st);
    if (!std::isfinite(elbo.total)) {
      std::string terms;
      for (const auto &t : elbo.terms)
        terms += "\n  " + t.name + " = " + std::to_string(t.value);
      SPLDA_ERR("non-finite bound at iteration "
                << it << " (M=" << st.NumClusters() << ", kappa=" << kappa
                << ", tau0=" << st.hyper.tau0 << ")" << terms);
    }
    const Index mcur = st.NumClusters();
    rep.elbo.push_back(elbo.total);
    rep.num_clusters.push_back(mcur);
    rep.kappa.push_back(kappa);
    rep.iterations = it + 1;

    const bool stable =
        kappa >= kappa_target && it > 0 && rep.kappa[it - 1] == kappa &&
        rep.num_clusters[it - 1] == mcur && !rep.RestructuredAfter(it - 1) &&
        std::abs(elbo.total - rep.elbo[it - 1]) <=
            cfg.elbo_tol * std::abs(elbo.total);
    bool changed = false;
    // Tempered responsibilities make every column look alike, so the
    // structure is only revised once kappa has reached its target.
    if (cfg.prune_merge && mcur > 0 && kappa >= kappa_target &&
        (stable || (it + 1) % cfg.prune_every == 0)) {
      changed = PruneAndMerge(corpus, cfg, kappa, it, elbo.total, &st, &rep);
      if (changed) elbo = ComputeElbo(corpus, cfg, st);
    }
    if (stable && !changed) {
      rep.converged = true;
      break;
    }
    if (cfg.anneal.enabled)
      kappa = std::min(kappa * cfg.anneal.growth, cfg.anneal.kappa_max);
  }
  if (!rep.converged)
    rep.warnings.push_back("no convergence after " +
                           std::to_string(rep.iterations) + " iterations");

  rep.labels = HardLabels(st.resp.r);
  rep.model = st.model;
  rep.final_elbo = std::move(elbo);
  rep.final_state = std::move(st);
  return rep;
}

std::vector<std::vector<int>> DrawAssignments(const MatrixXd &r, Index k,
                                              std::uint64_t seed) {
  SPLDA_CHECK(k >= 1, "need at least one sample");
  std::vector<std::vector<int>> out(static_cast<std::size_t>(k));
  const Index n = r.rows(), m = r.cols();
  kernels::ParallelFor(k, [&](Index s) {
    std::mt19937_64 rng = SubstreamRng(seed, static_cast<std::uint64_t>(s));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<int> &draw = out[static_cast<std::size_t>(s)];
    draw.resize(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
      const double u = u01(rng) * r.row(j).sum();
      double acc = 0.0;
      Index pick = -1;
      for (Index i = 0; i < m; ++i) {
        if (r(j, i) <= 0.0) continue;
        pick = i;
        acc += r(j, i);
        if (u < acc) break;
      }
      SPLDA_CHECK(pick >= 0, "row " << j << " has no positive responsibility");
      draw[static_cast<std::size_t>(j)] = static_cast<int>(pick);
    }
  });
  return out;
}

std::vector<kernels::FirstOrder> SampledStatistics(const MatrixXd &r,
                                                   const MatrixXd &phi,
                                                   Index k,
                                                   std::uint64_t seed) {
  SPLDA_CHECK(r.rows() == phi.rows(), "responsibilities have "
                                          << r.rows() << " rows, phi "
                                          << phi.rows());
  const auto draws = DrawAssignments(r, k, seed);
  const Index m = r.cols(), d = phi.cols();
  std::vector<kernels::FirstOrder> out(draws.size());
  kernels::ParallelFor(k, [&](Index s) {
    kernels::FirstOrder fo{VectorXd::Zero(m), MatrixXd::Zero(d, m)};
    const auto &draw = draws[static_cast<std::size_t>(s)];
    for (Index j = 0; j < phi.rows(); ++j) {
      const int i = draw[static_cast<std::size_t>(j)];
      fo.n(i) += 1.0;
      fo.f.col(i) += phi.row(j).transpose();
    }
    out[static_cast<std::size_t>(s)] = std::move(fo);
  });
  return out;
}

SamplingOutcome ApplySampling(const Corpus &corpus, const VbState &state,
                              const SamplerConfig &sc, double kappa,
                              std::uint64_t seed) {
  const MatrixXd &r = state.resp.r;
  const Index m = r.cols(), k = sc.num_samples;
  const Index ny = state.model.SpeakerDim();
  const auto draws = DrawAssignments(r, k, seed);
  std::vector<YAccumulators> accs(static_cast<std::size_t>(k));
  SamplingOutcome out;
  const bool best = sc.strategy == SampleStrategy::kBestSample;
  if (best) out.elbo.assign(static_cast<std::size_t>(k), 0.0);

  kernels::ParallelFor(k, [&](Index s) {
    const MatrixXd hard = OneHot(draws[static_cast<std::size_t>(s)], m);
    const kernels::FirstOrder fo =
        kernels::AccumulateFirstOrderSerial(hard, corpus.phi);
    SpeakerPosteriors y =
        UpdateQy(fo.n, fo.f - state.model.mu * fo.n.transpose(), state.model,
                 kappa);
    accs[static_cast<std::size_t>(s)] = AccumulateY(fo.n, fo.f, y, ny);
    if (best) {
      VbState sample = state;
      sample.resp.r = hard;
      sample.y = std::move(y);
      out.elbo[static_cast<std::size_t>(s)] = ElboPoint(corpus, sample).total;
    }
  });

  if (best) {
    Index arg = 0;
    for (Index s = 1; s < k; ++s)
      if (out.elbo[static_cast<std::size_t>(s)] >
          out.elbo[static_cast<std::size_t>(arg)])
        arg = s;
    out.chosen = arg;
    out.acc = accs[static_cast<std::size_t>(arg)];
  } else {
    out.acc = accs[0];
    for (std::size_t s = 1; s < accs.size(); ++s) {
      out.acc.c_tilde += accs[s].c_tilde;
      out.acc.r_tilde += accs[s].r_tilde;
      out.acc.rho += accs[s].rho;
      out.acc.mean_sum += accs[s].mean_sum;
    }
    const double inv = 1.0 / static_cast<double>(k);
    out.acc.c_tilde *= inv;
    out.acc.r_tilde *= inv;
    out.acc.rho *= inv;
    out.acc.mean_sum *= inv;
  }
  return out;
}

SweepResult SelectSpeakerCount(const Dataset &data, const SpldaModel &model,
                               const Hyperparams &hyper, const RunConfig &cfg,
                               const std::vector<Index> &m_values) {
  SPLDA_CHECK(!m_values.empty(), "sweep needs at least one M value");
  SweepResult res;
  res.m_values = m_values;
  res.runs.resize(m_values.size());
  kernels::ParallelFor(static_cast<Index>(m_values.size()), [&](Index i) {
    RunConfig c = cfg;
    c.m_init = m_values[static_cast<std::size_t>(i)];
    c.sweep_m.clear();
    res.runs[static_cast<std::size_t>(i)] = RunAdaptation(data, model, hyper, c);
  });
  res.best = 0;
  for (std::size_t i = 1; i < res.runs.size(); ++i)
    if (res.runs[i].final_elbo.total >
        res.runs[static_cast<std::size_t>(res.best)].final_elbo.total)
      res.best = static_cast<Index>(i);
  return res;
}

RunReport TrainSupervised(const MatrixXd &phi_d, const std::vector<int> &labels,
                          const TrainConfig &cfg) {
  const Index n = phi_d.rows(), d = phi_d.cols();
  SPLDA_CHECK(cfg.speaker_dim >= 1,
              "speaker dimension n_y must be at least 1, got "
                  << cfg.speaker_dim);
  SPLDA_CHECK(cfg.speaker_dim <= d, "speaker dimension " << cfg.speaker_dim
                                                         << " exceeds d=" << d);
  SPLDA_CHECK(n > d, "supervised training needs more i-vectors than "
                     "dimensions (N_d="
                         << n << ", d=" << d << ")");
  Dataset data;
  data.phi.resize(0, d);
  data.phi_d = phi_d;
  data.labels_d = labels;
  data.Validate();

  const Index md = data.NumSupervisedSpeakers();
  const SuffStats st = AccumulateHardStats(labels, md, phi_d, false);
  const VectorXd mean = st.total_f / st.total_n;
  MatrixXd within = MatrixXd::Zero(d, d), between = MatrixXd::Zero(d, d);
  for (Index j = 0; j < n; ++j) {
    const int l = labels[static_cast<std::size_t>(j)];
    const VectorXd x = phi_d.row(j).transpose() - st.f.col(l) / st.n(l);
    within.noalias() += x * x.transpose();
  }
  for (Index i = 0; i < md; ++i) {
    const VectorXd x = st.f.col(i) / st.n(i) - mean;
    between.noalias() += st.n(i) * x * x.transpose();
  }
  within /= static_cast<double>(n);
  between /= static_cast<double>(n);
  Symmetrize(&within);
  Symmetrize(&between);

  SpldaModel model;
  model.mu = mean;
  model.W = InverseSpd(within, "supervised init: within-class covariance");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(between);
  const double floor = 1e-3 * within.trace() / static_cast<double>(d);
  model.V.resize(d, cfg.speaker_dim);
  for (Index q = 0; q < cfg.speaker_dim; ++q) {
    const Index src = d - 1 - q;  // eigenvalues ascend
    model.V.col(q) = eig.eigenvectors().col(src) *
                     std::sqrt(std::max(eig.eigenvalues()(src), floor));
  }

  return RunAdaptation(data, model, Hyperparams{}, TrainRunConfig(cfg));
}

RunConfig TrainRunConfig(const TrainConfig &cfg) {
  RunConfig rc;
  rc.variant = Variant::kPoint;
  rc.prune_merge = false;
  rc.m_init = 1;
  rc.max_iter = cfg.max_iter;
  rc.elbo_tol = cfg.elbo_tol;
  rc.min_divergence = cfg.min_divergence;
  return rc;
}

}  // namespace splda
