// include/splda/adapt.h

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

#ifndef SPLDA_ADAPT_H_
#define SPLDA_ADAPT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "splda/common.h"
#include "splda/kernels.h"
#include "splda/posteriors.h"
#include "splda/vb-point.h"

// Adaptation runs.  The VB loop handles annealing and cluster pruning or
// merging; the sampling hybrid replaces the soft M-step statistics.

namespace splda {

enum class Variant { kPoint, kBayes };
enum class InitMethod { kAhc, kRandomY, kOracle, kUniformPi };
enum class SampleStrategy { kBestSample, kAverageAccumulators };

struct AnnealSchedule {
  bool enabled = false;
  double kappa0 = 0.2;
  double growth = 1.25;
  double kappa_max = 1.0;
};

struct SamplerConfig {
  bool enabled = false;
  Index num_samples = 10;
  SampleStrategy strategy = SampleStrategy::kBestSample;
};

struct RunConfig {
  Variant variant = Variant::kPoint;
  Index m_init = 10;
  InitMethod init_method = InitMethod::kAhc;
  AnnealSchedule anneal;
  bool prune_merge = true;
  double prune_threshold = 0.5;
  double merge_threshold = 0.95;
  int prune_every = 5;
  double elbo_tol = 1e-7;  // relative; convergence and restructuring test
  int max_iter = 200;
  double eta = 1.0;
  double kappa = 1.0;  // fixed kappa when the schedule is off
  bool update_params = true;
  bool min_divergence = true;
  bool optimize_tau0 = false;
  bool optimize_alpha = false;
  bool optimize_mu = false;
  SamplerConfig sampler;
  std::uint64_t seed = 1;
  std::vector<Index> sweep_m;  // non-empty selects sweep mode in the CLI

  void Validate() const;
};

const char *VariantName(Variant v);
const char *InitMethodName(InitMethod m);
const char *SampleStrategyName(SampleStrategy s);
Variant ParseVariant(const std::string &s);
InitMethod ParseInitMethod(const std::string &s);
SampleStrategy ParseSampleStrategy(const std::string &s);

struct RunEvent {
  int iter = 0;
  std::string kind;  // prune, merge, reject-prune, reject-merge
  std::string detail;
};

struct RunReport {
  std::vector<double> elbo;
  std::vector<Index> num_clusters;
  std::vector<double> kappa;
  std::vector<int> labels;  // argmax of the final responsibilities
  SpldaModel model;
  std::vector<RunEvent> events;
  std::vector<std::string> warnings;
  bool converged = false;
  int iterations = 0;
  ElboBreakdown final_elbo;
  VbState final_state;

  /// True if an accepted prune or merge happened after iteration `iter`.
  bool RestructuredAfter(int iter) const;
};

/// Initial responsibilities over `m` clusters.
MatrixXd InitResponsibilities(const Corpus &corpus, const SpldaModel &model,
                              const RunConfig &cfg, Index m,
                              const std::vector<int> *oracle_labels);

/// Drops the columns not in `keep` and renormalizes the rows.  Rows left
/// with no mass become uniform over the kept columns.
MatrixXd PruneColumns(const MatrixXd &r, const std::vector<Index> &keep);

/// Adds column j into column i and removes column j.
MatrixXd MergeColumns(const MatrixXd &r, Index i, Index j);

/// Cosine similarity between responsibility columns.
double ColumnCosine(const MatrixXd &r, Index i, Index j);

/// One VB iteration at `kappa` (E-step plus M-step or the Bayesian sweep).
void RunSweep(const Corpus &corpus, const RunConfig &cfg, double kappa,
              int iter, VbState *state);

ElboBreakdown ComputeElbo(const Corpus &corpus, const RunConfig &cfg,
                          const VbState &state);

/// Prunes small clusters and merges look-alike ones; each change is kept
/// only if the bound after a refresh sweep does not fall by more than
/// elbo_tol.  Returns true if the state changed.
bool PruneAndMerge(const Corpus &corpus, const RunConfig &cfg, double kappa,
                   int iter, double current_elbo, VbState *state,
                   RunReport *report);

RunReport RunAdaptation(const Dataset &data, const SpldaModel &model_init,
                        const Hyperparams &hyper, const RunConfig &cfg,
                        const std::vector<int> *oracle_labels = nullptr);

/// K categorical draws of one cluster per i-vector, each sample from its
/// own stream seeded with (seed, k).
std::vector<std::vector<int>> DrawAssignments(const MatrixXd &r, Index k,
                                              std::uint64_t seed);

/// Hard zeroth/first order statistics of each sampled assignment.
std::vector<kernels::FirstOrder> SampledStatistics(const MatrixXd &r,
                                                   const MatrixXd &phi,
                                                   Index k,
                                                   std::uint64_t seed);

struct SamplingOutcome {
  YAccumulators acc;
  std::vector<double> elbo;  // bound of each sample
  Index chosen = -1;         // best_sample only
};

/// Applies a sampling strategy to the current state and returns the
/// accumulators the M-step should use.
SamplingOutcome ApplySampling(const Corpus &corpus, const VbState &state,
                              const SamplerConfig &sc, double kappa,
                              std::uint64_t seed);

struct SweepResult {
  std::vector<Index> m_values;
  std::vector<RunReport> runs;
  Index best = -1;
};

/// Runs the adaptation at each M and keeps the one with the best bound.
SweepResult SelectSpeakerCount(const Dataset &data, const SpldaModel &model,
                               const Hyperparams &hyper, const RunConfig &cfg,
                               const std::vector<Index> &m_values);

struct TrainConfig {
  Index speaker_dim = 1;
  int max_iter = 200;
  double elbo_tol = 1e-7;
  bool min_divergence = true;
};

/// Supervised estimation from labelled data: within/between-class
/// initialization followed by VB with fixed assignments.
RunReport TrainSupervised(const MatrixXd &phi_d, const std::vector<int> &labels,
                          const TrainConfig &cfg);

/// The run configuration TrainSupervised uses.
RunConfig TrainRunConfig(const TrainConfig &cfg);

}  // namespace splda

#endif  // SPLDA_ADAPT_H_
