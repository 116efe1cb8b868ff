// tools/cli.cc

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

#include "cli.h"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "splda/adapt.h"
#include "splda/io.h"
#include "splda/synth.h"

namespace splda::cli {

namespace {

// Loads an input file and names the flag it came from on failure.
template <typename Fn>
auto Load(const std::string &flag, const std::string &path, Fn &&fn) {
  try {
    return fn(path);
  } catch (const SpldaError &e) {
    SPLDA_ERR(flag << ": " << e.what());
  }
}

// Maps arbitrary speaker ids to 0..M-1 in order of first appearance.
std::vector<int> CanonicalLabels(const std::vector<int> &labels) {
  std::map<int, int> ids;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels)
    out.push_back(ids.emplace(l, static_cast<int>(ids.size())).first->second);
  return out;
}

struct SynthArgs {
  std::string spec_file;
  std::string out_prefix;
  std::string model_file;
  Index d = 10, ny = 2, speakers = 10, per_speaker = 10;
  Index min_per = 0, max_per = 0;
  Index sup_speakers = 0, sup_per_speaker = 10;
  double ev_scale = 1.0, noise_scale = 1.0;
  std::uint64_t seed = 1;
};

void ApplySynthKey(const std::string &key, const std::string &value,
                   SynthSpec *s) {
  auto integer = [&] { return static_cast<Index>(std::stoll(value)); };
  if (key == "d") s->dim = integer();
  else if (key == "ny") s->speaker_dim = integer();
  else if (key == "speakers") s->num_speakers = integer();
  else if (key == "per_speaker") s->min_per_speaker = s->max_per_speaker = integer();
  else if (key == "min_per_speaker") s->min_per_speaker = integer();
  else if (key == "max_per_speaker") s->max_per_speaker = integer();
  else if (key == "sup_speakers") s->num_sup_speakers = integer();
  else if (key == "sup_per_speaker")
    s->sup_min_per_speaker = s->sup_max_per_speaker = integer();
  else if (key == "sup_min_per_speaker") s->sup_min_per_speaker = integer();
  else if (key == "sup_max_per_speaker") s->sup_max_per_speaker = integer();
  else if (key == "eigenvoice_scale") s->eigenvoice_scale = std::stod(value);
  else if (key == "noise_scale") s->noise_scale = std::stod(value);
  else if (key == "seed") s->seed = std::stoull(value);
  else SPLDA_ERR("unknown synth spec key '" << key << "'");
}

SynthSpec ReadSynthSpec(const std::string &path) {
  std::ifstream is(path);
  SPLDA_CHECK(is, "cannot open '" << path << "' for reading");
  SynthSpec s;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    SPLDA_CHECK(eq != std::string::npos,
                path << " line " << lineno << ": expected key=value");
    auto trim = [](std::string x) {
      const auto b = x.find_first_not_of(" \t\r");
      const auto e = x.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : x.substr(b, e - b + 1);
    };
    try {
      ApplySynthKey(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), &s);
    } catch (const std::logic_error &e) {  // stoll and friends
      SPLDA_ERR(path << " line " << lineno << ": bad value (" << e.what()
                     << ")");
    } catch (const SpldaError &e) {
      SPLDA_ERR(path << " line " << lineno << ": " << e.what());
    }
  }
  return s;
}

int DoSynth(CLI::App *cmd, const SynthArgs &a, std::ostream &out) {
  SynthSpec s;
  if (!a.spec_file.empty())
    s = Load("--spec", a.spec_file, ReadSynthSpec);
  auto given = [&](const char *flag) { return cmd->count(flag) > 0; };
  if (given("--d")) s.dim = a.d;
  if (given("--ny")) s.speaker_dim = a.ny;
  if (given("--speakers")) s.num_speakers = a.speakers;
  if (given("--per-speaker")) s.min_per_speaker = s.max_per_speaker = a.per_speaker;
  if (given("--min-per-speaker")) s.min_per_speaker = a.min_per;
  if (given("--max-per-speaker")) s.max_per_speaker = a.max_per;
  if (given("--sup-speakers")) s.num_sup_speakers = a.sup_speakers;
  if (given("--sup-per-speaker"))
    s.sup_min_per_speaker = s.sup_max_per_speaker = a.sup_per_speaker;
  if (given("--eigenvoice-scale")) s.eigenvoice_scale = a.ev_scale;
  if (given("--noise-scale")) s.noise_scale = a.noise_scale;
  if (given("--seed")) s.seed = a.seed;
  if (!a.model_file.empty())
    s.model = Load("--model", a.model_file, ReadModelFile).model;

  const SynthData data = Generate(s);
  const std::string &p = a.out_prefix;
  WriteMatrixFile(p + ".phi", data.data.phi);
  WriteMatrixFile(p + ".phi_d", data.data.phi_d);
  WriteLabelsFile(p + ".labels_d", data.data.labels_d);
  WriteLabelsFile(p + ".labels", data.labels);
  WriteMatrixFile(p + ".y", data.y.transpose());
  if (data.has_precision) {
    WriteModelFile(p + ".model", ModelBundle{data.model, {}, {}});
  } else {
    MatrixXd vt = data.model.Vtilde();
    WriteMatrixFile(p + ".vtilde", vt);
  }
  out << "synth: d=" << s.dim << " n_y=" << s.speaker_dim << " N="
      << data.data.phi.rows() << " (" << s.num_speakers << " speakers) N_d="
      << data.data.phi_d.rows() << " (" << s.num_sup_speakers
      << " speakers) seed=" << s.seed << "\n";
  if (!data.has_precision)
    out << "synth: noise_scale=0, no W; true [V|mu] written to " << p
        << ".vtilde\n";
  return 0;
}

struct TrainArgs {
  std::string ivectors, labels, out_model, trace;
  Index ny = 1;
  int max_iter = 200;
  double elbo_tol = 1e-7;
  bool no_min_div = false;
};

int DoTrain(const TrainArgs &a, std::ostream &out) {
  const MatrixXd phi = Load("--ivectors", a.ivectors, ReadMatrixFile);
  const std::vector<int> labels =
      CanonicalLabels(Load("--labels", a.labels, ReadLabelsFile));
  SPLDA_CHECK(static_cast<Index>(labels.size()) == phi.rows(),
              "--labels has " << labels.size() << " entries but --ivectors has "
                              << phi.rows() << " rows");
  TrainConfig tc;
  tc.speaker_dim = a.ny;
  tc.max_iter = a.max_iter;
  tc.elbo_tol = a.elbo_tol;
  tc.min_divergence = !a.no_min_div;
  const RunReport rep = TrainSupervised(phi, labels, tc);
  WriteModelFile(a.out_model, ModelBundle{rep.model, {}, {}});
  if (!a.trace.empty()) {
    AdaptConfig ac;
    ac.run = TrainRunConfig(tc);
    WriteReportFile(a.trace, ac, rep);
  }
  for (const auto &w : rep.warnings) SPLDA_WARN(w);
  out << "train: N_d=" << phi.rows() << " d=" << phi.cols() << " n_y=" << a.ny
      << " iterations=" << rep.iterations
      << " elbo=" << FormatDouble(rep.final_elbo.total)
      << (rep.converged ? "" : " (not converged)") << "\n";
  return 0;
}

struct RunInputs {
  std::string model, sup_ivectors, sup_labels, unsup_ivectors, config;
  std::string oracle_labels;
  std::vector<std::string> settings;  // --set key=value
  std::optional<double> eta;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant, init;
  std::optional<Index> m_init;
};

struct Loaded {
  ModelBundle model;
  Dataset data;
  AdaptConfig cfg;
  std::vector<int> oracle;
};

void AddRunOptions(CLI::App *cmd, RunInputs *in, bool require) {
  auto *m = cmd->add_option("--model", in->model, "initial model file");
  auto *u = cmd->add_option("--unsup-ivectors", in->unsup_ivectors,
                            "unlabelled i-vectors (matrix file)");
  if (require) {
    m->required();
    u->required();
  }
  cmd->add_option("--sup-ivectors", in->sup_ivectors,
                  "labelled i-vectors (matrix file)");
  cmd->add_option("--sup-labels", in->sup_labels, "labels of --sup-ivectors");
  cmd->add_option("--config", in->config, "key=value run configuration");
  cmd->add_option("--oracle-labels", in->oracle_labels,
                  "true labels of the unlabelled set, for init=oracle");
  cmd->add_option("--set", in->settings, "override a config key (key=value)");
  cmd->add_option("--eta", in->eta, "weight of the supervised set");
  cmd->add_option("--seed", in->seed, "random seed");
  cmd->add_option("--variant", in->variant, "point or bayes");
  cmd->add_option("--init", in->init, "ahc, random_y, oracle or uniform_pi");
  cmd->add_option("--m-init", in->m_init, "initial number of clusters");
}

Loaded LoadRun(const RunInputs &in) {
  Loaded l;
  if (!in.config.empty())
    l.cfg = Load("--config", in.config, ReadConfigFile);
  auto set = [&](const std::string &flag, const std::string &key,
                 const std::string &value) {
    try {
      ApplyConfigValue(key, value, &l.cfg);
    } catch (const SpldaError &e) {
      SPLDA_ERR(flag << ": " << e.what());
    }
  };
  for (const auto &kv : in.settings) {
    const auto eq = kv.find('=');
    SPLDA_CHECK(eq != std::string::npos,
                "--set: expected key=value, got '" << kv << "'");
    set("--set", kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (in.eta) set("--eta", "eta", FormatDouble(*in.eta));
  if (in.seed) set("--seed", "seed", std::to_string(*in.seed));
  if (in.variant) set("--variant", "variant", *in.variant);
  if (in.init) set("--init", "init", *in.init);
  if (in.m_init) set("--m-init", "m_init", std::to_string(*in.m_init));
  l.cfg.run.Validate();

  l.model = Load("--model", in.model, ReadModelFile);
  l.data.phi = Load("--unsup-ivectors", in.unsup_ivectors, ReadMatrixFile);
  SPLDA_CHECK(in.sup_ivectors.empty() == in.sup_labels.empty(),
              "--sup-ivectors and --sup-labels must be given together");
  if (!in.sup_ivectors.empty()) {
    l.data.phi_d = Load("--sup-ivectors", in.sup_ivectors, ReadMatrixFile);
    l.data.labels_d =
        CanonicalLabels(Load("--sup-labels", in.sup_labels, ReadLabelsFile));
    SPLDA_CHECK(static_cast<Index>(l.data.labels_d.size()) ==
                    l.data.phi_d.rows(),
                "--sup-labels has " << l.data.labels_d.size()
                                    << " entries but --sup-ivectors has "
                                    << l.data.phi_d.rows() << " rows");
  } else {
    l.data.phi_d.resize(0, l.data.phi.cols());
  }
  const Index d = l.model.model.Dim();
  SPLDA_CHECK(l.data.phi.cols() == d || l.data.phi.rows() == 0,
              "dimension mismatch between model (d="
                  << d << ") and --unsup-ivectors (d=" << l.data.phi.cols()
                  << ")");
  SPLDA_CHECK(l.data.phi_d.cols() == d || l.data.phi_d.rows() == 0,
              "dimension mismatch between model (d="
                  << d << ") and --sup-ivectors (d=" << l.data.phi_d.cols()
                  << ")");
  if (l.data.phi.rows() == 0) l.data.phi.resize(0, d);
  if (l.data.phi_d.rows() == 0) l.data.phi_d.resize(0, d);
  if (l.cfg.run.init_method == InitMethod::kOracle) {
    SPLDA_CHECK(!in.oracle_labels.empty(),
                "init=oracle requires --oracle-labels");
    l.oracle = CanonicalLabels(
        Load("--oracle-labels", in.oracle_labels, ReadLabelsFile));
  }
  return l;
}

RunReport RunLoaded(const Loaded &l, std::ostream &out) {
  const RunConfig &rc = l.cfg.run;
  const std::vector<int> *oracle = l.oracle.empty() ? nullptr : &l.oracle;
  if (rc.sweep_m.empty())
    return RunAdaptation(l.data, l.model.model, l.cfg.hyper, rc, oracle);
  SweepResult sw =
      SelectSpeakerCount(l.data, l.model.model, l.cfg.hyper, rc, rc.sweep_m);
  for (std::size_t i = 0; i < sw.runs.size(); ++i)
    out << "sweep: M_init=" << sw.m_values[i]
        << " final_M=" << sw.runs[i].final_state.NumClusters()
        << " elbo=" << FormatDouble(sw.runs[i].final_elbo.total)
        << (static_cast<Index>(i) == sw.best ? " *" : "") << "\n";
  return std::move(sw.runs[static_cast<std::size_t>(sw.best)]);
}

struct AdaptOutputs {
  std::string out_model, out_labels, out_report, out_state;
};

int DoAdapt(const RunInputs &in, const AdaptOutputs &o, std::ostream &out) {
  const Loaded l = LoadRun(in);
  const RunReport rep = RunLoaded(l, out);
  for (const auto &w : rep.warnings) SPLDA_WARN(w);
  if (!o.out_model.empty()) {
    ModelBundle b{rep.model, rep.final_state.bayes, {}};
    if (b.bayes) b.hyper = rep.final_state.hyper;
    WriteModelFile(o.out_model, b);
  }
  if (!o.out_labels.empty()) WriteLabelsFile(o.out_labels, rep.labels);
  if (!o.out_report.empty()) {
    // Sweep runs record the M actually used.
    AdaptConfig echo = l.cfg;
    if (!echo.run.sweep_m.empty())
      echo.run.m_init = rep.num_clusters.empty() ? 0 : rep.num_clusters.front();
    WriteReportFile(o.out_report, echo, rep);
  }
  if (!o.out_state.empty()) {
    StateDump dump{l.data, l.cfg.run.variant, l.cfg.run.eta,
                   rep.kappa.empty() ? l.cfg.run.kappa : rep.kappa.back(),
                   rep.final_state};
    WriteStateDumpFile(o.out_state, dump);
  }
  out << "adapt: variant=" << VariantName(l.cfg.run.variant)
      << " iterations=" << rep.iterations
      << " M=" << rep.final_state.NumClusters()
      << " elbo=" << FormatDouble(rep.final_elbo.total)
      << (rep.converged ? "" : " (not converged)") << "\n";
  return 0;
}

struct EvalArgs {
  std::string pred, truth;
};

int DoEval(const EvalArgs &a, std::ostream &out) {
  const auto pred = Load("--pred-labels", a.pred, ReadLabelsFile);
  const auto truth = Load("--true-labels", a.truth, ReadLabelsFile);
  SPLDA_CHECK(pred.size() == truth.size(),
              "--pred-labels has " << pred.size() << " labels but --true-labels has "
                                   << truth.size());
  const MetricReport m = ClusteringMetrics(pred, truth);
  char buf[64];
  std::snprintf(buf, sizeof buf, "ARI %.6f\npurity %.6f\n", m.ari, m.purity);
  out << buf;
  return 0;
}

void PrintElbo(const ElboBreakdown &e, std::ostream &out) {
  double sum = 0.0;
  for (const auto &t : e.terms) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-24s %.17g\n", t.name.c_str(), t.value);
    out << buf;
    sum += t.value;
  }
  out << "total " << FormatDouble(e.total) << "\n"
      << "sum_of_terms " << FormatDouble(sum) << "\n";
}

struct AuditArgs {
  std::string state_dump, out_state;
  int sweeps = 0;
};

int DoAudit(const AuditArgs &a, const RunInputs &in, std::ostream &out) {
  StateDump dump;
  RunConfig rc;
  if (!a.state_dump.empty()) {
    dump = Load("--state-dump", a.state_dump, ReadStateDumpFile);
    if (!in.config.empty())
      rc = Load("--config", in.config, ReadConfigFile).run;
    rc.variant = dump.variant;
    rc.eta = dump.eta;
  } else {
    SPLDA_CHECK(!in.model.empty() && !in.unsup_ivectors.empty(),
                "elbo-audit needs --state-dump or --model and "
                "--unsup-ivectors");
    const Loaded l = LoadRun(in);
    const RunReport rep = RunLoaded(l, out);
    rc = l.cfg.run;
    dump = StateDump{l.data, rc.variant, rc.eta,
                     rep.kappa.empty() ? rc.kappa : rep.kappa.back(),
                     rep.final_state};
  }
  const Corpus corpus = Corpus::Build(dump.data);
  out << "variant " << VariantName(dump.variant) << "\neta "
      << FormatDouble(dump.eta) << "\nM " << dump.state.NumClusters() << "\n";
  ElboBreakdown before = ComputeElbo(corpus, rc, dump.state);
  PrintElbo(before, out);
  for (int s = 0; s < a.sweeps; ++s) {
    RunSweep(corpus, rc, dump.kappa, s, &dump.state);
    const ElboBreakdown after = ComputeElbo(corpus, rc, dump.state);
    out << "after sweep " << (s + 1) << "\n";
    PrintElbo(after, out);
    out << "delta " << FormatDouble(after.total - before.total) << "\n";
    before = after;
  }
  if (!a.out_state.empty()) WriteStateDumpFile(a.out_state, dump);
  return 0;
}

}  // namespace

int Run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"Speaker-clustering SPLDA adaptation with variational Bayes",
               args.empty() ? "splda-vb" : args[0]};
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "log progress to stderr");
  app.add_flag("-q,--quiet", quiet, "suppress warnings");

  SynthArgs sa;
  auto *synth = app.add_subcommand("synth", "generate synthetic i-vectors");
  synth->add_option("--spec", sa.spec_file, "key=value synth spec file");
  synth->add_option("--out-prefix", sa.out_prefix, "output path prefix")
      ->required();
  synth->add_option("--model", sa.model_file, "generate from this model");
  synth->add_option("--d", sa.d, "i-vector dimension");
  synth->add_option("--ny", sa.ny, "speaker factor dimension");
  synth->add_option("--speakers", sa.speakers, "unlabelled speakers");
  synth->add_option("--per-speaker", sa.per_speaker, "vectors per speaker");
  synth->add_option("--min-per-speaker", sa.min_per, "range lower bound");
  synth->add_option("--max-per-speaker", sa.max_per, "range upper bound");
  synth->add_option("--sup-speakers", sa.sup_speakers, "labelled speakers");
  synth->add_option("--sup-per-speaker", sa.sup_per_speaker,
                    "vectors per labelled speaker");
  synth->add_option("--eigenvoice-scale", sa.ev_scale, "scale of V");
  synth->add_option("--noise-scale", sa.noise_scale, "scale of W^-1/2");
  synth->add_option("--seed", sa.seed, "random seed");

  TrainArgs ta;
  auto *train = app.add_subcommand("train", "supervised SPLDA estimation");
  train->add_option("--ivectors", ta.ivectors, "labelled i-vectors")->required();
  train->add_option("--labels", ta.labels, "speaker labels")->required();
  train->add_option("--ny", ta.ny, "speaker factor dimension")->required();
  train->add_option("--out-model", ta.out_model, "output model")->required();
  train->add_option("--trace", ta.trace, "write the bound trace here");
  train->add_option("--max-iter", ta.max_iter, "iteration cap");
  train->add_option("--elbo-tol", ta.elbo_tol, "relative convergence test");
  train->add_flag("--no-min-divergence", ta.no_min_div,
                  "skip the minimum-divergence step");

  RunInputs ai;
  AdaptOutputs ao;
  auto *adapt = app.add_subcommand("adapt", "adapt a model to unlabelled data");
  AddRunOptions(adapt, &ai, true);
  adapt->add_option("--out-model", ao.out_model, "adapted model");
  adapt->add_option("--out-labels", ao.out_labels, "hard cluster labels");
  adapt->add_option("--out-report", ao.out_report, "run report");
  adapt->add_option("--out-state", ao.out_state, "state dump for elbo-audit");

  EvalArgs ea;
  auto *eval = app.add_subcommand("eval", "ARI and purity of a labelling");
  eval->add_option("--pred-labels", ea.pred, "predicted labels")->required();
  eval->add_option("--true-labels", ea.truth, "reference labels")->required();

  RunInputs ui;
  AuditArgs ua;
  auto *audit = app.add_subcommand("elbo-audit", "print every term of the bound");
  audit->add_option("--state-dump", ua.state_dump, "state written by adapt");
  audit->add_option("--sweeps", ua.sweeps, "extra sweeps to audit");
  audit->add_option("--out-state", ua.out_state, "state after the sweeps");
  AddRunOptions(audit, &ui, false);

  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err);
  }
  SetLogLevel(quiet ? LogLevel::kQuiet
                    : verbose ? LogLevel::kInfo : LogLevel::kWarning);
  try {
    if (*synth) return DoSynth(synth, sa, out);
    if (*train) return DoTrain(ta, out);
    if (*adapt) return DoAdapt(ai, ao, out);
    if (*eval) return DoEval(ea, out);
    if (*audit) return DoAudit(ua, ui, out);
  } catch (const SpldaError &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace splda::cli
