// src/io.cc

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

#include "splda/io.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "splda/linalg.h"

namespace splda {

namespace {

constexpr const char *kStateMagic = "SPLDA-STATE";
constexpr const char *kReportMagic = "splda-report";

std::vector<std::string> Split(const std::string &line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ParseDouble(const std::string &tok, const std::string &what) {
  const char *begin = tok.c_str();
  char *end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  SPLDA_CHECK(end != begin && *end == '\0',
              what << ": cannot parse '" << tok << "' as a number");
  // Subnormals set ERANGE but still round-trip; only overflow is an error.
  SPLDA_CHECK(errno != ERANGE || std::abs(v) < 1.0,
              what << ": value '" << tok << "' out of range");
  SPLDA_CHECK(std::isfinite(v), what << ": non-finite value '" << tok << "'");
  return v;
}

long long ParseInt(const std::string &tok, const std::string &what) {
  const char *begin = tok.c_str();
  char *end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  SPLDA_CHECK(end != begin && *end == '\0' && errno == 0,
              what << ": cannot parse '" << tok << "' as an integer");
  return v;
}

std::uint64_t ParseUint64(const std::string &tok, const std::string &what) {
  SPLDA_CHECK(!tok.empty() && tok[0] != '-',
              what << ": '" << tok << "' is not a non-negative integer");
  const char *begin = tok.c_str();
  char *end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  SPLDA_CHECK(end != begin && *end == '\0' && errno == 0,
              what << ": cannot parse '" << tok << "' as an integer");
  return v;
}

bool ParseBool(const std::string &tok, const std::string &what) {
  if (tok == "1" || tok == "true" || tok == "yes" || tok == "on") return true;
  if (tok == "0" || tok == "false" || tok == "no" || tok == "off")
    return false;
  SPLDA_ERR(what << ": expected a boolean, got '" << tok << "'");
}

// Line reader that keeps a line count for error messages.
class Lines {
 public:
  Lines(std::istream &is, std::string what) : is_(is), what_(std::move(what)) {}

  // Next non-blank line, split into tokens.
  std::vector<std::string> Keyword() {
    std::string line;
    while (std::getline(is_, line)) {
      ++lineno_;
      auto toks = Split(line);
      if (!toks.empty()) return toks;
    }
    SPLDA_ERR(what_ << ": unexpected end of input after line " << lineno_);
  }

  std::vector<std::string> Expect(const std::string &kw, std::size_t nargs) {
    auto toks = Keyword();
    SPLDA_CHECK(toks[0] == kw && toks.size() == nargs + 1,
                Where() << ": expected '" << kw << "' with " << nargs
                        << " argument(s), got '" << Join(toks) << "'");
    return toks;
  }

  bool Raw(std::string *line) {
    if (!std::getline(is_, *line)) return false;
    ++lineno_;
    return true;
  }

  MatrixXd Matrix() {
    const auto head = Expect("IVEC", 2);
    const long long r = ParseInt(head[1], Where()),
                    c = ParseInt(head[2], Where());
    SPLDA_CHECK(r >= 0 && c >= 0, Where() << ": negative matrix shape");
    MatrixXd m(r, c);
    if (c == 0) return m;
    std::string line;
    for (long long i = 0; i < r; ++i) {
      SPLDA_CHECK(Raw(&line), Where() << ": matrix declared " << r
                                      << " rows, found " << i);
      const auto toks = Split(line);
      SPLDA_CHECK(static_cast<long long>(toks.size()) == c,
                  Where() << ": row has " << toks.size()
                          << " values, expected " << c);
      for (long long j = 0; j < c; ++j)
        m(i, j) = ParseDouble(toks[static_cast<std::size_t>(j)], Where());
    }
    return m;
  }

  VectorXd Vector() {
    const MatrixXd m = Matrix();
    SPLDA_CHECK(m.rows() == 1 || m.size() == 0,
                Where() << ": expected a single row");
    return m.size() == 0 ? VectorXd() : VectorXd(m.row(0).transpose());
  }

  std::string Where() const {
    return what_ + " line " + std::to_string(lineno_);
  }

  // True if only blank lines remain.
  bool AtEnd() {
    std::string line;
    while (std::getline(is_, line)) {
      ++lineno_;
      if (!Trim(line).empty()) return false;
    }
    return true;
  }

 private:
  static std::string Join(const std::vector<std::string> &t) {
    std::string s;
    for (const auto &x : t) s += (s.empty() ? "" : " ") + x;
    return s;
  }

  std::istream &is_;
  std::string what_;
  int lineno_ = 0;
};

void WriteVector(std::ostream &os, const VectorXd &v) {
  WriteMatrix(os, v.size() == 0 ? MatrixXd(1, 0) : MatrixXd(v.transpose()));
}

std::ofstream OpenOut(const std::string &path) {
  std::ofstream os(path);
  SPLDA_CHECK(os, "cannot open '" << path << "' for writing");
  return os;
}

std::ifstream OpenIn(const std::string &path) {
  std::ifstream is(path);
  SPLDA_CHECK(is, "cannot open '" << path << "' for reading");
  return is;
}

void Finish(std::ofstream &os, const std::string &path) {
  os.flush();
  SPLDA_CHECK(os, "error writing '" << path << "'");
}

MatrixXd SymmetrizeOnLoad(MatrixXd w, const std::string &what) {
  const double asym = MaxAsymmetry(w);
  if (asym > 1e-12)
    SPLDA_WARN(what << ": W asymmetric by " << asym << ", symmetrizing");
  Symmetrize(&w);
  return w;
}

void WriteHyper(std::ostream &os, const Hyperparams &h) {
  os << "HYPER\n"
     << "tau0 " << FormatDouble(h.tau0) << "\n"
     << "a_alpha " << FormatDouble(h.a_alpha) << "\n"
     << "b_alpha " << FormatDouble(h.b_alpha) << "\n"
     << "beta_isotropic " << (h.beta_isotropic ? 1 : 0) << "\n"
     << "MU0\n";
  WriteVector(os, h.mu0);
  os << "BETA\n";
  WriteVector(os, h.beta);
}

Hyperparams ReadHyper(Lines *in) {
  Hyperparams h;
  h.tau0 = ParseDouble(in->Expect("tau0", 1)[1], in->Where());
  h.a_alpha = ParseDouble(in->Expect("a_alpha", 1)[1], in->Where());
  h.b_alpha = ParseDouble(in->Expect("b_alpha", 1)[1], in->Where());
  h.beta_isotropic =
      ParseBool(in->Expect("beta_isotropic", 1)[1], in->Where());
  in->Expect("MU0", 0);
  h.mu0 = in->Vector();
  in->Expect("BETA", 0);
  h.beta = in->Vector();
  return h;
}

void WriteBayes(std::ostream &os, const BayesPosterior &b) {
  const RowPosteriorVtilde &rows = b.rows;
  const Index d = rows.Dim(), k = rows.mean.cols();
  os << "BAYES\nROW_MEAN\n";
  WriteMatrix(os, rows.mean);
  if (rows.IsPointMass()) {
    os << "ROW_PRECISION none\n";
  } else {
    os << "ROW_PRECISION stacked\n";
    MatrixXd stacked(d * k, k);
    for (Index r = 0; r < d; ++r)
      stacked.middleRows(r * k, k) = rows.precision[static_cast<std::size_t>(r)];
    WriteMatrix(os, stacked);
  }
  os << "ALPHA_A " << FormatDouble(b.alpha.a_prime) << "\nALPHA_B\n";
  WriteVector(os, b.alpha.b_prime);
  if (b.wishart.point_mass) {
    os << "WISHART point\n";
    WriteMatrix(os, b.wishart.mean);
  } else {
    os << "WISHART " << FormatDouble(b.wishart.dof) << "\n";
    WriteMatrix(os, b.wishart.k);
  }
}

BayesPosterior ReadBayes(Lines *in) {
  BayesPosterior b;
  in->Expect("ROW_MEAN", 0);
  const MatrixXd mean = in->Matrix();
  const auto prec_kw = in->Expect("ROW_PRECISION", 1);
  const Index d = mean.rows(), k = mean.cols();
  if (prec_kw[1] == "none") {
    b.rows = RowPosteriorVtilde::PointMass(mean);
  } else {
    SPLDA_CHECK(prec_kw[1] == "stacked",
                in->Where() << ": unknown ROW_PRECISION layout");
    const MatrixXd stacked = in->Matrix();
    SPLDA_CHECK(stacked.rows() == d * k && stacked.cols() == k,
                in->Where() << ": row precisions have the wrong shape");
    b.rows.mean = mean;
    b.rows.log_det_precision.resize(d);
    for (Index r = 0; r < d; ++r) {
      MatrixXd p = stacked.middleRows(r * k, k);
      auto llt = Cholesky(p, "row posterior precision");
      MatrixXd cov = llt.solve(MatrixXd::Identity(k, k));
      Symmetrize(&cov);
      b.rows.log_det_precision(r) = LogDet(llt);
      b.rows.precision.push_back(std::move(p));
      b.rows.cov.push_back(std::move(cov));
    }
  }
  b.alpha.a_prime = ParseDouble(in->Expect("ALPHA_A", 1)[1], in->Where());
  in->Expect("ALPHA_B", 0);
  b.alpha.b_prime = in->Vector();
  const auto w_kw = in->Expect("WISHART", 1);
  const MatrixXd w = SymmetrizeOnLoad(in->Matrix(), in->Where());
  if (w_kw[1] == "point") {
    b.wishart = WishartPosterior::PointMass(w);
  } else {
    b.wishart = WishartPosterior::FromInverseScale(
        w, ParseDouble(w_kw[1], in->Where()));
  }
  return b;
}

ModelBundle ReadModelBody(Lines *in) {
  ModelBundle b;
  const auto head = in->Expect("SPLDA", 2);
  const long long d = ParseInt(head[1], in->Where()),
                  ny = ParseInt(head[2], in->Where());
  in->Expect("MU", 0);
  b.model.mu = in->Vector();
  in->Expect("V", 0);
  b.model.V = in->Matrix();
  in->Expect("W", 0);
  b.model.W = SymmetrizeOnLoad(in->Matrix(), in->Where());
  SPLDA_CHECK(b.model.Dim() == d && b.model.V.rows() == d &&
                  b.model.V.cols() == ny,
              in->Where() << ": sections disagree with header SPLDA " << d
                          << " " << ny);
  b.model.Validate();
  for (;;) {
    const auto kw = in->Keyword();
    if (kw[0] == "END") break;
    if (kw[0] == "BAYES") {
      b.bayes = ReadBayes(in);
      SPLDA_CHECK(b.bayes->rows.Dim() == d &&
                      b.bayes->rows.SpeakerDim() == ny,
                  in->Where() << ": BAYES section has the wrong shape");
    } else if (kw[0] == "HYPER") {
      b.hyper = ReadHyper(in);
    } else {
      SPLDA_ERR(in->Where() << ": unknown model section '" << kw[0] << "'");
    }
  }
  return b;
}

void WriteSpeakers(std::ostream &os, const std::string &name,
                   const SpeakerPosteriors &ys) {
  os << name << " " << ys.size() << "\n";
  for (const auto &y : ys) {
    os << "MEAN\n";
    WriteVector(os, y.mean);
    if (y.precision.size() == 0) {
      os << "PRECISION none\n";
    } else {
      os << "PRECISION full\n";
      WriteMatrix(os, y.precision);
    }
  }
}

SpeakerPosteriors ReadSpeakers(Lines *in, const std::string &name) {
  const auto kw = in->Expect(name, 1);
  const long long n = ParseInt(kw[1], in->Where());
  SPLDA_CHECK(n >= 0, in->Where() << ": negative speaker count");
  SpeakerPosteriors ys;
  for (long long i = 0; i < n; ++i) {
    in->Expect("MEAN", 0);
    VectorXd mean = in->Vector();
    const auto p = in->Expect("PRECISION", 1);
    if (p[1] == "none") {
      ys.push_back(SpeakerPosterior::PointMass(std::move(mean)));
    } else {
      ys.push_back(SpeakerPosterior::FromPrecision(std::move(mean),
                                                   in->Matrix()));
    }
  }
  return ys;
}

std::string JoinIndices(const std::vector<Index> &v) {
  std::string s;
  for (Index x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

std::string JoinVector(const VectorXd &v) {
  if (v.size() == 0) return "auto";
  std::string s;
  for (Index i = 0; i < v.size(); ++i)
    s += (i ? "," : "") + FormatDouble(v(i));
  return s;
}

std::vector<std::string> SplitCommas(const std::string &s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, ',')) out.push_back(Trim(cur));
  return out;
}

}  // namespace

std::string FormatDouble(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void WriteMatrix(std::ostream &os, const MatrixXd &m) {
  os << "IVEC " << m.rows() << " " << m.cols() << "\n";
  if (m.cols() == 0) return;
  std::string line;
  for (Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) line += ' ';
      line += FormatDouble(m(i, j));
    }
    line += '\n';
    os << line;
  }
}

MatrixXd ReadMatrix(std::istream &is, const std::string &what) {
  Lines in(is, what);
  return in.Matrix();
}

void WriteMatrixFile(const std::string &path, const MatrixXd &m) {
  auto os = OpenOut(path);
  WriteMatrix(os, m);
  Finish(os, path);
}

MatrixXd ReadMatrixFile(const std::string &path) {
  auto is = OpenIn(path);
  Lines in(is, path);
  MatrixXd m = in.Matrix();
  SPLDA_CHECK(in.AtEnd(), path << ": trailing data after declared rows");
  return m;
}

void WriteLabelsFile(const std::string &path, const std::vector<int> &labels) {
  auto os = OpenOut(path);
  for (int l : labels) os << l << "\n";
  Finish(os, path);
}

std::vector<int> ReadLabelsFile(const std::string &path) {
  auto is = OpenIn(path);
  std::vector<int> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty()) continue;
    const long long v =
        ParseInt(t, path + " line " + std::to_string(lineno));
    SPLDA_CHECK(v >= std::numeric_limits<int>::min() &&
                    v <= std::numeric_limits<int>::max(),
                path << " line " << lineno << ": label out of range");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void WriteModel(std::ostream &os, const ModelBundle &b) {
  os << "SPLDA " << b.model.Dim() << " " << b.model.SpeakerDim() << "\nMU\n";
  WriteVector(os, b.model.mu);
  os << "V\n";
  WriteMatrix(os, b.model.V);
  os << "W\n";
  WriteMatrix(os, b.model.W);
  if (b.bayes) WriteBayes(os, *b.bayes);
  if (b.hyper) WriteHyper(os, *b.hyper);
  os << "END\n";
}

ModelBundle ReadModel(std::istream &is) {
  Lines in(is, "model");
  return ReadModelBody(&in);
}

void WriteModelFile(const std::string &path, const ModelBundle &b) {
  auto os = OpenOut(path);
  WriteModel(os, b);
  Finish(os, path);
}

ModelBundle ReadModelFile(const std::string &path) {
  auto is = OpenIn(path);
  Lines in(is, path);
  ModelBundle b = ReadModelBody(&in);
  SPLDA_CHECK(in.AtEnd(), path << ": trailing data after END");
  return b;
}

void ApplyConfigValue(const std::string &key, const std::string &value,
                      AdaptConfig *cfg) {
  RunConfig &r = cfg->run;
  Hyperparams &h = cfg->hyper;
  const std::string what = "config key '" + key + "'";
  auto num = [&] { return ParseDouble(value, what); };
  auto integer = [&] { return ParseInt(value, what); };
  auto flag = [&] { return ParseBool(value, what); };
  if (key == "variant") r.variant = ParseVariant(value);
  else if (key == "m_init") r.m_init = integer();
  else if (key == "init") r.init_method = ParseInitMethod(value);
  else if (key == "anneal") r.anneal.enabled = flag();
  else if (key == "kappa0") r.anneal.kappa0 = num();
  else if (key == "anneal_growth") r.anneal.growth = num();
  else if (key == "kappa_max") r.anneal.kappa_max = num();
  else if (key == "kappa") r.kappa = num();
  else if (key == "prune_merge") r.prune_merge = flag();
  else if (key == "prune_threshold") r.prune_threshold = num();
  else if (key == "merge_threshold") r.merge_threshold = num();
  else if (key == "prune_every") r.prune_every = static_cast<int>(integer());
  else if (key == "elbo_tol") r.elbo_tol = num();
  else if (key == "max_iter") r.max_iter = static_cast<int>(integer());
  else if (key == "eta") r.eta = num();
  else if (key == "update_params") r.update_params = flag();
  else if (key == "min_divergence") r.min_divergence = flag();
  else if (key == "optimize_tau0") r.optimize_tau0 = flag();
  else if (key == "optimize_alpha") r.optimize_alpha = flag();
  else if (key == "optimize_mu") r.optimize_mu = flag();
  else if (key == "sampler") r.sampler.enabled = flag();
  else if (key == "num_samples") r.sampler.num_samples = integer();
  else if (key == "sample_strategy")
    r.sampler.strategy = ParseSampleStrategy(value);
  else if (key == "seed") r.seed = ParseUint64(value, what);
  else if (key == "sweep_m") {
    r.sweep_m.clear();
    if (!value.empty() && value != "none")
      for (const auto &t : SplitCommas(value))
        r.sweep_m.push_back(ParseInt(t, what));
  } else if (key == "tau0") h.tau0 = num();
  else if (key == "a_alpha") h.a_alpha = num();
  else if (key == "b_alpha") h.b_alpha = num();
  else if (key == "beta_isotropic") h.beta_isotropic = flag();
  else if (key == "mu0" || key == "beta") {
    VectorXd v;
    if (value != "auto") {
      const auto toks = SplitCommas(value);
      v.resize(static_cast<Index>(toks.size()));
      for (std::size_t i = 0; i < toks.size(); ++i)
        v(static_cast<Index>(i)) = ParseDouble(toks[i], what);
    }
    (key == "mu0" ? h.mu0 : h.beta) = v;
  } else {
    SPLDA_ERR("unknown config key '" << key << "'");
  }
}

AdaptConfig ParseConfig(std::istream &is, const std::string &source) {
  AdaptConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string t = Trim(hash == std::string::npos ? line
                                                         : line.substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    SPLDA_CHECK(eq != std::string::npos,
                source << " line " << lineno << ": expected key=value");
    const std::string key = Trim(t.substr(0, eq));
    const std::string value = Trim(t.substr(eq + 1));
    try {
      ApplyConfigValue(key, value, &cfg);
    } catch (const SpldaError &e) {
      SPLDA_ERR(source << " line " << lineno << ": " << e.what());
    }
  }
  cfg.run.Validate();
  return cfg;
}

AdaptConfig ReadConfigFile(const std::string &path) {
  auto is = OpenIn(path);
  return ParseConfig(is, path);
}

std::vector<std::pair<std::string, std::string>> ConfigEntries(
    const AdaptConfig &cfg) {
  const RunConfig &r = cfg.run;
  const Hyperparams &h = cfg.hyper;
  auto b = [](bool x) { return std::string(x ? "1" : "0"); };
  return {
      {"variant", VariantName(r.variant)},
      {"m_init", std::to_string(r.m_init)},
      {"init", InitMethodName(r.init_method)},
      {"anneal", b(r.anneal.enabled)},
      {"kappa0", FormatDouble(r.anneal.kappa0)},
      {"anneal_growth", FormatDouble(r.anneal.growth)},
      {"kappa_max", FormatDouble(r.anneal.kappa_max)},
      {"kappa", FormatDouble(r.kappa)},
      {"prune_merge", b(r.prune_merge)},
      {"prune_threshold", FormatDouble(r.prune_threshold)},
      {"merge_threshold", FormatDouble(r.merge_threshold)},
      {"prune_every", std::to_string(r.prune_every)},
      {"elbo_tol", FormatDouble(r.elbo_tol)},
      {"max_iter", std::to_string(r.max_iter)},
      {"eta", FormatDouble(r.eta)},
      {"update_params", b(r.update_params)},
      {"min_divergence", b(r.min_divergence)},
      {"optimize_tau0", b(r.optimize_tau0)},
      {"optimize_alpha", b(r.optimize_alpha)},
      {"optimize_mu", b(r.optimize_mu)},
      {"sampler", b(r.sampler.enabled)},
      {"num_samples", std::to_string(r.sampler.num_samples)},
      {"sample_strategy", SampleStrategyName(r.sampler.strategy)},
      {"seed", std::to_string(r.seed)},
      {"sweep_m", r.sweep_m.empty() ? "none" : JoinIndices(r.sweep_m)},
      {"tau0", FormatDouble(h.tau0)},
      {"a_alpha", FormatDouble(h.a_alpha)},
      {"b_alpha", FormatDouble(h.b_alpha)},
      {"mu0", JoinVector(h.mu0)},
      {"beta", JoinVector(h.beta)},
      {"beta_isotropic", b(h.beta_isotropic)},
  };
}

void WriteReport(std::ostream &os, const AdaptConfig &cfg,
                 const RunReport &rep) {
  os << "# format " << kReportMagic << " 1\n";
  for (const auto &[k, v] : ConfigEntries(cfg))
    os << "# " << k << " " << v << "\n";
  os << "# converged " << (rep.converged ? 1 : 0) << "\n"
     << "# iterations " << rep.iterations << "\n"
     << "# final_elbo " << FormatDouble(rep.final_elbo.total) << "\n"
     << "# final_M " << rep.final_state.NumClusters() << "\n";
  for (const auto &t : rep.final_elbo.terms)
    os << "# term " << t.name << " " << FormatDouble(t.value) << "\n";
  for (const auto &e : rep.events)
    os << "# event " << e.iter << " " << e.kind << " " << e.detail << "\n";
  for (const auto &w : rep.warnings) os << "# warning " << w << "\n";
  os << "iter elbo M kappa\n";
  for (std::size_t i = 0; i < rep.elbo.size(); ++i)
    os << i << " " << FormatDouble(rep.elbo[i]) << " " << rep.num_clusters[i]
       << " " << FormatDouble(rep.kappa[i]) << "\n";
}

void WriteReportFile(const std::string &path, const AdaptConfig &cfg,
                     const RunReport &rep) {
  auto os = OpenOut(path);
  WriteReport(os, cfg, rep);
  Finish(os, path);
}

ReportTrace ReadReportFile(const std::string &path) {
  auto is = OpenIn(path);
  ReportTrace tr;
  std::string line;
  int lineno = 0;
  bool columns = false;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string where = path + " line " + std::to_string(lineno);
    if (Trim(line).empty()) continue;
    if (line[0] == '#') {
      const std::string body = Trim(line.substr(1));
      const auto sp = body.find(' ');
      const std::string key = body.substr(0, sp);
      const std::string value =
          sp == std::string::npos ? "" : Trim(body.substr(sp + 1));
      tr.header.emplace(key, value);
      continue;
    }
    const auto toks = Split(line);
    if (!columns) {
      SPLDA_CHECK(toks.size() == 4 && toks[0] == "iter",
                  where << ": expected the column header 'iter elbo M kappa'");
      columns = true;
      continue;
    }
    SPLDA_CHECK(toks.size() == 4, where << ": expected 4 columns");
    tr.iter.push_back(static_cast<int>(ParseInt(toks[0], where)));
    tr.elbo.push_back(ParseDouble(toks[1], where));
    tr.num_clusters.push_back(ParseInt(toks[2], where));
    tr.kappa.push_back(ParseDouble(toks[3], where));
  }
  auto it = tr.header.find("format");
  SPLDA_CHECK(it != tr.header.end() &&
                  it->second.rfind(kReportMagic, 0) == 0,
              path << ": not a report file");
  return tr;
}

void WriteStateDump(std::ostream &os, const StateDump &dump) {
  const VbState &st = dump.state;
  os << kStateMagic << " 1\n"
     << "variant " << VariantName(dump.variant) << "\n"
     << "eta " << FormatDouble(dump.eta) << "\n"
     << "kappa " << FormatDouble(dump.kappa) << "\n"
     << "PHI\n";
  WriteMatrix(os, dump.data.phi);
  os << "PHI_D\n";
  WriteMatrix(os, dump.data.phi_d);
  os << "LABELS_D\n";
  MatrixXd labels(static_cast<Index>(dump.data.labels_d.size()), 1);
  for (std::size_t j = 0; j < dump.data.labels_d.size(); ++j)
    labels(static_cast<Index>(j), 0) = dump.data.labels_d[j];
  WriteMatrix(os, labels);
  os << "MODEL\n";
  ModelBundle b{st.model, st.bayes, st.hyper};
  WriteModel(os, b);
  os << "RESP\n";
  WriteMatrix(os, st.resp.r);
  os << "LOG_RHO\n";
  WriteMatrix(os, st.resp.log_rho);
  os << "TAU\n";
  WriteVector(os, st.dir.tau);
  WriteSpeakers(os, "Y", st.y);
  WriteSpeakers(os, "Y_D", st.y_d);
  os << "END\n";
}

StateDump ReadStateDump(std::istream &is) {
  Lines in(is, "state dump");
  StateDump d;
  const auto magic = in.Keyword();
  SPLDA_CHECK(magic.size() == 2 && magic[0] == kStateMagic && magic[1] == "1",
              "state dump: missing '" << kStateMagic << " 1' header");
  d.variant = ParseVariant(in.Expect("variant", 1)[1]);
  d.eta = ParseDouble(in.Expect("eta", 1)[1], in.Where());
  d.kappa = ParseDouble(in.Expect("kappa", 1)[1], in.Where());
  in.Expect("PHI", 0);
  d.data.phi = in.Matrix();
  in.Expect("PHI_D", 0);
  d.data.phi_d = in.Matrix();
  in.Expect("LABELS_D", 0);
  const MatrixXd labels = in.Matrix();
  SPLDA_CHECK(labels.cols() == 1 || labels.size() == 0,
              in.Where() << ": labels must be one column");
  for (Index j = 0; j < labels.rows(); ++j) {
    const double l = labels(j, 0);
    SPLDA_CHECK(l == std::floor(l) && l >= 0 && l < 1e9,
                in.Where() << ": bad label " << l);
    d.data.labels_d.push_back(static_cast<int>(l));
  }
  in.Expect("MODEL", 0);
  ModelBundle b = ReadModelBody(&in);
  d.state.model = std::move(b.model);
  d.state.bayes = std::move(b.bayes);
  SPLDA_CHECK(b.hyper.has_value(), in.Where() << ": model lacks HYPER");
  d.state.hyper = *b.hyper;
  in.Expect("RESP", 0);
  d.state.resp.r = in.Matrix();
  in.Expect("LOG_RHO", 0);
  d.state.resp.log_rho = in.Matrix();
  in.Expect("TAU", 0);
  d.state.dir = DirichletPosterior::FromTau(in.Vector());
  d.state.y = ReadSpeakers(&in, "Y");
  d.state.y_d = ReadSpeakers(&in, "Y_D");
  in.Expect("END", 0);

  // Shape consistency; everything else is checked by the bound itself.
  const Index m = d.state.resp.r.cols();
  SPLDA_CHECK(d.state.resp.r.rows() == d.data.phi.rows() &&
                  d.state.resp.log_rho.rows() == d.data.phi.rows() &&
                  d.state.resp.log_rho.cols() == m,
              "state dump: responsibilities do not match the data");
  SPLDA_CHECK(d.state.dir.tau.size() == m &&
                  static_cast<Index>(d.state.y.size()) == m,
              "state dump: " << m << " clusters but " << d.state.dir.tau.size()
                             << " Dirichlet entries and " << d.state.y.size()
                             << " speaker posteriors");
  SPLDA_CHECK(static_cast<Index>(d.state.y_d.size()) ==
                  d.data.NumSupervisedSpeakers(),
              "state dump: supervised posteriors do not match the labels");
  for (const auto &y : d.state.y)
    SPLDA_CHECK(y.mean.size() == d.state.model.SpeakerDim(),
                "state dump: speaker posterior has the wrong dimension");
  SPLDA_CHECK(d.data.phi.rows() == 0 ||
                  d.data.phi.cols() == d.state.model.Dim(),
              "state dump: data and model dimensions differ");
  d.data.Validate();
  return d;
}

void WriteStateDumpFile(const std::string &path, const StateDump &dump) {
  auto os = OpenOut(path);
  WriteStateDump(os, dump);
  Finish(os, path);
}

StateDump ReadStateDumpFile(const std::string &path) {
  auto is = OpenIn(path);
  try {
    StateDump d = ReadStateDump(is);
    return d;
  } catch (const SpldaError &e) {
    SPLDA_ERR(path << ": " << e.what());
  }
}

}  // namespace splda
