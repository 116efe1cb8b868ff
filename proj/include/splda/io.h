// include/splda/io.h

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

#ifndef SPLDA_IO_H_
#define SPLDA_IO_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "splda/adapt.h"
#include "splda/common.h"
#include "splda/posteriors.h"

// Text formats.  Doubles are written with 17 significant digits so every
// finite value reads back bit-exactly.
//
//   matrix:  "IVEC <rows> <cols>" then one line per row
//   model:   "SPLDA <d> <n_y>", sections MU, V, W, optional BAYES
//   labels:  one integer per line
//   config:  key=value lines, '#' starts a comment
//   report:  "# key value" header lines, then "iter elbo M kappa" rows

namespace splda {

std::string FormatDouble(double x);

void WriteMatrix(std::ostream &os, const MatrixXd &m);
MatrixXd ReadMatrix(std::istream &is, const std::string &what = "matrix");
void WriteMatrixFile(const std::string &path, const MatrixXd &m);
MatrixXd ReadMatrixFile(const std::string &path);

void WriteLabelsFile(const std::string &path, const std::vector<int> &labels);
std::vector<int> ReadLabelsFile(const std::string &path);

/// A point model plus, for the Bayesian variant, the posterior over
/// (Vt, alpha, W) and the hyperparameters it was fitted with.
struct ModelBundle {
  SpldaModel model;
  std::optional<BayesPosterior> bayes;
  std::optional<Hyperparams> hyper;
};

void WriteModel(std::ostream &os, const ModelBundle &b);
ModelBundle ReadModel(std::istream &is);
void WriteModelFile(const std::string &path, const ModelBundle &b);
ModelBundle ReadModelFile(const std::string &path);

/// Run configuration read from a config file.
struct AdaptConfig {
  RunConfig run;
  Hyperparams hyper;
};

/// Applies one key=value setting; unknown keys and bad values throw.
void ApplyConfigValue(const std::string &key, const std::string &value,
                      AdaptConfig *cfg);
AdaptConfig ParseConfig(std::istream &is, const std::string &source);
AdaptConfig ReadConfigFile(const std::string &path);
/// Every setting as key=value, in a fixed order; parses back to `cfg`.
std::vector<std::pair<std::string, std::string>> ConfigEntries(
    const AdaptConfig &cfg);

void WriteReport(std::ostream &os, const AdaptConfig &cfg,
                 const RunReport &rep);
void WriteReportFile(const std::string &path, const AdaptConfig &cfg,
                     const RunReport &rep);

struct ReportTrace {
  std::map<std::string, std::string> header;  // first value of each key
  std::vector<int> iter;
  std::vector<double> elbo;
  std::vector<Index> num_clusters;
  std::vector<double> kappa;
};
ReportTrace ReadReportFile(const std::string &path);

/// Everything needed to recompute the bound: data, variant, eta and the
/// full variational state.
struct StateDump {
  Dataset data;
  Variant variant = Variant::kPoint;
  double eta = 1.0;
  double kappa = 1.0;
  VbState state;
};

void WriteStateDump(std::ostream &os, const StateDump &dump);
StateDump ReadStateDump(std::istream &is);
void WriteStateDumpFile(const std::string &path, const StateDump &dump);
StateDump ReadStateDumpFile(const std::string &path);

}  // namespace splda

#endif  // SPLDA_IO_H_
