// tests/io_test.cc

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

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "splda/adapt.h"
#include "splda/io.h"
#include "test_util.h"

namespace splda {
namespace {

using testing::MakeScenario;
using testing::RandomGaussian;

std::string Tmp(const std::string &name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

std::string WriteText(const std::string &name, const std::string &text) {
  const std::string p = Tmp(name);
  std::ofstream(p) << text;
  return p;
}

template <typename Fn>
std::string ErrorOf(Fn fn) {
  try {
    fn();
  } catch (const SpldaError &e) {
    return e.what();
  }
  return "";
}

TEST(Io, MatrixRoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  MatrixXd m = RandomGaussian(5, 3, &rng);
  m(0, 0) = std::numeric_limits<double>::denorm_min();
  m(1, 1) = -0.0;
  m(2, 2) = std::numeric_limits<double>::max();
  const std::string p = Tmp("m.ivec");
  WriteMatrixFile(p, m);
  const MatrixXd back = ReadMatrixFile(p);
  ASSERT_EQ(back.rows(), 5);
  EXPECT_EQ(std::memcmp(back.data(), m.data(), sizeof(double) * 15), 0);
  EXPECT_EQ(ReadMatrixFile(p).cols(), 3);
  EXPECT_EQ(FormatDouble(0.1), "0.10000000000000001");
}

TEST(Io, MatrixErrorsNameTheLine) {
  const std::string p = WriteText("bad.ivec", "IVEC 2 2\n1 2\n3 x\n");
  EXPECT_NE(ErrorOf([&] { ReadMatrixFile(p); }).find("line 3"),
            std::string::npos);
  const std::string q = WriteText("short.ivec", "IVEC 3 2\n1 2\n");
  EXPECT_FALSE(ErrorOf([&] { ReadMatrixFile(q); }).empty());
  const std::string r = WriteText("nan.ivec", "IVEC 1 2\n1 nan\n");
  EXPECT_FALSE(ErrorOf([&] { ReadMatrixFile(r); }).empty());
  EXPECT_NE(ErrorOf([] { ReadMatrixFile("/nonexistent/x"); }).find("/nonexistent/x"),
            std::string::npos);
}

TEST(Io, EmptyMatrixAndLabels) {
  std::ostringstream os;
  WriteMatrix(os, MatrixXd(0, 4));
  std::istringstream is(os.str());
  const MatrixXd e = ReadMatrix(is);
  EXPECT_EQ(e.rows(), 0);
  EXPECT_EQ(e.cols(), 4);
  const std::string p = Tmp("l.labels");
  WriteLabelsFile(p, {3, 0, 7});
  EXPECT_EQ(ReadLabelsFile(p), (std::vector<int>{3, 0, 7}));
  EXPECT_FALSE(
      ErrorOf([] { ReadLabelsFile(WriteText("bl", "1\n2.5\n")); }).empty());
}

TEST(Io, ModelRoundTrip) {
  const auto sc = MakeScenario(5, 2, 4, 8, 3.0, 2);
  RunConfig cfg;
  cfg.variant = Variant::kBayes;
  cfg.max_iter = 5;
  const RunReport rep =
      RunAdaptation(sc.synth.data, sc.init, Hyperparams{}, cfg);
  const ModelBundle b{rep.model, rep.final_state.bayes, rep.final_state.hyper};
  const std::string p = Tmp("b.model");
  WriteModelFile(p, b);
  const ModelBundle back = ReadModelFile(p);
  EXPECT_EQ(back.model.V, b.model.V);
  EXPECT_EQ(back.model.W, b.model.W);
  ASSERT_TRUE(back.bayes.has_value());
  EXPECT_EQ(back.bayes->rows.mean, b.bayes->rows.mean);
  EXPECT_EQ(back.bayes->alpha.b_prime, b.bayes->alpha.b_prime);
  EXPECT_EQ(back.bayes->wishart.k, b.bayes->wishart.k);
  ASSERT_TRUE(back.hyper.has_value());
  EXPECT_EQ(back.hyper->mu0, b.hyper->mu0);

  // Point-only model.
  std::ostringstream os;
  WriteModel(os, ModelBundle{sc.init, std::nullopt, std::nullopt});
  std::istringstream is(os.str());
  const ModelBundle pt = ReadModel(is);
  EXPECT_FALSE(pt.bayes.has_value());
  EXPECT_EQ(pt.model.mu, sc.init.mu);
}

TEST(Io, ModelRejectsIndefiniteW) {
  const std::string p = WriteText(
      "neg.model",
      "SPLDA 2 1\nMU\nIVEC 1 2\n0 0\nV\nIVEC 2 1\n1\n0\nW\nIVEC 2 2\n-1 0\n0 1\n"
      "END\n");
  EXPECT_FALSE(ErrorOf([&] { ReadModelFile(p); }).empty());
}

TEST(Io, ConfigParsing) {
  std::istringstream is(
      "# comment\nvariant = bayes\nm_init=7\nanneal=on\nkappa0=0.3\n"
      "sweep_m=2,4,8\nmu0=auto\ntau0=2.5\nsampler=no\n");
  const AdaptConfig c = ParseConfig(is, "test.cfg");
  EXPECT_EQ(c.run.variant, Variant::kBayes);
  EXPECT_EQ(c.run.m_init, 7);
  EXPECT_TRUE(c.run.anneal.enabled);
  EXPECT_DOUBLE_EQ(c.run.anneal.kappa0, 0.3);
  EXPECT_EQ(c.run.sweep_m, (std::vector<Index>{2, 4, 8}));
  EXPECT_DOUBLE_EQ(c.hyper.tau0, 2.5);
  EXPECT_EQ(c.hyper.mu0.size(), 0);

  std::istringstream unknown("variant=point\nfoo=1\n");
  const std::string err = ErrorOf([&] { ParseConfig(unknown, "x.cfg"); });
  EXPECT_NE(err.find("foo"), std::string::npos);
  EXPECT_NE(err.find("line 2"), std::string::npos);
  std::istringstream badval("m_init=seven\n");
  EXPECT_FALSE(ErrorOf([&] { ParseConfig(badval, "x.cfg"); }).empty());
  std::istringstream invalid("eta=2\n");
  EXPECT_FALSE(ErrorOf([&] { ParseConfig(invalid, "x.cfg"); }).empty());
}

TEST(Io, ConfigEntriesRoundTrip) {
  AdaptConfig c;
  ApplyConfigValue("eta", "0.25", &c);
  ApplyConfigValue("beta", "1,2,3", &c);
  ApplyConfigValue("sample_strategy", "average_accumulators", &c);
  std::ostringstream os;
  for (const auto &[k, v] : ConfigEntries(c)) os << k << "=" << v << "\n";
  std::istringstream is(os.str());
  const AdaptConfig back = ParseConfig(is, "rt");
  EXPECT_DOUBLE_EQ(back.run.eta, 0.25);
  EXPECT_EQ(back.hyper.beta, c.hyper.beta);
  EXPECT_EQ(back.run.sampler.strategy, SampleStrategy::kAverageAccumulators);
}

TEST(Io, ReportCarriesConfigAndTrace) {
  const auto sc = MakeScenario(5, 2, 4, 8, 3.0, 3);
  AdaptConfig c;
  c.run.eta = 0.5;
  const RunReport rep =
      RunAdaptation(sc.synth.data, sc.init, c.hyper, c.run);
  const std::string p = Tmp("r.report");
  WriteReportFile(p, c, rep);
  const ReportTrace t = ReadReportFile(p);
  EXPECT_EQ(t.header.at("eta"), "0.5");
  EXPECT_EQ(t.elbo, rep.elbo);
  EXPECT_EQ(t.num_clusters, rep.num_clusters);
  EXPECT_EQ(static_cast<int>(t.iter.size()), rep.iterations);
}

TEST(Io, StateDumpPreservesTheBound) {
  const auto sc = MakeScenario(5, 2, 4, 8, 3.0, 4);
  for (Variant v : {Variant::kPoint, Variant::kBayes}) {
    RunConfig cfg;
    cfg.variant = v;
    cfg.eta = 0.8;
    const RunReport rep =
        RunAdaptation(sc.synth.data, sc.init, Hyperparams{}, cfg);
    const std::string p = Tmp("s.state");
    WriteStateDumpFile(p, StateDump{sc.synth.data, v, 0.8, 1.0,
                                    rep.final_state});
    const StateDump d = ReadStateDumpFile(p);
    const Corpus corpus = Corpus::Build(d.data);
    EXPECT_EQ(ComputeElbo(corpus, cfg, d.state).total, rep.final_elbo.total)
        << VariantName(v);
  }
}

}  // namespace
}  // namespace splda
