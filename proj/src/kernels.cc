// src/kernels.cc

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

#include "splda/kernels.h"

#include <cmath>
#include <vector>

#ifdef SPLDA_HAVE_OPENMP
#include <omp.h>
#endif

#include "splda/linalg.h"

namespace splda::kernels {

namespace {

Index NumBlocks(Index rows) { return (rows + kRowBlock - 1) / kRowBlock; }

// Pairwise reduction of per-block partials; order depends only on the
// number of blocks.
template <typename T, typename Add>
T TreeReduce(std::vector<T> parts, Add add) {
  while (parts.size() > 1) {
    std::vector<T> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2)
      next.push_back(add(parts[i], parts[i + 1]));
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return std::move(parts.front());
}

void CheckShapes(const MatrixXd &resp, const MatrixXd &phi) {
  SPLDA_CHECK(resp.rows() == phi.rows(),
              "responsibilities have " << resp.rows() << " rows but phi has "
                                       << phi.rows());
}

void SoftmaxRow(const MatrixXd &log_rho, double kappa, Index j,
                MatrixXd *out) {
  const Index m = log_rho.cols();
  const double mx = log_rho.row(j).maxCoeff();
  SPLDA_CHECK(std::isfinite(mx), "responsibility row " << j
                                                       << " has max log score "
                                                       << mx
                                                       << " (degenerate model)");
  double total = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double e = std::exp(kappa * (log_rho(j, i) - mx));
    (*out)(j, i) = e;
    total += e;
  }
  for (Index i = 0; i < m; ++i) (*out)(j, i) /= total;
}

}  // namespace

int NumThreads() {
#ifdef SPLDA_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

FirstOrder AccumulateFirstOrderSerial(const MatrixXd &resp,
                                      const MatrixXd &phi) {
  CheckShapes(resp, phi);
  const Index n = phi.rows(), d = phi.cols(), m = resp.cols();
  FirstOrder out{VectorXd::Zero(m), MatrixXd::Zero(d, m)};
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      const double r = resp(j, i);
      out.n(i) += r;
      for (Index k = 0; k < d; ++k) out.f(k, i) += r * phi(j, k);
    }
  }
  return out;
}

FirstOrder AccumulateFirstOrder(const MatrixXd &resp, const MatrixXd &phi) {
  CheckShapes(resp, phi);
  const Index n = phi.rows(), d = phi.cols(), m = resp.cols();
  const Index blocks = NumBlocks(n);
  if (blocks == 0) return FirstOrder{VectorXd::Zero(m), MatrixXd::Zero(d, m)};
  std::vector<FirstOrder> parts(static_cast<std::size_t>(blocks));
#ifdef SPLDA_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (Index b = 0; b < blocks; ++b) {
    const Index start = b * kRowBlock;
    const Index len = std::min(kRowBlock, n - start);
    auto r = resp.middleRows(start, len);
    auto x = phi.middleRows(start, len);
    parts[static_cast<std::size_t>(b)] =
        FirstOrder{r.colwise().sum().transpose(), x.transpose() * r};
  }
  return TreeReduce(std::move(parts), [](const FirstOrder &a,
                                         const FirstOrder &b) {
    return FirstOrder{a.n + b.n, a.f + b.f};
  });
}

MatrixXd ScatterSerial(const MatrixXd &phi) {
  const Index n = phi.rows(), d = phi.cols();
  MatrixXd s = MatrixXd::Zero(d, d);
  for (Index j = 0; j < n; ++j)
    for (Index a = 0; a < d; ++a)
      for (Index b = 0; b <= a; ++b) s(a, b) += phi(j, a) * phi(j, b);
  for (Index a = 0; a < d; ++a)
    for (Index b = a + 1; b < d; ++b) s(a, b) = s(b, a);
  return s;
}

MatrixXd Scatter(const MatrixXd &phi) {
  const Index n = phi.rows(), d = phi.cols();
  const Index blocks = NumBlocks(n);
  if (blocks == 0) return MatrixXd::Zero(d, d);
  std::vector<MatrixXd> parts(static_cast<std::size_t>(blocks));
#ifdef SPLDA_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (Index b = 0; b < blocks; ++b) {
    const Index start = b * kRowBlock;
    const Index len = std::min(kRowBlock, n - start);
    auto x = phi.middleRows(start, len);
    parts[static_cast<std::size_t>(b)] = x.transpose() * x;
  }
  MatrixXd s = TreeReduce(std::move(parts), [](const MatrixXd &a,
                                               const MatrixXd &b) -> MatrixXd {
    return a + b;
  });
  Symmetrize(&s);
  return s;
}

MatrixXd GaussianScoresSerial(const MatrixXd &phi, const ScoreParams &p) {
  const Index n = phi.rows(), d = phi.cols(), m = p.linear.cols();
  MatrixXd out(n, m);
  VectorXd x(d);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < d; ++k) x(k) = phi(j, k) - p.offset(k);
    double quad = 0.0;
    for (Index a = 0; a < d; ++a) {
      double row = 0.0;
      for (Index b = 0; b < d; ++b) row += p.precision(a, b) * x(b);
      quad += x(a) * row;
    }
    for (Index i = 0; i < m; ++i) {
      double lin = 0.0;
      for (Index k = 0; k < d; ++k) lin += x(k) * p.linear(k, i);
      out(j, i) = p.constant - 0.5 * quad + lin + p.speaker_const(i);
    }
  }
  return out;
}

MatrixXd GaussianScores(const MatrixXd &phi, const ScoreParams &p) {
  const Index n = phi.rows(), m = p.linear.cols();
  MatrixXd out(n, m);
  const Index blocks = NumBlocks(n);
#ifdef SPLDA_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (Index b = 0; b < blocks; ++b) {
    const Index start = b * kRowBlock;
    const Index len = std::min(kRowBlock, n - start);
    MatrixXd x = phi.middleRows(start, len).rowwise() - p.offset.transpose();
    const VectorXd quad = ((x * p.precision).array() * x.array())
                              .rowwise()
                              .sum()
                              .matrix();
    MatrixXd block = x * p.linear;
    block.rowwise() += p.speaker_const.transpose();
    block.colwise() -= 0.5 * quad;
    block.array() += p.constant;
    out.middleRows(start, len) = block;
  }
  return out;
}

MatrixXd SoftmaxRowsSerial(const MatrixXd &log_rho, double kappa) {
  MatrixXd out(log_rho.rows(), log_rho.cols());
  for (Index j = 0; j < log_rho.rows(); ++j) SoftmaxRow(log_rho, kappa, j, &out);
  return out;
}

MatrixXd SoftmaxRows(const MatrixXd &log_rho, double kappa) {
  MatrixXd out(log_rho.rows(), log_rho.cols());
  const Index n = log_rho.rows();
  // Row results are independent, so this is bitwise equal to the serial one.
  std::string failure;
#ifdef SPLDA_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (Index j = 0; j < n; ++j) {
    try {
      SoftmaxRow(log_rho, kappa, j, &out);
    } catch (const SpldaError &e) {
#ifdef SPLDA_HAVE_OPENMP
#pragma omp critical
#endif
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw SpldaError(failure);
  return out;
}

}  // namespace splda::kernels
