// src/oracle.cc

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

#include "splda/oracle.h"

#include <cmath>
#include <random>

#include "splda/kernels.h"
#include "splda/rng.h"

namespace splda {

namespace {

constexpr Index kChunk = 4096;

// Plain LL^T without jitter; oracle inputs are expected to be well posed.
MatrixXd Factor(const MatrixXd &a, const char *what) {
  Eigen::LLT<MatrixXd> llt(a);
  SPLDA_CHECK(llt.info() == Eigen::Success,
              "oracle: " << what << " is not positive definite");
  return llt.matrixL();
}

struct Sampler {
  const DrawSpec &spec;
  std::vector<MatrixXd> row_factors;
  MatrixXd wishart_factor;
  MatrixXd gaussian_factor;

  explicit Sampler(const DrawSpec &s) : spec(s) {
    if (spec.rows) {
      SPLDA_CHECK(spec.rows->cov.size() ==
                      static_cast<std::size_t>(spec.rows->mean.rows()),
                  "oracle: one covariance per row required");
      for (const auto &c : spec.rows->cov)
        row_factors.push_back(c.isZero(0.0) ? MatrixXd::Zero(c.rows(), c.cols())
                                            : Factor(c, "row covariance"));
    }
    if (spec.wishart) {
      const Index d = spec.wishart->inverse_scale.rows();
      SPLDA_CHECK(spec.wishart->dof > d - 1,
                  "oracle: Wishart dof " << spec.wishart->dof
                                         << " too small for d=" << d);
      const MatrixXd scale = spec.wishart->inverse_scale.inverse();
      wishart_factor = Factor(0.5 * (scale + scale.transpose()),
                              "Wishart scale");
    }
    if (spec.gaussian) gaussian_factor = Factor(spec.gaussian->cov, "covariance");
    if (spec.dirichlet)
      SPLDA_CHECK((spec.dirichlet->array() > 0.0).all(),
                  "oracle: Dirichlet parameters must be positive");
    if (spec.gamma)
      SPLDA_CHECK(spec.gamma->shape > 0.0 && (spec.gamma->rate.array() > 0.0).all(),
                  "oracle: Gamma parameters must be positive");
  }

  Draw Sample(std::mt19937_64 *rng) const {
    std::normal_distribution<double> n01;
    Draw out;
    if (spec.rows) {
      const MatrixXd &m = spec.rows->mean;
      out.rows.resize(m.rows(), m.cols());
      for (Index r = 0; r < m.rows(); ++r) {
        VectorXd z(m.cols());
        for (Index i = 0; i < z.size(); ++i) z(i) = n01(*rng);
        out.rows.row(r) =
            m.row(r) +
            (row_factors[static_cast<std::size_t>(r)] * z).transpose();
      }
    }
    if (spec.wishart) {
      // Bartlett decomposition.
      const Index d = wishart_factor.rows();
      MatrixXd a = MatrixXd::Zero(d, d);
      for (Index i = 0; i < d; ++i) {
        std::chi_squared_distribution<double> chi(spec.wishart->dof -
                                                  static_cast<double>(i));
        a(i, i) = std::sqrt(chi(*rng));
        for (Index j = 0; j < i; ++j) a(i, j) = n01(*rng);
      }
      const MatrixXd la = wishart_factor * a;
      out.wishart = la * la.transpose();
    }
    if (spec.gaussian) {
      VectorXd z(spec.gaussian->mean.size());
      for (Index i = 0; i < z.size(); ++i) z(i) = n01(*rng);
      out.gaussian = spec.gaussian->mean + gaussian_factor * z;
    }
    if (spec.dirichlet) {
      const VectorXd &tau = *spec.dirichlet;
      out.dirichlet.resize(tau.size());
      for (Index i = 0; i < tau.size(); ++i) {
        std::gamma_distribution<double> g(tau(i), 1.0);
        out.dirichlet(i) = g(*rng);
      }
      out.dirichlet /= out.dirichlet.sum();
    }
    if (spec.gamma) {
      const VectorXd &rate = spec.gamma->rate;
      out.gamma.resize(rate.size());
      for (Index i = 0; i < rate.size(); ++i) {
        std::gamma_distribution<double> g(spec.gamma->shape, 1.0 / rate(i));
        out.gamma(i) = g(*rng);
      }
    }
    return out;
  }
};

}  // namespace

FdReport FdGradientCheck(const std::function<double(const VectorXd &)> &f,
                         const VectorXd &x, double step,
                         const VectorXd *analytic,
                         std::optional<double> scale) {
  SPLDA_CHECK(step > 0.0, "finite-difference step must be positive");
  const double f0 = f(x);
  SPLDA_CHECK(std::isfinite(f0), "objective is not finite at the base point");
  FdReport rep;
  rep.gradient.resize(x.size());
  VectorXd probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double h = step * (1.0 + std::abs(x(i)));
    probe(i) = x(i) + h;
    const double fp = f(probe);
    probe(i) = x(i) - h;
    const double fm = f(probe);
    probe(i) = x(i);
    SPLDA_CHECK(std::isfinite(fp) && std::isfinite(fm),
                "objective is not finite when probing coordinate " << i);
    rep.gradient(i) = (fp - fm) / (2.0 * h);
  }
  const double xmax = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
  rep.scale = scale ? *scale : (std::abs(f0) + 1.0) / (xmax + 1.0);
  for (Index i = 0; i < x.size(); ++i) {
    const double ref = analytic ? (*analytic)(i) : 0.0;
    const double r = std::abs(rep.gradient(i) - ref) / rep.scale;
    if (rep.worst < 0 || r > rep.max_residual) {
      rep.max_residual = r;
      rep.worst = i;
    }
  }
  return rep;
}

McResult McExpectation(const DrawSpec &spec,
                       const std::function<VectorXd(const Draw &)> &integrand,
                       Index n_draws, std::uint64_t seed) {
  SPLDA_CHECK(spec.rows || spec.wishart || spec.gaussian || spec.dirichlet ||
                  spec.gamma,
              "oracle: empty distribution spec");
  SPLDA_CHECK(n_draws >= 2, "oracle: need at least 2 draws");
  const Sampler sampler(spec);
  const Index chunks = (n_draws + kChunk - 1) / kChunk;
  // Per-chunk Welford accumulators, combined in chunk order.
  struct Moments {
    double n = 0.0;
    VectorXd mean;
    VectorXd m2;
  };
  std::vector<Moments> parts(static_cast<std::size_t>(chunks));

  kernels::ParallelFor(chunks, [&](Index c) {
    std::mt19937_64 rng = SubstreamRng(seed, static_cast<std::uint64_t>(c));
    const Index lo = c * kChunk, hi = std::min(n_draws, lo + kChunk);
    Moments m;
    for (Index k = lo; k < hi; ++k) {
      const VectorXd v = integrand(sampler.Sample(&rng));
      if (m.n == 0.0) {
        m.mean = VectorXd::Zero(v.size());
        m.m2 = VectorXd::Zero(v.size());
      }
      m.n += 1.0;
      const VectorXd delta = v - m.mean;
      m.mean += delta / m.n;
      m.m2 += delta.cwiseProduct(v - m.mean);
    }
    parts[static_cast<std::size_t>(c)] = std::move(m);
  });

  Moments acc = parts[0];
  for (std::size_t c = 1; c < parts.size(); ++c) {
    const Moments &b = parts[c];
    const double n = acc.n + b.n;
    const VectorXd delta = b.mean - acc.mean;
    acc.m2 += b.m2 + delta.cwiseProduct(delta) * (acc.n * b.n / n);
    acc.mean += delta * (b.n / n);
    acc.n = n;
  }
  McResult res;
  res.draws = n_draws;
  res.estimate = acc.mean;
  res.std_error = (acc.m2 / ((acc.n - 1.0) * acc.n)).cwiseSqrt();
  return res;
}

}  // namespace splda
