// Copyright 2026 The UniGrad Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNIGRAD_GEOMETRY_HPP_
#define UNIGRAD_GEOMETRY_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "unigrad/common.hpp"

namespace unigrad {

enum class DomainKind { kBall, kBox, kSimplex };

/// Feasible decision set. Supports Euclidean balls centered at the origin,
/// axis-aligned boxes, and the probability simplex.
struct Domain {
  DomainKind kind;
  int dim = 0;
  double radius = 0.0;  // ball only
  Vec lo, hi;           // box only

  static Domain ball(double r, int d) {
    require(r > 0 && d > 0, "Domain::ball: radius and dim must be positive");
    Domain dom;
    dom.kind = DomainKind::kBall;
    dom.dim = d;
    dom.radius = r;
    return dom;
  }

  static Domain box(Vec lo, Vec hi) {
    require(lo.size() == hi.size() && lo.size() > 0,
            "Domain::box: lo/hi size mismatch");
    require(((hi - lo).array() >= 0).all(), "Domain::box: requires lo <= hi");
    Domain dom;
    dom.kind = DomainKind::kBox;
    dom.dim = static_cast<int>(lo.size());
    dom.lo = std::move(lo);
    dom.hi = std::move(hi);
    return dom;
  }

  static Domain simplex(int d) {
    require(d > 0, "Domain::simplex: dim must be positive");
    Domain dom;
    dom.kind = DomainKind::kSimplex;
    dom.dim = d;
    return dom;
  }

  double diameter() const {
    switch (kind) {
      case DomainKind::kBall:
        return 2.0 * radius;
      case DomainKind::kBox:
        return (hi - lo).norm();
      case DomainKind::kSimplex:
        return std::sqrt(2.0);
    }
    return 0.0;
  }

  bool contains(const Vec& x, double tol = 1e-9) const {
    if (x.size() != dim) return false;
    switch (kind) {
      case DomainKind::kBall:
        return x.norm() <= radius + tol;
      case DomainKind::kBox:
        return (x.array() >= lo.array() - tol).all() &&
               (x.array() <= hi.array() + tol).all();
      case DomainKind::kSimplex:
        return (x.array() >= -tol).all() && std::abs(x.sum() - 1.0) <= tol;
    }
    return false;
  }

  /// Symmetric interior point used to initialize learners.
  Vec center() const {
    switch (kind) {
      case DomainKind::kBall:
        return Vec::Zero(dim);
      case DomainKind::kBox:
        return 0.5 * (lo + hi);
      case DomainKind::kSimplex:
        return Vec::Constant(dim, 1.0 / dim);
    }
    return Vec::Zero(dim);
  }
};

/// Symmetric positive semi-definite matrix used as an adaptive regularizer.
/// Validates symmetry (1e-10) and PSD-ness (Cholesky of A + 1e-12 I).
struct PsdMatrix {
  Mat m;

  explicit PsdMatrix(Mat a) : m(std::move(a)) {
    require(m.rows() == m.cols(), "PsdMatrix: matrix must be square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
      throw ContractError("PsdMatrix: not symmetric within 1e-10");
    }
    m = 0.5 * (m + m.transpose());
    Mat shifted = m + 1e-12 * Mat::Identity(m.rows(), m.cols());
    Eigen::LLT<Mat> llt(shifted);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("PsdMatrix: Cholesky of A + 1e-12 I failed");
    }
  }

  static PsdMatrix identity(int d, double scale = 1.0) {
    return PsdMatrix(scale * Mat::Identity(d, d));
  }

  int dim() const { return static_cast<int>(m.rows()); }

  void rank_one_update(const Vec& g, double coeff) {
    m.noalias() += coeff * g * g.transpose();
  }
};

/// Euclidean projection of x onto the probability simplex via the standard
/// sort-and-threshold rule. Exact in O(d log d).
inline Vec project_simplex_euclidean(const Vec& x) {
  const int d = static_cast<int>(x.size());
  std::vector<double> u(x.data(), x.data() + d);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double tau = 0.0;
  int rho = 0;
  for (int k = 0; k < d; ++k) {
    css += u[k];
    const double trial = (css - 1.0) / (k + 1);
    if (u[k] - trial > 0) {
      rho = k + 1;
      tau = trial;
    }
  }
  (void)rho;
  Vec out(d);
  for (int i = 0; i < d; ++i) out[i] = std::max(x[i] - tau, 0.0);
  return out;
}

/// argmin_{x in dom} ||x - z||_2.
inline Vec project_euclidean(const Vec& z, const Domain& dom) {
  if (z.size() != dom.dim) {
    throw std::invalid_argument("project_euclidean: dimension mismatch");
  }
  switch (dom.kind) {
    case DomainKind::kBall: {
      const double n = z.norm();
      if (n <= dom.radius) return z;
      return (dom.radius / n) * z;
    }
    case DomainKind::kBox:
      return z.cwiseMax(dom.lo).cwiseMin(dom.hi);
    case DomainKind::kSimplex:
      return project_simplex_euclidean(z);
  }
  return z;
}

/// argmin_{x in ball} (x - z)^T U (x - z) for positive definite U.
///
/// Interior case returns z. Boundary case solves the KKT system
/// x(mu) = (U + mu I)^{-1} U z and bisects on mu >= 0; the map
/// mu -> ||x(mu)|| is strictly decreasing, so bisection converges to
/// | ||x(mu)|| - radius | <= 1e-10.
inline Vec project_matrix_norm(const Vec& z, const PsdMatrix& U,
                               const Domain& dom) {
  require(dom.kind == DomainKind::kBall,
          "project_matrix_norm: only ball domains are supported");
  if (z.size() != dom.dim || U.dim() != dom.dim) {
    throw std::invalid_argument("project_matrix_norm: dimension mismatch");
  }
  const double r = dom.radius;
  if (z.norm() <= r) return z;

  Eigen::LLT<Mat> llt(U.m);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("project_matrix_norm: U is not positive definite");
  }

  const Vec uz = U.m * z;
  const int d = dom.dim;
  auto x_of = [&](double mu) -> Vec {
    Mat a = U.m + mu * Mat::Identity(d, d);
    Eigen::LLT<Mat> f(a);
    if (f.info() != Eigen::Success) {
      throw NumericalError("project_matrix_norm: Cholesky failure in KKT solve");
    }
    return f.solve(uz);
  };

  double lo = 0.0;       // ||x(0)|| = ||z|| > r
  double hi = 1.0;
  int expansions = 0;
  while (x_of(hi).norm() > r) {
    hi *= 2.0;
    if (++expansions > 200) {
      throw NumericalError("project_matrix_norm: failed to bracket mu");
    }
  }
  Vec x = x_of(hi);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    x = x_of(mid);
    const double n = x.norm();
    if (std::abs(n - r) <= 1e-10) return x;
    if (n > r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (std::abs(x.norm() - r) > 1e-10) {
    throw NumericalError("project_matrix_norm: bisection did not converge");
  }
  return x;
}

/// Mirror-descent step on the simplex under the weighted negative entropy
/// psi(p) = sum_i eps_i^{-1} p_i log p_i:
///
///   argmin_{p in simplex} <g, p> + D_psi(p, p_hat).
///
/// Solves p_i = p_hat_i exp(-eps_i (g_i + mu)) with the scalar mu chosen so
/// that sum_i p_i = 1 (monotone 1-D root finding to |sum - 1| <= 1e-12).
/// Entries are floored at 1e-300 and renormalized afterward, so subsequent
/// entropy steps never see a zero weight.
inline Vec simplex_entropy_step(const Vec& p_hat, const Vec& g,
                                const Vec& eps) {
  const int d = static_cast<int>(p_hat.size());
  if (g.size() != d || eps.size() != d) {
    throw std::invalid_argument("simplex_entropy_step: dimension mismatch");
  }
  require((p_hat.array() > 0).all(), "simplex_entropy_step: p_hat must be > 0");
  require((eps.array() > 0).all(), "simplex_entropy_step: eps must be > 0");
  require(all_finite(g), "simplex_entropy_step: non-finite cost vector");

  Vec p(d);
  const double eps0 = eps[0];
  const bool uniform_rate = ((eps.array() - eps0).abs().maxCoeff() == 0.0);
  if (uniform_rate) {
    // Uniform rates admit a closed form: p_i proportional to
    // p_hat_i exp(-eps g_i). Normalize in log domain.
    Vec logp(d);
    for (int i = 0; i < d; ++i) logp[i] = std::log(p_hat[i]) - eps0 * g[i];
    const double mx = logp.maxCoeff();
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += std::exp(logp[i] - mx);
    const double lse = mx + std::log(s);
    for (int i = 0; i < d; ++i) p[i] = std::exp(logp[i] - lse);
  } else {
    Vec logc(d);
    for (int i = 0; i < d; ++i) logc[i] = std::log(p_hat[i]) - eps[i] * g[i];
    auto sum_at = [&](double mu) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += std::exp(logc[i] - eps[i] * mu);
      return s;
    };
    // phi(mu) = sum_at(mu) - 1 is strictly decreasing.
    double lo = 0.0, hi = 0.0, step = 1.0 + g.cwiseAbs().maxCoeff();
    int expansions = 0;
    while (sum_at(lo) < 1.0) {
      lo -= step;
      step *= 2.0;
      if (++expansions > 60) {
        throw NumericalError("simplex_entropy_step: root not bracketed");
      }
    }
    step = 1.0 + g.cwiseAbs().maxCoeff();
    while (sum_at(hi) > 1.0) {
      hi += step;
      step *= 2.0;
      if (++expansions > 60) {
        throw NumericalError("simplex_entropy_step: root not bracketed");
      }
    }
    double mu = 0.5 * (lo + hi);
    for (int it = 0; it < 500; ++it) {
      mu = 0.5 * (lo + hi);
      const double s = sum_at(mu);
      if (std::abs(s - 1.0) <= 1e-12) break;
      if (s > 1.0) {
        lo = mu;
      } else {
        hi = mu;
      }
    }
    for (int i = 0; i < d; ++i) p[i] = std::exp(logc[i] - eps[i] * mu);
  }

  for (int i = 0; i < d; ++i) p[i] = std::max(p[i], 1e-300);
  p /= p.sum();
  return p;
}

}  // namespace unigrad

#endif  // UNIGRAD_GEOMETRY_HPP_
