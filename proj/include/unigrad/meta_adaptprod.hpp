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

#ifndef UNIGRAD_META_ADAPTPROD_HPP_
#define UNIGRAD_META_ADAPTPROD_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "unigrad/common.hpp"

namespace unigrad {

enum class ProdMode { kFixed, kAnytime };

/// Optimistic Adapt-ML-Prod state. Potentials live in log domain so the
/// power-corrected exponential update never underflows over long horizons.
///
/// Fixed mode: W_{0,i} = 1/N,  eps_{t,i} = min{1/8, sqrt(log N / cum_sq_i)}
/// (eps = 1/8 while cum_sq = 0). Anytime mode: an expert activated mid-run
/// starts with W = 1 and eps = 1/sqrt(5), and eps_{t+1,i} =
/// sqrt(1 / (5 + cum_sq_i)) thereafter.
struct ProdState {
  ProdMode mode = ProdMode::kFixed;
  std::vector<double> log_w;
  std::vector<double> eps;
  std::vector<double> cum_sq;
  std::vector<std::int64_t> active_from;  // anytime bookkeeping
  double log_n = 0.0;                     // fixed mode only

  int size() const { return static_cast<int>(log_w.size()); }
};

inline ProdState make_prod_fixed(int n_experts) {
  require(n_experts >= 1, "make_prod_fixed: need at least one expert");
  ProdState s;
  s.mode = ProdMode::kFixed;
  s.log_n = std::log(static_cast<double>(n_experts));
  s.log_w.assign(n_experts, -s.log_n);  // W_0 = 1/N
  s.eps.assign(n_experts, 1.0 / 8.0);
  s.cum_sq.assign(n_experts, 0.0);
  s.active_from.assign(n_experts, 1);
  return s;
}

inline ProdState make_prod_anytime() {
  ProdState s;
  s.mode = ProdMode::kAnytime;
  return s;
}

/// Adds a newly activated expert (anytime mode): W = 1, eps = 1/sqrt(5).
inline int prod_activate(ProdState& s, std::int64_t round) {
  require(s.mode == ProdMode::kAnytime, "prod_activate: fixed-size state");
  s.log_w.push_back(0.0);
  s.eps.push_back(1.0 / std::sqrt(5.0));
  s.cum_sq.push_back(0.0);
  s.active_from.push_back(round);
  return s.size() - 1;
}

/// Normalized weights p_i proportional to eps_i exp(eps_i m_i) W_i over the
/// active experts. Inactive experts do not exist in the state, so they
/// receive exactly zero by construction.
inline Vec prod_weights(const ProdState& s, const Vec& optimism) {
  const int n = s.size();
  require(optimism.size() == n, "prod_weights: optimism size mismatch");
  require(all_finite(optimism), "prod_weights: non-finite optimism");
  Vec logits(n);
  for (int i = 0; i < n; ++i) {
    logits[i] = std::log(s.eps[i]) + s.eps[i] * optimism[i] + s.log_w[i];
  }
  const double mx = logits.maxCoeff();
  if (!std::isfinite(mx)) {
    throw NumericalError("prod_weights: all potentials degenerate");
  }
  Vec p(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    p[i] = std::exp(logits[i] - mx);
    total += p[i];
  }
  p /= total;
  return p;
}

/// Applies one round of the power-corrected exponential update in log domain:
///   log W' = (eps' / eps) (log W + eps r - eps^2 (r - m)^2),
/// with eps' recomputed from the accumulated squared optimism error.
inline void prod_update(ProdState& s, const Vec& r, const Vec& m) {
  const int n = s.size();
  require(r.size() == n && m.size() == n, "prod_update: size mismatch");
  for (int i = 0; i < n; ++i) {
    if (!(std::abs(r[i]) <= 1.0 + 1e-9 && std::abs(m[i]) <= 1.0 + 1e-9)) {
      throw ContractError("prod_update: |r|, |m| must be <= 1 at coordinate " +
                          std::to_string(i));
    }
  }
  for (int i = 0; i < n; ++i) {
    const double diff_sq = sq(r[i] - m[i]);
    s.cum_sq[i] += diff_sq;
    double eps_next;
    if (s.mode == ProdMode::kFixed) {
      // A single expert (log N = 0) keeps the cap; its weight is 1 anyway.
      eps_next = s.cum_sq[i] > 0 && s.log_n > 0
                     ? std::min(1.0 / 8.0, std::sqrt(s.log_n / s.cum_sq[i]))
                     : 1.0 / 8.0;
    } else {
      eps_next = std::sqrt(1.0 / (5.0 + s.cum_sq[i]));
    }
    const double eps_old = s.eps[i];
    s.log_w[i] = (eps_next / eps_old) *
                 (s.log_w[i] + eps_old * r[i] - sq(eps_old) * diff_sq);
    s.eps[i] = eps_next;
  }
}

struct FixedPointResult {
  double z = 0.0;
  double residual = 0.0;  // |<g_prev, response(z)> - z|
};

/// Solves the one-dimensional fixed point z = <g_prev, x(z)> by bisection of
/// phi(z) = <g_prev, response(z)> - z over [-bound, bound]; phi has opposite
/// signs at the endpoints whenever |<g_prev, x>| <= bound. If no sign change
/// is detected the solver falls back to minimizing |phi| over a 64-point grid
/// refined twice.
inline FixedPointResult solve_optimism_fixed_point(
    const Vec& g_prev, const std::function<Vec(double)>& response,
    double bound, double tol) {
  require(bound >= 0 && tol > 0, "solve_optimism_fixed_point: bad bounds");
  auto phi = [&](double z) { return g_prev.dot(response(z)) - z; };

  if (bound == 0.0) return {0.0, std::abs(phi(0.0))};

  double lo = -bound, hi = bound;
  double flo = phi(lo), fhi = phi(hi);
  if (flo == 0.0) return {lo, 0.0};
  if (fhi == 0.0) return {hi, 0.0};
  if (flo > 0.0 && fhi < 0.0) {
    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      z = 0.5 * (lo + hi);
      const double f = phi(z);
      if (std::abs(f) <= tol) return {z, std::abs(f)};
      if (f > 0) {
        lo = z;
      } else {
        hi = z;
      }
    }
    return {z, std::abs(phi(z))};
  }

  // No bracket (response may be numerically flat or non-monotone in z):
  // coarse grid, refined twice around the best point.
  double best_z = 0.0, best_f = std::abs(phi(0.0));
  double left = -bound, right = bound;
  for (int pass = 0; pass < 3; ++pass) {
    const double step = (right - left) / 63.0;
    for (int k = 0; k < 64; ++k) {
      const double z = left + k * step;
      const double f = std::abs(phi(z));
      if (f < best_f) {
        best_f = f;
        best_z = z;
      }
    }
    left = best_z - step;
    right = best_z + step;
  }
  return {best_z, best_f};
}

}  // namespace unigrad

#endif  // UNIGRAD_META_ADAPTPROD_HPP_
