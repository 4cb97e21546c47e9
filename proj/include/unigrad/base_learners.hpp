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

#ifndef UNIGRAD_BASE_LEARNERS_HPP_
#define UNIGRAD_BASE_LEARNERS_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "unigrad/geometry.hpp"

namespace unigrad {

inline int ceil_log2(std::int64_t t) {
  int k = 0;
  std::int64_t p = 1;
  while (p < t) {
    p *= 2;
    ++k;
  }
  return k;
}

enum class PoolMode { kFixedHorizon, kAnytime };

/// Exponential grid of curvature-coefficient guesses. Fixed-horizon pools
/// hold {2^k / T : 0 <= k <= n-1} with n = ceil(log2 T) + 1 for both the
/// strongly convex and exp-concave groups; one extra learner covers the
/// plain convex case, so N = 2n + 1.
struct CandidatePool {
  PoolMode mode = PoolMode::kFixedHorizon;
  std::int64_t T = 0;
  int n = 0;
  int N = 0;
  std::vector<double> sc_coeffs;
  std::vector<double> exp_coeffs;
};

inline CandidatePool build_pool(std::int64_t T) {
  require(T >= 1, "build_pool: T must be >= 1");
  CandidatePool pool;
  pool.mode = PoolMode::kFixedHorizon;
  pool.T = T;
  pool.n = ceil_log2(T) + 1;
  pool.sc_coeffs.resize(pool.n);
  for (int k = 0; k < pool.n; ++k) {
    pool.sc_coeffs[k] = std::ldexp(1.0, k) / static_cast<double>(T);
  }
  pool.exp_coeffs = pool.sc_coeffs;
  pool.N = 2 * pool.n + 1;
  return pool;
}

/// Horizonless schedule: the i-th candidate is 2^{-i}, activated once the
/// round counter reaches s_i = 2^i.
inline double anytime_coefficient(int i) { return std::ldexp(1.0, -i); }
inline std::int64_t anytime_activation_round(int i) {
  return std::int64_t{1} << i;
}

enum class LearnerKind { kCvx, kSc, kExp };

/// One optimistic-OMD instance. The state always holds the point to play
/// next (x) together with the internal iterate (x_hat); a step call feeds
/// one gradient, advances both, and leaves x ready for the following round.
struct BaseLearnerState {
  LearnerKind kind = LearnerKind::kCvx;
  double coeff = 0.0;  // lambda_i or alpha_i; unused for kCvx
  Domain domain;

  Vec x;      // played point for the upcoming round
  Vec x_hat;  // internal iterate
  std::int64_t round = 0;
  double running_vbar = 0.0;  // sum of ||g_s - g_{s-1}||^2 over fed gradients
  Vec last_grad;
  bool any_fed = false;

  std::optional<PsdMatrix> U;  // kExp only

  // Filled by the step functions for stability diagnostics.
  double last_eta = 0.0;       // eta_t used for the just-processed round
  Vec optimism_in_use;         // M_t that produced the current x
  double pending_eta = 0.0;    // eta_{t+1} already applied to x
};

inline double oogd_convex_eta(double diameter, double vbar,
                              double gamma_bottom) {
  return std::min(diameter / std::sqrt(1.0 + vbar), 1.0 / gamma_bottom);
}

inline double oogd_sc_eta(double lambda, std::int64_t t, double gamma_bottom) {
  return 2.0 / (gamma_bottom + lambda * static_cast<double>(t));
}

inline BaseLearnerState make_base_learner(LearnerKind kind, double coeff,
                                          const Domain& domain,
                                          double gamma_bottom,
                                          double grad_bound) {
  BaseLearnerState s;
  s.kind = kind;
  s.coeff = coeff;
  s.domain = domain;
  s.x_hat = domain.center();
  s.x = s.x_hat;  // first-round optimism is zero, so x_1 = x_hat_1
  s.last_grad = Vec::Zero(domain.dim);
  s.optimism_in_use = Vec::Zero(domain.dim);
  switch (kind) {
    case LearnerKind::kCvx:
      s.pending_eta = oogd_convex_eta(domain.diameter(), 0.0, gamma_bottom);
      break;
    case LearnerKind::kSc:
      s.pending_eta = oogd_sc_eta(coeff, 1, gamma_bottom);
      break;
    case LearnerKind::kExp:
      s.U = PsdMatrix::identity(
          domain.dim, gamma_bottom + 0.5 * coeff * grad_bound * grad_bound);
      break;
  }
  return s;
}

namespace detail {

// Shared part of the OOGD round: internal-iterate update with the step that
// was fixed when the current play was formed, then variation bookkeeping.
inline void oogd_absorb_gradient(BaseLearnerState& s, const Vec& grad_in,
                                 const Vec& optimism_next) {
  if (!all_finite(grad_in) || !all_finite(optimism_next)) {
    throw std::invalid_argument("base learner step: non-finite gradient");
  }
  const double eta_t = s.pending_eta;
  s.x_hat = project_euclidean(s.x_hat - eta_t * grad_in, s.domain);
  if (s.any_fed) s.running_vbar += (grad_in - s.last_grad).squaredNorm();
  s.last_grad = grad_in;
  s.any_fed = true;
  s.round += 1;
  s.last_eta = eta_t;
}

}  // namespace detail

/// OOGD for the convex learner: eta_t = min{D / sqrt(1 + Vbar_{t-1}),
/// 1 / gamma_bottom}. optimism_next becomes M_{t+1} for the next play
/// (the caller normally passes the gradient it just fed).
inline void oogd_convex_step(BaseLearnerState& s, const Vec& grad_in,
                             const Vec& optimism_next, double gamma_bottom) {
  require(s.kind == LearnerKind::kCvx, "oogd_convex_step: wrong learner kind");
  detail::oogd_absorb_gradient(s, grad_in, optimism_next);
  s.pending_eta =
      oogd_convex_eta(s.domain.diameter(), s.running_vbar, gamma_bottom);
  s.optimism_in_use = optimism_next;
  s.x = project_euclidean(s.x_hat - s.pending_eta * optimism_next, s.domain);
}

/// OOGD for a strongly convex guess: eta_t = 2 / (gamma_bottom + lambda_i t).
inline void oogd_sc_step(BaseLearnerState& s, const Vec& grad_in,
                         const Vec& optimism_next, double gamma_bottom) {
  require(s.kind == LearnerKind::kSc, "oogd_sc_step: wrong learner kind");
  detail::oogd_absorb_gradient(s, grad_in, optimism_next);
  s.pending_eta = oogd_sc_eta(s.coeff, s.round + 1, gamma_bottom);
  s.optimism_in_use = optimism_next;
  s.x = project_euclidean(s.x_hat - s.pending_eta * optimism_next, s.domain);
}

/// Optimistic Online Newton Step. The current U serves both matrix-norm
/// projections of the round; afterwards U absorbs (alpha_i / 2) g g^T and the
/// next play is formed under the updated metric.
inline void oons_step(BaseLearnerState& s, const Vec& grad_in,
                      const Vec& optimism_next, double gamma_bottom) {
  (void)gamma_bottom;  // folded into U at initialization
  require(s.kind == LearnerKind::kExp && s.U.has_value(),
          "oons_step: wrong learner kind");
  if (!all_finite(grad_in) || !all_finite(optimism_next)) {
    throw std::invalid_argument("oons_step: non-finite gradient");
  }
  Eigen::LLT<Mat> llt(s.U->m);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("oons_step: Cholesky failure");
  }
  s.x_hat = project_matrix_norm(s.x_hat - llt.solve(grad_in), *s.U, s.domain);
  if (s.any_fed) s.running_vbar += (grad_in - s.last_grad).squaredNorm();
  s.last_grad = grad_in;
  s.any_fed = true;
  s.round += 1;
  s.U->rank_one_update(grad_in, 0.5 * s.coeff);
  Eigen::LLT<Mat> llt2(s.U->m);
  if (llt2.info() != Eigen::Success) {
    throw NumericalError("oons_step: Cholesky failure after update");
  }
  s.optimism_in_use = optimism_next;
  s.x = project_matrix_norm(s.x_hat - llt2.solve(optimism_next), *s.U,
                            s.domain);
}

/// Dispatch on the learner kind.
inline void base_learner_step(BaseLearnerState& s, const Vec& grad_in,
                              const Vec& optimism_next, double gamma_bottom) {
  switch (s.kind) {
    case LearnerKind::kCvx:
      oogd_convex_step(s, grad_in, optimism_next, gamma_bottom);
      break;
    case LearnerKind::kSc:
      oogd_sc_step(s, grad_in, optimism_next, gamma_bottom);
      break;
    case LearnerKind::kExp:
      oons_step(s, grad_in, optimism_next, gamma_bottom);
      break;
  }
}

}  // namespace unigrad

#endif  // UNIGRAD_BASE_LEARNERS_HPP_
