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

#ifndef UNIGRAD_META_MSMWC_HPP_
#define UNIGRAD_META_MSMWC_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "unigrad/base_learners.hpp"
#include "unigrad/geometry.hpp"

namespace unigrad {

/// One multi-scale multiplicative-weight layer with correction (bias) terms.
/// Learning rates are time-invariant and capped at 1/32; the layer caches the
/// optimism that produced its current decision so the bias term can be formed
/// on the next feed.
struct MsMwCLayer {
  Vec p_hat;
  Vec p;
  Vec eps;
  Vec last_optimism;
  int dim = 0;
};

inline MsMwCLayer make_msmwc_layer(Vec eps, Vec init_weights) {
  MsMwCLayer layer;
  layer.dim = static_cast<int>(eps.size());
  require(init_weights.size() == eps.size(),
          "make_msmwc_layer: eps/init size mismatch");
  require((eps.array() > 0).all() && eps.maxCoeff() <= 1.0 / 32.0 + 1e-15,
          "make_msmwc_layer: learning rates must lie in (0, 1/32]");
  require(std::abs(init_weights.sum() - 1.0) <= 1e-9 &&
              (init_weights.array() > 0).all(),
          "make_msmwc_layer: initial weights must be on the simplex");
  layer.eps = std::move(eps);
  layer.p_hat = init_weights;
  layer.p = std::move(init_weights);
  layer.last_optimism = Vec::Zero(layer.dim);
  return layer;
}

namespace detail {

inline void check_unit_range(const Vec& v, const char* what) {
  for (int i = 0; i < v.size(); ++i) {
    if (!(std::abs(v[i]) <= 1.0 + 1e-12)) {
      throw ContractError(std::string(what) + " out of [-1,1] at coordinate " +
                          std::to_string(i) + " (value " +
                          std::to_string(v[i]) + ")");
    }
  }
}

}  // namespace detail

/// One optimistic mirror-descent round of MsMwC:
///   p_hat' = argmin <loss + b, p> + D_psi(p, p_hat),   b_i = 16 eps_i
///            (loss_i - m_i)^2 with m the optimism in force when p was formed;
///   p'     = argmin <next_optimism, p> + D_psi(p, p_hat').
inline void msmwc_step(MsMwCLayer& layer, const Vec& loss,
                       const Vec& next_optimism) {
  require(loss.size() == layer.dim && next_optimism.size() == layer.dim,
          "msmwc_step: dimension mismatch");
  detail::check_unit_range(loss, "msmwc_step: loss");
  detail::check_unit_range(next_optimism, "msmwc_step: optimism");
  Vec biased = loss;
  for (int i = 0; i < layer.dim; ++i) {
    biased[i] += 16.0 * layer.eps[i] * sq(loss[i] - layer.last_optimism[i]);
  }
  layer.p_hat = simplex_entropy_step(layer.p_hat, biased, layer.eps);
  layer.p = simplex_entropy_step(layer.p_hat, next_optimism, layer.eps);
  layer.last_optimism = next_optimism;
}

/// Aggregated per-round health counters for the structural inequalities the
/// two-layer meta must maintain.
struct MoMDiagnostics {
  std::int64_t rounds = 0;
  std::int64_t clamp_events = 0;
  double max_normalized_abs = 0.0;   // max |loss|,|optimism| after 1/Z
  double max_weight_decomp_gap = 0.0;  // aggregation-stability decomposition
  double max_play_decomp_gap = 0.0;    // three-term play-stability bound
};

/// MsMwC-over-MsMwC: one top layer over M mid layers, each mid ranging over
/// the N base learners. Carries the one-round-delayed quantities (previous
/// base points, correction values, optimisms) needed to reproduce the
/// corrected losses literally.
struct MoMState {
  MsMwCLayer top;
  std::vector<MsMwCLayer> mids;
  int M = 0;
  int N = 0;
  double gamma_top = 0.0;
  double gamma_mid = 0.0;
  double C0 = 0.0;
  double Z = 0.0;
  double diameter = 0.0;

  std::vector<Vec> prev_base_points;  // x_{t,i}
  Vec base_correction;  // gamma_mid ||x_{t,i} - x_{t-1,i}||^2 (unnormalized)
  Vec top_correction;   // gamma_top ||q^Mid_{t,j} - q^Mid_{t-1,j}||_1^2
  Vec mid_optimism;     // m^Mid_t, normalized
  Vec play_weights;     // p_t
  std::int64_t round = 0;

  MoMDiagnostics diag;

  Vec aggregated() const {
    Vec p = Vec::Zero(N);
    for (int j = 0; j < M; ++j) p += top.p[j] * mids[j].p;
    return p;
  }
};

inline MoMState make_mom(std::int64_t T, int N, double C0, double gamma_top,
                         double gamma_mid, double Z, double diameter,
                         std::vector<Vec> initial_base_points) {
  require(T >= 1 && N >= 1, "make_mom: T and N must be positive");
  require(static_cast<int>(initial_base_points.size()) == N,
          "make_mom: need one initial point per base learner");
  MoMState s;
  s.M = std::max(1, ceil_log2(T));
  s.N = N;
  s.C0 = C0;
  s.gamma_top = gamma_top;
  s.gamma_mid = gamma_mid;
  s.Z = Z;
  s.diameter = diameter;

  Vec top_eps(s.M);
  for (int j = 0; j < s.M; ++j) {
    top_eps[j] = 1.0 / (C0 * std::ldexp(1.0, j + 1));
  }
  Vec top_init = top_eps.array().square();
  top_init /= top_init.sum();
  s.top = make_msmwc_layer(top_eps, top_init);

  s.mids.reserve(s.M);
  for (int j = 0; j < s.M; ++j) {
    s.mids.push_back(make_msmwc_layer(Vec::Constant(N, 2.0 * top_eps[j]),
                                      Vec::Constant(N, 1.0 / N)));
  }

  s.prev_base_points = std::move(initial_base_points);
  s.base_correction = Vec::Zero(N);
  s.top_correction = Vec::Zero(s.M);
  s.mid_optimism = Vec::Zero(N);
  s.play_weights = s.aggregated();
  return s;
}

namespace detail {

// Values must land in [-1,1] after 1/Z normalization; floating overshoot up
// to 1e-9 is clamped and counted, anything larger is a mis-set constant.
inline double z_normalize(double raw, double z, MoMDiagnostics& diag,
                          const char* what) {
  double v = raw / z;
  const double a = std::abs(v);
  if (a > diag.max_normalized_abs) diag.max_normalized_abs = a;
  if (a <= 1.0) return v;
  if (a <= 1.0 + 1e-9) {
    ++diag.clamp_events;
    return v > 0 ? 1.0 : -1.0;
  }
  throw ContractError(std::string(what) +
                      " exceeds [-1,1] after Z normalization (value " +
                      std::to_string(v) + "); Z or constants mis-set");
}

inline double l1_diff_sq(const Vec& a, const Vec& b) {
  return sq((a - b).lpNorm<1>());
}

}  // namespace detail

/// Advances the two-layer meta by one round.
///
/// new_base_points are the learners' decisions for the *next* round (the
/// bases update before the meta, so their movement enters the corrections);
/// grad_at_play is the single gradient at the combined decision. Returns the
/// aggregated weights p_{t+1}.
inline Vec mom_round(MoMState& s, const std::vector<Vec>& new_base_points,
                     const Vec& grad_at_play) {
  require(static_cast<int>(new_base_points.size()) == s.N,
          "mom_round: base point count mismatch");
  require(all_finite(grad_at_play), "mom_round: non-finite gradient");
  s.round += 1;
  ++s.diag.rounds;

  // Mid losses and next-round optimism share the inner product with the
  // current base points; only the injected correction differs. The loss
  // vector is identical for every mid layer.
  Vec mid_loss(s.N), next_mid_optimism(s.N), new_correction(s.N);
  for (int i = 0; i < s.N; ++i) {
    const double raw_dot = grad_at_play.dot(s.prev_base_points[i]);
    mid_loss[i] = detail::z_normalize(raw_dot + s.base_correction[i], s.Z,
                                      s.diag, "mid loss");
    new_correction[i] =
        s.gamma_mid * (new_base_points[i] - s.prev_base_points[i]).squaredNorm();
    next_mid_optimism[i] = detail::z_normalize(raw_dot + new_correction[i],
                                               s.Z, s.diag, "mid optimism");
  }

  std::vector<Vec> qmid_before(s.M);
  for (int j = 0; j < s.M; ++j) qmid_before[j] = s.mids[j].p;
  const Vec qtop_before = s.top.p;
  const Vec p_before = s.play_weights;

  for (int j = 0; j < s.M; ++j) {
    msmwc_step(s.mids[j], mid_loss, next_mid_optimism);
  }

  // Top loss aggregates the corrected mid losses and injects the top-level
  // correction; the optimism mirrors it with the same corrections so the
  // bias depends only on the loss/optimism difference.
  Vec top_loss(s.M), next_top_optimism(s.M), new_top_correction(s.M);
  for (int j = 0; j < s.M; ++j) {
    top_loss[j] = detail::z_normalize(
        s.Z * mid_loss.dot(qmid_before[j]) + s.top_correction[j], s.Z, s.diag,
        "top loss");
    new_top_correction[j] =
        s.gamma_top * detail::l1_diff_sq(s.mids[j].p, qmid_before[j]);
    next_top_optimism[j] = detail::z_normalize(
        s.Z * next_mid_optimism.dot(s.mids[j].p) + new_top_correction[j], s.Z,
        s.diag, "top optimism");
  }
  msmwc_step(s.top, top_loss, next_top_optimism);

  // Weight-stability decomposition between consecutive aggregated weights:
  // ||p - p'||_1^2 <= 2 ||q^Top - q^Top'||_1^2
  //                   + 2 sum_j q^Top_j ||q^Mid_j - q^Mid_j'||_1^2.
  Vec p_next = s.aggregated();
  {
    double rhs = 2.0 * detail::l1_diff_sq(s.top.p, qtop_before);
    for (int j = 0; j < s.M; ++j) {
      rhs += 2.0 * s.top.p[j] * detail::l1_diff_sq(s.mids[j].p, qmid_before[j]);
    }
    const double gap = detail::l1_diff_sq(p_next, p_before) - rhs;
    if (gap > s.diag.max_weight_decomp_gap) s.diag.max_weight_decomp_gap = gap;
  }

  // Three-term play-stability decomposition between the combined decisions:
  // ||x - x'||^2 <= 4 D^2 ||q^Top - q^Top'||_1^2
  //                + 4 D^2 sum_j q^Top_j ||q^Mid_j - q^Mid_j'||_1^2
  //                + 2 sum_j q^Top_j sum_i q^Mid_{j,i} ||x_i - x_i'||^2.
  {
    Vec play_before = Vec::Zero(s.prev_base_points.front().size());
    Vec play_next = play_before;
    for (int i = 0; i < s.N; ++i) {
      play_before += p_before[i] * s.prev_base_points[i];
      play_next += p_next[i] * new_base_points[i];
    }
    const double d2 = sq(s.diameter);
    double rhs = 4.0 * d2 * detail::l1_diff_sq(s.top.p, qtop_before);
    for (int j = 0; j < s.M; ++j) {
      rhs += 4.0 * d2 * s.top.p[j] *
             detail::l1_diff_sq(s.mids[j].p, qmid_before[j]);
      double inner = 0.0;
      for (int i = 0; i < s.N; ++i) {
        inner += s.mids[j].p[i] *
                 (new_base_points[i] - s.prev_base_points[i]).squaredNorm();
      }
      rhs += 2.0 * s.top.p[j] * inner;
    }
    const double gap = (play_next - play_before).squaredNorm() - rhs;
    if (gap > s.diag.max_play_decomp_gap) s.diag.max_play_decomp_gap = gap;
  }

  s.prev_base_points = new_base_points;
  s.base_correction = new_correction;
  s.top_correction = new_top_correction;
  s.mid_optimism = next_mid_optimism;
  s.play_weights = p_next;
  return p_next;
}

}  // namespace unigrad

#endif  // UNIGRAD_META_MSMWC_HPP_
