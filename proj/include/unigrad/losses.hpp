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

#ifndef UNIGRAD_LOSSES_HPP_
#define UNIGRAD_LOSSES_HPP_

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>

#include "unigrad/common.hpp"

namespace unigrad {

enum class CurvatureClass { kConvex, kStronglyConvex, kExpConcave };

enum class LossKind { kLinear, kQuadratic, kHinge, kLogistic, kHingeL2 };

inline double sigmoid(double u) {
  if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

/// Per-round loss with value/gradient access and gradient-query accounting.
///
/// Every gradient() call increments the shared query counter by exactly 1;
/// value() is free. The a-priori constants G (gradient bound) and L
/// (smoothness) are closed forms of the parameters and the ball radius they
/// were built for, never estimated from samples.
class LossOracle {
 public:
  using Counter = std::shared_ptr<std::uint64_t>;

  LossKind kind;
  CurvatureClass curvature_class = CurvatureClass::kConvex;
  double curvature_coeff = 0.0;  // lambda or alpha; 0 for plain convex
  double smoothness = 0.0;       // L; meaningful only when smooth
  bool smooth = true;
  double grad_bound = 0.0;  // G

  // Parameters; which ones are live depends on kind.
  Vec a;             // feature vector (linear/hinge/logistic families)
  double b = 0.0;    // intercept (linear)
  double label = 1;  // +-1 (hinge/logistic families)
  double lambda = 0.0;
  Vec m;  // quadratic center

  static Counter new_counter() { return std::make_shared<std::uint64_t>(0); }

  double value(const Vec& x) const {
    switch (kind) {
      case LossKind::kLinear:
        return a.dot(x) + b;
      case LossKind::kQuadratic:
        return 0.5 * lambda * (x - m).squaredNorm();
      case LossKind::kHinge:
        return std::max(0.0, 1.0 - label * a.dot(x));
      case LossKind::kLogistic:
        return std::log1p(std::exp(-label * a.dot(x)));
      case LossKind::kHingeL2:
        return std::max(0.0, 1.0 - label * a.dot(x)) + 0.5 * x.squaredNorm();
    }
    return 0.0;
  }

  /// Gradient (a subgradient at hinge kinks); counts one query.
  Vec gradient(const Vec& x) const {
    if (counter_) ++(*counter_);
    return gradient_uncounted(x);
  }

  std::uint64_t queries() const { return counter_ ? *counter_ : 0; }
  const Counter& counter() const { return counter_; }
  void attach_counter(Counter c) { counter_ = std::move(c); }

  /// Exact minimum of the loss over a centered ball of radius r. Used for
  /// small-loss style quantities; no gradient accounting involved.
  double min_over_ball(double r) const {
    const double an = a.size() ? a.norm() : 0.0;
    switch (kind) {
      case LossKind::kLinear:
        return -r * an + b;
      case LossKind::kQuadratic: {
        const double excess = std::max(0.0, m.norm() - r);
        return 0.5 * lambda * excess * excess;
      }
      case LossKind::kHinge:
        return std::max(0.0, 1.0 - r * an);
      case LossKind::kLogistic:
        return std::log1p(std::exp(-r * an));
      case LossKind::kHingeL2: {
        if (an == 0.0) return 1.0;
        // Along the +label*a direction with step s: the hinge branch has its
        // minimum at s = min(||a||, 1/||a||); past the kink the quadratic
        // only grows.
        const double s = std::min(r, std::min(an, 1.0 / an));
        return std::max(0.0, 1.0 - s * an) + 0.5 * s * s;
      }
    }
    return 0.0;
  }

 private:
  friend LossOracle make_linear_loss(Vec a, double b);
  friend LossOracle make_quadratic_loss(double lambda, Vec m, double radius);
  friend LossOracle standard_losses(const std::string& kind, const Vec& a,
                                    double y, double radius);

  Vec gradient_uncounted(const Vec& x) const {
    switch (kind) {
      case LossKind::kLinear:
        return a;
      case LossKind::kQuadratic:
        return lambda * (x - m);
      case LossKind::kHinge:
        if (1.0 - label * a.dot(x) > 0) return -label * a;
        return Vec::Zero(x.size());
      case LossKind::kLogistic:
        return (-label * sigmoid(-label * a.dot(x))) * a;
      case LossKind::kHingeL2:
        if (1.0 - label * a.dot(x) > 0) return (-label * a + x).eval();
        return x;
    }
    return Vec::Zero(x.size());
  }

  Counter counter_;
};

inline LossOracle make_linear_loss(Vec a, double b = 0.0) {
  LossOracle f;
  f.kind = LossKind::kLinear;
  f.curvature_class = CurvatureClass::kConvex;
  f.grad_bound = a.norm();
  f.smoothness = 0.0;
  f.smooth = true;
  f.a = std::move(a);
  f.b = b;
  return f;
}

inline LossOracle make_quadratic_loss(double lambda, Vec m, double radius) {
  require(lambda > 0, "make_quadratic_loss: lambda must be positive");
  LossOracle f;
  f.kind = LossKind::kQuadratic;
  f.curvature_class = CurvatureClass::kStronglyConvex;
  f.curvature_coeff = lambda;
  f.grad_bound = lambda * (radius + m.norm());
  f.smoothness = lambda;
  f.smooth = true;
  f.lambda = lambda;
  f.m = std::move(m);
  return f;
}

/// The benchmark losses on a labeled sample (a, y):
///   hinge      max(0, 1 - y a^T x)                    convex, non-smooth
///   logistic   log(1 + exp(-y a^T x))                 exp-concave
///   hinge-l2   max(0, 1 - y a^T x) + ||x||^2 / 2      1-strongly convex
///
/// G and L are closed forms of ||a|| and the ball radius:
///   hinge:    G = ||a||                     (non-smooth; L flagged unusable)
///   logistic: G = ||a|| sigma(r ||a||),  L = ||a||^2 / 4,
///             alpha = min(1/(8GD), exp(-r ||a||)/2) with D = 2r
///   hinge-l2: G = ||a|| + r                 (non-smooth)
inline LossOracle standard_losses(const std::string& kind, const Vec& a,
                                  double y, double radius) {
  require(all_finite(a), "standard_losses: features must be finite");
  require(y == 1.0 || y == -1.0, "standard_losses: label must be +-1");
  LossOracle f;
  f.a = a;
  f.label = y;
  const double an = a.norm();
  if (kind == "hinge") {
    f.kind = LossKind::kHinge;
    f.curvature_class = CurvatureClass::kConvex;
    f.grad_bound = an;
    f.smooth = false;
    f.smoothness = 0.0;
  } else if (kind == "logistic") {
    f.kind = LossKind::kLogistic;
    f.curvature_class = CurvatureClass::kExpConcave;
    f.grad_bound = an * sigmoid(radius * an);
    f.smoothness = 0.25 * an * an;
    f.smooth = true;
    const double beta = std::exp(-radius * an);
    const double gd = f.grad_bound * 2.0 * radius;
    f.curvature_coeff =
        0.5 * (gd > 0 ? std::min(1.0 / (4.0 * gd), beta) : beta);
  } else if (kind == "hinge-l2") {
    f.kind = LossKind::kHingeL2;
    f.curvature_class = CurvatureClass::kStronglyConvex;
    f.curvature_coeff = 1.0;
    f.grad_bound = an + radius;
    f.smooth = false;
    f.smoothness = 0.0;
  } else {
    throw std::invalid_argument("standard_losses: unknown kind " + kind);
  }
  return f;
}

/// Bregman divergence D_f(y, x) = f(y) - f(x) - <grad f(x), y - x>, with the
/// gradient at x supplied by the caller (typically a recorded query).
inline double bregman_divergence(const LossOracle& f, const Vec& y,
                                 const Vec& x, const Vec& grad_at_x) {
  return f.value(y) - f.value(x) - grad_at_x.dot(y - x);
}

/// Curvature-augmented linear proxy built from a single gradient. Evaluating
/// it never touches the loss oracle it was derived from.
struct SurrogateLoss {
  enum class Kind { kSc, kExp, kCvx };

  Kind kind = Kind::kCvx;
  Vec anchor_point;     // x_t
  Vec anchor_gradient;  // grad f_t(x_t)
  double coefficient = 0.0;
  int coefficient_divisor = 4;

  double value(const Vec& x) const {
    const double lin = anchor_gradient.dot(x);
    switch (kind) {
      case Kind::kSc:
        return lin + (coefficient / coefficient_divisor) *
                         (x - anchor_point).squaredNorm();
      case Kind::kExp:
        return lin + (coefficient / coefficient_divisor) *
                         sq(anchor_gradient.dot(x - anchor_point));
      case Kind::kCvx:
        return lin;
    }
    return lin;
  }

  Vec gradient(const Vec& x) const {
    switch (kind) {
      case Kind::kSc:
        return anchor_gradient + (2.0 * coefficient / coefficient_divisor) *
                                     (x - anchor_point);
      case Kind::kExp:
        return anchor_gradient + (2.0 * coefficient / coefficient_divisor) *
                                     anchor_gradient.dot(x - anchor_point) *
                                     anchor_gradient;
      case Kind::kCvx:
        return anchor_gradient;
    }
    return anchor_gradient;
  }
};

/// h(x) = <g_t, x> + (lambda_i / divisor) ||x - x_t||^2.
inline SurrogateLoss make_surrogate_sc(Vec g_t, Vec x_t, double lambda_i,
                                       int divisor) {
  require(divisor == 2 || divisor == 4, "make_surrogate_sc: divisor in {2,4}");
  require(lambda_i >= 0.0, "make_surrogate_sc: lambda must be >= 0");
  SurrogateLoss h;
  h.kind = SurrogateLoss::Kind::kSc;
  h.anchor_gradient = std::move(g_t);
  h.anchor_point = std::move(x_t);
  h.coefficient = lambda_i;
  h.coefficient_divisor = divisor;
  return h;
}

/// h(x) = <g_t, x> + (alpha_i / divisor) <g_t, x - x_t>^2.
inline SurrogateLoss make_surrogate_exp(Vec g_t, Vec x_t, double alpha_i,
                                        int divisor) {
  require(divisor == 2 || divisor == 4, "make_surrogate_exp: divisor in {2,4}");
  require(alpha_i >= 0.0, "make_surrogate_exp: alpha must be >= 0");
  SurrogateLoss h;
  h.kind = SurrogateLoss::Kind::kExp;
  h.anchor_gradient = std::move(g_t);
  h.anchor_point = std::move(x_t);
  h.coefficient = alpha_i;
  h.coefficient_divisor = divisor;
  return h;
}

inline SurrogateLoss make_surrogate_cvx(Vec g_t, Vec x_t) {
  SurrogateLoss h;
  h.kind = SurrogateLoss::Kind::kCvx;
  h.anchor_gradient = std::move(g_t);
  h.anchor_point = std::move(x_t);
  return h;
}

}  // namespace unigrad

#endif  // UNIGRAD_LOSSES_HPP_
