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

#ifndef UNIGRAD_ALGORITHMS_HPP_
#define UNIGRAD_ALGORITHMS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unigrad/base_learners.hpp"
#include "unigrad/losses.hpp"
#include "unigrad/meta_adaptprod.hpp"
#include "unigrad/meta_msmwc.hpp"

namespace unigrad {

enum class Variant {
  kCorrect,
  kBregman,
  kCorrectPp,
  kBregmanPp,
  kAnytimeBregmanPp,
  kGameCorrectPp,
};

enum class ConstantMode { kGv, kSmallLoss, kBestOfThree };

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kCorrect: return "correct";
    case Variant::kBregman: return "bregman";
    case Variant::kCorrectPp: return "correct-pp";
    case Variant::kBregmanPp: return "bregman-pp";
    case Variant::kAnytimeBregmanPp: return "anytime-bregman-pp";
    case Variant::kGameCorrectPp: return "game-correct-pp";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(const std::string& s) {
  if (s == "correct") return Variant::kCorrect;
  if (s == "bregman") return Variant::kBregman;
  if (s == "correct-pp") return Variant::kCorrectPp;
  if (s == "bregman-pp") return Variant::kBregmanPp;
  if (s == "anytime-bregman-pp" || s == "anytime") {
    return Variant::kAnytimeBregmanPp;
  }
  if (s == "game-correct-pp" || s == "game") return Variant::kGameCorrectPp;
  return std::nullopt;
}

/// Fully resolved constants of one algorithm configuration. All derived
/// values are exact arithmetic on (D, G, L); nothing is tuned at runtime.
struct AlgoConfig {
  Variant variant = Variant::kBregmanPp;
  ConstantMode mode = ConstantMode::kGv;
  std::int64_t T = 0;  // 0 for the anytime variant
  double D = 0.0, G = 0.0, L = 0.0;

  double C1 = 0.0, C10 = 0.0, C11 = 0.0;
  double C0 = 0.0, gamma_top = 0.0, gamma_mid = 0.0, Z = 0.0;
  double gamma_bottom = 1.0;
  int surrogate_divisor = 4;  // 2 for the correct family, 4 for bregman
  std::string warning;        // non-fatal configuration notes
};

namespace detail {

inline double z_of(double d, double g, double gamma_mid, double gamma_top) {
  return std::max(g * d + gamma_mid * d * d,
                  1.0 + gamma_mid * d * d + 2.0 * gamma_top);
}

}  // namespace detail

/// Installs the constants the corresponding regret theorem pins down.
/// mode selects the gradient-variation family or the small-loss/variance
/// family; best-of-three takes the elementwise union (max) of the two.
inline AlgoConfig configure(Variant variant, std::int64_t T, double D,
                            double G, double L,
                            ConstantMode mode = ConstantMode::kGv) {
  require(D > 0 && G > 0 && L >= 0, "configure: D, G must be > 0 and L >= 0");
  AlgoConfig c;
  c.variant = variant;
  c.mode = mode;
  c.T = T;
  c.D = D;
  c.G = G;
  c.L = L;
  c.C1 = 128.0 * (D * D * L * L + G * G);
  c.C10 = 4.0 * L * L + 32.0 * D * D * G * G * L * L + 8.0 * std::pow(G, 4);
  c.C11 = 128.0 * G * G * (1.0 + L * L);

  const bool anytime = variant == Variant::kAnytimeBregmanPp;
  if (anytime) {
    if (T > 0) c.warning = "anytime variant ignores the supplied horizon";
    c.T = 0;
  } else {
    require(T >= 1, "configure: T must be >= 1 for horizon-based variants");
  }

  switch (variant) {
    case Variant::kCorrect: {
      c.surrogate_divisor = 2;  // unused (multi-gradient), kept consistent
      double gt = c.C1;
      double gm = 2.0 * D * D * c.C1;
      double c0 = std::max({1.0, 8.0 * D, 4.0 * gt, 4.0 * D * D * c.C1});
      if (mode != ConstantMode::kGv) {
        const double gt2 =
            std::max(256.0 * D * D * G * G, 64.0 * D * D * std::pow(G, 4));
        const double gm2 = std::max(128.0 * G * G, 32.0 * std::pow(G, 4));
        const double c02 =
            std::max({1.0, 8.0 * D, 4.0 * gt2, 512.0 * D * D * G * G,
                      128.0 * D * D * std::pow(G, 4)});
        if (mode == ConstantMode::kSmallLoss) {
          gt = gt2;
          gm = gm2;
          c0 = c02;
        } else {
          gt = std::max(gt, gt2);
          gm = std::max(gm, gm2);
          c0 = std::max({c0, c02, 4.0 * gt});
        }
      }
      c.gamma_top = gt;
      c.gamma_mid = gm;
      c.C0 = c0;
      c.Z = detail::z_of(D, G, gm, gt);
      c.gamma_bottom = std::max(
          {4.0 * gm + 128.0 * L * L * G * G, 4.0 * gm + 8.0 * L * L,
           4.0 * gm + 40.0 * D * L * L + 256.0 * G * G / c.Z});
      break;
    }
    case Variant::kCorrectPp: {
      c.surrogate_divisor = 2;
      double gt = std::max({2.0 * D * D * c.C11, 8.0 * D * D * c.C10,
                            40.0 * std::pow(D, 3) * L * L + 2.0 * D * D * c.C1});
      double gm =
          std::max({c.C11, 4.0 * c.C10, 20.0 * D * L * L + c.C1});
      double c0 = std::max({1.0, 8.0 * D, 4.0 * gt, 4.0 * D * D * c.C11,
                            16.0 * D * D * c.C10,
                            80.0 * std::pow(D, 3) * L * L + 4.0 * D * D * c.C1});
      if (mode != ConstantMode::kGv) {
        const double gt2 =
            std::max(256.0 * D * D * G * G, 64.0 * D * D * std::pow(G, 4));
        const double gm2 = std::max(128.0 * G * G, 32.0 * std::pow(G, 4));
        const double c02 =
            std::max({1.0, 8.0 * D, 4.0 * gt2, 512.0 * D * D * G * G,
                      128.0 * D * D * std::pow(G, 4)});
        if (mode == ConstantMode::kSmallLoss) {
          gt = gt2;
          gm = gm2;
          c0 = c02;
        } else {
          gt = std::max(gt, gt2);
          gm = std::max(gm, gm2);
          c0 = std::max({c0, c02, 4.0 * gt});
        }
      }
      c.gamma_top = gt;
      c.gamma_mid = gm;
      c.C0 = c0;
      c.Z = detail::z_of(D, G, gm, gt);
      c.gamma_bottom =
          std::max({512.0 * G * G + 8.0 * gm, 64.0 * std::pow(G, 4) + 4.0 * gm,
                    256.0 * G * G + 4.0 * gm});
      break;
    }
    case Variant::kGameCorrectPp: {
      c.surrogate_divisor = 2;
      c.D = std::sqrt(2.0);  // simplex strategy sets
      const double d = c.D;
      c.gamma_mid = 128.0 + 128.0 * G * G + 40.0 * std::sqrt(2.0);
      c.gamma_top = 512.0 + 512.0 * G * G + 160.0 * std::sqrt(2.0);
      c.Z = detail::z_of(d, G, c.gamma_mid, c.gamma_top);
      // Symmetric players share Z, so C31 = C32.
      const double c31 =
          (32.0 + 64.0 * G * G) / c.Z + 32.0 / c.Z + 20.0 * std::sqrt(2.0);
      c.C0 = std::max({1.0, 8.0 * d, 4.0 * c.gamma_top, 16.0 * c31});
      c.gamma_bottom =
          std::max(256.0 * G * G, 256.0) + 4.0 * c.gamma_mid;
      break;
    }
    case Variant::kBregman:
    case Variant::kBregmanPp:
    case Variant::kAnytimeBregmanPp:
      c.surrogate_divisor = 4;
      c.gamma_bottom = std::max(L / 2.0, 1.0);
      break;
  }
  return c;
}

/// Ensemble bookkeeping: which learner plays which role.
struct ExpertInfo {
  LearnerKind kind = LearnerKind::kCvx;
  double coeff = 0.0;
  std::int64_t activated_at = 1;
};

struct RunDiagnostics {
  std::int64_t rounds = 0;
  std::uint64_t total_queries = 0;
  std::int64_t clamp_events = 0;
  double max_weight_decomp_gap = 0.0;
  double max_play_decomp_gap = 0.0;
  double max_normalized_abs = 0.0;
  double max_fixed_point_residual = 0.0;
  std::int64_t fixed_point_rounds = 0;
  std::int64_t fixed_point_violations = 0;
};

/// A full universal learner: candidate pool of base learners plus the meta
/// algorithm of the configured variant. Single-owner mutable; one instance
/// per run.
class Ensemble {
 public:
  Ensemble(AlgoConfig cfg, const Domain& domain)
      : cfg_(std::move(cfg)), domain_(domain) {
    const bool game = cfg_.variant == Variant::kGameCorrectPp;
    const bool anytime = cfg_.variant == Variant::kAnytimeBregmanPp;
    if (anytime) {
      // Active set starts as {cvx, sc_0, exp_0}; further learners join once
      // the round counter reaches 1/coefficient.
      add_learner(LearnerKind::kCvx, 0.0, 1);
      add_learner(LearnerKind::kSc, anytime_coefficient(0), 1);
      add_learner(LearnerKind::kExp, anytime_coefficient(0), 1);
      next_anytime_index_ = 1;
      prod_ = make_prod_anytime();
      for (int i = 0; i < 3; ++i) prod_activate(*prod_, 1);
      prod_optimism_ = Vec::Zero(3);
    } else {
      pool_ = build_pool(cfg_.T);
      for (double lam : pool_->sc_coeffs) {
        add_learner(LearnerKind::kSc, lam, 1);
      }
      if (!game) {
        for (double alpha : pool_->exp_coeffs) {
          add_learner(LearnerKind::kExp, alpha, 1);
        }
      }
      add_learner(LearnerKind::kCvx, 0.0, 1);
      if (uses_mom()) {
        std::vector<Vec> init_points;
        init_points.reserve(learners_.size());
        for (const auto& l : learners_) init_points.push_back(l.x);
        mom_ = make_mom(cfg_.T, static_cast<int>(learners_.size()), cfg_.C0,
                        cfg_.gamma_top, cfg_.gamma_mid, cfg_.Z,
                        domain_.diameter(), std::move(init_points));
        weights_ = mom_->play_weights;
      } else {
        prod_ = make_prod_fixed(static_cast<int>(learners_.size()));
        prod_optimism_ = Vec::Zero(static_cast<int>(learners_.size()));
        weights_ = prod_weights(*prod_, prod_optimism_);
      }
    }
    prev_grad_ = Vec::Zero(domain_.dim);
  }

  bool uses_mom() const {
    return cfg_.variant == Variant::kCorrect ||
           cfg_.variant == Variant::kCorrectPp ||
           cfg_.variant == Variant::kGameCorrectPp;
  }

  std::int64_t round() const { return round_; }
  int active_count() const { return static_cast<int>(learners_.size()); }
  const std::vector<BaseLearnerState>& learners() const { return learners_; }
  const std::vector<ExpertInfo>& expert_info() const { return info_; }
  const Vec& weights() const { return weights_; }
  const Vec& play() const { return play_; }
  const Vec& grad_at_play() const { return prev_grad_; }
  const AlgoConfig& config() const { return cfg_; }
  const Domain& domain() const { return domain_; }
  RunDiagnostics& diagnostics() { return diag_; }
  const RunDiagnostics& diagnostics() const { return diag_; }

  /// Activates any newly due learners, resolves the optimistic weights, and
  /// returns the decision x_t for the upcoming round.
  const Vec& prepare_round() {
    const std::int64_t t = round_ + 1;
    if (cfg_.variant == Variant::kAnytimeBregmanPp) {
      while (anytime_activation_round(next_anytime_index_) <= t) {
        add_learner(LearnerKind::kSc, anytime_coefficient(next_anytime_index_),
                    t);
        prod_activate(*prod_, t);
        add_learner(LearnerKind::kExp,
                    anytime_coefficient(next_anytime_index_), t);
        prod_activate(*prod_, t);
        ++next_anytime_index_;
      }
      resolve_prod_weights(t);
    } else if (!uses_mom() && t > 1) {
      resolve_prod_weights(t);
    }
    play_ = Vec::Zero(domain_.dim);
    for (int i = 0; i < active_count(); ++i) {
      play_ += weights_[i] * learners_[i].x;
    }
    prepared_ = true;
    return play_;
  }

  /// One full round against a loss oracle. Queries exactly the variant's
  /// gradient budget and verifies it against the oracle's counter.
  void step(const LossOracle& oracle) {
    if (!prepared_) prepare_round();
    const std::uint64_t before = oracle.queries();
    const Vec g_t = oracle.gradient(play_);

    std::vector<Vec> own_grads;
    const bool multi = cfg_.variant == Variant::kCorrect ||
                       cfg_.variant == Variant::kBregman;
    if (multi) {
      own_grads.reserve(learners_.size());
      for (const auto& l : learners_) own_grads.push_back(oracle.gradient(l.x));
    }
    const std::uint64_t used = oracle.queries() - before;
    const std::uint64_t budget =
        multi ? static_cast<std::uint64_t>(active_count()) + 1 : 1;
    if (used != budget) {
      throw ContractError("gradient-query contract violated: used " +
                          std::to_string(used) + ", budget " +
                          std::to_string(budget));
    }
    diag_.total_queries += used;
    advance(g_t, own_grads);
  }

  /// Game-mode round: the gradient arrives from the game, not an oracle.
  void step_gradient(const Vec& g_t) {
    require(cfg_.variant == Variant::kGameCorrectPp,
            "step_gradient: only the game variant takes raw gradients");
    if (!prepared_) prepare_round();
    diag_.total_queries += 1;
    advance(g_t, {});
  }

 private:
  void add_learner(LearnerKind kind, double coeff, std::int64_t at) {
    learners_.push_back(
        make_base_learner(kind, coeff, domain_, cfg_.gamma_bottom, cfg_.G));
    info_.push_back({kind, coeff, at});
  }

  // Bregman-family weights for round t: optimism is zero except for the
  // convex learner, whose entry solves the one-dimensional fixed point
  // z = <g_{t-1}, x_t(z)>.
  void resolve_prod_weights(std::int64_t t) {
    const int n = active_count();
    Vec m = Vec::Zero(n);
    if (t > 1 && prev_grad_.squaredNorm() > 0) {
      int cvx = -1;
      for (int i = 0; i < n; ++i) {
        if (info_[i].kind == LearnerKind::kCvx) cvx = i;
      }
      const double scale = 1.0 / (2.0 * cfg_.G * cfg_.D);
      const double bound = cfg_.G * domain_max_norm();
      auto response = [&](double z) -> Vec {
        Vec mm = Vec::Zero(n);
        mm[cvx] = scale * (z - prev_grad_.dot(learners_[cvx].x));
        const Vec p = prod_weights(*prod_, mm);
        Vec x = Vec::Zero(domain_.dim);
        for (int i = 0; i < n; ++i) x += p[i] * learners_[i].x;
        return x;
      };
      const double horiz = cfg_.T > 0 ? static_cast<double>(cfg_.T)
                                      : static_cast<double>(std::max<std::int64_t>(t, 1));
      const FixedPointResult fp = solve_optimism_fixed_point(
          prev_grad_, response, bound, 2.0 * bound / horiz);
      m[cvx] = scale * (fp.z - prev_grad_.dot(learners_[cvx].x));
      ++diag_.fixed_point_rounds;
      diag_.max_fixed_point_residual =
          std::max(diag_.max_fixed_point_residual, fp.residual);
      if (fp.residual > 2.0 * cfg_.G * cfg_.D / horiz + 1e-12) {
        ++diag_.fixed_point_violations;
      }
    }
    prod_optimism_ = m;
    weights_ = prod_weights(*prod_, m);
  }

  double domain_max_norm() const {
    switch (domain_.kind) {
      case DomainKind::kBall:
        return domain_.radius;
      case DomainKind::kSimplex:
        return 1.0;
      case DomainKind::kBox: {
        double s = 0.0;
        for (int i = 0; i < domain_.dim; ++i) {
          s += sq(std::max(std::abs(domain_.lo[i]), std::abs(domain_.hi[i])));
        }
        return std::sqrt(s);
      }
    }
    return domain_.diameter();
  }

  void advance(const Vec& g_t, const std::vector<Vec>& own_grads) {
    const std::int64_t t = round_ + 1;
    const int n = active_count();

    // Snapshot of the decisions the losses were charged on.
    std::vector<Vec> points_t;
    points_t.reserve(n);
    for (const auto& l : learners_) points_t.push_back(l.x);

    // Base updates. Multi-gradient variants feed each learner its own
    // gradient; one-gradient variants broadcast surrogate gradients built
    // from g_t, with the divisor the active theorem prescribes.
    for (int i = 0; i < n; ++i) {
      Vec fed;
      if (!own_grads.empty()) {
        fed = own_grads[i];
      } else {
        switch (info_[i].kind) {
          case LearnerKind::kSc:
            fed = make_surrogate_sc(g_t, play_, info_[i].coeff,
                                    cfg_.surrogate_divisor)
                      .gradient(points_t[i]);
            break;
          case LearnerKind::kExp:
            fed = make_surrogate_exp(g_t, play_, info_[i].coeff,
                                     cfg_.surrogate_divisor)
                      .gradient(points_t[i]);
            break;
          case LearnerKind::kCvx:
            fed = g_t;
            break;
        }
      }
      base_learner_step(learners_[i], fed, fed, cfg_.gamma_bottom);
    }

    if (uses_mom()) {
      std::vector<Vec> new_points;
      new_points.reserve(n);
      for (const auto& l : learners_) new_points.push_back(l.x);
      weights_ = mom_round(*mom_, new_points, g_t);
      diag_.clamp_events = mom_->diag.clamp_events;
      diag_.max_weight_decomp_gap = mom_->diag.max_weight_decomp_gap;
      diag_.max_play_decomp_gap = mom_->diag.max_play_decomp_gap;
      diag_.max_normalized_abs = mom_->diag.max_normalized_abs;
    } else {
      const double scale = 1.0 / (2.0 * cfg_.G * cfg_.D);
      Vec ell(n);
      for (int i = 0; i < n; ++i) {
        ell[i] = scale * g_t.dot(points_t[i]) + 0.5;
      }
      const double mixed = ell.dot(weights_);
      Vec r(n);
      for (int i = 0; i < n; ++i) r[i] = mixed - ell[i];
      prod_update(*prod_, r, prod_optimism_);
      // Weights for the next round are resolved lazily in prepare_round,
      // after any activations, via the fixed-point optimism.
    }

    prev_grad_ = g_t;
    round_ = t;
    ++diag_.rounds;
    prepared_ = false;
  }

  AlgoConfig cfg_;
  Domain domain_;
  std::optional<CandidatePool> pool_;
  std::vector<BaseLearnerState> learners_;
  std::vector<ExpertInfo> info_;
  std::optional<MoMState> mom_;
  std::optional<ProdState> prod_;
  Vec prod_optimism_;
  Vec weights_;
  Vec play_;
  Vec prev_grad_;
  std::int64_t round_ = 0;
  int next_anytime_index_ = 0;
  bool prepared_ = false;
  RunDiagnostics diag_;
};

}  // namespace unigrad

#endif  // UNIGRAD_ALGORITHMS_HPP_
