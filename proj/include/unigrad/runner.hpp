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

#ifndef UNIGRAD_RUNNER_HPP_
#define UNIGRAD_RUNNER_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unigrad/algorithms.hpp"
#include "unigrad/environments.hpp"
#include "unigrad/metrics.hpp"

namespace unigrad {

/// Full trace of one run plus the aggregates the structural checks consume.
struct RunLog {
  std::vector<RunRecord> records;
  RunDiagnostics diag;

  double sum_losses = 0.0;
  double play_move_sq = 0.0;  // sum_{t>=2} ||x_t - x_{t-1}||^2
  double min_xplus_sum = 0.0;
  bool xplus_valid = false;

  std::vector<ExpertInfo> experts;
  std::vector<double> expert_cum_loss;
  std::vector<double> expert_bregman_to_play;  // sum_t D_{f_t}(x_{t,i}, x_t)
  std::vector<double> expert_move_sq;
  int final_active = 0;

  double wall_ms = 0.0;

  int best_expert() const {
    if (expert_cum_loss.empty()) return -1;
    return static_cast<int>(std::min_element(expert_cum_loss.begin(),
                                             expert_cum_loss.end()) -
                            expert_cum_loss.begin());
  }
};

/// Drives one universal algorithm against an environment for T rounds.
inline RunLog run_universal(const Environment& env, const AlgoConfig& cfg,
                            std::int64_t T, bool track_experts = true) {
  const auto started = std::chrono::steady_clock::now();
  RunLog log;
  Ensemble ens(cfg, env.domain);
  *env.counter = 0;

  const double r_plus =
      env.smooth && env.smoothness > 0 &&
              env.domain.kind == DomainKind::kBall
          ? env.domain.radius + env.grad_bound / env.smoothness
          : 0.0;
  log.xplus_valid = r_plus > 0;

  Vec prev_play;
  Vec prev_grad;
  std::vector<Vec> prev_points;
  double vbar = 0.0;
  double cum_loss = 0.0;
  log.records.reserve(T);

  for (std::int64_t t = 1; t <= T; ++t) {
    LossOracle f = env.next(t);
    const Vec x_t = ens.prepare_round();

    std::vector<Vec> points_t;
    if (track_experts) {
      points_t.reserve(ens.active_count());
      for (const auto& l : ens.learners()) points_t.push_back(l.x);
      if (static_cast<int>(log.expert_cum_loss.size()) < ens.active_count()) {
        log.expert_cum_loss.resize(ens.active_count(), 0.0);
        log.expert_bregman_to_play.resize(ens.active_count(), 0.0);
        log.expert_move_sq.resize(ens.active_count(), 0.0);
        prev_points.resize(ens.active_count());
      }
    }

    ens.step(f);
    const Vec& g_t = ens.grad_at_play();

    const double fx = f.value(x_t);
    cum_loss += fx;
    log.sum_losses = cum_loss;
    if (t >= 2) {
      vbar += (g_t - prev_grad).squaredNorm();
      log.play_move_sq += (x_t - prev_play).squaredNorm();
    }
    if (log.xplus_valid) log.min_xplus_sum += f.min_over_ball(r_plus);

    if (track_experts) {
      for (std::size_t i = 0; i < points_t.size(); ++i) {
        const double f_i = f.value(points_t[i]);
        log.expert_cum_loss[i] += f_i;
        log.expert_bregman_to_play[i] += f_i - fx - g_t.dot(points_t[i] - x_t);
        if (prev_points[i].size() > 0) {
          log.expert_move_sq[i] += (points_t[i] - prev_points[i]).squaredNorm();
        }
        prev_points[i] = points_t[i];
      }
    }

    RunRecord rec;
    rec.round = t;
    rec.play = x_t;
    rec.loss_value = fx;
    rec.grad_at_play = g_t;
    rec.query_count = *env.counter;
    rec.vbar_running = vbar;
    rec.cum_loss = cum_loss;
    log.records.push_back(std::move(rec));

    prev_play = x_t;
    prev_grad = g_t;
  }

  log.diag = ens.diagnostics();
  log.experts = ens.expert_info();
  log.final_active = ens.active_count();
  log.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - started)
                    .count();
  return log;
}

/// Specialized single-learner baselines. "ogd-sqrt" is plain online gradient
/// descent with eta_t = D / (G sqrt(t)); the other three wrap one optimistic
/// base learner with the true curvature coefficient.
inline RunLog run_baseline(const Environment& env, const std::string& name,
                           double coeff, double gamma_bottom, std::int64_t T) {
  const auto started = std::chrono::steady_clock::now();
  RunLog log;
  *env.counter = 0;
  log.records.reserve(T);

  std::optional<BaseLearnerState> learner;
  Vec x = env.domain.center();
  if (name == "oogd-sc") {
    learner = make_base_learner(LearnerKind::kSc, coeff, env.domain,
                                gamma_bottom, env.grad_bound);
  } else if (name == "oons") {
    learner = make_base_learner(LearnerKind::kExp, coeff, env.domain,
                                gamma_bottom, env.grad_bound);
  } else if (name == "oogd-convex") {
    learner = make_base_learner(LearnerKind::kCvx, 0.0, env.domain,
                                gamma_bottom, env.grad_bound);
  } else if (name != "ogd-sqrt") {
    throw std::invalid_argument("run_baseline: unknown baseline " + name);
  }

  Vec prev_grad;
  Vec prev_play;
  double vbar = 0.0, cum_loss = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) {
    LossOracle f = env.next(t);
    const Vec x_t = learner ? learner->x : x;
    const Vec g_t = f.gradient(x_t);
    const double fx = f.value(x_t);
    cum_loss += fx;
    if (t >= 2) {
      vbar += (g_t - prev_grad).squaredNorm();
      log.play_move_sq += (x_t - prev_play).squaredNorm();
    }

    if (learner) {
      base_learner_step(*learner, g_t, g_t, gamma_bottom);
    } else {
      const double eta =
          env.domain.diameter() /
          (env.grad_bound * std::sqrt(static_cast<double>(t)));
      x = project_euclidean(x - eta * g_t, env.domain);
    }

    RunRecord rec;
    rec.round = t;
    rec.play = x_t;
    rec.loss_value = fx;
    rec.grad_at_play = g_t;
    rec.query_count = *env.counter;
    rec.vbar_running = vbar;
    rec.cum_loss = cum_loss;
    log.records.push_back(std::move(rec));
    prev_grad = g_t;
    prev_play = x_t;
  }
  log.sum_losses = cum_loss;
  log.diag.rounds = T;
  log.diag.total_queries = *env.counter;
  log.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - started)
                    .count();
  return log;
}

/// Result of one two-player game run: per-player prefix regrets.
struct GameRunLog {
  std::vector<std::pair<std::int64_t, double>> regret_x;
  std::vector<std::pair<std::int64_t, double>> regret_y;
  double final_regret_x = 0.0;
  double final_regret_y = 0.0;
  std::int64_t rounds = 0;
  double wall_ms = 0.0;
  RunDiagnostics diag_x, diag_y;
};

namespace detail {

// Exact best fixed simplex strategy against the批 opponent aggregate. For
// bilinear games this is a minimum coordinate; the sc-sc instance is an
// isotropic quadratic, so the constrained minimum is a Euclidean projection.
inline double best_fixed_x_value(const GameSpec& spec, const Vec& y_sum,
                                 double quad_const_x, std::int64_t tau) {
  const Vec lin = spec.A * y_sum;
  if (spec.kind == GameKind::kBilinear) {
    return lin.minCoeff() + quad_const_x;
  }
  const double lt = spec.lambda * static_cast<double>(tau);
  const Vec x_star = project_simplex_euclidean(spec.cx - lin / lt);
  return 0.5 * lt * (x_star - spec.cx).squaredNorm() + lin.dot(x_star) +
         quad_const_x;
}

inline double best_fixed_y_value(const GameSpec& spec, const Vec& x_sum,
                                 double quad_const_y, std::int64_t tau) {
  const Vec lin = -(spec.A.transpose() * x_sum);
  if (spec.kind == GameKind::kBilinear) {
    return lin.minCoeff() + quad_const_y;
  }
  const double lt = spec.lambda * static_cast<double>(tau);
  const Vec y_star = project_simplex_euclidean(spec.cy + (spec.A.transpose() * x_sum) / lt);
  return 0.5 * lt * (y_star - spec.cy).squaredNorm() + lin.dot(y_star) +
         quad_const_y;
}

}  // namespace detail

/// Runs the game variant for the x-player (and, when honest, the y-player;
/// otherwise y plays uniformly random vertices). Regret is measured per
/// player against the best fixed simplex strategy in hindsight.
inline GameRunLog run_game(const GameSpec& spec, const AlgoConfig& cfg,
                           std::int64_t T, std::uint64_t seed, bool honest,
                           int checkpoints = 100) {
  const auto started = std::chrono::steady_clock::now();
  GameRunLog log;
  log.rounds = T;

  Domain dom_x = Domain::simplex(spec.dx);
  Domain dom_y = Domain::simplex(spec.dy);
  Ensemble px(cfg, dom_x);
  std::optional<Ensemble> py;
  if (honest) py.emplace(cfg, dom_y);
  Rng rng(seed, 97);

  std::vector<std::int64_t> taus;
  for (int k = 1; k <= checkpoints; ++k) {
    const std::int64_t tau = (T * k) / checkpoints;
    if (tau >= 1 && (taus.empty() || tau != taus.back())) taus.push_back(tau);
  }
  if (taus.empty() || taus.back() != T) taus.push_back(T);

  Vec x_sum = Vec::Zero(spec.dx), y_sum = Vec::Zero(spec.dy);
  double x_loss_sum = 0.0, y_loss_sum = 0.0;
  double quad_x = 0.0, quad_y = 0.0;  // opponent-induced constants
  std::size_t next_tau = 0;

  for (std::int64_t t = 1; t <= T; ++t) {
    const Vec x_t = px.prepare_round();
    Vec y_t;
    if (honest) {
      y_t = py->prepare_round();
    } else {
      y_t = Vec::Zero(spec.dy);
      y_t[static_cast<int>(rng.uniform_index(spec.dy))] = 1.0;
    }

    const GameGradients g = game_round(spec, x_t, y_t);
    px.step_gradient(g.g_x);
    if (honest) py->step_gradient(g.g_y);

    x_sum += x_t;
    y_sum += y_t;
    // The x-player's loss is f(x_t, y_t); the y-player's is -f(x_t, y_t).
    x_loss_sum += g.value;
    y_loss_sum -= g.value;
    if (spec.kind == GameKind::kScSc) {
      quad_x += -0.5 * spec.lambda * (y_t - spec.cy).squaredNorm();
      quad_y += -0.5 * spec.lambda * (x_t - spec.cx).squaredNorm();
    }

    if (next_tau < taus.size() && t == taus[next_tau]) {
      const double rx =
          x_loss_sum - detail::best_fixed_x_value(spec, y_sum, quad_x, t);
      const double ry =
          y_loss_sum - detail::best_fixed_y_value(spec, x_sum, quad_y, t);
      log.regret_x.emplace_back(t, rx);
      log.regret_y.emplace_back(t, ry);
      ++next_tau;
    }
  }

  log.final_regret_x = log.regret_x.back().second;
  log.final_regret_y = log.regret_y.back().second;
  log.diag_x = px.diagnostics();
  if (honest) log.diag_y = py->diagnostics();
  log.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - started)
                    .count();
  return log;
}

}  // namespace unigrad

#endif  // UNIGRAD_RUNNER_HPP_
