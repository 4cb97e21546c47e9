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
//
// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Every tolerance is fixed here, in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "unigrad/unigrad.hpp"

namespace unigrad {
namespace acceptance {

constexpr std::int64_t kHorizon = 10000;
constexpr int kSeeds = 5;
// Additive floor for the universality comparison: desk-scale regrets of
// well-tuned learners on these environments are O(1) and can dip below zero,
// so a purely multiplicative test degenerates; 25 is about 0.15% of the
// worst-case cumulative loss range G*D*T.
constexpr double kUniversalityFloor = 25.0;

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Acceptance environments. The universality suite needs sequences whose
// best-fixed comparator stays meaningful, so the drift is kept small next to
// the per-round jitter.

Environment acc_quadratic(std::int64_t T, std::uint64_t seed,
                          double lambda = 0.5) {
  Environment env;
  env.name = "acc-quadratic";
  env.horizon = T;
  env.dimension = 2;
  env.domain = Domain::ball(1.0, 2);
  env.true_class = "strongly-convex";
  env.true_coeff = lambda;
  env.smooth = true;
  env.smoothness = lambda;
  Rng rng(seed, 151);
  std::vector<Vec> seg(10);
  seg[0] = (Vec(2) << 0.25, -0.15).finished();
  for (int i = 1; i < 10; ++i) {
    Vec cand = seg[i - 1] + 0.05 * rng.gaussian_vec(2);
    if (cand.norm() > 0.4) cand *= 0.4 / cand.norm();
    seg[i] = cand;
  }
  auto center_at = [seg, seed, T](std::int64_t t) {
    const int i = static_cast<int>((10 * (t - 1)) / T);
    Rng jit(hash3(seed, 157, static_cast<std::uint64_t>(t)));
    Vec u = jit.gaussian_vec(2);
    u *= 0.25 * jit.uniform() / std::max(u.norm(), 1e-12);
    return Vec(seg[i] + u);
  };
  double vt = 0.0;
  Vec prev = center_at(1);
  for (std::int64_t t = 2; t <= T; ++t) {
    const Vec m = center_at(t);
    vt += lambda * lambda * (m - prev).squaredNorm();
    prev = m;
  }
  env.exact_vt_available = true;
  env.exact_vt = vt;
  env.grad_bound = lambda * (1.0 + 0.4 + 0.25);
  env.make_loss = [center_at, lambda](std::int64_t t) {
    return make_quadratic_loss(lambda, center_at(t), 1.0);
  };
  return env;
}

Environment acc_linear(std::int64_t T, std::uint64_t seed) {
  Environment env;
  env.name = "acc-linear";
  env.horizon = T;
  env.dimension = 2;
  env.domain = Domain::ball(1.0, 2);
  env.true_class = "convex";
  env.smooth = true;
  env.smoothness = 0.0;
  const Vec abar = (Vec(2) << 0.3, 0.25).finished();
  auto a_at = [abar, seed](std::int64_t t) {
    Rng jit(hash3(seed, 163, static_cast<std::uint64_t>(t)));
    Vec u = jit.gaussian_vec(2);
    u *= 0.3 / std::max(u.norm(), 1e-12);
    return Vec(abar + jit.uniform() * u);
  };
  double vt = 0.0;
  Vec prev = a_at(1);
  double g = prev.norm();
  for (std::int64_t t = 2; t <= T; ++t) {
    const Vec a = a_at(t);
    vt += (a - prev).squaredNorm();
    g = std::max(g, a.norm());
    prev = a;
  }
  env.exact_vt_available = true;
  env.exact_vt = vt;
  env.grad_bound = g;
  env.make_loss = [a_at](std::int64_t t) { return make_linear_loss(a_at(t)); };
  return env;
}

Environment acc_logistic(std::int64_t T, std::uint64_t seed) {
  return dataset_env(make_synthetic_records(32, 2, seed), "logistic", T, seed);
}

double prefix_regret(const Environment& env, const RunLog& log,
                     std::int64_t tau, std::uint64_t seed) {
  std::vector<LossOracle> losses;
  losses.reserve(tau);
  for (std::int64_t t = 1; t <= tau; ++t) losses.push_back(env.make_loss(t));
  const ComparatorResult cmp = offline_comparator(losses, env.domain, seed);
  return log.records[tau - 1].cum_loss - cmp.opt_value;
}

struct TraceStats {
  double vbar_T = 0.0;
  double w_T = 0.0;
};

TraceStats trace_stats(const RunLog& log, int dim) {
  TraceStats s;
  for (std::size_t t = 1; t < log.records.size(); ++t) {
    s.vbar_T += (log.records[t].grad_at_play - log.records[t - 1].grad_at_play)
                    .squaredNorm();
  }
  Vec sum = Vec::Zero(dim);
  for (const auto& r : log.records) sum += r.grad_at_play;
  const Vec mu = sum / static_cast<double>(log.records.size());
  for (const auto& r : log.records) {
    s.w_T += (r.grad_at_play - mu).squaredNorm();
  }
  return s;
}

// ---------------------------------------------------------------------------
// Criterion 2: projection oracles vs. brute force.

void criterion_2() {
  const auto started = std::chrono::steady_clock::now();
  Rng rng(9001);
  const Domain simplex2 = Domain::simplex(2);
  const Domain ball = Domain::ball(1.0, 2);
  double worst = 0.0, worst_kkt = 0.0;

  for (int rep = 0; rep < 200; ++rep) {
    // Euclidean projection onto the 2-simplex vs. a 1e-3 grid.
    const Vec z = (Vec(2) << rng.uniform(-2, 2), rng.uniform(-2, 2)).finished();
    const Vec got = project_euclidean(z, simplex2);
    Vec best(2);
    double best_val = 1e100;
    for (double p = 0.0; p <= 1.0 + 1e-12; p += 1e-3) {
      const Vec cand = (Vec(2) << p, 1.0 - p).finished();
      const double val = (cand - z).squaredNorm();
      if (val < best_val) {
        best_val = val;
        best = cand;
      }
    }
    worst = std::max(worst, (got - best).norm());

    // Matrix-norm projection vs. a 1e-3 polar grid, plus the KKT residual of
    // the boundary solution. The probe point sits strictly outside the ball
    // so the constrained minimizer is on the boundary the grid covers.
    Mat a = Mat::Random(2, 2);
    Mat u = a * a.transpose() + 0.3 * Mat::Identity(2, 2);
    const PsdMatrix U{u};
    const double theta = rng.uniform(0.0, 2.0 * M_PI);
    const double rad = rng.uniform(1.05, 2.5);
    const Vec zm =
        (Vec(2) << rad * std::cos(theta), rad * std::sin(theta)).finished();
    const Vec gotm = project_matrix_norm(zm, U, ball);
    best_val = 1e100;
    for (double th = 0.0; th < 2 * M_PI; th += 1e-3) {
      for (double r : {0.25, 0.5, 0.75, 1.0}) {
        const Vec cand =
            (Vec(2) << r * std::cos(th), r * std::sin(th)).finished();
        const double val = (cand - zm).dot(u * (cand - zm));
        if (val < best_val) {
          best_val = val;
          best = cand;
        }
      }
    }
    worst = std::max(worst, (gotm - best).norm());
    const Vec uz = u * zm;
    const double mu = (uz - u * gotm).dot(gotm) / gotm.squaredNorm();
    worst_kkt = std::max(
        worst_kkt,
        ((u + mu * Mat::Identity(2, 2)) * gotm - uz).norm() / uz.norm());

    // Entropy step on the 2-simplex vs. grid minimization of its objective.
    Vec p_hat =
        (Vec(2) << 0.05 + rng.uniform(), 0.05 + rng.uniform()).finished();
    p_hat /= p_hat.sum();
    const Vec g = (Vec(2) << rng.uniform(-1, 1), rng.uniform(-1, 1)).finished();
    const Vec eps = (Vec(2) << 1e-3 + rng.uniform() / 40.0,
                     1e-3 + rng.uniform() / 40.0)
                        .finished();
    const Vec gote = simplex_entropy_step(p_hat, g, eps);
    auto objective = [&](const Vec& p) {
      double val = g.dot(p);
      for (int i = 0; i < 2; ++i) {
        const double pi = std::max(p[i], 1e-12);
        val += (pi * std::log(pi / p_hat[i]) - pi + p_hat[i]) / eps[i];
      }
      return val;
    };
    best_val = 1e100;
    for (double p = 0.0; p <= 1.0 + 1e-12; p += 1e-3) {
      const Vec cand = (Vec(2) << p, 1.0 - p).finished();
      const double val = objective(cand);
      if (val < best_val) {
        best_val = val;
        best = cand;
      }
    }
    worst = std::max(worst, (gote - best).norm());
  }
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - started)
                          .count();
  report("C2 projection-oracles",
         worst <= 2e-3 && worst_kkt <= 1e-8 && secs <= 30.0,
         "max oracle gap " + fmt(worst) + " (tol 2e-3), max KKT residual " +
             fmt(worst_kkt) + " (tol 1e-8), " + fmt(secs) + " s");
}

// ---------------------------------------------------------------------------
// Criterion 3: MsMwC invariants and the second-order regret bound.

void criterion_3() {
  const auto started = std::chrono::steady_clock::now();
  Rng rng(9003);
  bool simplex_ok = true, shift_ok = true;

  {
    const int d = 6;
    Vec eps(d);
    for (int i = 0; i < d; ++i) eps[i] = 1.0 / (32 << (i % 4));
    MsMwCLayer layer = make_msmwc_layer(eps, Vec::Constant(d, 1.0 / d));
    MsMwCLayer shifted = make_msmwc_layer(eps, Vec::Constant(d, 1.0 / d));
    Vec prime(d);
    for (int i = 0; i < d; ++i) prime[i] = rng.uniform(-0.4, 0.4);
    const double c = 0.31;
    msmwc_step(layer, Vec::Zero(d), prime);
    msmwc_step(shifted, Vec::Zero(d), prime + Vec::Constant(d, c));
    for (int t = 0; t < 10000; ++t) {
      Vec loss(d), opt(d);
      for (int i = 0; i < d; ++i) {
        loss[i] = rng.uniform(-0.5, 0.5);
        opt[i] = rng.uniform(-0.5, 0.5);
      }
      msmwc_step(layer, loss, opt);
      msmwc_step(shifted, loss + Vec::Constant(d, c),
                 opt + Vec::Constant(d, c));
      simplex_ok = simplex_ok && std::abs(layer.p.sum() - 1.0) <= 1e-9 &&
                   (layer.p.array() >= 0).all();
      shift_ok =
          shift_ok && (layer.p - shifted.p).lpNorm<Eigen::Infinity>() < 1e-10;
    }
  }

  int bound_ok = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const int d = 3;
    Vec eps(d);
    for (int i = 0; i < d; ++i) eps[i] = 1.0 / (32.0 + 24.0 * i);
    Vec init(d);
    for (int i = 0; i < d; ++i) init[i] = 0.2 + rng.uniform();
    init /= init.sum();
    MsMwCLayer layer = make_msmwc_layer(eps, init);
    Vec cum_loss = Vec::Zero(d), cum_sq = Vec::Zero(d);
    double mixed = 0.0;
    for (int t = 1; t <= 200; ++t) {
      const Vec p_t = layer.p;
      const Vec m_t = layer.last_optimism;
      Vec loss(d), opt(d);
      for (int i = 0; i < d; ++i) {
        loss[i] = rng.uniform(-1, 1);
        opt[i] = rng.uniform(-1, 1);
      }
      mixed += loss.dot(p_t);
      cum_loss += loss;
      for (int i = 0; i < d; ++i) cum_sq[i] += sq(loss[i] - m_t[i]);
      msmwc_step(layer, loss, opt);
    }
    int best = 0;
    cum_loss.minCoeff(&best);
    double bound = std::log(1.0 / init[best]) / eps[best] +
                   16.0 * eps[best] * cum_sq[best];
    for (int i = 0; i < d; ++i) bound += init[i] / eps[i];
    if (mixed - cum_loss[best] <= bound + 1e-9) ++bound_ok;
  }
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - started)
                          .count();
  report("C3 msmwc-properties",
         simplex_ok && shift_ok && bound_ok == 50 && secs <= 60.0,
         std::string("simplex ") + (simplex_ok ? "ok" : "VIOLATED") +
             ", shift-invariance " + (shift_ok ? "ok" : "VIOLATED") +
             ", regret bound " + std::to_string(bound_ok) + "/50, " +
             fmt(secs) + " s");
}

// ---------------------------------------------------------------------------
// Shared run matrix: universality (C5), structural inequalities (C4),
// conversion inequalities (C7), fixed-point residuals (C9), anytime (C10).

struct MatrixFacts {
  double max_weight_gap = 0.0, max_play_gap = 0.0, max_norm_abs = 0.0;
  std::int64_t clamp_events = 0, mom_runs = 0;
  double max_fp_residual_fixed = 0.0;  // horizon-based runs: tol is 2GD/T
  double max_fp_residual_anytime = 0.0;
  std::int64_t fp_violations = 0, fp_rounds = 0;
  std::map<std::string, std::uint64_t> query_totals;
  double max_run_seconds = 0.0;
  std::vector<double> anytime_interim;
  int anytime_active = 0;
  std::vector<std::string> conversion_failures;
  std::vector<std::string> universality_failures;
  double c5_seconds = 0.0;
};

void absorb_diag(MatrixFacts& facts, const RunDiagnostics& diag, Variant v) {
  if (v == Variant::kCorrect || v == Variant::kCorrectPp ||
      v == Variant::kGameCorrectPp) {
    facts.max_weight_gap =
        std::max(facts.max_weight_gap, diag.max_weight_decomp_gap);
    facts.max_play_gap = std::max(facts.max_play_gap, diag.max_play_decomp_gap);
    facts.max_norm_abs = std::max(facts.max_norm_abs, diag.max_normalized_abs);
    facts.clamp_events += diag.clamp_events;
    ++facts.mom_runs;
  } else {
    if (v == Variant::kAnytimeBregmanPp) {
      facts.max_fp_residual_anytime =
          std::max(facts.max_fp_residual_anytime, diag.max_fixed_point_residual);
    } else {
      facts.max_fp_residual_fixed =
          std::max(facts.max_fp_residual_fixed, diag.max_fixed_point_residual);
    }
    facts.fp_violations += diag.fixed_point_violations;
    facts.fp_rounds += diag.fixed_point_rounds;
  }
}

void conversion_checks(MatrixFacts& facts, const Environment& env,
                       const RunLog& log, const std::string& tag) {
  const TraceStats ts = trace_stats(log, env.dimension);
  const double L = env.smoothness;
  auto check = [&](const char* name, double lhs, double rhs) {
    if (lhs > rhs * (1.0 + 1e-6) + 1e-9) {
      facts.conversion_failures.push_back(tag + " " + name + " lhs=" +
                                          fmt(lhs) + " rhs=" + fmt(rhs));
    }
  };
  if (env.exact_vt_available) {
    check("variation-vs-movement", ts.vbar_T,
          2.0 * env.exact_vt + 2.0 * L * L * log.play_move_sq);
    const int best = log.best_expert();
    if (best >= 0 && env.smooth && L > 0) {
      check("variation-vs-best-expert", ts.vbar_T,
            4.0 * env.exact_vt + 16.0 * L * log.expert_bregman_to_play[best] +
                4.0 * L * L * log.expert_move_sq[best]);
    }
  }
  if (log.xplus_valid && env.smooth && L > 0) {
    check("small-loss-conversion", ts.vbar_T,
          16.0 * L * (log.sum_losses - log.min_xplus_sum));
  }
  check("variance-conversion", ts.vbar_T, 4.0 * ts.w_T);
}

MatrixFacts run_matrix() {
  MatrixFacts facts;
  const auto started = std::chrono::steady_clock::now();

  const Variant variants[] = {Variant::kCorrect, Variant::kBregman,
                              Variant::kCorrectPp, Variant::kBregmanPp,
                              Variant::kAnytimeBregmanPp};

  for (int e = 0; e < 3; ++e) {
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      Environment env;
      std::string base_name;
      if (e == 0) {
        env = acc_quadratic(kHorizon, seed);
        base_name = "oogd-sc";
      } else if (e == 1) {
        env = acc_logistic(kHorizon, seed);
        base_name = "oons";
      } else {
        env = acc_linear(kHorizon, seed);
        base_name = "oogd-convex";
      }
      const double G = std::max(env.grad_bound, 1e-9);
      const double coeff = env.true_coeff > 0 ? env.true_coeff : 1.0;

      std::vector<LossOracle> losses;
      losses.reserve(kHorizon);
      for (std::int64_t t = 1; t <= kHorizon; ++t) {
        losses.push_back(env.make_loss(t));
      }
      const ComparatorResult cmp =
          offline_comparator(losses, env.domain, seed);

      std::map<double, double> baseline_regret;  // keyed by gamma_bottom
      for (Variant v : variants) {
        const AlgoConfig cfg =
            configure(v, v == Variant::kAnytimeBregmanPp ? 0 : kHorizon,
                      env.domain.diameter(), G, env.smoothness);
        const auto run_start = std::chrono::steady_clock::now();
        const RunLog log = run_universal(env, cfg, kHorizon, env.smooth);
        facts.max_run_seconds =
            std::max(facts.max_run_seconds,
                     std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - run_start)
                         .count());
        absorb_diag(facts, log.diag, v);

        if (!baseline_regret.count(cfg.gamma_bottom)) {
          const RunLog base = run_baseline(env, base_name, coeff,
                                           cfg.gamma_bottom, kHorizon);
          baseline_regret[cfg.gamma_bottom] =
              base.records.back().cum_loss - cmp.opt_value;
        }
        const double reg_uni = log.records.back().cum_loss - cmp.opt_value;
        const double reg_base = baseline_regret[cfg.gamma_bottom];
        if (!(reg_uni <= 3.0 * reg_base + kUniversalityFloor)) {
          facts.universality_failures.push_back(
              env.name + " seed " + std::to_string(seed) + " " +
              variant_name(v) + ": " + fmt(reg_uni) + " vs baseline " +
              fmt(reg_base));
        }

        if (env.smooth && env.smoothness > 0) {
          conversion_checks(facts, env, log,
                            env.name + "/" + variant_name(v) + "/s" +
                                std::to_string(seed));
        } else if (env.exact_vt_available) {
          const TraceStats ts = trace_stats(log, env.dimension);
          if (ts.vbar_T > 2.0 * env.exact_vt * (1.0 + 1e-6) + 1e-9) {
            facts.conversion_failures.push_back(
                env.name + "/" + variant_name(v) +
                " variation-vs-movement lhs=" + fmt(ts.vbar_T) +
                " rhs=" + fmt(2.0 * env.exact_vt));
          }
        }

        if (e == 0 && seed == 1 && v == Variant::kAnytimeBregmanPp) {
          for (std::int64_t tau : {100, 1000, 10000}) {
            facts.anytime_interim.push_back(
                prefix_regret(env, log, tau, seed) / tau);
          }
          facts.anytime_active = log.final_active;
        }
      }
    }
  }
  facts.c5_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - started)
                         .count();
  return facts;
}

// ---------------------------------------------------------------------------
// Criterion 1 plus criterion 6 on the ten-segment drifting-linear benchmark.

void criteria_1_and_6(MatrixFacts& facts) {
  const CandidatePool pool = build_pool(kHorizon);
  std::vector<std::string> c6_pp_failures, c6_ogd_failures;

  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
    const Environment env = drifting_linear(kHorizon, seed);
    const double G = std::max(env.grad_bound, 1e-9);

    std::vector<LossOracle> half, full;
    for (std::int64_t t = 1; t <= kHorizon; ++t) {
      full.push_back(env.make_loss(t));
      if (t <= kHorizon / 2) half.push_back(env.make_loss(t));
    }
    const double opt_half =
        offline_comparator(half, env.domain, seed).opt_value;
    const double opt_full =
        offline_comparator(full, env.domain, seed).opt_value;

    for (Variant v : {Variant::kCorrectPp, Variant::kBregmanPp}) {
      const AlgoConfig cfg =
          configure(v, kHorizon, env.domain.diameter(), G, env.smoothness);
      const auto run_start = std::chrono::steady_clock::now();
      const RunLog log = run_universal(env, cfg, kHorizon, false);
      facts.max_run_seconds =
          std::max(facts.max_run_seconds,
                   std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - run_start)
                       .count());
      absorb_diag(facts, log.diag, v);
      if (seed == 1) {
        facts.query_totals[variant_name(v)] = log.diag.total_queries;
      }
      const double reg_half = log.records[kHorizon / 2 - 1].cum_loss - opt_half;
      const double reg_full = log.records.back().cum_loss - opt_full;
      if (!(reg_full - reg_half <= 0.15 * reg_half + 50.0)) {
        c6_pp_failures.push_back(variant_name(v) + "/s" +
                                 std::to_string(seed) + " delta=" +
                                 fmt(reg_full - reg_half) + " reg(T/2)=" +
                                 fmt(reg_half));
      }
    }

    const RunLog ogd = run_baseline(env, "ogd-sqrt", 0.0, 1.0, kHorizon);
    const double reg_half = ogd.records[kHorizon / 2 - 1].cum_loss - opt_half;
    const double reg_full = ogd.records.back().cum_loss - opt_full;
    if (!(reg_full - reg_half >= 0.3 * reg_half)) {
      c6_ogd_failures.push_back("s" + std::to_string(seed) + " delta=" +
                                fmt(reg_full - reg_half) + " reg(T/2)=" +
                                fmt(reg_half));
    }
  }

  // Remaining query contracts: anytime and the multi-gradient correct.
  {
    const Environment env = drifting_linear(kHorizon, 1);
    const double G = std::max(env.grad_bound, 1e-9);
    const AlgoConfig any =
        configure(Variant::kAnytimeBregmanPp, 0, env.domain.diameter(), G, 0.0);
    const RunLog any_log = run_universal(env, any, kHorizon, false);
    absorb_diag(facts, any_log.diag, Variant::kAnytimeBregmanPp);
    facts.query_totals["anytime-bregman-pp"] = any_log.diag.total_queries;

    const AlgoConfig cor =
        configure(Variant::kCorrect, kHorizon, env.domain.diameter(), G, 0.0);
    const auto run_start = std::chrono::steady_clock::now();
    const RunLog cor_log = run_universal(env, cor, kHorizon, false);
    facts.max_run_seconds =
        std::max(facts.max_run_seconds,
                 std::chrono::duration<double>(
                     std::chrono::steady_clock::now() - run_start)
                     .count());
    absorb_diag(facts, cor_log.diag, Variant::kCorrect);
    facts.query_totals["correct"] = cor_log.diag.total_queries;
  }

  const std::uint64_t want_one = static_cast<std::uint64_t>(kHorizon);
  const std::uint64_t want_multi =
      static_cast<std::uint64_t>(pool.N + 1) * kHorizon;
  const bool c1 = facts.query_totals["correct-pp"] == want_one &&
                  facts.query_totals["bregman-pp"] == want_one &&
                  facts.query_totals["anytime-bregman-pp"] == want_one &&
                  facts.query_totals["correct"] == want_multi &&
                  facts.max_run_seconds <= 120.0;
  report("C1 query-contract", c1,
         "correct-pp/bregman-pp/anytime = " +
             std::to_string(facts.query_totals["correct-pp"]) + "/" +
             std::to_string(facts.query_totals["bregman-pp"]) + "/" +
             std::to_string(facts.query_totals["anytime-bregman-pp"]) +
             " (want " + std::to_string(want_one) + "), correct = " +
             std::to_string(facts.query_totals["correct"]) +
             " (want (N+1)T = " + std::to_string(want_multi) +
             ", N = " + std::to_string(pool.N) + "), slowest run " +
             fmt(facts.max_run_seconds) + " s");

  std::string detail =
      "++ plateau failures: " + std::to_string(c6_pp_failures.size()) +
      ", ogd growth failures: " + std::to_string(c6_ogd_failures.size());
  for (const auto& s : c6_pp_failures) detail += " [" + s + "]";
  for (const auto& s : c6_ogd_failures) detail += " [ogd " + s + "]";
  report("C6 gradient-variation-adaptivity",
         c6_pp_failures.empty() && c6_ogd_failures.empty(), detail);
}

// ---------------------------------------------------------------------------
// Criterion 8: two-player zero-sum games.

void criterion_8() {
  std::vector<std::string> fail;
  for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
    const GameSpec spec = make_bilinear_game(3, 3, seed);
    const AlgoConfig cfg =
        configure(Variant::kGameCorrectPp, kHorizon, std::sqrt(2.0),
                  std::max(spec.grad_bound(), 1e-9), 1.0);
    const GameRunLog honest = run_game(spec, cfg, kHorizon, seed, true, 20);
    double sum_half = 0.0;
    const double sum_full = honest.final_regret_x + honest.final_regret_y;
    for (std::size_t k = 0; k < honest.regret_x.size(); ++k) {
      if (honest.regret_x[k].first == kHorizon / 2) {
        sum_half = honest.regret_x[k].second + honest.regret_y[k].second;
      }
    }
    if (!(std::abs(sum_full - sum_half) <= 0.05 * std::abs(sum_half))) {
      fail.push_back("honest s" + std::to_string(seed) + " sum(T)=" +
                     fmt(sum_full) + " sum(T/2)=" + fmt(sum_half));
    }

    const GameRunLog dis = run_game(spec, cfg, kHorizon, seed, false, 20);
    double reg_tenth = 0.0;
    for (const auto& [tau, rx] : dis.regret_x) {
      if (tau == kHorizon / 10) reg_tenth = rx;
    }
    const double lhs = dis.final_regret_x / kHorizon;
    const double rhs = 0.2 * reg_tenth / (kHorizon / 10);
    if (!(lhs <= rhs)) {
      fail.push_back("dishonest s" + std::to_string(seed) + " reg(T)/T=" +
                     fmt(lhs) + " > 0.2 reg(T/10)/(T/10)=" + fmt(rhs));
    }
  }
  std::string detail = fail.empty()
                           ? "plateau and sublinearity hold on all 5 seeds"
                           : std::to_string(fail.size()) + " violations:";
  for (const auto& s : fail) detail += " [" + s + "]";
  report("C8 game-convergence", fail.empty(), detail);
}

// ---------------------------------------------------------------------------
// Criterion 11: byte-identical CSV outputs across two invocations.

void criterion_11() {
  namespace fs = std::filesystem;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  };
  auto strip_wall = [](const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
      out << line.substr(0, line.rfind(',')) << "\n";
    }
    return out.str();
  };

  const fs::path base = fs::temp_directory_path() / "unigrad_acceptance_det";
  fs::remove_all(base);
  RunConfig rc;
  rc.algorithm = "bregman-pp";
  rc.environment = "drifting-linear";
  rc.T = 2000;
  rc.seeds = {1, 2};
  rc.checkpoints = 20;
  bool ok = true;
  std::string detail;
  for (int pass = 0; pass < 2; ++pass) {
    rc.output_dir = (base / ("pass" + std::to_string(pass))).string();
    if (cli_run(rc) != 0) {
      ok = false;
      detail = "cli_run failed";
    }
  }
  if (ok) {
    for (int seed : {1, 2}) {
      const std::string name =
          "run_bregman-pp_drifting-linear_" + std::to_string(seed) + ".csv";
      if (slurp(base / "pass0" / name) != slurp(base / "pass1" / name)) {
        ok = false;
        detail = "run CSV differs for seed " + std::to_string(seed);
      }
    }
    const std::string s0 = slurp(base / "pass0" / "summary.csv");
    const std::string s1 = slurp(base / "pass1" / "summary.csv");
    if (strip_wall(s0) != strip_wall(s1)) {
      ok = false;
      detail = "summary differs beyond the wall_ms column";
    } else if (detail.empty()) {
      detail =
          "run CSVs byte-identical; summary byte-identical except the "
          "wall-clock column";
    }
  }
  fs::remove_all(base);
  report("C11 determinism", ok, detail);
}

// ---------------------------------------------------------------------------

void criterion_7_extra(MatrixFacts& facts) {
  // Loss-level smoothness characterization on 1000 random pairs.
  Rng rng(9007);
  int bad = 0;
  for (int rep = 0; rep < 500; ++rep) {
    Vec a = rng.gaussian_vec(2);
    a.normalize();
    LossOracle f = rep % 2 == 0
                       ? standard_losses("logistic", a,
                                         rng.uniform() < 0.5 ? 1.0 : -1.0, 1.0)
                       : make_quadratic_loss(0.25 + rng.uniform(),
                                             0.4 * rng.gaussian_vec(2), 1.0);
    for (int s = 0; s < 2; ++s) {
      Vec x = rng.gaussian_vec(2), y = rng.gaussian_vec(2);
      x *= rng.uniform() / std::max(x.norm(), 1e-9);
      y *= rng.uniform() / std::max(y.norm(), 1e-9);
      const Vec gx = f.gradient(x);
      const double lhs = (gx - f.gradient(y)).squaredNorm();
      const double rhs = 2.0 * f.smoothness * bregman_divergence(f, y, x, gx);
      if (lhs > rhs * (1.0 + 1e-6) + 1e-12) ++bad;
    }
  }
  if (bad > 0) {
    facts.conversion_failures.push_back(
        "smoothness characterization violated on " + std::to_string(bad) +
        "/1000 pairs");
  }
}

}  // namespace acceptance
}  // namespace unigrad

int main() {
  using namespace unigrad;
  using namespace unigrad::acceptance;

  criterion_2();
  criterion_3();

  MatrixFacts facts = run_matrix();
  criteria_1_and_6(facts);
  criterion_7_extra(facts);

  {
    std::string detail =
        "max weight-decomposition gap " + fmt(facts.max_weight_gap) +
        ", max play-decomposition gap " + fmt(facts.max_play_gap) +
        ", max |normalized value| " + fmt(facts.max_norm_abs) +
        ", clamp events " + std::to_string(facts.clamp_events) + " across " +
        std::to_string(facts.mom_runs) + " runs";
    report("C4 structural-inequalities",
           facts.max_weight_gap <= 1e-9 && facts.max_play_gap <= 1e-9 &&
               facts.max_norm_abs <= 1.0 + 1e-9,
           detail);
  }
  {
    std::string detail =
        facts.universality_failures.empty()
            ? "all 75 variant/environment/seed regrets within 3x baseline + " +
                  fmt(kUniversalityFloor)
            : std::to_string(facts.universality_failures.size()) +
                  " violations:";
    for (const auto& s : facts.universality_failures) detail += " [" + s + "]";
    detail += " (" + fmt(facts.c5_seconds) + " s)";
    report("C5 universality",
           facts.universality_failures.empty() && facts.c5_seconds <= 900.0,
           detail);
  }
  {
    std::string detail =
        facts.conversion_failures.empty()
            ? "smoothness, empirical-variation, small-loss, and variance "
              "conversions hold on all smooth runs"
            : std::to_string(facts.conversion_failures.size()) +
                  " violations:";
    for (const auto& s : facts.conversion_failures) detail += " [" + s + "]";
    report("C7 conversion-inequalities", facts.conversion_failures.empty(),
           detail);
  }
  criterion_8();
  {
    const bool pass = facts.fp_violations == 0 && facts.fp_rounds > 0;
    report("C9 fixed-point-residuals", pass,
           "max residual " + fmt(facts.max_fp_residual_fixed) +
               " (horizon runs, tol 2GD/T), " +
               fmt(facts.max_fp_residual_anytime) +
               " (anytime, per-round tol), violations " +
               std::to_string(facts.fp_violations) + " over " +
               std::to_string(facts.fp_rounds) + " solves");
  }
  {
    bool decreasing = facts.anytime_interim.size() == 3 &&
                      facts.anytime_interim[0] > facts.anytime_interim[1] &&
                      facts.anytime_interim[1] > facts.anytime_interim[2];
    const int want_active = 2 * (13 + 1) + 1;  // activation rule s_i = 2^i
    std::string detail = "regret(tau)/tau at 100/1000/10000 =";
    for (double v : facts.anytime_interim) detail += " " + fmt(v);
    detail += "; active set " + std::to_string(facts.anytime_active) +
              " (want " + std::to_string(want_active) + ")";
    report("C10 anytime", decreasing && facts.anytime_active == want_active,
           detail);
  }
  criterion_11();

  std::printf("%d criteria failed\n", failures);
  return failures;
}
