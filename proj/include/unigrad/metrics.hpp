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

#ifndef UNIGRAD_METRICS_HPP_
#define UNIGRAD_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "unigrad/environments.hpp"
#include "unigrad/geometry.hpp"
#include "unigrad/losses.hpp"
#include "unigrad/rng.hpp"

namespace unigrad {

/// One row of a run trace.
struct RunRecord {
  std::int64_t round = 0;
  Vec play;
  double loss_value = 0.0;
  Vec grad_at_play;
  std::uint64_t query_count = 0;  // cumulative oracle gradient queries
  double vbar_running = 0.0;      // empirical gradient variation to date
  double cum_loss = 0.0;
};

/// Problem-dependent quantity report for a finished run.
struct VariationReport {
  double vbar_T = 0.0;
  double v_T = 0.0;
  bool v_T_exact = false;
  double v_T_stderr = 0.0;  // estimator dispersion when not exact
  double f_T = std::numeric_limits<double>::quiet_NaN();
  double w_T = 0.0;         // realized-trajectory value, not the sup
  bool w_T_realized = true;
};

namespace detail {

// Average of a batch of losses with O(#distinct records) evaluation. Linear
// and quadratic parts aggregate exactly; sample-based kinds pool by record.
class AggregateLoss {
 public:
  explicit AggregateLoss(int dim)
      : a_sum_(Vec::Zero(dim)), lam_m_sum_(Vec::Zero(dim)), dim_(dim) {}

  void add(const LossOracle& f) {
    ++count_;
    smooth_sum_ += f.smooth ? f.smoothness : 0.0;
    switch (f.kind) {
      case LossKind::kLinear:
        a_sum_ += f.a;
        b_sum_ += f.b;
        break;
      case LossKind::kQuadratic:
        lam_sum_ += f.lambda;
        lam_m_sum_ += f.lambda * f.m;
        lam_m_sq_sum_ += f.lambda * f.m.squaredNorm();
        break;
      default: {
        Key key = make_key(f);
        auto it = pooled_.find(key);
        if (it == pooled_.end ()) {
          pooled_.emplace(std::move(key), std::make_pair(f, std::int64_t{1}));
        } else {
          ++it->second.second;
        }
        all_linear_ = false;
      }
    }
    if (f.kind != LossKind::kLinear) all_linear_ = false;
  }

  std::int64_t count() const { return count_; }
  bool all_linear() const { return all_linear_; }
  Vec mean_linear_coeff() const { return a_sum_ / std::max<std::int64_t>(1, count_); }
  double mean_smoothness() const {
    return count_ ? smooth_sum_ / count_ : 0.0;
  }

  double value(const Vec& x) const {
    double total = a_sum_.dot(x) + b_sum_;
    if (lam_sum_ > 0) {
      total += 0.5 * lam_sum_ * x.squaredNorm() - lam_m_sum_.dot(x) +
               0.5 * lam_m_sq_sum_;
    }
    for (const auto& [key, entry] : pooled_) {
      total += entry.second * entry.first.value(x);
    }
    return total / count_;
  }

  Vec gradient(const Vec& x) const {
    Vec g = a_sum_;
    if (lam_sum_ > 0) g += lam_sum_ * x - lam_m_sum_;
    for (const auto& [key, entry] : pooled_) {
      g += entry.second * grad_of(entry.first, x);
    }
    return g / count_;
  }

 private:
  using Key = std::tuple<int, double, std::vector<double>>;

  static Key make_key(const LossOracle& f) {
    std::vector<double> coords(f.a.data(), f.a.data() + f.a.size());
    return {static_cast<int>(f.kind), f.label, std::move(coords)};
  }

  static Vec grad_of(const LossOracle& f, const Vec& x) {
    // Re-derive the gradient without touching the query counter.
    switch (f.kind) {
      case LossKind::kHinge:
        if (1.0 - f.label * f.a.dot(x) > 0) return -f.label * f.a;
        return Vec::Zero(x.size());
      case LossKind::kLogistic:
        return (-f.label * sigmoid(-f.label * f.a.dot(x))) * f.a;
      case LossKind::kHingeL2:
        if (1.0 - f.label * f.a.dot(x) > 0) return (-f.label * f.a + x).eval();
        return x;
      default:
        return Vec::Zero(x.size());
    }
  }

  Vec a_sum_;
  double b_sum_ = 0.0;
  double lam_sum_ = 0.0;
  Vec lam_m_sum_;
  double lam_m_sq_sum_ = 0.0;
  std::map<Key, std::pair<LossOracle, std::int64_t>> pooled_;
  std::int64_t count_ = 0;
  double smooth_sum_ = 0.0;
  bool all_linear_ = true;
  int dim_;
};

inline Vec random_domain_point(const Domain& dom, Rng& rng) {
  Vec v(dom.dim);
  for (int i = 0; i < dom.dim; ++i) v[i] = rng.gaussian();
  switch (dom.kind) {
    case DomainKind::kBall:
      return (dom.radius * rng.uniform() / std::max(v.norm(), 1e-12)) * v;
    case DomainKind::kBox: {
      Vec out(dom.dim);
      for (int i = 0; i < dom.dim; ++i) {
        out[i] = dom.lo[i] + rng.uniform() * (dom.hi[i] - dom.lo[i]);
      }
      return out;
    }
    case DomainKind::kSimplex: {
      Vec out(dom.dim);
      double s = 0.0;
      for (int i = 0; i < dom.dim; ++i) {
        out[i] = -std::log(std::max(rng.uniform(), 1e-300));
        s += out[i];
      }
      return out / s;
    }
  }
  return v;
}

}  // namespace detail

struct ComparatorResult {
  Vec x_star;
  double opt_value = 0.0;  // sum (not average) of losses at x_star
  bool converged = true;   // quality flag; the best found is returned anyway
};

/// Best fixed decision in hindsight: projected-gradient descent on the
/// average loss from the domain center plus 8 seeded random restarts, 5000
/// iterations each with the 1/(L_total k) step schedule. A batch whose total
/// loss is linear on a ball is solved in closed form (x* = -R gbar/||gbar||),
/// and the descent result is certified against it to 1e-6.
inline ComparatorResult offline_comparator(const std::vector<LossOracle>& losses,
                                           const Domain& dom,
                                           std::uint64_t seed = 0) {
  require(!losses.empty(), "offline_comparator: empty batch");
  detail::AggregateLoss avg(dom.dim);
  for (const auto& f : losses) avg.add(f);

  ComparatorResult result;
  if (avg.all_linear() && dom.kind == DomainKind::kBall) {
    const Vec gbar = avg.mean_linear_coeff();
    const double n = gbar.norm();
    result.x_star = n > 0 ? Vec((-dom.radius / n) * gbar) : dom.center();
    result.opt_value = avg.value(result.x_star) * avg.count();
    return result;
  }

  const double l_total = std::max(avg.mean_smoothness(), 1e-9);
  Rng rng(seed, 71);
  Vec best = dom.center();
  double best_val = avg.value(best);
  for (int start = 0; start <= 8; ++start) {
    Vec x = (start == 0) ? dom.center() : detail::random_domain_point(dom, rng);
    double fx = avg.value(x);
    if (fx < best_val) {
      best_val = fx;
      best = x;
    }
    for (int k = 1; k <= 5000; ++k) {
      x = project_euclidean(x - (1.0 / (l_total * k)) * avg.gradient(x), dom);
      fx = avg.value(x);
      if (fx < best_val) {
        best_val = fx;
        best = x;
      }
    }
  }
  // Stationarity proxy: projected-gradient residual at the incumbent.
  const Vec res =
      best - project_euclidean(best - avg.gradient(best) / l_total, dom);
  result.converged = res.norm() <= 1e-4 * std::max(1.0, dom.diameter());
  result.x_star = best;
  result.opt_value = best_val * avg.count();
  return result;
}

/// Prefix regrets Reg_tau = sum_{t<=tau} f_t(x_t) - min_x sum_{t<=tau} f_t(x),
/// evaluated at `checkpoints` evenly spaced prefixes and exactly at the end.
inline std::vector<std::pair<std::int64_t, double>> compute_regret(
    const std::vector<RunRecord>& records,
    const std::vector<LossOracle>& losses, const Domain& dom,
    int checkpoints = 100, std::uint64_t seed = 0) {
  if (records.size() != losses.size()) {
    throw std::invalid_argument("compute_regret: records/losses misaligned");
  }
  const std::int64_t T = static_cast<std::int64_t>(records.size());
  std::vector<std::int64_t> taus;
  for (int k = 1; k <= checkpoints; ++k) {
    const std::int64_t tau = (T * k) / checkpoints;
    if (tau >= 1 && (taus.empty() || tau != taus.back())) taus.push_back(tau);
  }
  if (taus.empty() || taus.back() != T) taus.push_back(T);

  std::vector<std::pair<std::int64_t, double>> out;
  out.reserve(taus.size());
  std::size_t next = 0;
  std::vector<LossOracle> prefix;
  prefix.reserve(losses.size());
  for (std::int64_t t = 1; t <= T; ++t) {
    prefix.push_back(losses[t - 1]);
    if (next < taus.size() && t == taus[next]) {
      const ComparatorResult cmp = offline_comparator(prefix, dom, seed);
      out.emplace_back(t, records[t - 1].cum_loss - cmp.opt_value);
      ++next;
    }
  }
  return out;
}

/// Problem-dependent quantities of a finished trajectory. W_T is evaluated at
/// the realized plays (flagged as such); v_T falls back to a 64-point
/// supremum estimate when the environment has no exact value.
inline VariationReport track_quantities(const std::vector<RunRecord>& records,
                                        const Environment& env,
                                        std::uint64_t seed = 0) {
  VariationReport rep;
  const std::int64_t T = static_cast<std::int64_t>(records.size());
  if (T == 0) return rep;

  for (std::int64_t t = 2; t <= T; ++t) {
    rep.vbar_T +=
        (records[t - 1].grad_at_play - records[t - 2].grad_at_play)
            .squaredNorm();
  }

  if (env.exact_vt_available) {
    rep.v_T = env.exact_vt;
    rep.v_T_exact = true;
  } else {
    Rng rng(seed, 83);
    std::vector<Vec> probes(64);
    for (auto& x : probes) x = detail::random_domain_point(env.domain, rng);
    std::vector<double> per_probe(64, 0.0);
    for (std::int64_t t = 2; t <= T; ++t) {
      LossOracle ft = env.make_loss(t);
      LossOracle fp = env.make_loss(t - 1);
      double sup = 0.0;
      for (int j = 0; j < 64; ++j) {
        const double d =
            (ft.gradient(probes[j]) - fp.gradient(probes[j])).squaredNorm();
        per_probe[j] += d;
        sup = std::max(sup, d);
      }
      rep.v_T += sup;
    }
    double mean = 0.0, var = 0.0;
    for (double v : per_probe) mean += v;
    mean /= 64.0;
    for (double v : per_probe) var += sq(v - mean);
    rep.v_T_stderr = std::sqrt(var / 64.0 / 64.0);
    rep.v_T_exact = false;
  }

  // W_T at the realized trajectory (two-pass form for stability).
  Vec grad_sum = Vec::Zero(env.dimension);
  for (const auto& r : records) grad_sum += r.grad_at_play;
  const Vec mu = grad_sum / static_cast<double>(T);
  rep.w_T = 0.0;
  for (const auto& r : records) {
    rep.w_T += (r.grad_at_play - mu).squaredNorm();
  }
  rep.w_T_realized = true;

  // F_T needs smoothness (the enlarged domain has radius R + G/L).
  if (env.smooth && env.smoothness > 0 &&
      env.domain.kind == DomainKind::kBall) {
    const double r_plus = env.domain.radius + env.grad_bound / env.smoothness;
    std::vector<LossOracle> all;
    all.reserve(T);
    double min_sum = 0.0;
    for (std::int64_t t = 1; t <= T; ++t) {
      all.push_back(env.make_loss(t));
      min_sum += all.back().min_over_ball(r_plus);
    }
    const ComparatorResult cmp = offline_comparator(all, env.domain, seed);
    rep.f_T = cmp.opt_value - min_sum;
  }
  return rep;
}

}  // namespace unigrad

#endif  // UNIGRAD_METRICS_HPP_
