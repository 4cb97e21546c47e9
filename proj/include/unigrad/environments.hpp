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

#ifndef UNIGRAD_ENVIRONMENTS_HPP_
#define UNIGRAD_ENVIRONMENTS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "unigrad/geometry.hpp"
#include "unigrad/losses.hpp"
#include "unigrad/rng.hpp"

namespace unigrad {

/// Loss-sequence generator. next(t) is deterministic given (seed, t); the
/// declared G/L bounds hold for every round the generator can produce.
struct Environment {
  std::string name;
  std::int64_t horizon = 0;
  int dimension = 0;
  Domain domain;
  double grad_bound = 0.0;  // G
  double smoothness = 0.0;  // L
  bool smooth = true;

  std::string true_class;  // "convex" | "strongly-convex" | "exp-concave"
  double true_coeff = 0.0;
  bool exact_vt_available = false;
  double exact_vt = 0.0;

  // SEA statistics (populated by sea_env only).
  bool is_sea = false;
  double sigma_sq_total = 0.0;  // Monte-Carlo estimate of sigma^2_{1:T}
  double sigma_sq_stderr = 0.0;
  double adv_sq_total = 0.0;  // estimate of Sigma^2_{1:T}

  std::function<LossOracle(std::int64_t)> make_loss;  // 1-based round index
  LossOracle::Counter counter = LossOracle::new_counter();

  LossOracle next(std::int64_t t) const {
    LossOracle f = make_loss(t);
    f.attach_counter(counter);
    return f;
  }
};

/// The drifting-linear benchmark: f_t(x) = a_{i_t}^T x + b_{i_t} with ten
/// piecewise-constant segments, a_0 = (0.2, 0.2), and segment-to-segment
/// drift a_i = a_{i-1} + noise_scale * eps_i. Gradients are constant in x,
/// so the exact gradient variation is the sum of squared segment jumps.
inline Environment drifting_linear(std::int64_t T, std::uint64_t seed,
                                   double noise_scale = 0.1) {
  require(T >= 10, "drifting_linear: T must be >= 10");
  Environment env;
  env.name = "drifting-linear";
  env.horizon = T;
  env.dimension = 2;
  env.domain = Domain::ball(1.0, 2);
  env.true_class = "convex";
  env.smooth = true;
  env.smoothness = 0.0;

  Rng rng(seed, /*stream=*/17);
  std::vector<Vec> a(10);
  std::vector<double> b(10);
  a[0] = Vec(2);
  a[0] << 0.2, 0.2;
  b[0] = 0.0;
  for (int i = 1; i < 10; ++i) {
    a[i] = a[i - 1] + noise_scale * rng.gaussian_vec(2);
    b[i] = b[i - 1] + noise_scale * rng.gaussian();
  }

  double g = 0.0, vt = 0.0;
  for (int i = 0; i < 10; ++i) g = std::max(g, a[i].norm());
  for (int i = 1; i < 10; ++i) vt += (a[i] - a[i - 1]).squaredNorm();
  env.grad_bound = g;
  env.exact_vt_available = true;
  env.exact_vt = vt;

  env.make_loss = [a, b, T](std::int64_t t) {
    // i_t = floor(10 (t-1) / T) keeps exactly ten segments over [1, T].
    const int i = static_cast<int>((10 * (t - 1)) / T);
    return make_linear_loss(a[i], b[i]);
  };
  return env;
}

/// Piecewise-drifting strongly convex quadratics (lambda/2) ||x - m_t||^2
/// with ten segments of slowly moving centers inside the unit ball.
inline Environment drifting_quadratic(std::int64_t T, std::uint64_t seed,
                                      double lambda = 0.5,
                                      double noise_scale = 0.1) {
  require(T >= 10, "drifting_quadratic: T must be >= 10");
  Environment env;
  env.name = "sc-quadratic";
  env.horizon = T;
  env.dimension = 2;
  env.domain = Domain::ball(1.0, 2);
  env.true_class = "strongly-convex";
  env.true_coeff = lambda;
  env.smooth = true;
  env.smoothness = lambda;

  Rng rng(seed, 23);
  std::vector<Vec> m(10);
  m[0] = Vec(2);
  m[0] << 0.3, -0.2;
  for (int i = 1; i < 10; ++i) {
    Vec cand = m[i - 1] + noise_scale * rng.gaussian_vec(2);
    const double n = cand.norm();
    if (n > 0.6) cand *= 0.6 / n;
    m[i] = cand;
  }

  double max_center = 0.0, vt = 0.0;
  for (int i = 0; i < 10; ++i) max_center = std::max(max_center, m[i].norm());
  for (int i = 1; i < 10; ++i) {
    vt += lambda * lambda * (m[i] - m[i - 1]).squaredNorm();
  }
  env.grad_bound = lambda * (env.domain.radius + max_center);
  env.exact_vt_available = true;
  env.exact_vt = vt;

  env.make_loss = [m, lambda, T, r = env.domain.radius](std::int64_t t) {
    const int i = static_cast<int>((10 * (t - 1)) / T);
    return make_quadratic_loss(lambda, m[i], r);
  };
  return env;
}

struct Sample {
  Vec a;
  double y = 1.0;
};

/// Draws one record uniformly per round (counter-based, so next(t) is pure)
/// and wraps it in the requested standard loss. Features are l2-normalized
/// per record so the declared G bound is a closed form.
inline Environment dataset_env(std::vector<Sample> records,
                               const std::string& kind, std::int64_t T,
                               std::uint64_t seed, double radius = 1.0) {
  if (records.empty()) {
    throw std::invalid_argument("dataset_env: empty dataset");
  }
  for (auto& rec : records) {
    require(all_finite(rec.a), "dataset_env: non-finite feature");
    const double n = rec.a.norm();
    if (n > 0) rec.a /= n;
  }
  const int d = static_cast<int>(records.front().a.size());
  for (const auto& rec : records) {
    require(static_cast<int>(rec.a.size()) == d,
            "dataset_env: inconsistent feature dimension");
  }

  Environment env;
  env.name = "dataset-" + kind;
  env.horizon = T;
  env.dimension = d;
  env.domain = Domain::ball(radius, d);
  env.exact_vt_available = false;

  double g = 0.0, l = 0.0, coeff = std::numeric_limits<double>::infinity();
  bool smooth = true;
  for (const auto& rec : records) {
    LossOracle f = standard_losses(kind, rec.a, rec.y, radius);
    g = std::max(g, f.grad_bound);
    l = std::max(l, f.smoothness);
    smooth = smooth && f.smooth;
    if (f.curvature_coeff > 0) coeff = std::min(coeff, f.curvature_coeff);
  }
  env.grad_bound = g;
  env.smoothness = l;
  env.smooth = smooth;
  if (kind == "hinge") {
    env.true_class = "convex";
  } else if (kind == "logistic") {
    env.true_class = "exp-concave";
    env.true_coeff = std::isfinite(coeff) ? coeff : 0.0;
  } else {
    env.true_class = "strongly-convex";
    env.true_coeff = 1.0;
  }

  const std::size_t n_records = records.size();
  env.make_loss = [records = std::move(records), kind, seed, radius,
                   n_records](std::int64_t t) {
    const std::size_t idx = hash3(seed, 41, static_cast<std::uint64_t>(t)) %
                            n_records;
    const Sample& rec = records[idx];
    return standard_losses(kind, rec.a, rec.y, radius);
  };
  return env;
}

/// Synthetic binary-classification records from a planted linear concept;
/// used when no dataset file is supplied.
inline std::vector<Sample> make_synthetic_records(int count, int dim,
                                                  std::uint64_t seed) {
  require(count > 0 && dim > 0, "make_synthetic_records: bad sizes");
  Rng rng(seed, 7);
  Vec concept_dir = rng.gaussian_vec(dim);
  concept_dir.normalize();
  std::vector<Sample> records(count);
  for (auto& rec : records) {
    rec.a = rng.gaussian_vec(dim);
    const double margin = concept_dir.dot(rec.a) + 0.3 * rng.gaussian();
    rec.y = margin >= 0 ? 1.0 : -1.0;
  }
  return records;
}

/// LIBSVM sparse text format: "<label> idx:val idx:val ..." with 1-based
/// indices. Labels are mapped to +-1 (larger label -> +1 when the file does
/// not already use the +-1 convention).
inline std::vector<Sample> read_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("read_libsvm: cannot open " + path);
  std::vector<std::pair<double, std::vector<std::pair<int, double>>>> rows;
  int max_index = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double label;
    if (!(ls >> label)) continue;
    std::vector<std::pair<int, double>> feats;
    std::string tok;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) {
        throw std::invalid_argument("read_libsvm: malformed token " + tok);
      }
      const int idx = std::stoi(tok.substr(0, colon));
      const double val = std::stod(tok.substr(colon + 1));
      require(idx >= 1, "read_libsvm: indices are 1-based");
      feats.emplace_back(idx, val);
      max_index = std::max(max_index, idx);
    }
    rows.emplace_back(label, std::move(feats));
  }
  if (rows.empty()) throw std::invalid_argument("read_libsvm: empty file");

  double lo = rows.front().first, hi = rows.front().first;
  for (const auto& row : rows) {
    lo = std::min(lo, row.first);
    hi = std::max(hi, row.first);
  }
  std::vector<Sample> records;
  records.reserve(rows.size());
  for (const auto& [label, feats] : rows) {
    Sample rec;
    rec.a = Vec::Zero(max_index);
    for (const auto& [idx, val] : feats) rec.a[idx - 1] = val;
    if (lo == hi) {
      rec.y = 1.0;
    } else {
      rec.y = (label > 0.5 * (lo + hi)) ? 1.0 : -1.0;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

/// Stochastically extended adversarial sequence: the expected loss F_t drifts
/// slowly (linear or quadratic), while the realized f_t perturbs its gradient
/// field by a bounded zero-mean linear term <xi_t, x> with ||xi_t|| = sigma.
/// The environment records Monte-Carlo estimates of the stochastic variance
/// sigma^2_{1:T} and the adversarial variation Sigma^2_{1:T}; suprema over
/// the domain are estimated from 64 sampled points per round.
inline Environment sea_env(const std::string& base_kind, double noise_sigma,
                           std::int64_t T, std::uint64_t seed,
                           double base_drift = 0.1) {
  require(noise_sigma >= 0, "sea_env: noise_sigma must be >= 0");
  Environment base = (base_kind == "quadratic")
                         ? drifting_quadratic(T, seed, 0.5, base_drift)
                         : drifting_linear(T, seed, base_drift);
  Environment env = base;
  env.name = "sea-" + base_kind;
  env.is_sea = true;
  env.grad_bound = base.grad_bound + noise_sigma;
  env.exact_vt_available = false;
  env.counter = LossOracle::new_counter();

  auto noise_at = [seed, noise_sigma](std::int64_t t, std::uint64_t draw) {
    Rng rng(hash3(seed, 59, static_cast<std::uint64_t>(t)), draw);
    Vec v = rng.gaussian_vec(2);
    const double n = v.norm();
    if (n < 1e-12) return Vec(Vec::Zero(2));
    return Vec((noise_sigma / n) * v);
  };

  env.make_loss = [base, noise_at](std::int64_t t) {
    LossOracle f = base.make_loss(t);
    // Adding <xi, x> keeps the curvature class and shifts the gradient field
    // uniformly. Represent as the same kind with adjusted parameters.
    const Vec xi = noise_at(t, 0);
    if (f.kind == LossKind::kLinear) {
      f.a += xi;
      f.grad_bound = f.a.norm();
    } else if (f.kind == LossKind::kQuadratic) {
      // (l/2)||x - m||^2 + <xi, x> = (l/2)||x - (m - xi/l)||^2 + const; the
      // constant offset is irrelevant for regret, so fold xi into the center.
      f.m -= xi / f.lambda;
      f.grad_bound += xi.norm();
    }
    return f;
  };

  // Monte-Carlo estimates: Sigma^2 uses the drift of the expected gradients;
  // sigma^2 averages fresh perturbation draws, maximized over sampled points.
  Rng probe_rng(seed, 61);
  std::vector<Vec> probes(64);
  for (auto& x : probes) {
    Vec v = probe_rng.gaussian_vec(2);
    x = (probe_rng.uniform() / std::max(v.norm(), 1e-12)) * v;
  }
  double sigma_total = 0.0, sigma_sq_sum = 0.0;
  double adv_total = 0.0;
  const int kDraws = 16;
  for (std::int64_t t = 1; t <= T; ++t) {
    LossOracle f_mean = base.make_loss(t);
    std::vector<Vec> draws(kDraws);
    for (int s = 0; s < kDraws; ++s) {
      draws[s] = noise_at(t, static_cast<std::uint64_t>(s + 1));
    }
    double round_max = 0.0;
    for (const Vec& x : probes) {
      (void)x;  // the linear perturbation is constant in x
      double acc = 0.0;
      for (const Vec& xi : draws) acc += xi.squaredNorm();
      round_max = std::max(round_max, acc / kDraws);
    }
    sigma_total += round_max;
    sigma_sq_sum += round_max * round_max;
    if (t >= 2) {
      LossOracle f_prev = base.make_loss(t - 1);
      double sup = 0.0;
      for (const Vec& x : probes) {
        sup = std::max(
            sup, (f_mean.gradient(x) - f_prev.gradient(x)).squaredNorm());
      }
      adv_total += sup;
    }
  }
  env.sigma_sq_total = sigma_total;
  const double mean = sigma_total / T;
  env.sigma_sq_stderr =
      std::sqrt(std::max(0.0, sigma_sq_sum / T - mean * mean) / T);
  env.adv_sq_total = adv_total;
  return env;
}

enum class GameKind { kBilinear, kScSc };

/// Two-player zero-sum game on simplex strategy sets. The x-player minimizes
/// f, the y-player maximizes it (its loss gradient carries the sign flip).
struct GameSpec {
  GameKind kind = GameKind::kBilinear;
  Mat A;
  int dx = 0, dy = 0;
  double lambda = 0.0;  // sc-sc curvature
  Vec cx, cy;           // sc-sc anchors

  double grad_bound() const {
    // sup over a simplex of ||A y|| is attained at a vertex, so the exact
    // bound is the largest column (or row, for the y-player) norm.
    if (!A.size()) return 1.0;
    double g = 0.0;
    for (int j = 0; j < A.cols(); ++j) g = std::max(g, A.col(j).norm());
    for (int i = 0; i < A.rows(); ++i) g = std::max(g, A.row(i).norm());
    if (kind == GameKind::kScSc) g += lambda * std::sqrt(2.0);
    return g;
  }
};

inline GameSpec make_bilinear_game(int dx, int dy, std::uint64_t seed) {
  GameSpec spec;
  spec.kind = GameKind::kBilinear;
  spec.dx = dx;
  spec.dy = dy;
  Rng rng(seed, 31);
  spec.A = Mat(dx, dy);
  for (int i = 0; i < dx; ++i) {
    for (int j = 0; j < dy; ++j) spec.A(i, j) = rng.uniform(-1.0, 1.0);
  }
  // Keep the payoff 1-Lipschitz between the players (operator norm <= 1);
  // entries stay within [-1, 1].
  Eigen::JacobiSVD<Mat> svd(spec.A);
  const double top = svd.singularValues()[0];
  if (top > 1.0) spec.A /= top;
  return spec;
}

inline GameSpec make_scsc_game(int dx, int dy, double lambda,
                               std::uint64_t seed) {
  GameSpec spec = make_bilinear_game(dx, dy, seed);
  spec.kind = GameKind::kScSc;
  spec.lambda = lambda;
  spec.cx = Vec::Constant(dx, 1.0 / dx);
  spec.cy = Vec::Constant(dy, 1.0 / dy);
  Rng rng(seed, 37);
  for (int i = 0; i < dx; ++i) spec.cx[i] += 0.1 * rng.uniform();
  for (int j = 0; j < dy; ++j) spec.cy[j] += 0.1 * rng.uniform();
  spec.cx = project_simplex_euclidean(spec.cx);
  spec.cy = project_simplex_euclidean(spec.cy);
  return spec;
}

struct GameGradients {
  Vec g_x;
  Vec g_y;
  double value = 0.0;
};

/// Loss gradients for both players at (x, y). Bilinear: g_x = A y and
/// g_y = -A^T x (the y-player maximizes x^T A y). The sc-sc instance is
/// f(x,y) = (lambda/2)||x - cx||^2 - (lambda/2)||y - cy||^2 + x^T A y.
inline GameGradients game_round(const GameSpec& spec, const Vec& x,
                                const Vec& y) {
  if (x.size() != spec.dx || y.size() != spec.dy) {
    throw std::invalid_argument("game_round: dimension mismatch");
  }
  GameGradients out;
  out.g_x = spec.A * y;
  out.g_y = -(spec.A.transpose() * x);
  out.value = x.dot(spec.A * y);
  if (spec.kind == GameKind::kScSc) {
    out.g_x += spec.lambda * (x - spec.cx);
    out.g_y += spec.lambda * (y - spec.cy);
    out.value += 0.5 * spec.lambda * (x - spec.cx).squaredNorm() -
                 0.5 * spec.lambda * (y - spec.cy).squaredNorm();
  }
  return out;
}

}  // namespace unigrad

#endif  // UNIGRAD_ENVIRONMENTS_HPP_
