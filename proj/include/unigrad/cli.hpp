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

#ifndef UNIGRAD_CLI_HPP_
#define UNIGRAD_CLI_HPP_

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "unigrad/runner.hpp"

namespace unigrad {

struct RunConfig {
  std::string algorithm;
  std::string environment;
  std::int64_t T = 10000;
  std::vector<std::uint64_t> seeds;
  std::string dataset_path;
  std::string mode = "gv";  // gv | smallloss
  std::string output_dir = ".";
  int checkpoints = 100;
  int dimension = 2;
  double baseline_gamma = 1.0;
  double sea_sigma = 0.3;
};

inline std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

/// "1..5" -> 1,2,3,4,5; "1,4,9" -> listed values; "7" -> {7}.
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t lo = std::stoull(text.substr(0, dots));
    const std::uint64_t hi = std::stoull(text.substr(dots + 2));
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) seeds.push_back(std::stoull(tok));
  }
  return seeds;
}

inline bool is_game_environment(const std::string& name) {
  return name == "game-bilinear" || name == "game-scsc";
}

inline bool is_baseline_algo(const std::string& name) {
  return name == "oogd-sc" || name == "oons" || name == "oogd-convex" ||
         name == "ogd-sqrt";
}

inline Environment make_environment(const RunConfig& rc, std::uint64_t seed) {
  const std::string& name = rc.environment;
  if (name == "drifting-linear") return drifting_linear(rc.T, seed);
  if (name == "sc-quadratic") return drifting_quadratic(rc.T, seed);
  if (name == "sea-linear") return sea_env("linear", rc.sea_sigma, rc.T, seed);
  if (name == "sea-quadratic") {
    return sea_env("quadratic", rc.sea_sigma, rc.T, seed);
  }
  if (name == "logistic" || name == "hinge" || name == "hinge-l2") {
    std::vector<Sample> records =
        rc.dataset_path.empty()
            ? make_synthetic_records(32, rc.dimension, seed)
            : read_libsvm(rc.dataset_path);
    return dataset_env(std::move(records), name, rc.T, seed);
  }
  throw std::invalid_argument("unknown environment: " + name);
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string config_text(const AlgoConfig& c) {
  std::ostringstream out;
  out << "variant=" << variant_name(c.variant) << "\n";
  out << "mode="
      << (c.mode == ConstantMode::kGv
              ? "gv"
              : (c.mode == ConstantMode::kSmallLoss ? "smallloss" : "both"))
      << "\n";
  out << "T=" << c.T << "\n";
  out << "D=" << format_g12(c.D) << "\n";
  out << "G=" << format_g12(c.G) << "\n";
  out << "L=" << format_g12(c.L) << "\n";
  out << "C1=" << format_g12(c.C1) << "\n";
  out << "C10=" << format_g12(c.C10) << "\n";
  out << "C11=" << format_g12(c.C11) << "\n";
  out << "C0=" << format_g12(c.C0) << "\n";
  out << "gamma_top=" << format_g12(c.gamma_top) << "\n";
  out << "gamma_mid=" << format_g12(c.gamma_mid) << "\n";
  out << "Z=" << format_g12(c.Z) << "\n";
  out << "gamma_bottom=" << format_g12(c.gamma_bottom) << "\n";
  out << "surrogate_divisor=" << c.surrogate_divisor << "\n";
  if (!c.warning.empty()) out << "warning=" << c.warning << "\n";
  return out.str();
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << body;
}

struct SummaryRow {
  std::string algo, env;
  std::uint64_t seed = 0;
  double final_regret = 0.0, vbar_T = 0.0, vT = 0.0, fT = 0.0, wT = 0.0;
  std::uint64_t total_queries = 0;
  double wall_ms = 0.0;
};

inline std::string summary_header() {
  return "algo,env,seed,final_regret,vbar_T,vT,fT,wT,total_queries,wall_ms\n";
}

inline std::string summary_line(const SummaryRow& r) {
  std::ostringstream out;
  out << r.algo << ',' << r.env << ',' << r.seed << ','
      << format_g12(r.final_regret) << ',' << format_g12(r.vbar_T) << ','
      << format_g12(r.vT) << ',' << format_g12(r.fT) << ','
      << format_g12(r.wT) << ',' << r.total_queries << ','
      << format_g12(r.wall_ms) << "\n";
  return out.str();
}

inline std::string run_csv(const std::vector<RunRecord>& records,
                           const std::vector<std::pair<std::int64_t, double>>&
                               regrets) {
  std::ostringstream out;
  out << "round,regret,loss,vbar,queries\n";
  for (const auto& [tau, reg] : regrets) {
    const RunRecord& rec = records[tau - 1];
    out << tau << ',' << format_g12(reg) << ',' << format_g12(rec.cum_loss)
        << ',' << format_g12(rec.vbar_running) << ',' << rec.query_count
        << "\n";
  }
  return out.str();
}

inline std::string game_csv(
    const std::vector<std::pair<std::int64_t, double>>& regrets,
    std::int64_t queries_per_round) {
  std::ostringstream out;
  out << "round,regret,loss,vbar,queries\n";
  for (const auto& [tau, reg] : regrets) {
    out << tau << ',' << format_g12(reg) << ",nan,nan,"
        << tau * queries_per_round << "\n";
  }
  return out.str();
}

}  // namespace detail

/// Executes the (algorithm, environment) pair for every seed, writing one
/// run CSV per seed plus a shared summary.csv and a resolved-constants
/// sidecar. Returns a process exit status.
inline int cli_run(const RunConfig& rc) {
  namespace fs = std::filesystem;
  try {
    if (!is_baseline_algo(rc.algorithm) && !parse_variant(rc.algorithm)) {
      std::cerr << "unknown algorithm: " << rc.algorithm << "\n";
      return 2;
    }
    if (!is_game_environment(rc.environment)) {
      // Probe the environment name before running anything.
      RunConfig probe = rc;
      probe.T = std::max<std::int64_t>(10, std::min<std::int64_t>(rc.T, 10));
      (void)make_environment(probe, rc.seeds.empty() ? 1 : rc.seeds.front());
    }
    if (rc.seeds.empty()) {
      std::cerr << "no seeds given\n";
      return 2;
    }
    fs::create_directories(rc.output_dir);

    std::string summary = detail::summary_header();
    ConstantMode mode = rc.mode == "smallloss" ? ConstantMode::kSmallLoss
                                               : ConstantMode::kGv;
    bool wrote_sidecar = false;

    for (std::uint64_t seed : rc.seeds) {
      if (is_game_environment(rc.environment)) {
        const auto variant = parse_variant(rc.algorithm);
        if (!variant || *variant != Variant::kGameCorrectPp) {
          std::cerr << "game environments require --algo game-correct-pp\n";
          return 2;
        }
        GameSpec spec = rc.environment == "game-bilinear"
                            ? make_bilinear_game(3, 3, seed)
                            : make_scsc_game(3, 3, 0.5, seed);
        AlgoConfig cfg = configure(*variant, rc.T, std::sqrt(2.0),
                                   std::max(spec.grad_bound(), 1e-9), 1.0,
                                   mode);
        if (!wrote_sidecar) {
          const std::string text = detail::config_text(cfg);
          detail::write_file(fs::path(rc.output_dir) /
                                 ("config_" +
                                  std::to_string(detail::fnv1a(text)) + ".txt"),
                             text);
          wrote_sidecar = true;
        }
        GameRunLog g = run_game(spec, cfg, rc.T, seed, /*honest=*/true,
                                rc.checkpoints);
        for (const char* side : {"x", "y"}) {
          const auto& reg = side[0] == 'x' ? g.regret_x : g.regret_y;
          detail::write_file(
              fs::path(rc.output_dir) /
                  ("run_" + rc.algorithm + "_" + rc.environment + "-" + side +
                   "_" + std::to_string(seed) + ".csv"),
              detail::game_csv(reg, 1));
          detail::SummaryRow row;
          row.algo = rc.algorithm;
          row.env = rc.environment + ":" + side;
          row.seed = seed;
          row.final_regret =
              side[0] == 'x' ? g.final_regret_x : g.final_regret_y;
          row.total_queries = static_cast<std::uint64_t>(rc.T);
          row.wall_ms = g.wall_ms;
          summary += detail::summary_line(row);
        }
        detail::SummaryRow sum_row;
        sum_row.algo = rc.algorithm;
        sum_row.env = rc.environment + ":sum";
        sum_row.seed = seed;
        sum_row.final_regret = g.final_regret_x + g.final_regret_y;
        sum_row.total_queries = static_cast<std::uint64_t>(2 * rc.T);
        sum_row.wall_ms = g.wall_ms;
        summary += detail::summary_line(sum_row);
        continue;
      }

      Environment env = make_environment(rc, seed);
      RunLog log;
      AlgoConfig cfg;
      bool have_cfg = false;
      if (const auto variant = parse_variant(rc.algorithm)) {
        cfg = configure(*variant, rc.T, env.domain.diameter(),
                        std::max(env.grad_bound, 1e-9), env.smoothness, mode);
        have_cfg = true;
        log = run_universal(env, cfg, rc.T);
      } else {
        const double coeff = env.true_coeff > 0 ? env.true_coeff : 1.0;
        log = run_baseline(env, rc.algorithm, coeff, rc.baseline_gamma, rc.T);
      }
      if (have_cfg && !wrote_sidecar) {
        const std::string text = detail::config_text(cfg);
        detail::write_file(
            fs::path(rc.output_dir) /
                ("config_" + std::to_string(detail::fnv1a(text)) + ".txt"),
            text);
        wrote_sidecar = true;
      }

      std::vector<LossOracle> losses;
      losses.reserve(rc.T);
      for (std::int64_t t = 1; t <= rc.T; ++t) {
        losses.push_back(env.make_loss(t));
      }
      const auto regrets = compute_regret(log.records, losses, env.domain,
                                          rc.checkpoints, seed);
      detail::write_file(fs::path(rc.output_dir) /
                             ("run_" + rc.algorithm + "_" + rc.environment +
                              "_" + std::to_string(seed) + ".csv"),
                         detail::run_csv(log.records, regrets));

      const VariationReport rep = track_quantities(log.records, env, seed);
      detail::SummaryRow row;
      row.algo = rc.algorithm;
      row.env = rc.environment;
      row.seed = seed;
      row.final_regret = regrets.back().second;
      row.vbar_T = rep.vbar_T;
      row.vT = rep.v_T;
      row.fT = rep.f_T;
      row.wT = rep.w_T;
      row.total_queries = log.diag.total_queries;
      row.wall_ms = log.wall_ms;
      summary += detail::summary_line(row);
    }
    detail::write_file(fs::path(rc.output_dir) / "summary.csv", summary);
    return 0;
  } catch (const ContractError& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

/// Merges summary files into compare.csv with per-(algo, env) seed means and
/// standard deviations of the final regret.
inline int cli_compare(const std::vector<std::string>& summary_paths,
                       const std::string& output_dir) {
  namespace fs = std::filesystem;
  try {
    std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
    for (const auto& path : summary_paths) {
      std::ifstream in(path);
      if (!in) {
        std::cerr << "missing input: " << path << "\n";
        return 2;
      }
      std::string line;
      std::getline(in, line);  // header
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string algo, env, tok;
        std::getline(ss, algo, ',');
        std::getline(ss, env, ',');
        std::getline(ss, tok, ',');  // seed
        std::getline(ss, tok, ',');  // final_regret
        cells[{algo, env}].push_back(std::stod(tok));
      }
    }
    std::ostringstream out;
    out << "algo,env,n_seeds,mean_final_regret,std_final_regret\n";
    for (const auto& [key, vals] : cells) {
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= vals.size();
      double var = 0.0;
      for (double v : vals) var += sq(v - mean);
      const double stdev =
          vals.size() > 1 ? std::sqrt(var / (vals.size() - 1)) : 0.0;
      out << key.first << ',' << key.second << ',' << vals.size() << ','
          << format_g12(mean) << ',' << format_g12(stdev) << "\n";
    }
    fs::create_directories(output_dir);
    detail::write_file(fs::path(output_dir) / "compare.csv", out.str());
    return 0;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}

}  // namespace unigrad

#endif  // UNIGRAD_CLI_HPP_
