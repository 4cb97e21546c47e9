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

#include <string>
#include <vector>

#include "CLI11.hpp"
#include "unigrad/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"universal gradient-variation online learning benchmark"};
  app.require_subcommand(1);

  unigrad::RunConfig rc;
  std::string seeds_text = "1";
  auto* run = app.add_subcommand("run", "execute one algorithm/environment");
  run->add_option("--algo", rc.algorithm,
                  "correct | bregman | correct-pp | bregman-pp | "
                  "anytime-bregman-pp | game-correct-pp | oogd-sc | oons | "
                  "oogd-convex | ogd-sqrt")
      ->required();
  run->add_option("--env", rc.environment,
                  "drifting-linear | sc-quadratic | logistic | hinge | "
                  "hinge-l2 | sea-linear | sea-quadratic | game-bilinear | "
                  "game-scsc")
      ->required();
  run->add_option("--T", rc.T, "time horizon");
  run->add_option("--seeds", seeds_text, "e.g. 1..5 or 1,2,3");
  run->add_option("--dataset", rc.dataset_path, "LIBSVM-format file");
  run->add_option("--mode", rc.mode, "gv | smallloss")
      ->check(CLI::IsMember({"gv", "smallloss"}));
  run->add_option("--out", rc.output_dir, "output directory");
  run->add_option("--checkpoints", rc.checkpoints, "regret checkpoint count");
  run->add_option("--dim", rc.dimension, "synthetic feature dimension");
  run->add_option("--baseline-gamma", rc.baseline_gamma,
                  "gamma_bottom for the specialized baselines");
  run->add_option("--sea-sigma", rc.sea_sigma, "SEA noise magnitude");

  std::vector<std::string> compare_inputs;
  std::string compare_out = ".";
  auto* cmp = app.add_subcommand("compare", "merge summary files");
  cmp->add_option("--inputs", compare_inputs, "summary.csv paths")->required();
  cmp->add_option("--out", compare_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    rc.seeds = unigrad::parse_seeds(seeds_text);
    return unigrad::cli_run(rc);
  }
  return unigrad::cli_compare(compare_inputs, compare_out);
}
