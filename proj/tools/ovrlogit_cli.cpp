/*
 * Copyright 2026 The ovrlogit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line runner for the one-vs-rest logistic regression pipeline.
//
// Usage:
//   ovrlogit --data data/wine.csv --out results
//   ovrlogit --config run.ini --seed 3
//   ovrlogit --data data/wine.csv --sweep-only --c-grid 0.1,0.5,1
//
// Config files hold flat `key = value` lines using the long flag names
// (e.g. `seed = 15`, `c-grid = 0.01,0.1,1`); flags on the command line win.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ovrlogit/ovrlogit.hpp"

namespace {

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  for (auto field : ovrlogit::csv::split_fields(text)) {
    if (field.empty()) continue;
    const auto value = ovrlogit::csv::parse_double(field);
    ovrlogit::require(value.has_value() && *value > 0.0, ovrlogit::ErrorCode::kInvalidArgument,
                      "bad C value '" + std::string(field) + "'");
    grid.push_back(*value);
  }
  return grid;
}

std::vector<ovrlogit::SolverTag> parse_solvers(const std::string& text) {
  std::vector<ovrlogit::SolverTag> solvers;
  for (auto field : ovrlogit::csv::split_fields(text)) {
    if (!field.empty()) solvers.push_back(ovrlogit::parse_solver_tag(field));
  }
  return solvers;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-vs-rest logistic regression pipeline"};
  app.set_config("--config", "", "Flat key = value config file; flags override it");

  ovrlogit::RunConfig cfg;
  std::string data_path;
  std::string out_dir = "results";
  std::string solvers = "gd,reference,l1";
  std::string c_grid = "0.01,0.05,0.1,0.5,1";
  std::string consistency = "reference@1,reference@2,reference@3,reference@15,l1:0.1@15,l1:0.5@15,l1:1@15";
  std::uint64_t seed = cfg.seed;
  bool sweep_only = false;

  app.add_option("--data", data_path, "Input CSV with a header row")->required();
  app.add_option("--label-column", cfg.label_column, "Integer class label column")->capture_default_str();
  app.add_option("--seed", seed, "Split seed")->capture_default_str();
  app.add_option("--test-fraction", cfg.test_fraction, "Held-out fraction in (0, 1)")->capture_default_str();
  app.add_option("--solvers", solvers, "Comma list from gd,reference,l1")->capture_default_str();
  app.add_option("--lr", cfg.gd.learning_rate, "Gradient descent learning rate")->capture_default_str();
  app.add_option("--iters", cfg.gd.iterations, "Gradient descent iterations")->capture_default_str();
  app.add_option("--c", cfg.l1.C, "Inverse L1 strength")->capture_default_str();
  app.add_option("--c-grid", c_grid, "Comma list of C values for the sparsity sweep")->capture_default_str();
  app.add_option("--consistency", consistency, "Rank-consistency runs, solver[:C]@seed, comma separated")
      ->capture_default_str();
  app.add_option("--subset-size", cfg.subset_size, "Features kept for the cost-benefit panel")
      ->capture_default_str();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_flag("--timings", cfg.record_timings, "Append wall-clock training times to summary.txt");
  app.add_flag("--sweep-only", sweep_only, "Print the C sweep table to stdout and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.seed = seed;
    cfg.data_path = data_path;
    cfg.output_dir = out_dir;
    ovrlogit::run_stage("config", [&] {
      cfg.solvers = parse_solvers(solvers);
      cfg.c_grid = parse_grid(c_grid);
      cfg.consistency = ovrlogit::parse_consistency_runs(consistency);
      return 0;
    });
    if (sweep_only) {
      std::cout << ovrlogit::format_sweep(ovrlogit::sweep_c(cfg));
      return 0;
    }
    const auto result = ovrlogit::run_pipeline(cfg);
    std::cout << "wrote results to " << cfg.output_dir.string() << '\n';
    for (const auto& run : result.runs) {
      std::cout << "  " << ovrlogit::to_string(run.tag)
                << ": mean test accuracy " << ovrlogit::csv::format_fixed(run.test.macro.mean.accuracy) << '\n';
    }
  } catch (const ovrlogit::Error& e) {
    std::cerr << "ovrlogit: error " << e.what() << '\n';
    return 1;
  }
  return 0;
}
