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

// Acceptance suite for the Wine experiment. Prints one PASS/FAIL line per
// criterion and exits non-zero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "../oracles.hpp"
#include "ovrlogit/ovrlogit.hpp"

namespace {

using namespace ovrlogit;
namespace fs = std::filesystem;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v, int decimals = 4) { return csv::format_fixed(v, decimals); }

const LabeledDataset& wine() {
  static const LabeledDataset ds = load_csv(OVRLOGIT_WINE_CSV);
  return ds;
}

RunConfig wine_config() {
  RunConfig cfg;
  cfg.data_path = OVRLOGIT_WINE_CSV;
  return cfg;
}

// The default experiment: seed 15, 20% test, every solver.
const PipelineResult& experiment() {
  static const PipelineResult r = compute_pipeline(wine_config());
  return r;
}

const SolverRun& run_of(SolverTag tag) { return *experiment().find(tag); }

int zeroed_total(const OvrModel& m) {
  int zeroed = 0;
  for (const auto& b : m.models()) zeroed += static_cast<int>(b.weights.size() - retained_features(b).size());
  return zeroed;
}

Outcome gd_convergence() {
  const double target[] = {0.3664, 0.4129, 0.3498};
  bool pass = true;
  std::string losses;
  for (int k = 0; k < 3; ++k) {
    const auto& trace = run_of(SolverTag::kGd).model.model(k).loss_trace;
    if (trace.empty()) return {false, "empty loss trace"};
    const double final_loss = trace.back().loss;
    pass &= trace.back().iteration == 10000;
    pass &= std::abs(final_loss - target[k]) <= 0.15;
    pass &= std::abs(trace.front().loss - std::log(2.0)) <= 1e-12;
    for (std::size_t i = 1; i < trace.size(); ++i) pass &= trace[i].loss <= trace[i - 1].loss + 1e-9;
    losses += (k ? " / " : "") + fmt(final_loss);
  }
  return {pass, "final losses " + losses + " (targets 0.3664 / 0.4129 / 0.3498 +-0.15), traces non-increasing, start ln 2"};
}

Outcome reference_quality() {
  const auto& run = run_of(SolverTag::kReference);
  bool pass = true;
  std::string train;
  for (std::size_t k = 0; k < run.train.per_class.size(); ++k) {
    pass &= run.train.per_class[k].accuracy == 1.0;
    train += (k ? " / " : "") + fmt(run.train.per_class[k].accuracy);
  }
  const double test = run.test.macro.mean.accuracy;
  pass &= test >= 0.94;
  return {pass, "train accuracy " + train + ", mean test accuracy " + fmt(test) + " (>= 0.94)"};
}

Outcome gap_direction() {
  const double gd = run_of(SolverTag::kGd).test.macro.mean.accuracy;
  const double ref = run_of(SolverTag::kReference).test.macro.mean.accuracy;
  return {gd <= ref && gd >= 0.85, "gd " + fmt(gd) + " <= reference " + fmt(ref) + ", gd >= 0.85"};
}

Outcome l1_sparsity() {
  const int target[] = {4, 6, 5};
  const auto& sparsity = experiment().sparsity;
  bool pass = sparsity.size() == 3;
  std::string counts;
  for (std::size_t k = 0; k < sparsity.size(); ++k) {
    pass &= std::abs(sparsity[k].retained - target[k]) <= 2;
    counts += (k ? " / " : "") + std::to_string(sparsity[k].retained);
  }
  const auto top0 = sparsity.at(0).top_feature.value_or("none");
  const auto top1 = sparsity.at(1).top_feature.value_or("none");
  pass &= top0 == "proline" && top1 == "color_intensity";
  return {pass, "retained " + counts + " (targets 4 / 6 / 5 +-2), top class 0 " + top0 + ", top class 1 " + top1};
}

Outcome accuracy_sparsity_tradeoff() {
  const double l1 = run_of(SolverTag::kL1).test.macro.mean.accuracy;
  const double ref = run_of(SolverTag::kReference).test.macro.mean.accuracy;
  const int zeroed_l1 = zeroed_total(run_of(SolverTag::kL1).model);
  const int zeroed_ref = zeroed_total(run_of(SolverTag::kReference).model);
  const double gap = 100.0 * std::abs(ref - l1);
  return {gap <= 8.0 && zeroed_l1 > zeroed_ref, "accuracy gap " + fmt(gap, 2) + " pp (<= 8), zeroed l1 " +
                                                    std::to_string(zeroed_l1) + " > reference " +
                                                    std::to_string(zeroed_ref)};
}

Outcome aggregate_importance() {
  const auto& report = *experiment().importance;
  std::set<std::string> top3;
  std::string listed;
  for (const auto& f : top_k(report, std::nullopt, 3)) {
    top3.insert(f.name);
    listed += (listed.empty() ? "" : ", ") + f.name;
  }
  const std::set<std::string> expected = {"color_intensity", "proline", "alcohol"};
  const auto class1 = top_k(report, 1, 1)[0].name;
  return {top3 == expected && class1 == "color_intensity",
          "top-3 {" + listed + "} vs {color_intensity, proline, alcohol}, class 1 top-1 " + class1};
}

Outcome consistency() {
  auto cfg = wine_config();
  cfg.consistency = parse_consistency_runs("reference@1,reference@2,reference@3,reference@15");
  const auto c = consistency_study(wine(), cfg);
  double lowest = 1.0;
  std::string worst;
  for (Eigen::Index a = 0; a < c.rho.rows(); ++a) {
    for (Eigen::Index b = 0; b < a; ++b) {
      if (c.rho(a, b) < lowest) {
        lowest = c.rho(a, b);
        worst = c.labels[static_cast<std::size_t>(b)] + " vs " + c.labels[static_cast<std::size_t>(a)];
      }
    }
  }
  return {lowest > 0.8, "minimum pairwise rho " + fmt(lowest) + " (" + worst + "), required > 0.8"};
}

Outcome oracle_equivalence() {
  const auto toy = testing::lattice_toy();
  const double c = 0.1;
  const double lambda = 1.0 / (c * static_cast<double>(toy.data.rows()));
  const auto m = train_l1(toy.data, L1Config{c, 100000, 1e-10});
  const double cd = testing::lattice_objective(toy, m.weights[0], m.weights[1], m.bias, lambda);
  const double gap = testing::grid_minimum(toy, lambda) - cd;

  std::mt19937_64 gen(20);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto n = 3 + static_cast<Eigen::Index>(gen() % 10);
    const auto d = 1 + static_cast<Eigen::Index>(gen() % 5);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) x(i, j) = normal(gen);
    }
    Vector y(n), w(d);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = static_cast<double>(gen() % 2);
    for (Eigen::Index j = 0; j < d; ++j) w[j] = 0.7 * normal(gen);
    const double b = 0.5 * normal(gen);
    const auto analytic = gd_gradient(x, y, sigmoid(((x * w).array() + b).matrix()));
    worst = std::max(worst, testing::gradient_relative_error(analytic, testing::finite_difference_gradient(x, y, w, b, 1e-6)));
  }
  std::ostringstream detail;
  detail << "grid objective gap " << gap << " (< 1e-4), worst gradient relative error " << worst << " (< 1e-5)";
  return {gap > -1e-12 && gap < 1e-4 && worst < 1e-5, detail.str()};
}

Outcome metrics_fidelity() {
  const auto& c = run_of(SolverTag::kReference).test.confusions.at(0);
  const auto [lo, hi] = wilson_interval(35, 36, 0.95);
  const bool pass = c.fn == 0 && c.fp <= 2 && std::abs(lo - 0.855) <= 0.02 && std::abs(hi - 0.999) <= 0.02;
  return {pass, "class 0 tp=" + std::to_string(c.tp) + " tn=" + std::to_string(c.tn) + " fp=" + std::to_string(c.fp) +
                    " fn=" + std::to_string(c.fn) + ", Wilson 35/36 [" + fmt(lo) + ", " + fmt(hi) +
                    "] vs [0.855, 0.999] +-0.02"};
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).generic_string()] = csv::read_text(entry.path());
  }
  return files;
}

Outcome property_suites() {
  std::vector<std::string> failed;
  auto check = [&](const std::string& name, const std::function<bool()>& body) {
    if (!body()) failed.push_back(name);
  };

  check("sigmoid symmetry", [] {
    for (double z = -30.0; z <= 30.0; z += 0.01) {
      if (std::abs(sigmoid(-z) - (1.0 - sigmoid(z))) > 1e-15) return false;
    }
    return true;
  });

  check("standardizer round-trip", [] {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      Matrix x(10, 4);
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = 100.0 * (j + 1) * normal(gen) + 50.0 * j;
      }
      const LabeledDataset ds(x, std::vector<int>(10, 0), {"a", "b", "c", "d"}, 2);
      const auto s = fit_standardizer(ds);
      const Matrix back = s.inverse_transform(s.transform(x));
      if ((back - x).cwiseAbs().maxCoeff() > 1e-12 * x.cwiseAbs().maxCoeff()) return false;
    }
    return true;
  });

  check("split partition and proportion", [] {
    const auto expected = stratified_test_counts(wine().class_counts(), 0.2);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto split = stratified_split(wine(), 0.2, seed);
      std::vector<std::size_t> all = split.train_indices;
      all.insert(all.end(), split.test_indices.begin(), split.test_indices.end());
      std::sort(all.begin(), all.end());
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i] != i) return false;
      }
      if (all.size() != 178 || split.test_indices.size() != 36) return false;
      const auto counts = split.test.class_counts();
      for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] != expected[k]) return false;
        if (std::abs(counts[k] - 0.2 * wine().class_counts()[k]) >= 1.0) return false;
      }
    }
    return true;
  });

  check("sparsity monotone in C", [] {
    const auto& data = experiment().data;
    std::vector<std::size_t> previous(3, 0);
    for (double c : {0.01, 0.05, 0.1, 0.5, 1.0}) {
      L1Config cfg;
      cfg.C = c;
      const auto m = train_ovr(data.train, data.standardizer, cfg);
      for (int k = 0; k < 3; ++k) {
        const auto kept = retained_features(m.model(k)).size();
        if (kept < previous[static_cast<std::size_t>(k)]) return false;
        previous[static_cast<std::size_t>(k)] = kept;
      }
    }
    return true;
  });

  check("ranking scale invariance", [] {
    const auto& report = *experiment().importance;
    for (double scale : {1e-6, 0.5, 3.0, 1e6}) {
      if (rank_descending(report.aggregate * scale) != report.aggregate_ranking) return false;
      if (spearman_rho(rank_descending(report.aggregate * scale), report.aggregate_ranking) != 1.0) return false;
    }
    return true;
  });

  check("byte-identical reruns", [] {
    const auto root = fs::temp_directory_path() / "ovrlogit_acceptance";
    fs::remove_all(root);
    auto cfg = wine_config();
    cfg.output_dir = root / "a";
    run_pipeline(cfg);
    cfg.output_dir = root / "b";
    run_pipeline(cfg);
    const bool same = read_tree(root / "a") == read_tree(root / "b");
    fs::remove_all(root);
    return same;
  });

  std::string detail = failed.empty() ? "all 6 property checks hold" : "failed:";
  for (const auto& f : failed) detail += " " + f + ";";
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"GD convergence", gd_convergence},
      {"reference solver quality", reference_quality},
      {"GD vs reference gap", gap_direction},
      {"L1 sparsity", l1_sparsity},
      {"accuracy-sparsity trade-off", accuracy_sparsity_tradeoff},
      {"aggregate importance", aggregate_importance},
      {"ranking consistency", consistency},
      {"oracle equivalence", oracle_equivalence},
      {"metrics fidelity", metrics_fidelity},
      {"property suites", property_suites},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, fn] : criteria) {
    Outcome o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "AC" << index++ << ' ' << name << ": " << o.detail << '\n';
  }
  std::cout << (10 - failures) << "/10 criteria passed\n";
  return failures == 0 ? 0 : 1;
}
