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

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ovrlogit/csv.hpp"
#include "ovrlogit/dataset.hpp"
#include "ovrlogit/error.hpp"
#include "ovrlogit/importance.hpp"
#include "ovrlogit/metrics.hpp"
#include "ovrlogit/ovr.hpp"
#include "ovrlogit/preprocess.hpp"
#include "ovrlogit/solvers.hpp"

namespace ovrlogit {

// One entry of the rank-consistency study: train `solver` (at C for l1) on
// the split drawn with `seed` and compare aggregate importance rankings.
struct ConsistencyRun {
  std::string label;
  SolverTag solver = SolverTag::kReference;
  double C = 0.1;
  std::uint64_t seed = 15;
};

// Parses "reference@1,l1:0.5@15,gd@2". The C value is only read for l1.
inline std::vector<ConsistencyRun> parse_consistency_runs(const std::string& text) {
  std::vector<ConsistencyRun> runs;
  for (auto field : csv::split_fields(text)) {
    if (field.empty()) continue;
    const auto at = field.find('@');
    require(at != std::string_view::npos, ErrorCode::kInvalidArgument,
            "consistency entry '" + std::string(field) + "' lacks '@seed'");
    auto solver_part = field.substr(0, at);
    const auto seed = csv::parse_integer(field.substr(at + 1));
    require(seed.has_value() && *seed >= 0, ErrorCode::kInvalidArgument,
            "bad seed in consistency entry '" + std::string(field) + "'");
    ConsistencyRun run;
    run.seed = static_cast<std::uint64_t>(*seed);
    const auto colon = solver_part.find(':');
    run.solver = parse_solver_tag(solver_part.substr(0, colon));
    if (colon != std::string_view::npos) {
      const auto c = csv::parse_double(solver_part.substr(colon + 1));
      require(c.has_value() && *c > 0.0, ErrorCode::kInvalidArgument,
              "bad C in consistency entry '" + std::string(field) + "'");
      run.C = *c;
    }
    run.label = std::string(field);
    runs.push_back(std::move(run));
  }
  return runs;
}

inline std::vector<ConsistencyRun> default_consistency_runs() {
  return parse_consistency_runs("reference@1,reference@2,reference@3,reference@15,l1:0.1@15,l1:0.5@15,l1:1@15");
}

struct RunConfig {
  std::filesystem::path data_path;
  std::string label_column = "target";
  std::uint64_t seed = 15;
  double test_fraction = 0.2;
  GdConfig gd;
  ReferenceConfig reference;
  L1Config l1;
  std::vector<SolverTag> solvers = {SolverTag::kGd, SolverTag::kReference, SolverTag::kL1};
  std::filesystem::path output_dir = "results";
  std::vector<double> c_grid = {0.01, 0.05, 0.1, 0.5, 1.0};
  std::vector<ConsistencyRun> consistency = default_consistency_runs();
  int subset_size = 5;
  CostModel cost;
  // Wall-clock timings change between runs, so they are opt-in.
  bool record_timings = false;
};

// Failure tagged with the pipeline stage that raised it.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const Error& cause)
      : Error(cause.code(), "[" + stage + "] " + cause.what()), stage_(std::move(stage)) {}
  PipelineError(std::string stage, ErrorCode code, const std::string& message)
      : Error(code, "[" + stage + "] " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

template <typename F>
auto run_stage(const std::string& stage, F&& body) {
  try {
    return body();
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(stage, e);
  } catch (const std::exception& e) {
    throw PipelineError(stage, ErrorCode::kIo, e.what());
  }
}

struct PreparedData {
  SplitPair split;
  Standardizer standardizer;
  LabeledDataset train;  // standardized
  LabeledDataset test;   // standardized
};

inline PreparedData standardize_split(SplitPair split) {
  auto standardizer = fit_standardizer(split.train);
  auto train = transform(standardizer, split.train);
  auto test = transform(standardizer, split.test);
  return PreparedData{std::move(split), std::move(standardizer), std::move(train), std::move(test)};
}

inline PreparedData prepare(const LabeledDataset& ds, double test_fraction, std::uint64_t seed) {
  return standardize_split(stratified_split(ds, test_fraction, seed));
}

// Per-class thresholded (p > 0.5) binary evaluation plus argmax accuracy.
struct Evaluation {
  BatchPrediction prediction;
  std::vector<ConfusionMatrix2> confusions;
  std::vector<MetricsBundle> per_class;
  MacroAverage macro;
  double ovr_accuracy = 0.0;
};

inline Evaluation evaluate(const OvrModel& model, const LabeledDataset& raw) {
  Evaluation ev;
  ev.prediction = predict_batch(model, raw.features());
  for (int k = 0; k < model.class_count(); ++k) {
    std::vector<int> truth;
    std::vector<int> predicted;
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
      truth.push_back(raw.labels()[static_cast<std::size_t>(i)] == k ? 1 : 0);
      predicted.push_back(ev.prediction.probabilities(i, k) > 0.5 ? 1 : 0);
    }
    ev.confusions.push_back(confusion(truth, predicted));
    ev.per_class.push_back(metrics_from_confusion(ev.confusions.back()));
  }
  ev.macro = macro_average(ev.per_class);
  ev.ovr_accuracy = accuracy(raw.labels(), ev.prediction.predicted);
  return ev;
}

inline SolverConfig solver_config(SolverTag tag, const RunConfig& cfg) {
  switch (tag) {
    case SolverTag::kGd: return cfg.gd;
    case SolverTag::kReference: return cfg.reference;
    case SolverTag::kL1: return cfg.l1;
  }
  fail(ErrorCode::kInvalidArgument, "unknown solver");
}

struct SolverRun {
  SolverTag tag;
  OvrModel model;
  Evaluation train;
  Evaluation test;
  double seconds = 0.0;
};

struct SweepRow {
  double C;
  double mean_retained;
  double mean_test_accuracy;
  double ovr_test_accuracy;
};

// L1 sparsity frontier over a C grid on one prepared split, sorted by C.
inline std::vector<SweepRow> sweep_c(const PreparedData& data, std::vector<double> grid, L1Config base) {
  require(!grid.empty(), ErrorCode::kInvalidArgument, "empty C grid");
  std::sort(grid.begin(), grid.end());
  std::vector<SweepRow> rows;
  for (double c : grid) {
    try {
      base.C = c;
      const auto model = train_ovr(data.train, data.standardizer, base);
      const auto ev = evaluate(model, data.split.test);
      double retained = 0.0;
      for (const auto& m : model.models()) retained += static_cast<double>(retained_features(m).size());
      rows.push_back({c, retained / model.class_count(), ev.macro.mean.accuracy, ev.ovr_accuracy});
    } catch (const Error& e) {
      throw Error(e.code(), "C=" + csv::format_fixed(c) + ": " + e.what());
    }
  }
  return rows;
}

inline std::vector<SweepRow> sweep_c(const RunConfig& cfg) {
  const auto ds = run_stage("load", [&] { return load_csv(cfg.data_path, cfg.label_column); });
  auto split = run_stage("split", [&] { return stratified_split(ds, cfg.test_fraction, cfg.seed); });
  const auto data = run_stage("standardize", [&] { return standardize_split(std::move(split)); });
  return run_stage("sweep", [&] { return sweep_c(data, cfg.c_grid, cfg.l1); });
}

struct ConsistencyResult {
  std::vector<std::string> labels;
  std::vector<Ranking> rankings;
  Matrix rho;
};

inline ConsistencyResult consistency_study(const LabeledDataset& ds, const RunConfig& cfg) {
  ConsistencyResult out;
  std::map<std::uint64_t, PreparedData> prepared;
  for (const auto& run : cfg.consistency) {
    auto it = prepared.find(run.seed);
    if (it == prepared.end()) it = prepared.emplace(run.seed, prepare(ds, cfg.test_fraction, run.seed)).first;
    SolverConfig config = solver_config(run.solver, cfg);
    if (auto* l1 = std::get_if<L1Config>(&config)) l1->C = run.C;
    try {
      const auto model = train_ovr(it->second.train, it->second.standardizer, config);
      out.rankings.push_back(build_importance(model).aggregate_ranking);
    } catch (const Error& e) {
      throw Error(e.code(), run.label + ": " + e.what());
    }
    out.labels.push_back(run.label);
  }
  const auto m = static_cast<Eigen::Index>(out.rankings.size());
  out.rho.resize(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      out.rho(a, b) = spearman_rho(out.rankings[static_cast<std::size_t>(a)], out.rankings[static_cast<std::size_t>(b)]);
    }
  }
  return out;
}

struct SubsetResult {
  std::vector<int> features;  // indices into the full feature list
  CostBenefit cost;
  // Reference solver retrained on the subset only.
  double measured_mean_test_accuracy = 0.0;
  double measured_ovr_test_accuracy = 0.0;
};

struct PipelineResult {
  RunConfig config;
  LabeledDataset dataset;
  PreparedData data;
  std::vector<SolverRun> runs;
  std::optional<SolverTag> importance_solver;
  std::optional<ImportanceReport> importance;
  std::vector<SparsityReport> sparsity;
  std::vector<SweepRow> sweep;
  std::optional<ConsistencyResult> consistency;
  std::optional<SubsetResult> subset;

  const SolverRun* find(SolverTag tag) const {
    for (const auto& r : runs) {
      if (r.tag == tag) return &r;
    }
    return nullptr;
  }
};

inline LabeledDataset select_columns(const LabeledDataset& ds, std::span<const int> columns) {
  Matrix x(ds.rows(), static_cast<Eigen::Index>(columns.size()));
  std::vector<std::string> names;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    x.col(static_cast<Eigen::Index>(c)) = ds.features().col(columns[c]);
    names.push_back(ds.feature_names()[static_cast<std::size_t>(columns[c])]);
  }
  return LabeledDataset(std::move(x), ds.labels(), std::move(names), ds.class_count());
}

// Everything except writing files. The importance source is the reference
// solver when it ran, else the first solver in run order.
inline PipelineResult compute_pipeline(const RunConfig& cfg) {
  if (cfg.solvers.empty()) throw PipelineError("config", ErrorCode::kInvalidArgument, "no solver selected");
  run_stage("config", [&] {
    cfg.gd.validate();
    cfg.reference.validate();
    cfg.l1.validate();
    require(cfg.subset_size >= 1, ErrorCode::kInvalidArgument, "subset size must be positive");
    return 0;
  });

  auto ds = run_stage("load", [&] { return load_csv(cfg.data_path, cfg.label_column); });
  auto split = run_stage("split", [&] { return stratified_split(ds, cfg.test_fraction, cfg.seed); });
  auto data = run_stage("standardize", [&] { return standardize_split(std::move(split)); });
  PipelineResult result{cfg, std::move(ds), std::move(data), {}, {}, {}, {}, {}, {}, {}};
  const auto& prepared = result.data;

  std::vector<SolverTag> order;
  for (auto tag : {SolverTag::kGd, SolverTag::kReference, SolverTag::kL1}) {
    if (std::find(cfg.solvers.begin(), cfg.solvers.end(), tag) != cfg.solvers.end()) order.push_back(tag);
  }
  for (auto tag : order) {
    const std::string stage = "train:" + std::string(to_string(tag));
    auto run = run_stage(stage, [&] {
      const auto start = std::chrono::steady_clock::now();
      auto model = train_ovr(prepared.train, prepared.standardizer, solver_config(tag, cfg));
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      return SolverRun{tag, std::move(model), {}, {}, elapsed.count()};
    });
    run_stage("metrics", [&] {
      run.train = evaluate(run.model, prepared.split.train);
      run.test = evaluate(run.model, prepared.split.test);
      return 0;
    });
    result.runs.push_back(std::move(run));
  }

  const SolverRun* source = result.find(SolverTag::kReference);
  if (source == nullptr) source = &result.runs.front();
  result.importance_solver = source->tag;
  result.importance = run_stage("importance", [&] { return build_importance(source->model); });

  if (const auto* l1 = result.find(SolverTag::kL1)) {
    result.sparsity = run_stage("sparsity", [&] {
      return sparsity_report(l1->model.models(), l1->model.feature_names());
    });
    if (!cfg.c_grid.empty()) {
      result.sweep = run_stage("sweep", [&] { return sweep_c(prepared, cfg.c_grid, cfg.l1); });
    }
  }

  if (!cfg.consistency.empty()) {
    result.consistency = run_stage("consistency", [&] { return consistency_study(result.dataset, cfg); });
  }

  result.subset = run_stage("cost", [&] {
    const int d = static_cast<int>(result.dataset.cols());
    const int size = std::min(cfg.subset_size, d);
    SubsetResult s;
    s.features.assign(result.importance->aggregate_ranking.begin(),
                      result.importance->aggregate_ranking.begin() + size);
    s.cost = cost_benefit(s.features, cfg.cost, d);
    const auto reduced = select_columns(result.dataset, s.features);
    const auto train_raw = reduced.subset(prepared.split.train_indices);
    const auto test_raw = reduced.subset(prepared.split.test_indices);
    const auto scaler = fit_standardizer(train_raw);
    const auto model = train_ovr(transform(scaler, train_raw), scaler, cfg.reference);
    const auto ev = evaluate(model, test_raw);
    s.measured_mean_test_accuracy = ev.macro.mean.accuracy;
    s.measured_ovr_test_accuracy = ev.ovr_accuracy;
    return s;
  });
  return result;
}

}  // namespace ovrlogit
