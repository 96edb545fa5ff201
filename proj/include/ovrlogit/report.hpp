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

#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <system_error>

#include "ovrlogit/csv.hpp"
#include "ovrlogit/pipeline.hpp"

namespace ovrlogit {

using csv::format_fixed;
using csv::format_optional;

inline std::string format_loss_trace(const FittedBinaryModel& m) {
  std::string out = "iteration,loss\n";
  for (const auto& point : m.loss_trace) {
    out += std::to_string(point.iteration) + ',' + format_fixed(point.loss) + '\n';
  }
  return out;
}

inline std::string format_model(const FittedBinaryModel& m, const std::vector<std::string>& names) {
  std::string out = "feature_name,weight\n";
  for (Eigen::Index j = 0; j < m.weights.size(); ++j) {
    out += names[static_cast<std::size_t>(j)] + ',' + format_fixed(m.weights[j]) + '\n';
  }
  out += "bias," + format_fixed(m.bias) + '\n';
  return out;
}

// row_index refers to the row in the source data file.
inline std::string format_predictions(const Evaluation& ev, const SplitPair& split) {
  std::string out = "row_index,true_class,predicted_class";
  const auto k_count = ev.prediction.probabilities.cols();
  for (Eigen::Index k = 0; k < k_count; ++k) out += ",prob_" + std::to_string(k);
  out += '\n';
  for (std::size_t i = 0; i < split.test_indices.size(); ++i) {
    out += std::to_string(split.test_indices[i]) + ',' + std::to_string(split.test.labels()[i]) + ',' +
           std::to_string(ev.prediction.predicted[i]);
    for (Eigen::Index k = 0; k < k_count; ++k) {
      out += ',' + format_fixed(ev.prediction.probabilities(static_cast<Eigen::Index>(i), k));
    }
    out += '\n';
  }
  return out;
}

inline std::string format_confusion(const ConfusionMatrix2& c) {
  return "tp,tn,fp,fn\n" + std::to_string(c.tp) + ',' + std::to_string(c.tn) + ',' + std::to_string(c.fp) +
         ',' + std::to_string(c.fn) + '\n';
}

inline std::string metrics_row(std::string_view solver, const std::string& cls, const MetricsBundle& m) {
  return std::string(solver) + ',' + cls + ',' + format_fixed(m.accuracy) + ',' + format_optional(m.precision) +
         ',' + format_optional(m.recall) + ',' + format_optional(m.f1) + '\n';
}

inline std::string format_metrics_summary(const std::vector<SolverRun>& runs) {
  std::string out = "solver,class,accuracy,precision,recall,f1\n";
  for (const auto& run : runs) {
    for (std::size_t k = 0; k < run.test.per_class.size(); ++k) {
      out += metrics_row(to_string(run.tag), std::to_string(k), run.test.per_class[k]);
    }
    out += metrics_row(to_string(run.tag), "macro", run.test.macro.mean);
  }
  return out;
}

inline std::string format_importance_per_class(const ImportanceReport& r) {
  std::string out = "class,rank,feature_name,abs_weight,sign\n";
  for (std::size_t k = 0; k < r.class_rankings.size(); ++k) {
    for (std::size_t i = 0; i < r.class_rankings[k].size(); ++i) {
      const int j = r.class_rankings[k][i];
      out += std::to_string(k) + ',' + std::to_string(i + 1) + ',' + r.feature_names[static_cast<std::size_t>(j)] +
             ',' + format_fixed(r.per_class(static_cast<Eigen::Index>(k), j)) + ',' +
             std::to_string(r.signs(static_cast<Eigen::Index>(k), j)) + '\n';
    }
  }
  return out;
}

inline std::string format_importance_aggregate(const ImportanceReport& r) {
  std::string out = "rank,feature_name,aggregate_importance\n";
  for (std::size_t i = 0; i < r.aggregate_ranking.size(); ++i) {
    const int j = r.aggregate_ranking[i];
    out += std::to_string(i + 1) + ',' + r.feature_names[static_cast<std::size_t>(j)] + ',' +
           format_fixed(r.aggregate[j]) + '\n';
  }
  return out;
}

inline std::string format_sparsity(const std::vector<SparsityReport>& reports) {
  std::string out = "class,retained,zeroed,retention_fraction,top_feature,top_abs_weight,retained_features\n";
  for (const auto& r : reports) {
    std::string names;
    for (const auto& name : r.retained_names) names += (names.empty() ? "" : ";") + name;
    out += std::to_string(r.class_index) + ',' + std::to_string(r.retained) + ',' + std::to_string(r.zeroed) + ',' +
           format_fixed(r.retention_fraction) + ',' + r.top_feature.value_or("NA") + ',' +
           (r.top_feature ? format_fixed(r.top_magnitude) : std::string("NA")) + ',' + names + '\n';
  }
  return out;
}

inline std::string format_sweep(const std::vector<SweepRow>& rows) {
  std::string out = "C,mean_retained,mean_test_accuracy,ovr_test_accuracy\n";
  for (const auto& r : rows) {
    out += format_fixed(r.C) + ',' + format_fixed(r.mean_retained) + ',' + format_fixed(r.mean_test_accuracy) +
           ',' + format_fixed(r.ovr_test_accuracy) + '\n';
  }
  return out;
}

inline std::string format_consistency(const ConsistencyResult& c) {
  std::string out = "config";
  for (const auto& label : c.labels) out += ',' + label;
  out += '\n';
  for (std::size_t a = 0; a < c.labels.size(); ++a) {
    out += c.labels[a];
    for (std::size_t b = 0; b < c.labels.size(); ++b) {
      out += ',' + format_fixed(c.rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
    }
    out += '\n';
  }
  return out;
}

inline std::string format_cost_benefit(const SubsetResult& s, const std::vector<std::string>& names,
                                       const CostModel& cm) {
  std::ostringstream out;
  out << "selected features (" << s.cost.selected << " of " << s.cost.baseline << "):";
  for (int j : s.features) out << ' ' << names[static_cast<std::size_t>(j)];
  out << '\n'
      << "cost per assay: " << format_fixed(cm.cost_per_assay, 2) << '\n'
      << "panel cost: " << format_fixed(s.cost.panel_cost, 2) << " (full panel " << format_fixed(s.cost.baseline_cost, 2)
      << ")\n"
      << "saving per sample: " << format_fixed(s.cost.saving, 2) << '\n'
      << "complexity reduction: " << format_fixed(100.0 * s.cost.complexity_reduction, 2) << "%\n"
      << "estimated minutes: " << format_fixed(s.cost.minutes, 2) << " (full panel "
      << format_fixed(cm.minutes_full_panel, 2) << ")\n"
      << "time reduction: " << format_fixed(100.0 * s.cost.time_reduction, 2) << "%\n"
      << "measured mean test accuracy on subset (reference solver): "
      << format_fixed(s.measured_mean_test_accuracy) << '\n'
      << "measured ovr test accuracy on subset (reference solver): " << format_fixed(s.measured_ovr_test_accuracy)
      << '\n';
  return out.str();
}

inline std::string format_summary(const PipelineResult& r) {
  const auto& cfg = r.config;
  const auto& split = r.data.split;
  std::ostringstream out;
  auto counts = [](const LabeledDataset& ds) {
    std::string s;
    for (int c : ds.class_counts()) s += (s.empty() ? "" : "/") + std::to_string(c);
    return s;
  };
  out << "ovrlogit run summary\n\n"
      << "data: n=" << r.dataset.rows() << " d=" << r.dataset.cols() << " classes=" << r.dataset.class_count()
      << " counts=" << counts(r.dataset) << '\n'
      << "split: seed=" << cfg.seed << " test_fraction=" << format_fixed(cfg.test_fraction) << " train="
      << split.train.rows() << " (" << counts(split.train) << ") test=" << split.test.rows() << " ("
      << counts(split.test) << ")\n";

  out << "\nperformance (per-class binary classifiers, threshold 0.5)\n";
  out << "solver     class  train_acc  test_acc   precision  recall     f1\n";
  for (const auto& run : r.runs) {
    for (std::size_t k = 0; k < run.test.per_class.size(); ++k) {
      const auto& m = run.test.per_class[k];
      out << std::string(to_string(run.tag)) << std::string(11 - to_string(run.tag).size(), ' ') << k << "      "
          << format_fixed(run.train.per_class[k].accuracy) << "   " << format_fixed(m.accuracy) << "   "
          << format_optional(m.precision) << "   " << format_optional(m.recall) << "   " << format_optional(m.f1)
          << '\n';
    }
    out << "  mean train accuracy " << format_fixed(run.train.macro.mean.accuracy) << ", mean test accuracy "
        << format_fixed(run.test.macro.mean.accuracy) << ", argmax test accuracy "
        << format_fixed(run.test.ovr_accuracy) << '\n';
    if (run.tag == SolverTag::kGd) {
      out << "  final losses:";
      for (const auto& m : run.model.models()) {
        out << ' ' << (m.loss_trace.empty() ? std::string("NA") : format_fixed(m.loss_trace.back().loss));
      }
      out << '\n';
    }
  }

  if (r.importance) {
    out << "\nfeature importance (" << to_string(*r.importance_solver) << " solver, |weight|)\n";
    for (std::size_t k = 0; k < r.importance->class_rankings.size(); ++k) {
      out << "  class " << k << " top-3:";
      for (const auto& f : top_k(*r.importance, static_cast<int>(k), 3)) {
        out << ' ' << f.name << " (" << format_fixed(f.magnitude, 2) << (f.sign < 0 ? ", -" : ", +") << ')';
      }
      out << '\n';
    }
    out << "  aggregate top-5:";
    const int shown = std::min(5, static_cast<int>(r.importance->aggregate.size()));
    for (const auto& f : top_k(*r.importance, std::nullopt, shown)) {
      out << ' ' << f.name << " (" << format_fixed(f.magnitude, 2) << ')';
    }
    out << '\n';
  }

  if (!r.sparsity.empty()) {
    out << "\nl1 sparsity (C=" << format_fixed(cfg.l1.C) << ")\n";
    for (const auto& s : r.sparsity) {
      out << "  class " << s.class_index << ": retained " << s.retained << ", zeroed " << s.zeroed << ", sparsity "
          << format_fixed(100.0 * (1.0 - s.retention_fraction), 2) << "%, top " << s.top_feature.value_or("NA");
      if (s.top_feature) out << " (" << format_fixed(s.top_magnitude, 2) << ')';
      out << '\n';
    }
  }
  if (!r.sweep.empty()) {
    out << "\nC sweep: C, mean retained, mean test accuracy\n";
    for (const auto& row : r.sweep) {
      out << "  " << format_fixed(row.C) << "  " << format_fixed(row.mean_retained, 2) << "  "
          << format_fixed(row.mean_test_accuracy) << '\n';
    }
  }
  if (r.consistency) {
    double lowest = 1.0;
    for (Eigen::Index a = 0; a < r.consistency->rho.rows(); ++a) {
      for (Eigen::Index b = 0; b < a; ++b) lowest = std::min(lowest, r.consistency->rho(a, b));
    }
    out << "\nrank consistency: " << r.consistency->labels.size() << " configurations, minimum pairwise rho "
        << format_fixed(lowest) << '\n';
  }
  if (r.subset) {
    out << "\ncost-benefit: " << r.subset->cost.selected << " of " << r.subset->cost.baseline
        << " features, saving " << format_fixed(r.subset->cost.saving, 2) << " per sample, complexity reduction "
        << format_fixed(100.0 * r.subset->cost.complexity_reduction, 2) << "%, "
        << format_fixed(r.subset->cost.minutes, 2) << " minutes\n";
  }
  if (cfg.record_timings) {
    out << "\ntimings (seconds)\n";
    for (const auto& run : r.runs) out << "  " << to_string(run.tag) << ": " << run.seconds << '\n';
  }
  return out.str();
}

// Every output file keyed by its path relative to the output directory.
inline std::map<std::string, std::string> format_artifacts(const PipelineResult& r) {
  std::map<std::string, std::string> files;
  const auto& split = r.data.split;
  const auto& names = r.dataset.feature_names();
  files["part_1/train_indices.csv"] = format_index_manifest(split.train_indices);
  files["part_1/test_indices.csv"] = format_index_manifest(split.test_indices);
  files["part_1/scaler_params.csv"] = format_scaler_params(r.data.standardizer, names);

  for (const auto& run : r.runs) {
    const std::string tag(to_string(run.tag));
    const std::string dir = run.tag == SolverTag::kGd ? "part_2/" : run.tag == SolverTag::kReference ? "part_3/" : "part_4/";
    for (int k = 0; k < run.model.class_count(); ++k) {
      const auto& m = run.model.model(k);
      files[dir + "model_" + tag + "_class" + std::to_string(k) + ".csv"] = format_model(m, names);
      files[dir + "confusion_" + tag + "_class" + std::to_string(k) + ".csv"] =
          format_confusion(run.test.confusions[static_cast<std::size_t>(k)]);
      if (run.tag == SolverTag::kGd) {
        files[dir + "loss_trace_class" + std::to_string(k) + ".csv"] = format_loss_trace(m);
      }
    }
    files[dir + "predictions_" + tag + ".csv"] = format_predictions(run.test, split);
  }
  files["part_3/metrics_summary.csv"] = format_metrics_summary(r.runs);
  if (!r.sparsity.empty()) files["part_4/sparsity_report.csv"] = format_sparsity(r.sparsity);
  if (!r.sweep.empty()) files["part_4/c_sweep.csv"] = format_sweep(r.sweep);
  if (r.importance) {
    files["part_5/importance_per_class.csv"] = format_importance_per_class(*r.importance);
    files["part_5/importance_aggregate.csv"] = format_importance_aggregate(*r.importance);
  }
  if (r.consistency) files["part_5/consistency_matrix.csv"] = format_consistency(*r.consistency);
  if (r.subset) files["part_5/cost_benefit.txt"] = format_cost_benefit(*r.subset, names, r.config.cost);
  files["summary.txt"] = format_summary(r);
  return files;
}

// Writes all files into a staging directory beside `out`, then moves them
// into place. On failure the staging directory is removed and `out` is left
// as it was.
inline void write_artifacts(const std::map<std::string, std::string>& files, const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  const fs::path target = fs::absolute(out);
  const fs::path staging = target.parent_path() / ("." + target.filename().string() + ".partial");
  std::error_code ec;
  fs::remove_all(staging, ec);
  try {
    for (const auto& [rel, contents] : files) csv::write_text(staging / rel, contents);
    for (const auto& [rel, contents] : files) {
      const fs::path dest = target / rel;
      fs::create_directories(dest.parent_path());
      fs::rename(staging / rel, dest);
    }
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  fs::remove_all(staging, ec);
}

inline PipelineResult run_pipeline(const RunConfig& cfg) {
  auto result = compute_pipeline(cfg);
  const auto files = run_stage("report", [&] { return format_artifacts(result); });
  run_stage("write", [&] {
    write_artifacts(files, cfg.output_dir);
    return 0;
  });
  return result;
}

}  // namespace ovrlogit
