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
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ovrlogit/error.hpp"
#include "ovrlogit/ovr.hpp"
#include "ovrlogit/solvers.hpp"

namespace ovrlogit {

using Ranking = std::vector<int>;

// Indices ordered by descending value; equal values keep ascending index order.
inline Ranking rank_descending(const Vector& values) {
  Ranking order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] > values[b]; });
  return order;
}

struct ImportanceReport {
  Matrix per_class;          // K x d, |w_kj|
  Eigen::MatrixXi signs;     // K x d, sign(w_kj) in {-1, 0, 1}
  Vector aggregate;          // d, column sums of per_class
  std::vector<Ranking> class_rankings;
  Ranking aggregate_ranking;
  std::vector<std::string> feature_names;
};

inline ImportanceReport build_importance(const OvrModel& m) {
  ImportanceReport r;
  const auto k_count = static_cast<Eigen::Index>(m.class_count());
  const auto d = m.dimension();
  r.per_class.resize(k_count, d);
  r.signs.resize(k_count, d);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const Vector& w = m.model(static_cast<int>(k)).weights;
    for (Eigen::Index j = 0; j < d; ++j) {
      r.per_class(k, j) = std::abs(w[j]);
      r.signs(k, j) = (w[j] > 0.0) - (w[j] < 0.0);
    }
    r.class_rankings.push_back(rank_descending(r.per_class.row(k).transpose()));
  }
  r.aggregate = r.per_class.colwise().sum().transpose();
  r.aggregate_ranking = rank_descending(r.aggregate);
  r.feature_names = m.feature_names();
  return r;
}

struct RankedFeature {
  std::string name;
  double magnitude;
  int sign;  // 0 for aggregate entries
};

// class_index empty selects the aggregate ranking.
inline std::vector<RankedFeature> top_k(const ImportanceReport& report, std::optional<int> class_index,
                                        int k) {
  const auto d = static_cast<int>(report.aggregate.size());
  require(k >= 1 && k <= d, ErrorCode::kInvalidArgument,
          "k must lie in [1, " + std::to_string(d) + "], got " + std::to_string(k));
  std::vector<RankedFeature> out;
  if (class_index) {
    require(*class_index >= 0 && *class_index < static_cast<int>(report.class_rankings.size()),
            ErrorCode::kInvalidArgument, "class index out of range");
    const auto& ranking = report.class_rankings[static_cast<std::size_t>(*class_index)];
    for (int i = 0; i < k; ++i) {
      const int j = ranking[static_cast<std::size_t>(i)];
      out.push_back({report.feature_names[static_cast<std::size_t>(j)], report.per_class(*class_index, j),
                     report.signs(*class_index, j)});
    }
  } else {
    for (int i = 0; i < k; ++i) {
      const int j = report.aggregate_ranking[static_cast<std::size_t>(i)];
      out.push_back({report.feature_names[static_cast<std::size_t>(j)], report.aggregate[j], 0});
    }
  }
  return out;
}

struct SparsityReport {
  int class_index = 0;
  int retained = 0;
  int zeroed = 0;
  double retention_fraction = 0.0;
  std::vector<std::string> retained_names;
  std::optional<std::string> top_feature;
  double top_magnitude = 0.0;
};

inline std::vector<SparsityReport> sparsity_report(std::span<const FittedBinaryModel> models,
                                                   const std::vector<std::string>& feature_names,
                                                   double threshold = kDefaultZeroThreshold) {
  std::vector<SparsityReport> out;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto& m = models[k];
    require(m.solver == SolverTag::kL1, ErrorCode::kWrongSolver,
            "sparsity report needs l1 models, class " + std::to_string(k) + " is " +
                std::string(to_string(m.solver)));
    require(static_cast<std::size_t>(m.weights.size()) == feature_names.size(),
            ErrorCode::kDimensionMismatch, "feature name count does not match model");
    SparsityReport r;
    r.class_index = static_cast<int>(k);
    const auto kept = retained_features(m, threshold);
    r.retained = static_cast<int>(kept.size());
    r.zeroed = static_cast<int>(m.weights.size()) - r.retained;
    r.retention_fraction = static_cast<double>(r.retained) / static_cast<double>(m.weights.size());
    for (int j : kept) {
      r.retained_names.push_back(feature_names[static_cast<std::size_t>(j)]);
      if (!r.top_feature || std::abs(m.weights[j]) > r.top_magnitude) {
        r.top_feature = feature_names[static_cast<std::size_t>(j)];
        r.top_magnitude = std::abs(m.weights[j]);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

inline std::vector<long> positions_of(const Ranking& ranking) {
  std::vector<long> position(ranking.size(), -1);
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const int j = ranking[i];
    require(j >= 0 && static_cast<std::size_t>(j) < ranking.size() && position[static_cast<std::size_t>(j)] < 0,
            ErrorCode::kInvalidArgument, "ranking is not a permutation");
    position[static_cast<std::size_t>(j)] = static_cast<long>(i);
  }
  return position;
}

}  // namespace detail

// Spearman correlation of two strict rankings (orderings of 0..d-1):
// 1 - 6 sum(delta^2) / (d (d^2 - 1)).
inline double spearman_rho(const Ranking& a, const Ranking& b) {
  require(a.size() == b.size(), ErrorCode::kDimensionMismatch, "rankings differ in length");
  require(a.size() >= 2, ErrorCode::kInvalidArgument, "rankings need at least 2 entries");
  const auto pa = detail::positions_of(a);
  const auto pb = detail::positions_of(b);
  long sum_sq = 0;
  for (std::size_t j = 0; j < pa.size(); ++j) {
    const long delta = pa[j] - pb[j];
    sum_sq += delta * delta;
  }
  const double d = static_cast<double>(a.size());
  return 1.0 - 6.0 * static_cast<double>(sum_sq) / (d * (d * d - 1.0));
}

// Assay cost and panel time. Time is linear through (full panel size,
// minutes_full_panel) and (reduced_anchor_features, minutes_reduced_anchor).
struct CostModel {
  double cost_per_assay = 10.0;
  double minutes_full_panel = 45.0;
  int reduced_anchor_features = 5;
  double minutes_reduced_anchor = 20.0;
};

struct CostBenefit {
  int selected = 0;
  int baseline = 0;
  double panel_cost = 0.0;
  double baseline_cost = 0.0;
  double saving = 0.0;
  double complexity_reduction = 0.0;
  double minutes = 0.0;
  double time_reduction = 0.0;
};

inline double estimate_minutes(int features, const CostModel& cm, int baseline_d) {
  if (baseline_d == cm.reduced_anchor_features) return cm.minutes_full_panel;
  const double slope = (cm.minutes_full_panel - cm.minutes_reduced_anchor) /
                       static_cast<double>(baseline_d - cm.reduced_anchor_features);
  return cm.minutes_reduced_anchor + slope * static_cast<double>(features - cm.reduced_anchor_features);
}

inline CostBenefit cost_benefit(std::span<const int> selected, const CostModel& cm, int baseline_d) {
  require(!selected.empty(), ErrorCode::kInvalidArgument, "empty feature selection");
  require(cm.cost_per_assay > 0.0 && cm.minutes_full_panel > 0.0 && cm.minutes_reduced_anchor > 0.0 &&
              cm.reduced_anchor_features > 0,
          ErrorCode::kInvalidArgument, "cost model values must be positive");
  const std::set<int> unique(selected.begin(), selected.end());
  require(unique.size() == selected.size(), ErrorCode::kInvalidArgument, "duplicate feature in selection");
  require(static_cast<int>(selected.size()) <= baseline_d, ErrorCode::kInvalidArgument,
          "selection larger than the full panel");
  CostBenefit out;
  out.selected = static_cast<int>(selected.size());
  out.baseline = baseline_d;
  out.panel_cost = out.selected * cm.cost_per_assay;
  out.baseline_cost = baseline_d * cm.cost_per_assay;
  out.saving = (baseline_d - out.selected) * cm.cost_per_assay;
  out.complexity_reduction = 1.0 - static_cast<double>(out.selected) / static_cast<double>(baseline_d);
  out.minutes = estimate_minutes(out.selected, cm, baseline_d);
  out.time_reduction = 1.0 - out.minutes / cm.minutes_full_panel;
  return out;
}

}  // namespace ovrlogit
