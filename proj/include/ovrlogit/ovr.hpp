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

#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "ovrlogit/dataset.hpp"
#include "ovrlogit/error.hpp"
#include "ovrlogit/preprocess.hpp"
#include "ovrlogit/solvers.hpp"

namespace ovrlogit {

using SolverConfig = std::variant<GdConfig, ReferenceConfig, L1Config>;

inline SolverTag solver_tag(const SolverConfig& config) {
  return std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, GdConfig>) return SolverTag::kGd;
        else if constexpr (std::is_same_v<T, ReferenceConfig>) return SolverTag::kReference;
        else return SolverTag::kL1;
      },
      config);
}

inline FittedBinaryModel train_binary(const BinaryDataset& bds, const SolverConfig& config) {
  return std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, GdConfig>) return train_gd(bds, c);
        else if constexpr (std::is_same_v<T, ReferenceConfig>) return train_reference(bds, c);
        else return train_l1(bds, c);
      },
      config);
}

// K binary models (index = class) plus the standardizer that maps raw
// feature vectors into the space they were trained in.
class OvrModel {
 public:
  OvrModel(std::vector<FittedBinaryModel> models, Standardizer standardizer,
           std::vector<std::string> feature_names)
      : models_(std::move(models)),
        standardizer_(std::move(standardizer)),
        feature_names_(std::move(feature_names)) {
    require(models_.size() >= 2, ErrorCode::kInvalidArgument, "one-vs-rest needs at least 2 models");
    for (const auto& m : models_) {
      require(m.weights.size() == standardizer_.dimension(), ErrorCode::kDimensionMismatch,
              "binary model dimension does not match standardizer");
    }
    require(static_cast<Eigen::Index>(feature_names_.size()) == standardizer_.dimension(),
            ErrorCode::kDimensionMismatch, "feature name count does not match standardizer");
  }

  const std::vector<FittedBinaryModel>& models() const noexcept { return models_; }
  const FittedBinaryModel& model(int k) const { return models_.at(static_cast<std::size_t>(k)); }
  const Standardizer& standardizer() const noexcept { return standardizer_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  int class_count() const noexcept { return static_cast<int>(models_.size()); }
  Eigen::Index dimension() const noexcept { return standardizer_.dimension(); }

 private:
  std::vector<FittedBinaryModel> models_;
  Standardizer standardizer_;
  std::vector<std::string> feature_names_;
};

// ds must already be standardized with `standardizer`; the model keeps it so
// that prediction accepts raw inputs.
inline OvrModel train_ovr(const LabeledDataset& ds, const Standardizer& standardizer,
                          const SolverConfig& config) {
  std::vector<FittedBinaryModel> models;
  models.reserve(static_cast<std::size_t>(ds.class_count()));
  for (int k = 0; k < ds.class_count(); ++k) {
    try {
      models.push_back(train_binary(ovr_encode(ds, k), config));
    } catch (const Error& e) {
      throw Error(e.code(), "class " + std::to_string(k) + ": " + e.what());
    }
  }
  return OvrModel(std::move(models), standardizer, ds.feature_names());
}

// Per-class sigmoid confidences for a standardized row, clipped to
// [eps, 1 - eps] so every entry is strictly inside (0, 1). Not normalised.
inline std::vector<double> predict_proba_standardized(const OvrModel& m, const Vector& z,
                                                      double eps = kDefaultProbEpsilon) {
  require(z.size() == m.dimension(), ErrorCode::kDimensionMismatch,
          "expected " + std::to_string(m.dimension()) + " features, got " + std::to_string(z.size()));
  std::vector<double> probs;
  probs.reserve(m.models().size());
  for (const auto& binary : m.models()) {
    probs.push_back(std::clamp(sigmoid(binary.decision(z)), eps, 1.0 - eps));
  }
  return probs;
}

inline std::vector<double> predict_proba(const OvrModel& m, std::span<const double> x) {
  require(static_cast<Eigen::Index>(x.size()) == m.dimension(), ErrorCode::kDimensionMismatch,
          "expected " + std::to_string(m.dimension()) + " features, got " + std::to_string(x.size()));
  for (double v : x) require(std::isfinite(v), ErrorCode::kNonFiniteValue, "non-finite feature value");
  return predict_proba_standardized(m, m.standardizer().transform_row(x));
}

// First index holding the maximum.
inline int argmax_lowest(std::span<const double> values) {
  require(!values.empty(), ErrorCode::kInvalidArgument, "argmax of empty sequence");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return static_cast<int>(best);
}

inline int predict(const OvrModel& m, std::span<const double> x) {
  const auto probs = predict_proba(m, x);
  return argmax_lowest(probs);
}

struct BatchPrediction {
  std::vector<int> predicted;
  Matrix probabilities;  // n x K
};

inline BatchPrediction predict_batch(const OvrModel& m, const Matrix& raw) {
  BatchPrediction out;
  out.probabilities.resize(raw.rows(), m.class_count());
  out.predicted.reserve(static_cast<std::size_t>(raw.rows()));
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    const Vector row = raw.row(i).transpose();
    const auto probs = predict_proba(m, std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
    for (int k = 0; k < m.class_count(); ++k) out.probabilities(i, k) = probs[static_cast<std::size_t>(k)];
    out.predicted.push_back(argmax_lowest(probs));
  }
  return out;
}

}  // namespace ovrlogit
