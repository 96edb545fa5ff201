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

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ovrlogit/csv.hpp"
#include "ovrlogit/dataset.hpp"
#include "ovrlogit/error.hpp"

namespace ovrlogit {

// Per-feature z-score parameters. Standard deviations are population
// (divide by n) and strictly positive.
class Standardizer {
 public:
  Standardizer(Vector means, Vector stds) : means_(std::move(means)), stds_(std::move(stds)) {
    require(means_.size() == stds_.size(), ErrorCode::kDimensionMismatch,
            "means and stds differ in length");
    require(means_.size() > 0, ErrorCode::kInvalidArgument, "standardizer needs at least one feature");
    for (Eigen::Index j = 0; j < stds_.size(); ++j) {
      require(std::isfinite(means_[j]) && std::isfinite(stds_[j]) && stds_[j] > 0.0,
              ErrorCode::kInvalidArgument, "standard deviations must be finite and positive");
    }
  }

  static Standardizer identity(Eigen::Index d) {
    return Standardizer(Vector::Zero(d), Vector::Ones(d));
  }

  const Vector& means() const noexcept { return means_; }
  const Vector& stds() const noexcept { return stds_; }
  Eigen::Index dimension() const noexcept { return means_.size(); }

  Matrix transform(const Matrix& x) const {
    check_dimension(x.cols());
    return (x.rowwise() - means_.transpose()).array().rowwise() / stds_.transpose().array();
  }

  Vector transform_row(std::span<const double> x) const {
    check_dimension(static_cast<Eigen::Index>(x.size()));
    Vector out(dimension());
    for (Eigen::Index j = 0; j < dimension(); ++j) {
      out[j] = (x[static_cast<std::size_t>(j)] - means_[j]) / stds_[j];
    }
    return out;
  }

  Matrix inverse_transform(const Matrix& z) const {
    check_dimension(z.cols());
    return (z.array().rowwise() * stds_.transpose().array()).matrix().rowwise() + means_.transpose();
  }

 private:
  void check_dimension(Eigen::Index d) const {
    require(d == dimension(), ErrorCode::kDimensionMismatch,
            "expected " + std::to_string(dimension()) + " features, got " + std::to_string(d));
  }

  Vector means_;
  Vector stds_;
};

inline Standardizer fit_standardizer(const LabeledDataset& train) {
  require(train.rows() >= 2, ErrorCode::kInvalidArgument, "need at least 2 rows to standardize");
  const Matrix& x = train.features();
  const double n = static_cast<double>(x.rows());
  Vector means = x.colwise().sum().transpose() / n;
  Vector stds(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double ss = (x.col(j).array() - means[j]).square().sum();
    stds[j] = std::sqrt(ss / n);
    // Constant columns can leave a rounding-level residue instead of an exact 0.
    if (!(stds[j] > 1e-12 * std::max(1.0, std::abs(means[j])))) {
      fail(ErrorCode::kZeroVariance, "zero variance: " + train.feature_names()[static_cast<std::size_t>(j)]);
    }
  }
  return Standardizer(std::move(means), std::move(stds));
}

inline LabeledDataset transform(const Standardizer& s, const LabeledDataset& ds) {
  return LabeledDataset(s.transform(ds.features()), ds.labels(), ds.feature_names(), ds.class_count());
}

// scaler_params.csv: feature_name,mean,std
inline std::string format_scaler_params(const Standardizer& s, const std::vector<std::string>& names) {
  require(static_cast<Eigen::Index>(names.size()) == s.dimension(), ErrorCode::kDimensionMismatch,
          "feature name count does not match standardizer");
  std::string out = "feature_name,mean,std\n";
  for (Eigen::Index j = 0; j < s.dimension(); ++j) {
    out += names[static_cast<std::size_t>(j)] + ',' + csv::format_fixed(s.means()[j]) + ',' +
           csv::format_fixed(s.stds()[j]) + '\n';
  }
  return out;
}

}  // namespace ovrlogit
