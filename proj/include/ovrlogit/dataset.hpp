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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ovrlogit/csv.hpp"
#include "ovrlogit/error.hpp"
#include "ovrlogit/random.hpp"

namespace ovrlogit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// n x d real features with class indices in [0, class_count). The feature
// matrix is held behind a shared immutable pointer so that views such as
// one-vs-rest encodings do not copy it.
class LabeledDataset {
 public:
  LabeledDataset(Matrix features, std::vector<int> labels,
                 std::vector<std::string> feature_names, int class_count)
      : LabeledDataset(std::make_shared<const Matrix>(std::move(features)), std::move(labels),
                       std::move(feature_names), class_count) {}

  LabeledDataset(std::shared_ptr<const Matrix> features, std::vector<int> labels,
                 std::vector<std::string> feature_names, int class_count)
      : features_(std::move(features)),
        labels_(std::move(labels)),
        feature_names_(std::move(feature_names)),
        class_count_(class_count) {
    require(features_ != nullptr, ErrorCode::kInvalidArgument, "null feature matrix");
    require(features_->rows() > 0, ErrorCode::kEmptyDataset, "empty dataset");
    require(features_->cols() > 0, ErrorCode::kInvalidArgument, "dataset has no features");
    require(class_count_ >= 2, ErrorCode::kInvalidArgument,
            "need at least 2 classes, got " + std::to_string(class_count_));
    require(static_cast<Eigen::Index>(labels_.size()) == features_->rows(),
            ErrorCode::kDimensionMismatch, "label count does not match row count");
    require(static_cast<Eigen::Index>(feature_names_.size()) == features_->cols(),
            ErrorCode::kDimensionMismatch, "feature name count does not match column count");
    for (int label : labels_) {
      require(label >= 0 && label < class_count_, ErrorCode::kInvalidArgument,
              "label " + std::to_string(label) + " outside [0, " + std::to_string(class_count_) + ")");
    }
    require(features_->allFinite(), ErrorCode::kNonFiniteValue, "non-finite feature value");
  }

  const Matrix& features() const noexcept { return *features_; }
  const std::shared_ptr<const Matrix>& shared_features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  int class_count() const noexcept { return class_count_; }
  Eigen::Index rows() const noexcept { return features_->rows(); }
  Eigen::Index cols() const noexcept { return features_->cols(); }

  std::vector<int> class_counts() const {
    std::vector<int> counts(static_cast<std::size_t>(class_count_), 0);
    for (int label : labels_) ++counts[static_cast<std::size_t>(label)];
    return counts;
  }

  // Rows in the given order; class_count and names are kept.
  LabeledDataset subset(std::span<const std::size_t> indices) const {
    Matrix rows_out(static_cast<Eigen::Index>(indices.size()), cols());
    std::vector<int> labels_out;
    labels_out.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
      require(indices[r] < static_cast<std::size_t>(rows()), ErrorCode::kInvalidArgument,
              "row index out of range");
      rows_out.row(static_cast<Eigen::Index>(r)) = features_->row(static_cast<Eigen::Index>(indices[r]));
      labels_out.push_back(labels_[indices[r]]);
    }
    return LabeledDataset(std::move(rows_out), std::move(labels_out), feature_names_, class_count_);
  }

 private:
  std::shared_ptr<const Matrix> features_;
  std::vector<int> labels_;
  std::vector<std::string> feature_names_;
  int class_count_;
};

// One-vs-rest view: targets are 1.0 where the original label equals
// positive_class and 0.0 elsewhere.
class BinaryDataset {
 public:
  BinaryDataset(std::shared_ptr<const Matrix> features, Vector targets, int positive_class)
      : features_(std::move(features)), targets_(std::move(targets)), positive_class_(positive_class) {
    require(features_ != nullptr && features_->rows() > 0, ErrorCode::kEmptyDataset, "empty dataset");
    require(targets_.size() == features_->rows(), ErrorCode::kDimensionMismatch,
            "target count does not match row count");
    Eigen::Index positives = 0;
    for (Eigen::Index i = 0; i < targets_.size(); ++i) {
      require(targets_[i] == 0.0 || targets_[i] == 1.0, ErrorCode::kInvalidArgument,
              "binary targets must be 0 or 1");
      positives += targets_[i] == 1.0;
    }
    require(positives > 0 && positives < targets_.size(), ErrorCode::kDegenerateTargets,
            "class " + std::to_string(positive_class_) +
                (positives == 0 ? ": no positive examples" : ": no negative examples"));
  }

  BinaryDataset(Matrix features, Vector targets, int positive_class = 1)
      : BinaryDataset(std::make_shared<const Matrix>(std::move(features)), std::move(targets),
                      positive_class) {}

  const Matrix& features() const noexcept { return *features_; }
  const Vector& targets() const noexcept { return targets_; }
  int positive_class() const noexcept { return positive_class_; }
  Eigen::Index rows() const noexcept { return features_->rows(); }
  Eigen::Index cols() const noexcept { return features_->cols(); }
  Eigen::Index positives() const { return static_cast<Eigen::Index>(targets_.sum()); }

 private:
  std::shared_ptr<const Matrix> features_;
  Vector targets_;
  int positive_class_;
};

struct SplitPair {
  LabeledDataset train;
  LabeledDataset test;
  std::uint64_t seed;
  double test_fraction;
  // Zero-based row indices into the source dataset, ascending.
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Reads a comma-separated file with a header row. Every column other than
// label_column is a feature, kept in header order. Label values must be
// integers; they are remapped to 0..K-1 preserving numeric order.
inline LabeledDataset load_csv(const std::filesystem::path& path,
                               const std::string& label_column = "target") {
  const std::string text = csv::read_text(path);
  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const auto pos = rest.find('\n');
      const auto line = rest.substr(0, pos);
      if (!csv::trim(line).empty()) lines.push_back(line);
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
  }
  require(!lines.empty(), ErrorCode::kMalformedCsv, "missing header row: " + path.string());

  auto header = csv::split_fields(lines.front());
  if (!header.empty() && header.front().starts_with("\xEF\xBB\xBF")) header.front().remove_prefix(3);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  require(label_it != header.end(), ErrorCode::kMissingLabelColumn,
          "missing label column '" + label_column + "'");
  const auto label_pos = static_cast<std::size_t>(label_it - header.begin());
  require(header.size() >= 2, ErrorCode::kMalformedCsv, "no feature columns");

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_pos) names.emplace_back(header[c]);
  }

  const auto n = static_cast<Eigen::Index>(lines.size() - 1);
  require(n > 0, ErrorCode::kEmptyDataset, "empty dataset");
  const auto d = static_cast<Eigen::Index>(names.size());

  Matrix features(n, d);
  std::vector<long long> raw_labels;
  raw_labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto line_no = std::to_string(r + 2);
    const auto fields = csv::split_fields(lines[static_cast<std::size_t>(r) + 1]);
    require(fields.size() == header.size(), ErrorCode::kMalformedCsv,
            "line " + line_no + ": expected " + std::to_string(header.size()) + " fields, got " +
                std::to_string(fields.size()));
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_pos) {
        const auto label = csv::parse_integer(fields[c]);
        require(label.has_value(), ErrorCode::kNonNumericCell,
                "line " + line_no + ": label '" + std::string(fields[c]) + "' is not an integer");
        raw_labels.push_back(*label);
        continue;
      }
      const auto value = csv::parse_double(fields[c]);
      require(value.has_value(), ErrorCode::kNonNumericCell,
              "line " + line_no + ", column '" + std::string(header[c]) + "': non-numeric cell '" +
                  std::string(fields[c]) + "'");
      require(std::isfinite(*value), ErrorCode::kNonFiniteValue,
              "line " + line_no + ", column '" + std::string(header[c]) + "': non-finite value");
      features(r, col++) = *value;
    }
  }

  std::map<long long, int> remap;
  for (long long label : raw_labels) remap.emplace(label, 0);
  int next = 0;
  for (auto& [value, index] : remap) index = next++;
  std::vector<int> labels;
  labels.reserve(raw_labels.size());
  for (long long label : raw_labels) labels.push_back(remap.at(label));

  return LabeledDataset(std::move(features), std::move(labels), std::move(names),
                        static_cast<int>(remap.size()));
}

// Per-class test counts: floor of fraction * count, then the remaining
// slots up to round(fraction * n) go to the largest fractional parts
// (ties to the lower class index).
inline std::vector<int> stratified_test_counts(std::span<const int> class_counts, double test_fraction) {
  int n = 0;
  for (int c : class_counts) n += c;
  const int target = static_cast<int>(std::lround(test_fraction * n));
  std::vector<int> counts(class_counts.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t k = 0; k < class_counts.size(); ++k) {
    const double quota = test_fraction * class_counts[k];
    // Absorb representation error so that e.g. 0.2 * 10 counts as exactly 2.
    const double floor_quota = std::floor(quota + 1e-9);
    counts[k] = static_cast<int>(floor_quota);
    assigned += counts[k];
    remainders.emplace_back(std::max(0.0, quota - floor_quota), k);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < target && i < remainders.size(); ++i, ++assigned) {
    ++counts[remainders[i].second];
  }
  return counts;
}

// Each class's indices are shuffled (classes in index order, one generator
// seeded once) and the first stratified_test_counts() of them go to test.
inline SplitPair stratified_split(const LabeledDataset& ds, double test_fraction, std::uint64_t seed) {
  require(test_fraction > 0.0 && test_fraction < 1.0, ErrorCode::kInvalidArgument,
          "test fraction must lie in (0, 1)");
  const auto class_counts = ds.class_counts();
  for (std::size_t k = 0; k < class_counts.size(); ++k) {
    require(class_counts[k] >= 2, ErrorCode::kInvalidArgument,
            "class " + std::to_string(k) + " has fewer than 2 samples");
  }
  const auto test_counts = stratified_test_counts(class_counts, test_fraction);

  std::vector<std::vector<std::size_t>> by_class(class_counts.size());
  for (std::size_t i = 0; i < ds.labels().size(); ++i) {
    by_class[static_cast<std::size_t>(ds.labels()[i])].push_back(i);
  }

  DeterministicRng rng(seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (std::size_t k = 0; k < by_class.size(); ++k) {
    auto& members = by_class[k];
    rng.shuffle(std::span<std::size_t>(members));
    const auto cut = static_cast<std::size_t>(test_counts[k]);
    test_idx.insert(test_idx.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(cut));
    train_idx.insert(train_idx.end(), members.begin() + static_cast<std::ptrdiff_t>(cut), members.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  return SplitPair{ds.subset(train_idx), ds.subset(test_idx), seed, test_fraction,
                   std::move(train_idx), std::move(test_idx)};
}

inline BinaryDataset ovr_encode(const LabeledDataset& ds, int k) {
  require(k >= 0 && k < ds.class_count(), ErrorCode::kInvalidArgument,
          "class index " + std::to_string(k) + " out of range");
  Vector targets(ds.rows());
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    targets[i] = ds.labels()[static_cast<std::size_t>(i)] == k ? 1.0 : 0.0;
  }
  return BinaryDataset(ds.shared_features(), std::move(targets), k);
}

// One zero-based index per line, no header.
inline std::string format_index_manifest(std::span<const std::size_t> indices) {
  std::string out;
  for (std::size_t index : indices) {
    out += std::to_string(index);
    out += '\n';
  }
  return out;
}

}  // namespace ovrlogit
