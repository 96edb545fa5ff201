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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ovrlogit/preprocess.hpp"
#include "test_util.hpp"

namespace ovrlogit {
namespace {

// Two-pass column statistics in long double, written independently of the
// Eigen reductions used by fit_standardizer.
std::pair<long double, long double> column_stats(const Matrix& x, Eigen::Index j) {
  long double sum = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) sum += x(i, j);
  const long double mean = sum / x.rows();
  long double ss = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) ss += (x(i, j) - mean) * (x(i, j) - mean);
  return {mean, std::sqrt(ss / x.rows())};
}

TEST(FitStandardizer, ProlineMatchesTwoPassOracle) {
  const auto& split = testing::wine_prepared().split;
  const auto s = fit_standardizer(split.train);
  const int j = testing::feature_index("proline");
  ASSERT_GE(j, 0);
  const auto [mean, sd] = column_stats(split.train.features(), j);
  EXPECT_NEAR(s.means()[j], static_cast<double>(mean), 1e-12 * static_cast<double>(mean));
  EXPECT_NEAR(s.stds()[j], static_cast<double>(sd), 1e-12 * static_cast<double>(sd));
  for (Eigen::Index c = 0; c < s.dimension(); ++c) {
    const auto [m, d] = column_stats(split.train.features(), c);
    EXPECT_NEAR(s.means()[c], static_cast<double>(m), 1e-12 * (1 + std::abs(static_cast<double>(m))));
    EXPECT_NEAR(s.stds()[c], static_cast<double>(d), 1e-12 * static_cast<double>(d));
  }
}

TEST(FitStandardizer, ConstantColumnNamesTheColumn) {
  Matrix x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5;
  const LabeledDataset ds(x, {0, 1, 0, 1}, {"varied", "flat"}, 2);
  try {
    fit_standardizer(ds);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVariance);
    EXPECT_STREQ(e.what(), "zero variance: flat");
  }
  Matrix tenths = Matrix::Constant(7, 1, 0.1);
  EXPECT_THROW(fit_standardizer(LabeledDataset(tenths, {0, 1, 0, 1, 0, 1, 0}, {"t"}, 2)), Error);
}

TEST(FitStandardizer, TwoRowHandCase) {
  Matrix x(2, 1);
  x << 0, 2;
  const auto s = fit_standardizer(LabeledDataset(x, {0, 1}, {"f"}, 2));
  EXPECT_DOUBLE_EQ(s.means()[0], 1.0);
  EXPECT_DOUBLE_EQ(s.stds()[0], 1.0);
}

TEST(FitStandardizer, NeedsTwoRows) {
  EXPECT_THROW(fit_standardizer(LabeledDataset(Matrix::Ones(1, 1), {0}, {"f"}, 2)), Error);
}

TEST(Transform, TrainColumnsBecomeStandard) {
  const auto& train = testing::wine_prepared().split.train;
  const auto z = transform(fit_standardizer(train), train);
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const auto [mean, sd] = column_stats(z.features(), j);
    EXPECT_LT(std::abs(static_cast<double>(mean)), 1e-9);
    EXPECT_LT(std::abs(static_cast<double>(sd) - 1.0), 1e-9);
  }
  EXPECT_EQ(z.labels(), train.labels());
  EXPECT_EQ(z.feature_names(), train.feature_names());
}

TEST(Transform, IdentityParameters) {
  const auto& ds = testing::wine();
  const auto out = transform(Standardizer::identity(ds.cols()), ds);
  EXPECT_EQ(out.features(), ds.features());
}

TEST(Transform, RowAtMeansIsZero) {
  const auto s = fit_standardizer(testing::wine_prepared().split.train);
  const Vector means = s.means();
  const Vector z = s.transform_row(std::span<const double>(means.data(), static_cast<std::size_t>(means.size())));
  EXPECT_EQ(z, Vector::Zero(means.size()));
}

TEST(Transform, DimensionMismatch) {
  const auto s = Standardizer::identity(3);
  try {
    s.transform(Matrix::Ones(2, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(Transform, PropertyRoundTrip) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rows = 2 + static_cast<Eigen::Index>(gen() % 30);
    const auto cols = 1 + static_cast<Eigen::Index>(gen() % 8);
    Matrix x = testing::random_matrix(gen, rows, cols, 50.0);
    x.array() += 1000.0 * std::uniform_real_distribution<double>(-1, 1)(gen);
    std::vector<int> labels(static_cast<std::size_t>(rows), 0);
    labels[0] = 1;
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < cols; ++j) names.push_back("f" + std::to_string(j));
    const LabeledDataset ds(x, labels, names, 2);
    const auto s = fit_standardizer(ds);
    const Matrix back = s.inverse_transform(s.transform(x));
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        EXPECT_LE(std::abs(back(i, j) - x(i, j)), 1e-12 * std::max(1.0, std::abs(x(i, j))));
      }
    }
  }
}

TEST(Transform, TestSplitUsesTrainStatistics) {
  const auto& data = testing::wine_prepared();
  int off_centre = 0;
  for (Eigen::Index j = 0; j < data.test.cols(); ++j) {
    off_centre += std::abs(data.test.features().col(j).mean()) > 1e-6;
  }
  // Refitting on test would zero every column mean.
  EXPECT_GE(off_centre, 10);
}

TEST(ScalerParams, CsvLayout) {
  Vector means(2), stds(2);
  means << 1.5, -2.0;
  stds << 0.25, 3.0;
  EXPECT_EQ(format_scaler_params(Standardizer(means, stds), {"a", "b"}),
            "feature_name,mean,std\na,1.500000,0.250000\nb,-2.000000,3.000000\n");
}

}  // namespace
}  // namespace ovrlogit
