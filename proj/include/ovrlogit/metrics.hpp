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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ovrlogit/error.hpp"

namespace ovrlogit {

struct ConfusionMatrix2 {
  long tp = 0;
  long tn = 0;
  long fp = 0;
  long fn = 0;

  long total() const noexcept { return tp + tn + fp + fn; }
  bool operator==(const ConfusionMatrix2&) const = default;
};

// Precision, recall and F1 are empty when their denominator is zero.
struct MetricsBundle {
  double accuracy = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

inline ConfusionMatrix2 confusion(std::span<const int> truth, std::span<const int> predicted) {
  require(truth.size() == predicted.size(), ErrorCode::kDimensionMismatch,
          "truth and prediction differ in length");
  require(!truth.empty(), ErrorCode::kEmptyDataset, "empty input to confusion matrix");
  ConfusionMatrix2 c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require((truth[i] == 0 || truth[i] == 1) && (predicted[i] == 0 || predicted[i] == 1),
            ErrorCode::kInvalidArgument, "binary labels must be 0 or 1");
    if (truth[i] == 1) {
      predicted[i] == 1 ? ++c.tp : ++c.fn;
    } else {
      predicted[i] == 1 ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

inline MetricsBundle metrics_from_confusion(const ConfusionMatrix2& c) {
  require(c.tp >= 0 && c.tn >= 0 && c.fp >= 0 && c.fn >= 0, ErrorCode::kInvalidArgument,
          "negative confusion count");
  require(c.total() > 0, ErrorCode::kEmptyDataset, "empty confusion matrix");
  MetricsBundle m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

struct MacroAverage {
  MetricsBundle mean;
  // Bundles left out of each mean because the metric was undefined.
  int excluded_precision = 0;
  int excluded_recall = 0;
  int excluded_f1 = 0;
};

inline MacroAverage macro_average(std::span<const MetricsBundle> bundles) {
  require(!bundles.empty(), ErrorCode::kInvalidArgument, "macro average of an empty list");
  MacroAverage out;
  auto mean_of = [&](std::optional<double> MetricsBundle::*field, int& excluded) {
    double sum = 0.0;
    int count = 0;
    for (const auto& b : bundles) {
      if (const auto& v = b.*field) {
        sum += *v;
        ++count;
      } else {
        ++excluded;
      }
    }
    return count > 0 ? std::optional<double>(sum / count) : std::nullopt;
  };
  double accuracy = 0.0;
  for (const auto& b : bundles) accuracy += b.accuracy;
  out.mean.accuracy = accuracy / static_cast<double>(bundles.size());
  out.mean.precision = mean_of(&MetricsBundle::precision, out.excluded_precision);
  out.mean.recall = mean_of(&MetricsBundle::recall, out.excluded_recall);
  out.mean.f1 = mean_of(&MetricsBundle::f1, out.excluded_f1);
  return out;
}

// Inverse of the standard normal CDF. Acklam's rational approximation
// (relative error below 1.15e-9) followed by one Halley correction step
// against erfc, which brings the absolute error to the 1e-15 range.
inline double normal_quantile(double p) {
  require(p > 0.0 && p < 1.0, ErrorCode::kInvalidArgument, "quantile probability must lie in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

// Two-sided Wilson score interval, clamped to [0, 1].
inline std::pair<double, double> wilson_interval(long successes, long trials, double confidence) {
  require(trials > 0, ErrorCode::kInvalidArgument, "trials must be positive");
  require(successes >= 0 && successes <= trials, ErrorCode::kInvalidArgument,
          "successes must lie in [0, trials]");
  require(confidence > 0.0 && confidence < 1.0, ErrorCode::kInvalidArgument,
          "confidence must lie in (0, 1)");
  const double z = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  // The exact interval always contains p; guard the endpoints against rounding at p = 0 or 1.
  return {std::clamp(std::min(centre - half, p), 0.0, 1.0), std::clamp(std::max(centre + half, p), 0.0, 1.0)};
}

inline double accuracy(std::span<const int> truth, std::span<const int> predicted) {
  require(truth.size() == predicted.size(), ErrorCode::kDimensionMismatch,
          "truth and prediction differ in length");
  require(!truth.empty(), ErrorCode::kEmptyDataset, "empty input to accuracy");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace ovrlogit
