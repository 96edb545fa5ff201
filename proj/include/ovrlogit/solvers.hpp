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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ovrlogit/dataset.hpp"
#include "ovrlogit/error.hpp"

namespace ovrlogit {

enum class SolverTag { kGd, kReference, kL1 };

inline std::string_view to_string(SolverTag tag) {
  switch (tag) {
    case SolverTag::kGd: return "gd";
    case SolverTag::kReference: return "reference";
    case SolverTag::kL1: return "l1";
  }
  return "unknown";
}

inline SolverTag parse_solver_tag(std::string_view name) {
  if (name == "gd") return SolverTag::kGd;
  if (name == "reference") return SolverTag::kReference;
  if (name == "l1") return SolverTag::kL1;
  fail(ErrorCode::kInvalidArgument, "unknown solver '" + std::string(name) + "'");
}

// Fixed-rate full-batch gradient descent. iterations may be 0.
struct GdConfig {
  double learning_rate = 1e-4;
  int iterations = 10000;
  int trace_every = 100;
  double z_clip = 500.0;
  double prob_epsilon = 1e-15;

  void validate() const {
    require(learning_rate > 0.0 && std::isfinite(learning_rate), ErrorCode::kInvalidArgument,
            "learning rate must be positive");
    require(iterations >= 0, ErrorCode::kInvalidArgument, "iterations must be non-negative");
    require(trace_every > 0, ErrorCode::kInvalidArgument, "trace interval must be positive");
    require(z_clip > 0.0, ErrorCode::kInvalidArgument, "z clip must be positive");
    require(prob_epsilon > 0.0 && prob_epsilon < 0.5, ErrorCode::kInvalidArgument,
            "probability epsilon must lie in (0, 0.5)");
  }
};

// Damped Newton (IRLS). The damping term damping * ||w||^2 is added to the
// mean loss; the bias is not damped.
struct ReferenceConfig {
  double tolerance = 1e-8;
  int max_iterations = 100;
  double damping = 1e-8;

  void validate() const {
    require(tolerance > 0.0, ErrorCode::kInvalidArgument, "tolerance must be positive");
    require(max_iterations > 0, ErrorCode::kInvalidArgument, "max iterations must be positive");
    require(damping >= 0.0, ErrorCode::kInvalidArgument, "damping must be non-negative");
  }
};

// L1-penalised logistic regression; lambda = 1 / (C * n) against the mean loss.
struct L1Config {
  double C = 0.1;
  int max_iterations = 100000;
  double tolerance = 1e-8;

  void validate() const {
    require(C > 0.0 && std::isfinite(C), ErrorCode::kInvalidArgument, "C must be positive");
    require(max_iterations > 0, ErrorCode::kInvalidArgument, "max iterations must be positive");
    require(tolerance > 0.0, ErrorCode::kInvalidArgument, "tolerance must be positive");
  }
};

struct Hyperparams {
  std::optional<double> learning_rate;
  std::optional<int> iterations;
  std::optional<double> C;
  std::optional<double> tolerance;
};

struct LossPoint {
  int iteration;
  double loss;
};

struct FittedBinaryModel {
  Vector weights;
  double bias = 0.0;
  SolverTag solver = SolverTag::kGd;
  Hyperparams hyperparams;
  std::vector<LossPoint> loss_trace;
  // Iterations (GD updates, Newton steps, or coordinate sweeps) performed.
  int iterations_run = 0;
  std::optional<double> final_gradient_norm;

  double decision(const Vector& x) const { return weights.dot(x) + bias; }
};

// Carries the last iterate of a solver that ran out of iterations.
class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& message, FittedBinaryModel last)
      : Error(ErrorCode::kNotConverged, message), last_(std::move(last)) {}
  const FittedBinaryModel& last_iterate() const noexcept { return last_; }

 private:
  FittedBinaryModel last_;
};

inline constexpr double kDefaultZClip = 500.0;
inline constexpr double kDefaultProbEpsilon = 1e-15;
inline constexpr double kDefaultZeroThreshold = 1e-10;

// Logistic function on the input clipped to [-z_clip, z_clip]. Evaluated
// without overflow for either sign of z.
inline double sigmoid(double z, double z_clip = kDefaultZClip) {
  z = std::clamp(z, -z_clip, z_clip);
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline Vector sigmoid(const Vector& z, double z_clip = kDefaultZClip) {
  return z.unaryExpr([z_clip](double v) { return sigmoid(v, z_clip); });
}

// Mean binary cross-entropy with probabilities clipped to [eps, 1 - eps].
inline double mean_log_loss(const Vector& targets, const Vector& probs,
                            double eps = kDefaultProbEpsilon) {
  require(targets.size() == probs.size(), ErrorCode::kDimensionMismatch,
          "targets and probabilities differ in length");
  require(targets.size() > 0, ErrorCode::kEmptyDataset, "empty input to log loss");
  double total = 0.0;
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    const double p = std::clamp(probs[i], eps, 1.0 - eps);
    total -= targets[i] * std::log(p) + (1.0 - targets[i]) * std::log(1.0 - p);
  }
  return total / static_cast<double>(targets.size());
}

namespace detail {

// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Mean loss evaluated from scores rather than clipped probabilities; used
// where the optimiser needs the exact objective far into saturation.
inline double mean_log_loss_from_scores(const Vector& targets, const Vector& scores) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    total += targets[i] == 1.0 ? softplus(-scores[i]) : softplus(scores[i]);
  }
  return total / static_cast<double>(targets.size());
}

}  // namespace detail

struct Gradient {
  Vector weights;
  double bias = 0.0;
};

// Gradient of the mean log loss: X^T (probs - targets) / n and the mean residual.
inline Gradient gd_gradient(const Matrix& x, const Vector& targets, const Vector& probs) {
  require(x.rows() == targets.size() && targets.size() == probs.size(), ErrorCode::kDimensionMismatch,
          "gradient inputs disagree in row count");
  require(x.rows() > 0, ErrorCode::kEmptyDataset, "empty input to gradient");
  const Vector residual = probs - targets;
  const double n = static_cast<double>(x.rows());
  return Gradient{x.transpose() * residual / n, residual.sum() / n};
}

// Batch gradient descent from zero weights. The trace holds the loss after
// 0, trace_every, 2 * trace_every, ... updates, plus the loss after the last
// update; it is empty when iterations is 0.
inline FittedBinaryModel train_gd(const BinaryDataset& bds, const GdConfig& cfg = {}) {
  cfg.validate();
  const Matrix& x = bds.features();
  const Vector& y = bds.targets();

  FittedBinaryModel model;
  model.weights = Vector::Zero(x.cols());
  model.solver = SolverTag::kGd;
  model.hyperparams.learning_rate = cfg.learning_rate;
  model.hyperparams.iterations = cfg.iterations;

  auto forward = [&](int iteration) {
    Vector probs = sigmoid(((x * model.weights).array() + model.bias).matrix(), cfg.z_clip);
    probs = probs.cwiseMax(cfg.prob_epsilon).cwiseMin(1.0 - cfg.prob_epsilon);
    const double loss = mean_log_loss(y, probs, cfg.prob_epsilon);
    if (!std::isfinite(loss)) {
      fail(ErrorCode::kNonFiniteLoss, "non-finite loss at iteration " + std::to_string(iteration));
    }
    return std::pair{std::move(probs), loss};
  };

  for (int t = 0; t < cfg.iterations; ++t) {
    auto [probs, loss] = forward(t);
    if (t % cfg.trace_every == 0) model.loss_trace.push_back({t, loss});
    const Gradient grad = gd_gradient(x, y, probs);
    model.weights -= cfg.learning_rate * grad.weights;
    model.bias -= cfg.learning_rate * grad.bias;
  }
  if (cfg.iterations > 0) {
    model.loss_trace.push_back({cfg.iterations, forward(cfg.iterations).second});
  }
  model.iterations_run = cfg.iterations;
  return model;
}

// Damped Newton on the mean log loss with an Armijo backtracking safeguard.
// Stops when the gradient norm or the largest parameter change drops below
// the tolerance.
inline FittedBinaryModel train_reference(const BinaryDataset& bds, const ReferenceConfig& cfg = {}) {
  cfg.validate();
  const Matrix& x = bds.features();
  const Vector& y = bds.targets();
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  // Parameters are [w; b] against the design [X 1].
  Matrix design(n, d + 1);
  design.leftCols(d) = x;
  design.col(d).setOnes();
  Vector theta = Vector::Zero(d + 1);
  Vector penalty_mask = Vector::Ones(d + 1);
  penalty_mask[d] = 0.0;

  auto objective = [&](const Vector& params) {
    const Vector scores = design * params;
    return detail::mean_log_loss_from_scores(y, scores) +
           cfg.damping * params.head(d).squaredNorm();
  };
  auto gradient = [&](const Vector& params, Vector& probs) {
    probs = sigmoid(design * params);
    Vector g = design.transpose() * (probs - y) * inv_n;
    g.head(d) += 2.0 * cfg.damping * params.head(d);
    return g;
  };

  auto make_model = [&](int iterations, double grad_norm) {
    FittedBinaryModel m;
    m.weights = theta.head(d);
    m.bias = theta[d];
    m.solver = SolverTag::kReference;
    m.hyperparams.tolerance = cfg.tolerance;
    m.hyperparams.iterations = cfg.max_iterations;
    m.iterations_run = iterations;
    m.final_gradient_norm = grad_norm;
    return m;
  };

  Vector probs;
  Vector grad = gradient(theta, probs);
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    if (grad.norm() < cfg.tolerance) return make_model(iter, grad.norm());

    const Vector curvature = (probs.array() * (1.0 - probs.array())).matrix() * inv_n;
    Matrix hessian = design.transpose() * curvature.asDiagonal() * design;
    hessian.diagonal() += 2.0 * cfg.damping * penalty_mask;

    Eigen::LDLT<Matrix> ldlt(hessian);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(ldlt.rcond() > 1e-300)) {
      fail(ErrorCode::kSingularSystem, "singular Newton system at iteration " + std::to_string(iter));
    }
    const Vector step = ldlt.solve(grad);
    if (!step.allFinite()) {
      fail(ErrorCode::kSingularSystem, "singular Newton system at iteration " + std::to_string(iter));
    }

    const double current = objective(theta);
    const double slope = grad.dot(step);
    double alpha = 1.0;
    Vector candidate = theta - step;
    while (objective(candidate) > current - 1e-4 * alpha * slope && alpha > 1e-10) {
      alpha *= 0.5;
      candidate = theta - alpha * step;
    }
    const double max_change = (candidate - theta).cwiseAbs().maxCoeff();
    theta = std::move(candidate);
    grad = gradient(theta, probs);
    if (!std::isfinite(objective(theta))) {
      fail(ErrorCode::kNonFiniteLoss, "non-finite loss at iteration " + std::to_string(iter + 1));
    }
    if (max_change < cfg.tolerance) return make_model(iter + 1, grad.norm());
  }
  if (grad.norm() < cfg.tolerance) return make_model(cfg.max_iterations, grad.norm());
  throw NotConvergedError("reference solver did not converge in " + std::to_string(cfg.max_iterations) +
                              " iterations",
                          make_model(cfg.max_iterations, grad.norm()));
}

inline double soft_threshold(double x, double t) {
  require(t >= 0.0, ErrorCode::kInvalidArgument, "threshold must be non-negative");
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// Mean loss plus lambda * ||w||_1 with lambda = 1 / (C * n).
inline double l1_objective(const BinaryDataset& bds, const Vector& weights, double bias, double c) {
  const Vector scores = ((bds.features() * weights).array() + bias).matrix();
  const double lambda = 1.0 / (c * static_cast<double>(bds.rows()));
  return detail::mean_log_loss_from_scores(bds.targets(), scores) + lambda * weights.lpNorm<1>();
}

namespace detail {

// Upper bound on the logistic curvature sigma'(r + u) over |u| <= delta.
inline double curvature_bound(double r, double delta) {
  const double gap = std::abs(r) - delta;
  if (gap <= 0.0) return 0.25;
  const double s = std::exp(-gap);
  return s / ((1.0 + s) * (1.0 + s));
}

}  // namespace detail

// Cyclic coordinate descent over w_0..w_{d-1} then the bias. Each coordinate
// minimises a quadratic upper bound of the smooth loss that is valid inside
// a per-coordinate trust region, followed by soft-thresholding. The trust
// region of a coordinate becomes max(2 |last step|, previous / 2). Converged
// when the largest change in a sweep is below the tolerance.
inline FittedBinaryModel train_l1(const BinaryDataset& bds, const L1Config& cfg = {}) {
  cfg.validate();
  const Matrix& x = bds.features();
  const Vector& y = bds.targets();
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double lambda = inv_n / cfg.C;

  Vector weights = Vector::Zero(d);
  double bias = 0.0;
  Vector linear = Vector::Zero(n);  // X w, without the bias
  Vector trust = Vector::Ones(d + 1);

  auto make_model = [&](int sweeps) {
    FittedBinaryModel m;
    m.weights = weights;
    m.bias = bias;
    m.solver = SolverTag::kL1;
    m.hyperparams.C = cfg.C;
    m.hyperparams.tolerance = cfg.tolerance;
    m.hyperparams.iterations = cfg.max_iterations;
    m.iterations_run = sweeps;
    return m;
  };

  for (int sweep = 0; sweep < cfg.max_iterations; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j <= d; ++j) {
      const bool is_bias = j == d;
      double grad = 0.0;
      double curvature = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double r = linear[i] + bias;
        const double xij = is_bias ? 1.0 : x(i, j);
        grad += xij * (sigmoid(r) - y[i]);
        curvature += xij * xij * detail::curvature_bound(r, trust[j] * std::abs(xij));
      }
      grad *= inv_n;
      curvature *= inv_n;
      if (!(curvature > 0.0)) continue;

      double step;
      if (is_bias) {
        step = -grad / curvature;
      } else {
        step = soft_threshold(weights[j] - grad / curvature, lambda / curvature) - weights[j];
      }
      step = std::clamp(step, -trust[j], trust[j]);
      if (step != 0.0) {
        if (is_bias) {
          bias += step;
        } else {
          weights[j] += step;
          linear += step * x.col(j);
        }
      }
      trust[j] = std::max(2.0 * std::abs(step), 0.5 * trust[j]);
      max_change = std::max(max_change, std::abs(step));
    }
    if (!std::isfinite(bias) || !weights.allFinite()) {
      fail(ErrorCode::kNonFiniteLoss, "non-finite iterate at sweep " + std::to_string(sweep + 1));
    }
    if (max_change < cfg.tolerance) return make_model(sweep + 1);
  }
  throw NotConvergedError("l1 solver did not converge in " + std::to_string(cfg.max_iterations) + " sweeps",
                          make_model(cfg.max_iterations));
}

// Indices j with |w_j| > threshold, ascending.
inline std::vector<int> retained_features(const FittedBinaryModel& m,
                                          double threshold = kDefaultZeroThreshold) {
  std::vector<int> kept;
  for (Eigen::Index j = 0; j < m.weights.size(); ++j) {
    if (std::abs(m.weights[j]) > threshold) kept.push_back(static_cast<int>(j));
  }
  return kept;
}

}  // namespace ovrlogit
