// Copyright 2026 The arfcpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Simple supervised learners for the synthetic-data efficacy protocol:
// logistic regression (one-vs-rest for multiclass) trained by full-batch
// gradient descent, and a single CART tree with a depth cap.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arf/error.hpp"
#include "arf/forest.hpp"
#include "arf/random.hpp"
#include "arf/tabular.hpp"

namespace arf {

// Row-major matrix of encoded features; column 0 is the intercept.
struct DesignMatrix {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> data;

  double operator()(std::size_t i, std::size_t k) const { return data[i * p + k]; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * p, p}; }
};

// Maps feature rows to design rows: standardized continuous columns and
// treatment-coded (first level dropped) categorical columns.
class FeatureEncoder {
 public:
  FeatureEncoder() = default;

  explicit FeatureEncoder(const Dataset& X) : schema_(X.schema()) {
    width_ = 1;
    for (std::size_t j = 0; j < X.cols(); ++j) {
      offset_.push_back(width_);
      if (schema_[j].is_categorical()) {
        width_ += schema_[j].levels.size() - 1;
        center_.push_back(0.0);
        scale_.push_back(1.0);
        continue;
      }
      const auto col = X.column(j);
      double mean = 0.0;
      for (double v : col) {
        if (!std::isfinite(v)) throw InvalidArgument("logreg: non-finite feature");
        mean += v;
      }
      mean /= static_cast<double>(std::max<std::size_t>(col.size(), 1));
      double ss = 0.0;
      for (double v : col) ss += (v - mean) * (v - mean);
      const double sd = col.size() > 1 ? std::sqrt(ss / static_cast<double>(col.size() - 1)) : 0.0;
      center_.push_back(mean);
      scale_.push_back(sd > 0.0 ? sd : 1.0);
      width_ += 1;
    }
  }

  std::size_t width() const { return width_; }

  void encode(std::span<const double> row, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = 1.0;
    for (std::size_t j = 0; j < schema_.size(); ++j) {
      if (schema_[j].is_categorical()) {
        const auto l = static_cast<std::size_t>(row[j]);
        if (l > 0) out[offset_[j] + l - 1] = 1.0;
      } else {
        out[offset_[j]] = (row[j] - center_[j]) / scale_[j];
      }
    }
  }

  DesignMatrix encode(const Dataset& X) const {
    DesignMatrix m{X.rows(), width_, std::vector<double>(X.rows() * width_)};
    std::vector<double> row(X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i) {
      for (std::size_t j = 0; j < X.cols(); ++j) row[j] = X(i, j);
      encode(row, std::span<double>(m.data.data() + i * width_, width_));
    }
    return m;
  }

 private:
  Schema schema_;
  std::size_t width_ = 1;
  std::vector<std::size_t> offset_;
  std::vector<double> center_, scale_;
};

inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Mean binary cross-entropy plus (l2 / 2) * |w_{1..}|^2 (intercept unpenalized).
inline double logreg_loss(std::span<const double> w, const DesignMatrix& X, std::span<const double> y,
                          double l2 = 0.0) {
  double loss = 0.0;
  for (std::size_t i = 0; i < X.n; ++i) {
    double z = 0.0;
    for (std::size_t k = 0; k < X.p; ++k) z += X(i, k) * w[k];
    // -[y log s(z) + (1-y) log(1 - s(z))] = softplus(z) - y z
    loss += softplus(z) - y[i] * z;
  }
  loss /= static_cast<double>(X.n);
  for (std::size_t k = 1; k < w.size(); ++k) loss += 0.5 * l2 * w[k] * w[k];
  return loss;
}

inline std::vector<double> logreg_gradient(std::span<const double> w, const DesignMatrix& X,
                                           std::span<const double> y, double l2 = 0.0) {
  std::vector<double> g(X.p, 0.0);
  for (std::size_t i = 0; i < X.n; ++i) {
    double z = 0.0;
    for (std::size_t k = 0; k < X.p; ++k) z += X(i, k) * w[k];
    const double r = sigmoid(z) - y[i];
    for (std::size_t k = 0; k < X.p; ++k) g[k] += r * X(i, k);
  }
  for (double& v : g) v /= static_cast<double>(X.n);
  for (std::size_t k = 1; k < g.size(); ++k) g[k] += l2 * w[k];
  return g;
}

struct LogRegHyper {
  double l2 = 0.0;
  double grad_tol = 1e-6;
  std::size_t max_iters = 10000;
};

// Gradient descent with Armijo backtracking until |grad| <= tol.
inline std::vector<double> fit_logreg_weights(const DesignMatrix& X, std::span<const double> y,
                                              const LogRegHyper& hyper, std::size_t* iterations = nullptr) {
  std::vector<double> w(X.p, 0.0), trial(X.p);
  double loss = logreg_loss(w, X, y, hyper.l2);
  double step = 1.0;
  std::size_t it = 0;
  for (; it < hyper.max_iters; ++it) {
    const auto g = logreg_gradient(w, X, y, hyper.l2);
    double gn2 = 0.0;
    for (double v : g) gn2 += v * v;
    if (std::sqrt(gn2) <= hyper.grad_tol) break;
    step = std::min(step * 2.0, 64.0);
    for (;;) {
      for (std::size_t k = 0; k < X.p; ++k) trial[k] = w[k] - step * g[k];
      const double l = logreg_loss(trial, X, y, hyper.l2);
      if (l <= loss - 0.5 * step * gn2 || step < 1e-12) {
        w.swap(trial);
        loss = l;
        break;
      }
      step *= 0.5;
    }
  }
  if (iterations) *iterations = it;
  return w;
}

// ---------------------------------------------------------------------------

class Classifier {
 public:
  virtual ~Classifier() = default;
  // Predicted target level index for a feature row (target column removed).
  virtual std::size_t predict(std::span<const double> features) const = 0;
};

class LogisticRegression final : public Classifier {
 public:
  LogisticRegression(const Dataset& X, std::span<const std::size_t> target, std::size_t num_classes,
                     const LogRegHyper& hyper)
      : encoder_(X), num_classes_(num_classes) {
    const DesignMatrix D = encoder_.encode(X);
    const std::size_t models = num_classes == 2 ? 1 : num_classes;
    std::vector<double> y(X.rows());
    for (std::size_t c = 0; c < models; ++c) {
      const std::size_t positive = num_classes == 2 ? 1 : c;
      for (std::size_t i = 0; i < X.rows(); ++i) y[i] = target[i] == positive ? 1.0 : 0.0;
      weights_.push_back(fit_logreg_weights(D, y, hyper));
    }
  }

  std::size_t predict(std::span<const double> features) const override {
    std::vector<double> x(encoder_.width());
    encoder_.encode(features, x);
    auto score = [&](const std::vector<double>& w) {
      double z = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) z += w[k] * x[k];
      return z;
    };
    if (num_classes_ == 2) return score(weights_[0]) >= 0.0 ? 1 : 0;
    std::size_t best = 0;
    double best_z = -kInf;
    for (std::size_t c = 0; c < weights_.size(); ++c) {
      const double z = score(weights_[c]);
      if (z > best_z) {
        best_z = z;
        best = c;
      }
    }
    return best;
  }

  const std::vector<std::vector<double>>& weights() const { return weights_; }

 private:
  FeatureEncoder encoder_;
  std::size_t num_classes_;
  std::vector<std::vector<double>> weights_;
};

struct DTreeHyper {
  std::optional<std::size_t> max_depth;  // default 15 binary / 30 multiclass
  std::size_t min_node_size = 1;
};

class DecisionTree final : public Classifier {
 public:
  DecisionTree(const Dataset& X, std::span<const std::size_t> target, std::size_t num_classes,
               const DTreeHyper& hyper, std::uint64_t seed) : num_classes_(num_classes) {
    ForestConfig cfg;
    cfg.num_trees = 1;
    cfg.mtry = X.cols();
    cfg.min_node_size = hyper.min_node_size;
    cfg.resample = Resample::Subsample;
    cfg.sample_fraction = 1.0;
    cfg.max_depth = hyper.max_depth.value_or(num_classes == 2 ? 15 : 30);
    const std::size_t models = num_classes == 2 ? 1 : num_classes;
    Labels y(X.rows());
    for (std::size_t c = 0; c < models; ++c) {
      const std::size_t positive = num_classes == 2 ? 1 : c;
      for (std::size_t i = 0; i < X.rows(); ++i) y[i] = target[i] == positive ? 1 : 0;
      Engine rng = make_engine(seed, {stream::kLearner, c});
      trees_.push_back(grow_tree(X, y, cfg, rng));
    }
  }

  std::size_t predict(std::span<const double> features) const override {
    if (num_classes_ == 2) return trees_[0].leaf(trees_[0].leaf_of(features)).soft_label >= 0.5 ? 1 : 0;
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t c = 0; c < trees_.size(); ++c) {
      const double p = trees_[c].leaf(trees_[c].leaf_of(features)).soft_label;
      if (p > best_p) {
        best_p = p;
        best = c;
      }
    }
    return best;
  }

  const std::vector<Tree>& trees() const { return trees_; }

 private:
  std::size_t num_classes_;
  std::vector<Tree> trees_;
};

enum class Learner { LogReg, DTree };

inline std::string learner_name(Learner l) { return l == Learner::LogReg ? "logreg" : "dtree"; }

inline Learner parse_learner(const std::string& s) {
  if (s == "logreg") return Learner::LogReg;
  if (s == "dtree") return Learner::DTree;
  throw InvalidArgument("unknown learner '" + s + "'");
}

namespace detail {
inline std::vector<std::size_t> target_levels(const Dataset& ds, std::size_t target) {
  if (!ds.schema()[target].is_categorical())
    throw InvalidArgument("learner: target '" + ds.schema()[target].name + "' must be categorical");
  std::vector<std::size_t> y(ds.rows());
  for (std::size_t i = 0; i < ds.rows(); ++i) y[i] = ds.level(i, target);
  return y;
}
}  // namespace detail

inline std::unique_ptr<Classifier> train_logreg(const Dataset& ds, std::size_t target,
                                                const LogRegHyper& hyper = {}) {
  const auto y = detail::target_levels(ds, target);
  return std::make_unique<LogisticRegression>(ds.without_column(target), y,
                                              ds.schema()[target].levels.size(), hyper);
}

inline std::unique_ptr<Classifier> train_dtree(const Dataset& ds, std::size_t target,
                                               const DTreeHyper& hyper = {}, std::uint64_t seed = 1) {
  const auto y = detail::target_levels(ds, target);
  return std::make_unique<DecisionTree>(ds.without_column(target), y,
                                        ds.schema()[target].levels.size(), hyper, seed);
}

inline std::unique_ptr<Classifier> train_classifier(Learner learner, const Dataset& ds, std::size_t target,
                                                    std::uint64_t seed) {
  if (learner == Learner::LogReg) return train_logreg(ds, target);
  return train_dtree(ds, target, {}, seed);
}

// ---------------------------------------------------------------------------
// Metrics

struct ClassificationMetrics {
  double accuracy = 0.0;
  double f1 = 0.0;  // positive class (level 1) when binary, macro otherwise
};

inline ClassificationMetrics evaluate(const Classifier& clf, const Dataset& test, std::size_t target) {
  const std::size_t k = test.schema()[target].levels.size();
  const Dataset X = test.without_column(target);
  std::vector<std::size_t> tp(k, 0), fp(k, 0), fn(k, 0);
  std::size_t correct = 0;
  std::vector<double> row(X.cols());
  for (std::size_t i = 0; i < test.rows(); ++i) {
    for (std::size_t j = 0; j < X.cols(); ++j) row[j] = X(i, j);
    const std::size_t pred = clf.predict(row);
    const std::size_t truth = test.level(i, target);
    if (pred == truth) {
      ++correct;
      ++tp[truth];
    } else {
      ++fp[pred];
      ++fn[truth];
    }
  }
  auto f1_of = [&](std::size_t c) {
    const double denom = 2.0 * static_cast<double>(tp[c]) + static_cast<double>(fp[c] + fn[c]);
    return denom > 0.0 ? 2.0 * static_cast<double>(tp[c]) / denom : 0.0;
  };
  ClassificationMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(std::max<std::size_t>(test.rows(), 1));
  if (k == 2) {
    m.f1 = f1_of(1);
  } else {
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) s += f1_of(c);
    m.f1 = s / static_cast<double>(k);
  }
  return m;
}

}  // namespace arf
