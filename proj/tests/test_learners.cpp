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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "arf/learners.hpp"
#include "arf/simgen.hpp"

namespace {

using namespace arf;

Schema xy_schema(std::size_t k) {
  std::vector<std::string> lv;
  for (std::size_t c = 0; c < k; ++c) lv.push_back(std::to_string(c));
  return Schema({{"x", ColumnKind::Continuous, {}}, {"y", ColumnKind::Categorical, lv}});
}

// Predicts whatever level index is stored in the feature.
struct EchoClassifier final : Classifier {
  std::size_t predict(std::span<const double> f) const override { return static_cast<std::size_t>(f[0]); }
};

TEST(Encoder, StandardizesAndDropsFirstLevel) {
  const Schema s({{"a", ColumnKind::Continuous, {}}, {"c", ColumnKind::Categorical, {"p", "q", "r"}}});
  const Dataset X(s, {{1.0, 2.0, 3.0}, {0, 1, 2}});
  const FeatureEncoder enc(X);
  ASSERT_EQ(enc.width(), 4u);
  const DesignMatrix D = enc.encode(X);
  EXPECT_EQ(D(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(D(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(D(2, 1), 1.0);
  EXPECT_EQ(D(0, 2), 0.0);
  EXPECT_EQ(D(0, 3), 0.0);
  EXPECT_EQ(D(1, 2), 1.0);
  EXPECT_EQ(D(2, 3), 1.0);
}

TEST(LogReg, GradientMatchesFiniteDifferences) {
  const Dataset X = gen_toeplitz_gaussian({200, 3, 0.5, 1});
  const Labels lab = gen_logistic_target(X, std::vector<double>{1.0, -0.5, 0.0}, 2);
  const DesignMatrix D = FeatureEncoder(X).encode(X);
  const std::vector<double> y(lab.begin(), lab.end());
  const std::vector<double> w{0.1, -0.3, 0.7, 0.2};
  for (double l2 : {0.0, 0.5}) {
    const auto g = logreg_gradient(w, D, y, l2);
    for (std::size_t k = 0; k < w.size(); ++k) {
      auto wp = w, wm = w;
      wp[k] += 1e-6;
      wm[k] -= 1e-6;
      const double fd = (logreg_loss(wp, D, y, l2) - logreg_loss(wm, D, y, l2)) / 2e-6;
      EXPECT_NEAR(g[k], fd, 1e-7) << "k=" << k << " l2=" << l2;
    }
  }
}

TEST(LogReg, SoftplusStable) {
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_EQ(softplus(800.0), 800.0);
  EXPECT_GT(softplus(-800.0), -1e-300);
  EXPECT_NEAR(sigmoid(-800.0), 0.0, 1e-300);
  EXPECT_EQ(sigmoid(800.0), 1.0);
}

TEST(LogReg, ConvergesToStationaryPoint) {
  const Dataset X = gen_toeplitz_gaussian({500, 2, 0.3, 3});
  const Labels lab = gen_logistic_target(X, std::vector<double>{1.0, 1.0}, 4);
  const DesignMatrix D = FeatureEncoder(X).encode(X);
  const std::vector<double> y(lab.begin(), lab.end());
  std::size_t iters = 0;
  const auto w = fit_logreg_weights(D, y, {}, &iters);
  EXPECT_LT(iters, 10000u);
  double gn = 0;
  for (double v : logreg_gradient(w, D, y, 0.0)) gn += v * v;
  EXPECT_LE(std::sqrt(gn), 1e-6);
}

TEST(LogReg, SeparableData) {
  std::vector<double> x, y;
  for (int i = 0; i < 200; ++i) {
    x.push_back(i < 100 ? -1.0 - 0.01 * i : 1.0 + 0.01 * i);
    y.push_back(i < 100 ? 0 : 1);
  }
  const Dataset ds(xy_schema(2), {x, y});
  const auto clf = train_logreg(ds, 1);
  EXPECT_GE(evaluate(*clf, ds, 1).accuracy, 0.99);
}

TEST(LogReg, Multiclass) {
  std::vector<double> x, y;
  for (int i = 0; i < 300; ++i) {
    const int c = i / 100;
    x.push_back(5.0 * c + 0.01 * (i % 100));
    y.push_back(c);
  }
  const Dataset ds(xy_schema(3), {x, y});
  EXPECT_GE(evaluate(*train_logreg(ds, 1), ds, 1).accuracy, 0.95);
}

TEST(DTree, FitsTrainingDataAndIsCapped) {
  const Dataset X = gen_toeplitz_gaussian({2000, 3, 0.0, 5});
  // Coin-flip labels force a deep tree.
  const Dataset ds = with_binary_target(X, gen_logistic_target(X, std::vector<double>(3, 0.0), 6));
  const DecisionTree unlimited(ds.without_column(3), detail::target_levels(ds, 3), 2, {100, 1}, 1);
  EXPECT_EQ(evaluate(unlimited, ds, 3).accuracy, 1.0);
  EXPECT_GT(unlimited.trees()[0].depth(), 15u);
  const auto capped = train_dtree(ds, 3);
  EXPECT_LE(static_cast<const DecisionTree&>(*capped).trees()[0].depth(), 15u);
}

TEST(DTree, SeparableAndMulticlass) {
  std::vector<double> x, y;
  for (int i = 0; i < 300; ++i) {
    x.push_back(static_cast<double>(i));
    y.push_back(i / 100);
  }
  const Dataset ds(xy_schema(3), {x, y});
  const auto clf = train_classifier(Learner::DTree, ds, 1, 3);
  EXPECT_EQ(evaluate(*clf, ds, 1).accuracy, 1.0);
  EXPECT_EQ(static_cast<const DecisionTree&>(*clf).trees().size(), 3u);
}

TEST(Learners, Names) {
  EXPECT_EQ(parse_learner("logreg"), Learner::LogReg);
  EXPECT_EQ(learner_name(parse_learner("dtree")), "dtree");
  EXPECT_THROW(parse_learner("svm"), InvalidArgument);
  const Dataset ds(continuous_schema(2), {{1.0, 2.0}, {3.0, 4.0}});
  EXPECT_THROW(train_logreg(ds, 1), InvalidArgument);
}

TEST(Metrics, BinaryF1) {
  // truth 1 1 1 0 0, predicted 1 0 1 1 0: tp=2 fp=1 fn=1.
  const Dataset ds(xy_schema(2), {{1, 0, 1, 1, 0}, {1, 1, 1, 0, 0}});
  const auto m = evaluate(EchoClassifier{}, ds, 1);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.6);
  EXPECT_DOUBLE_EQ(m.f1, 4.0 / 6.0);
}

TEST(Metrics, MacroF1) {
  // truth 0 1 2 2, predicted 0 2 2 2: F1 = 1, 0, 0.8.
  const Dataset ds(xy_schema(3), {{0, 2, 2, 2}, {0, 1, 2, 2}});
  const auto m = evaluate(EchoClassifier{}, ds, 1);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.75);
  EXPECT_DOUBLE_EQ(m.f1, (1.0 + 0.0 + 0.8) / 3.0);
}

}  // namespace
