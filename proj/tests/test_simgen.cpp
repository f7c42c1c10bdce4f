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
#include <map>
#include <vector>

#include "arf/simgen.hpp"

namespace {

using namespace arf;

double corr(const Dataset& X, std::size_t a, std::size_t b) {
  const double n = static_cast<double>(X.rows());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    ma += X(i, a);
    mb += X(i, b);
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    sab += (X(i, a) - ma) * (X(i, b) - mb);
    saa += (X(i, a) - ma) * (X(i, a) - ma);
    sbb += (X(i, b) - mb) * (X(i, b) - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

TEST(Toeplitz, IndependentWhenRhoZero) {
  const Dataset X = gen_toeplitz_gaussian({10000, 4, 0.0, 1});
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b) EXPECT_LT(std::abs(corr(X, a, b)), 0.05);
}

TEST(Toeplitz, CorrelationDecaysGeometrically) {
  const Dataset X = gen_toeplitz_gaussian({10000, 5, 0.9, 2});
  EXPECT_NEAR(corr(X, 0, 1), 0.9, 0.02);
  EXPECT_NEAR(corr(X, 0, 2), 0.81, 0.03);
  EXPECT_NEAR(corr(X, 1, 4), 0.729, 0.04);
  for (std::size_t j = 0; j < 5; ++j) {
    double s = 0, ss = 0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
      s += X(i, j);
      ss += X(i, j) * X(i, j);
    }
    const double n = static_cast<double>(X.rows());
    EXPECT_NEAR(ss / n - (s / n) * (s / n), 1.0, 0.05) << "column " << j;
  }
}

TEST(Toeplitz, DeterministicAndValidated) {
  EXPECT_EQ(gen_toeplitz_gaussian({100, 3, 0.5, 9}), gen_toeplitz_gaussian({100, 3, 0.5, 9}));
  EXPECT_NE(gen_toeplitz_gaussian({100, 3, 0.5, 9}), gen_toeplitz_gaussian({100, 3, 0.5, 10}));
  EXPECT_THROW(gen_toeplitz_gaussian({10, 0, 0.5, 1}), InvalidArgument);
  EXPECT_THROW(gen_toeplitz_gaussian({10, 2, 1.0, 1}), InvalidArgument);
}

TEST(Toeplitz, EntropyMatchesDeterminant) {
  // det S = (1 - rho^2)^(d-1); d = 1 reduces to the standard normal.
  EXPECT_NEAR(toeplitz_gaussian_entropy(1, 0.9), 0.5 * std::log(2 * M_PI * M_E), 1e-12);
  EXPECT_NEAR(toeplitz_gaussian_entropy(3, 0.5),
              1.5 * std::log(2 * M_PI * M_E) + std::log(0.75), 1e-12);
}

TEST(LogisticTarget, ZeroBetaIsFairCoin) {
  const Dataset X = gen_toeplitz_gaussian({10000, 3, 0.5, 3});
  const std::vector<double> beta(3, 0.0);
  const Labels y = gen_logistic_target(X, beta, 4);
  double f = 0;
  for (auto v : y) f += v;
  EXPECT_NEAR(f / y.size(), 0.5, 0.02);
}

TEST(LogisticTarget, Saturation) {
  const Dataset X(continuous_schema(1), {std::vector<double>(5000, 10.0)});
  const std::vector<double> beta{1.0};
  const Labels y = gen_logistic_target(X, beta, 5);
  double f = 0;
  for (auto v : y) f += v;
  EXPECT_GE(f / y.size(), 0.999);
  EXPECT_THROW(gen_logistic_target(X, std::vector<double>{1.0, 2.0}, 1), InvalidArgument);
}

TEST(LogisticTarget, SparseBeta) {
  EXPECT_EQ(sparse_beta(10, 0.5), (std::vector<double>{1, 1, 1, 1, 1, 0, 0, 0, 0, 0}));
  EXPECT_EQ(sparse_beta(4, 1.0), std::vector<double>(4, 1.0));
  EXPECT_EQ(sparse_beta(4, 0.0), std::vector<double>(4, 0.0));
  const Dataset X = gen_toeplitz_gaussian({10, 2, 0.0, 1});
  const Dataset Z = with_binary_target(X, Labels(10, 1));
  EXPECT_EQ(Z.cols(), 3u);
  EXPECT_TRUE(Z.schema()[2].is_categorical());
  EXPECT_EQ(Z.level(3, 2), 1u);
}

TEST(Shapes, TwoMoonsBalancedAndBounded) {
  const Dataset X = gen_shape({"twomoons", 2000, 1});
  std::map<std::size_t, int> counts;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    ++counts[X.level(i, 2)];
    EXPECT_GE(X(i, 0), -1.5);
    EXPECT_LE(X(i, 0), 2.5);
    EXPECT_GE(X(i, 1), -1.0);
    EXPECT_LE(X(i, 1), 1.5);
  }
  EXPECT_EQ(counts[0], 1000);
  EXPECT_EQ(counts[1], 1000);
}

TEST(Shapes, ClassCountsAndDeterminism) {
  for (const char* name : {"cassini", "smiley", "twomoons", "shapes"}) {
    const Dataset X = gen_shape({name, 1000, 7});
    EXPECT_EQ(X.rows(), 1000u);
    EXPECT_EQ(X.cols(), 3u);
    EXPECT_EQ(X.schema()[2].levels.size(), shape_class_count(name));
    std::vector<std::size_t> counts(shape_class_count(name), 0);
    for (std::size_t i = 0; i < X.rows(); ++i) ++counts[X.level(i, 2)];
    EXPECT_EQ(counts, shape_class_sizes(name, 1000)) << name;
    EXPECT_EQ(X, gen_shape({name, 1000, 7}));
  }
  EXPECT_THROW(gen_shape({"spiral", 100, 1}), InvalidArgument);
}

TEST(Shapes, ShapesClustersAreDisjoint) {
  const Dataset X = gen_shape({"shapes", 2000, 3});
  // Each class lives in its own quadrant.
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const std::size_t c = X.level(i, 2);
    const bool right = X(i, 0) > 0, top = X(i, 1) > 0;
    const std::size_t quadrant = right ? (top ? 1 : 3) : (top ? 0 : 2);
    ASSERT_EQ(c, quadrant) << "row " << i;
  }
}

}  // namespace
