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

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>

#include "arf/normal.hpp"
#include "arf/random.hpp"

namespace {

using namespace arf;
const boost::math::normal_distribution<double> kStd(0.0, 1.0);

TEST(Normal, CdfAgainstBoost) {
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    EXPECT_NEAR(normal_cdf(x), boost::math::cdf(kStd, x), 1e-15);
    EXPECT_NEAR(normal_sf(x), boost::math::cdf(boost::math::complement(kStd, x)), 1e-15);
  }
}

TEST(Normal, QuantileAgainstBoost) {
  for (double p : {1e-300, 1e-100, 1e-20, 1e-8, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.97575, 0.999, 1 - 1e-12}) {
    const double want = boost::math::quantile(kStd, p);
    EXPECT_NEAR(normal_quantile(p), want, 1e-12 * std::max(1.0, std::abs(want))) << p;
  }
}

TEST(Normal, QuantileInvertsCdf) {
  // Rounding p to a double moves x by about eps * p / pdf(x).
  for (double x = -6.0; x <= 6.0; x += 0.1) {
    const double p = normal_cdf(x);
    const double tol = 1e-9 + 4 * std::numeric_limits<double>::epsilon() * p / boost::math::pdf(kStd, x);
    EXPECT_NEAR(normal_quantile(p), x, tol) << x;
  }
}

TEST(Normal, LogTailIsStable) {
  for (double x : {0.0, 1.0, 5.0, 20.0, 36.0, 37.5, 40.0}) {
    const double want = std::log(boost::math::cdf(boost::math::complement(kStd, x)));
    EXPECT_NEAR(log_normal_sf(x), want, 1e-10 * std::abs(want) + 1e-14) << x;
  }
  // Beyond double range of the tail probability the asymptotic form must stay finite.
  EXPECT_TRUE(std::isfinite(log_normal_sf(60.0)));
  EXPECT_NEAR(log_normal_sf(60.0), -0.5 * 3600 - std::log(60.0) - 0.5 * std::log(2 * M_PI), 1e-3);
}

TEST(Normal, IntervalMass) {
  EXPECT_NEAR(std::exp(log_normal_interval_mass(-1.0, 1.0)),
              boost::math::cdf(kStd, 1.0) - boost::math::cdf(kStd, -1.0), 1e-15);
  EXPECT_EQ(log_normal_interval_mass(-kInf, kInf), 0.0);
  EXPECT_NEAR(log_normal_interval_mass(10.0, 11.0),
              std::log(boost::math::cdf(boost::math::complement(kStd, 10.0)) -
                       boost::math::cdf(boost::math::complement(kStd, 11.0))),
              1e-10);
}

TEST(Normal, TruncatedInverseStaysInside) {
  Engine rng = make_engine(11);
  const double cases[][2] = {{-kInf, kInf}, {0.0, 1.0}, {5.0, kInf}, {-kInf, -30.0}, {40.0, 40.001}, {-1e-9, 1e-9}};
  for (const auto& c : cases) {
    for (int i = 0; i < 2000; ++i) {
      const double z = truncated_std_normal_inverse(c[0], c[1], uniform_open01(rng));
      ASSERT_TRUE(std::isfinite(z));
      ASSERT_GE(z, c[0]);
      ASSERT_LE(z, c[1]);
    }
  }
}

TEST(Normal, TruncatedInverseMatchesConditionalCdf) {
  // For Z ~ N(0,1) | a <= Z <= b, F(z) = (Phi(z) - Phi(a)) / (Phi(b) - Phi(a)).
  const double a = -0.5, b = 2.0;
  const double pa = boost::math::cdf(kStd, a), pb = boost::math::cdf(kStd, b);
  for (double u = 0.05; u < 1.0; u += 0.1) {
    const double z = truncated_std_normal_inverse(a, b, u);
    EXPECT_NEAR((boost::math::cdf(kStd, z) - pa) / (pb - pa), u, 1e-10);
  }
}

TEST(Normal, TruncatedMeanInUpperTail) {
  // E[Z | Z > a] = phi(a) / (1 - Phi(a)).
  const double a = 3.0;
  Engine rng = make_engine(12);
  const int n = 100000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += truncated_std_normal_inverse(a, kInf, uniform_open01(rng));
  const double want = boost::math::pdf(kStd, a) / boost::math::cdf(boost::math::complement(kStd, a));
  EXPECT_NEAR(s / n, want, 0.01);
}

}  // namespace
