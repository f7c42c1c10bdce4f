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

// Standard normal and truncated normal primitives used by the leaf densities
// and the inverse-CDF sampler. Tail quantities are computed on the side of
// the distribution where they are small so that narrow or far-out truncation
// intervals keep full relative precision.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace arf {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Upper tail 1 - cdf(x), accurate for large x.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline double log_normal_pdf(double z) {
  return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
}

// log(1 - cdf(x)); switches to the asymptotic series where erfc underflows.
inline double log_normal_sf(double x) {
  if (x == kInf) return -kInf;
  if (x < 37.0) return std::log(normal_sf(x));
  const double r = 1.0 / (x * x);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
  return log_normal_pdf(x) - std::log(x) + std::log(series);
}

inline double log_normal_cdf(double x) { return log_normal_sf(-x); }

// Inverse of normal_cdf. Rational approximation (Acklam) polished by one
// Halley step against erfc, good to a few ulps across (0, 1).
inline double normal_quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement; the residual is taken on the small tail.
  const double e = (x < 0.0) ? normal_cdf(x) - p : (1.0 - p) - normal_sf(x);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

// log(cdf(b) - cdf(a)) for a < b.
inline double log_normal_interval_mass(double a, double b) {
  if (!(a < b)) return -kInf;
  if (a >= 0.0) {
    // Both ends on the upper side: Q(a) - Q(b).
    const double la = log_normal_sf(a);
    const double lb = log_normal_sf(b);
    return la + std::log1p(-std::exp(lb - la));
  }
  if (b <= 0.0) {
    const double lb = log_normal_cdf(b);
    const double la = log_normal_cdf(a);
    return lb + std::log1p(-std::exp(la - lb));
  }
  return std::log1p(-(normal_cdf(a) + normal_sf(b)));
}

// Standard normal truncated to [a, b], drawn by inverting the CDF at u in (0, 1).
inline double truncated_std_normal_inverse(double a, double b, double u) {
  if (a >= 0.0) return -truncated_std_normal_inverse(-b, -a, 1.0 - u);
  // Now a < 0.
  double x;
  const double pb = normal_cdf(b);
  if (b <= 0.0 && pb < 1e-290) {
    // Deep lower tail: the mirrored density on [-b, -a] is exponential with
    // rate -b to leading order.
    const double rate = -b;
    const double width = b - a;
    x = b + std::log1p(-u * (-std::expm1(-rate * width))) / rate;
  } else {
    const double pa = normal_cdf(a);
    const double p = pa + u * (pb - pa);
    if (p > 0.5) {
      const double qa = normal_sf(a);
      const double qb = normal_sf(b);
      x = -normal_quantile(qb + (1.0 - u) * (qa - qb));
    } else {
      x = normal_quantile(p);
    }
  }
  return std::clamp(x, a, b);
}

}  // namespace arf
