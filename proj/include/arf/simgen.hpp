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

// Simulation generators: Toeplitz-covariance Gaussians, logistic targets,
// and small two-dimensional shape datasets with a class label.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arf/error.hpp"
#include "arf/forest.hpp"
#include "arf/random.hpp"
#include "arf/tabular.hpp"

namespace arf {

struct ToeplitzSpec {
  std::size_t n = 1000;
  std::size_t d = 10;
  double rho = 0.9;
  std::uint64_t seed = 1;
};

inline Schema continuous_schema(std::size_t d, std::string_view prefix = "x") {
  std::vector<Column> cols;
  for (std::size_t j = 0; j < d; ++j)
    cols.push_back({std::string(prefix) + std::to_string(j + 1), ColumnKind::Continuous, {}});
  return Schema(std::move(cols));
}

// n draws of N(0, S) with S_ij = rho^|i-j|, built as the stationary AR(1)
// chain X_1 ~ N(0,1), X_{j+1} = rho X_j + sqrt(1 - rho^2) e_j.
inline Dataset gen_toeplitz_gaussian(const ToeplitzSpec& spec) {
  if (spec.d < 1) throw InvalidArgument("toeplitz: d must be >= 1");
  if (!(spec.rho > -1.0 && spec.rho < 1.0)) throw InvalidArgument("toeplitz: rho must lie in (-1, 1)");
  Engine rng = make_engine(spec.seed, {stream::kSimulate, 1});
  const double innov = std::sqrt(1.0 - spec.rho * spec.rho);
  std::vector<std::vector<double>> cols(spec.d, std::vector<double>(spec.n));
  for (std::size_t i = 0; i < spec.n; ++i) {
    double x = standard_normal(rng);
    cols[0][i] = x;
    for (std::size_t j = 1; j < spec.d; ++j) {
      x = spec.rho * x + innov * standard_normal(rng);
      cols[j][i] = x;
    }
  }
  return Dataset(continuous_schema(spec.d), std::move(cols));
}

// Analytic entropy (nats) of N(0, S) with Toeplitz S = rho^|i-j|: the
// expected NLL of the true density.
inline double toeplitz_gaussian_entropy(std::size_t d, double rho) {
  const double log_det = static_cast<double>(d - 1) * std::log(1.0 - rho * rho);
  return 0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi * std::numbers::e) + 0.5 * log_det;
}

// Y_i ~ Bernoulli(1 / (1 + exp(-x_i . beta))) over the continuous columns of X.
inline Labels gen_logistic_target(const Dataset& X, std::span<const double> beta, std::uint64_t seed) {
  if (beta.size() != X.cols()) throw InvalidArgument("logistic target: beta length != d");
  Engine rng = make_engine(seed, {stream::kSimulate, 2});
  Labels y(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < X.cols(); ++j) eta += X(i, j) * beta[j];
    y[i] = bernoulli(rng, 1.0 / (1.0 + std::exp(-eta))) ? 1 : 0;
  }
  return y;
}

// beta with the first round(informative * d) entries 1 and the rest 0.
inline std::vector<double> sparse_beta(std::size_t d, double informative) {
  std::vector<double> beta(d, 0.0);
  const auto k = static_cast<std::size_t>(std::llround(informative * static_cast<double>(d)));
  for (std::size_t j = 0; j < k && j < d; ++j) beta[j] = 1.0;
  return beta;
}

// X plus a categorical column `name` with levels {"0", "1"} holding y.
inline Dataset with_binary_target(const Dataset& X, const Labels& y, const std::string& name = "y") {
  std::vector<Column> cols = X.schema().columns();
  cols.push_back({name, ColumnKind::Categorical, {"0", "1"}});
  std::vector<std::vector<double>> data = X.columns();
  data.emplace_back(y.begin(), y.end());
  return Dataset(Schema(std::move(cols)), std::move(data));
}

// ---------------------------------------------------------------------------
// Shapes

struct ShapeSpec {
  std::string name = "twomoons";  // cassini | smiley | twomoons | shapes
  std::size_t n = 2000;
  std::uint64_t seed = 1;
};

inline std::size_t shape_class_count(std::string_view name) {
  if (name == "twomoons") return 2;
  if (name == "cassini") return 3;
  if (name == "smiley" || name == "shapes") return 4;
  throw InvalidArgument("unknown shape dataset '" + std::string(name) + "'");
}

namespace detail {

// Normal noise truncated at +-4 sd so generated clouds have fixed extents.
inline double bounded_noise(Engine& rng, double sd) {
  return sd * truncated_std_normal_inverse(-4.0, 4.0, uniform_open01(rng));
}

// Point uniform in the triangle (a, b, c).
inline std::pair<double, double> in_triangle(Engine& rng, std::pair<double, double> a,
                                             std::pair<double, double> b, std::pair<double, double> c) {
  double u = uniform01(rng), v = uniform01(rng);
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return {a.first + u * (b.first - a.first) + v * (c.first - a.first),
          a.second + u * (b.second - a.second) + v * (c.second - a.second)};
}

}  // namespace detail

// Fixed class sizes for a shape dataset of n points.
inline std::vector<std::size_t> shape_class_sizes(std::string_view name, std::size_t n) {
  const std::size_t k = shape_class_count(name);
  std::vector<std::size_t> sizes(k);
  if (name == "cassini") {  // relative sizes 2:2:1
    sizes[0] = static_cast<std::size_t>(std::llround(0.4 * static_cast<double>(n)));
    sizes[1] = sizes[0];
    sizes[2] = n - 2 * sizes[0];
  } else if (name == "smiley") {  // eyes n/6 each, nose n/4, mouth the rest
    sizes[0] = static_cast<std::size_t>(std::llround(static_cast<double>(n) / 6.0));
    sizes[1] = sizes[0];
    sizes[2] = static_cast<std::size_t>(std::llround(static_cast<double>(n) / 4.0));
    sizes[3] = n - sizes[0] - sizes[1] - sizes[2];
  } else {  // balanced; leftover rows go to the first classes
    for (std::size_t c = 0; c < k; ++c) sizes[c] = n / k + (c < n % k ? 1 : 0);
  }
  return sizes;
}

// (x1, x2, class) point clouds. Rows are grouped by class.
//  twomoons: two interleaved half circles, noise sd 0.1.
//  cassini:  two arcs (bananas) above and below a central disc.
//  smiley:   two eye blobs, a triangular nose, and a parabolic mouth.
//  shapes:   a Gaussian blob, a square, a triangle, and a sine wave.
inline Dataset gen_shape(const ShapeSpec& spec) {
  const std::size_t k = shape_class_count(spec.name);
  if (spec.n < k) throw InvalidArgument("shape: n must be at least the number of classes");
  const auto sizes = shape_class_sizes(spec.name, spec.n);
  Engine rng = make_engine(spec.seed, {stream::kSimulate, 3});
  constexpr double pi = std::numbers::pi;

  std::vector<double> x1, x2, cls;
  x1.reserve(spec.n);
  x2.reserve(spec.n);
  cls.reserve(spec.n);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < sizes[c]; ++i) {
      double a = 0.0, b = 0.0;
      if (spec.name == "twomoons") {
        const double t = pi * uniform01(rng);
        if (c == 0) {
          a = std::cos(t);
          b = std::sin(t);
        } else {
          a = 1.0 - std::cos(t);
          b = 0.5 - std::sin(t);
        }
        a += detail::bounded_noise(rng, 0.1);
        b += detail::bounded_noise(rng, 0.1);
      } else if (spec.name == "cassini") {
        if (c == 2) {
          const double r = 0.5 * std::sqrt(uniform01(rng));
          const double t = 2.0 * pi * uniform01(rng);
          a = r * std::cos(t);
          b = r * std::sin(t);
        } else {
          const double r = 1.8 + 0.4 * uniform01(rng);
          const double t = pi * (0.25 + 0.5 * uniform01(rng)) + (c == 1 ? pi : 0.0);
          const double cy = (c == 0) ? -1.0 : 1.0;
          a = r * std::cos(t);
          b = cy + r * std::sin(t);
        }
      } else if (spec.name == "smiley") {
        if (c < 2) {
          a = (c == 0 ? -0.8 : 0.8) + detail::bounded_noise(rng, 0.1);
          b = 1.0 + detail::bounded_noise(rng, 0.1);
        } else if (c == 2) {
          std::tie(a, b) = detail::in_triangle(rng, {0.0, 0.3}, {-0.2, -0.1}, {0.2, -0.1});
        } else {
          a = -1.0 + 2.0 * uniform01(rng);
          b = a * a - 1.0 + detail::bounded_noise(rng, 0.05);
        }
      } else {  // shapes
        switch (c) {
          case 0:
            a = -3.0 + detail::bounded_noise(rng, 0.35);
            b = 3.0 + detail::bounded_noise(rng, 0.35);
            break;
          case 1:
            a = 2.0 + 2.0 * uniform01(rng);
            b = 2.0 + 2.0 * uniform01(rng);
            break;
          case 2:
            std::tie(a, b) = detail::in_triangle(rng, {-4.0, -4.0}, {-2.0, -4.0}, {-3.0, -2.0});
            break;
          default:
            a = 2.0 + 2.0 * uniform01(rng);
            b = -3.0 + 0.5 * std::sin(3.0 * a) + detail::bounded_noise(rng, 0.05);
        }
      }
      x1.push_back(a);
      x2.push_back(b);
      cls.push_back(static_cast<double>(c));
    }
  }
  std::vector<std::string> levels;
  for (std::size_t c = 0; c < k; ++c) levels.push_back(std::to_string(c + 1));
  Schema schema({{"x1", ColumnKind::Continuous, {}},
                 {"x2", ColumnKind::Continuous, {}},
                 {"class", ColumnKind::Categorical, levels}});
  return Dataset(std::move(schema), {std::move(x1), std::move(x2), std::move(cls)});
}

}  // namespace arf
