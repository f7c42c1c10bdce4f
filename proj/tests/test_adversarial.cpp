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
#include <numeric>
#include <set>
#include <vector>

#include "arf/adversarial.hpp"
#include "arf/simgen.hpp"

namespace {

using namespace arf;

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

Labels stacked_labels(std::size_t n) {
  Labels y(2 * n, 0);
  std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n), 1);
  return y;
}

TEST(MarginalBootstrap, ConstantColumnStaysConstant) {
  const Dataset ds(Schema({{"k", ColumnKind::Continuous, {}}}), {{3.0, 3.0, 3.0}});
  Engine rng = make_engine(1);
  const Dataset s = sample_marginal_bootstrap(ds, 50, rng);
  for (double v : s.column(0)) EXPECT_EQ(v, 3.0);
}

TEST(MarginalBootstrap, LevelFrequencies) {
  std::vector<double> c(100, 0.0);
  for (int i = 0; i < 60; ++i) c[i] = 1.0;
  const Dataset ds(Schema({{"c", ColumnKind::Categorical, {"0", "1"}}}), {c});
  Engine rng = make_engine(2);
  const Dataset s = sample_marginal_bootstrap(ds, 10000, rng);
  double ones = 0;
  for (double v : s.column(0)) ones += v;
  EXPECT_NEAR(ones / 10000.0, 0.6, 0.02);
}

TEST(MarginalBootstrap, BreaksDependence) {
  const Dataset base = gen_toeplitz_gaussian({1000, 1, 0.0, 3});
  std::vector<double> x(base.column(0).begin(), base.column(0).end());
  const Dataset ds(continuous_schema(2), {x, x});
  Engine rng = make_engine(3);
  const Dataset s = sample_marginal_bootstrap(ds, 10000, rng);
  EXPECT_LT(std::abs(pearson(s.column(0), s.column(1))), 0.05);
  EXPECT_THROW(sample_marginal_bootstrap(Dataset(continuous_schema(1), {{}}), 5, rng), InvalidArgument);
}

TEST(Coverage, FormulaArithmetic) {
  // One tree, one split: inbag of 100 rows with 50 originals, 5 of them left.
  Tree t;
  t.nodes.resize(3);
  t.nodes[0] = {{0, SplitKind::Less, 0.5}, 1, 2, -1, 0, 0};
  t.nodes[1].leaf_id = 0;
  t.nodes[2].leaf_id = 1;
  t.leaf_node = {1, 2};
  std::vector<double> x(100, 1.0);
  for (int i = 0; i < 5; ++i) x[i] = 0.0;
  for (std::uint32_t i = 0; i < 100; ++i) t.inbag.push_back(i);
  t.n_inbag = 100;
  Labels y(100, 0);
  std::fill(y.begin(), y.begin() + 50, 1);
  Forest f;
  f.trees.push_back(t);
  const auto q = leaf_coverage(f, Dataset(continuous_schema(1), {x}), y);
  EXPECT_DOUBLE_EQ(q[0][0], 0.1);
  EXPECT_DOUBLE_EQ(q[0][1], 0.9);
}

TEST(Coverage, SumsToOneUnderStratifiedResampling) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset X = gen_toeplitz_gaussian({100, 3, 0.5, seed});
    Engine rng = make_engine(seed);
    const Dataset stack = concat_rows(X, sample_marginal_bootstrap(X, 100, rng));
    const Labels y = stacked_labels(100);
    ForestConfig cfg;
    cfg.num_trees = 5;
    cfg.seed = seed;
    cfg.stratify_by_label = true;
    for (const auto& q : leaf_coverage(fit_forest(stack, y, cfg), stack, y))
      EXPECT_NEAR(std::accumulate(q.begin(), q.end(), 0.0), 1.0, 1e-12);
    cfg.stratify_by_label = false;
    for (const auto& q : leaf_coverage(fit_forest(stack, y, cfg), stack, y)) {
      const double s = std::accumulate(q.begin(), q.end(), 0.0);
      EXPECT_GE(s, 0.7);
      EXPECT_LE(s, 1.3);
    }
  }
}

TEST(SampleLeafwise, SingleLeafForestIsMarginalBootstrap) {
  const Dataset X = gen_toeplitz_gaussian({50, 2, 0.9, 1});
  Tree t;
  t.nodes.resize(1);
  t.nodes[0].leaf_id = 0;
  t.leaf_node = {0};
  for (std::uint32_t i = 0; i < 100; ++i) t.inbag.push_back(i);
  t.n_inbag = 100;
  Forest f;
  f.trees = {t};
  f.schema = X.schema();
  Engine rng = make_engine(4);
  const Dataset s = sample_leafwise(f, X, {{1.0}}, 2000, rng);
  std::set<double> a(X.column(0).begin(), X.column(0).end()), b(X.column(1).begin(), X.column(1).end());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    ASSERT_TRUE(a.count(s(i, 0)));
    ASSERT_TRUE(b.count(s(i, 1)));
  }
  EXPECT_LT(std::abs(pearson(s.column(0), s.column(1))), 0.1);
}

TEST(SampleLeafwise, CellsComeFromSampledLeaf) {
  const Dataset X = gen_shape({"shapes", 400, 2});
  Engine rng = make_engine(5);
  const Dataset stack = concat_rows(X, sample_marginal_bootstrap(X, 400, rng));
  const Labels y = stacked_labels(400);
  ForestConfig cfg;
  cfg.num_trees = 1;
  cfg.stratify_by_label = true;
  const Forest f = fit_forest(stack, y, cfg);
  auto q = leaf_coverage(f, stack, y);
  const Dataset s = sample_leafwise(f, X, q, 500, rng);
  const auto bounds = all_leaf_bounds(f.trees[0], X.schema());
  const auto members = original_leaf_members(f.trees[0], X);
  // Every synthetic cell value occurs among the originals of some leaf whose
  // bounds contain it.
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = 0; j < s.cols(); ++j) {
      bool found = false;
      for (std::size_t l = 0; l < members.size() && !found; ++l) {
        if (!bounds[l][j].contains(s(i, j))) continue;
        for (auto r : members[l])
          if (X(r, j) == s(i, j)) found = true;
      }
      ASSERT_TRUE(found);
    }
  }
}

TEST(SampleLeafwise, RefinementMovesCorrelationTowardData) {
  double gain = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset X = gen_toeplitz_gaussian({500, 2, 0.9, seed});
    Engine rng = make_engine(seed, {1});
    const Dataset syn0 = sample_marginal_bootstrap(X, 500, rng);
    const Dataset stack = concat_rows(X, syn0);
    const Labels y = stacked_labels(500);
    ForestConfig cfg;
    cfg.num_trees = 20;
    cfg.seed = seed;
    cfg.stratify_by_label = true;
    const Forest f = fit_forest(stack, y, cfg);
    const Dataset syn1 = sample_leafwise(f, X, leaf_coverage(f, stack, y), 500, rng);
    const double r = pearson(X.column(0), X.column(1));
    gain += std::abs(pearson(syn0.column(0), syn0.column(1)) - r) - std::abs(pearson(syn1.column(0), syn1.column(1)) - r);
  }
  EXPECT_GT(gain / 20.0, 0.2);
}

TEST(ArfFit, IndependentDataConvergesImmediately) {
  int immediate = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<std::vector<double>> cols(5, std::vector<double>(1000));
    Engine rng = make_engine(seed, {7});
    for (auto& c : cols)
      for (auto& v : c) v = uniform01(rng);
    ArfConfig cfg;
    cfg.forest.num_trees = 30;
    cfg.forest.seed = seed;
    const ArfModel m = arf_fit(Dataset(continuous_schema(5), cols), cfg);
    immediate += m.converged && m.iterations_run == 0;
  }
  EXPECT_GE(immediate, 7);
}

TEST(ArfFit, LargeDeltaStopsAtRoundZero) {
  const Dataset X = gen_toeplitz_gaussian({300, 3, 0.9, 1});
  ArfConfig cfg;
  cfg.forest.num_trees = 10;
  cfg.delta = 0.49;
  const ArfModel m = arf_fit(X, cfg);
  EXPECT_TRUE(m.converged);
  EXPECT_EQ(m.iterations_run, 0u);
  EXPECT_EQ(m.trace.size(), 1u);
}

TEST(ArfFit, CorrelatedGaussianTerminates) {
  int converged = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset X = gen_toeplitz_gaussian({1000, 2, 0.9, seed});
    ArfConfig cfg;
    cfg.forest.num_trees = 30;
    cfg.forest.seed = seed;
    const ArfModel m = arf_fit(X, cfg);
    EXPECT_LE(m.iterations_run, cfg.max_iters);
    EXPECT_EQ(m.trace.size(), m.iterations_run + 1);
    EXPECT_GT(m.trace[0], 0.5);
    if (m.converged) {
      ++converged;
      EXPECT_LE(m.trace.back(), 0.5);
    }
  }
  EXPECT_GE(converged, 4);
}

TEST(ArfFit, LocalIndependenceImproves) {
  // Mean within-leaf |corr| of originals under the final forest is below the
  // raw correlation.
  double raw = 0.0, within = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset X = gen_toeplitz_gaussian({1000, 2, 0.9, seed});
    ArfConfig cfg;
    cfg.forest.num_trees = 10;
    cfg.forest.seed = seed;
    cfg.forest.min_node_size = 5;
    const ArfModel m = arf_fit(X, cfg);
    raw += std::abs(pearson(X.column(0), X.column(1)));
    double sum = 0.0, weight = 0.0;
    for (const Tree& t : m.forest.trees) {
      for (const auto& rows : original_leaf_members(t, X)) {
        std::set<std::uint32_t> uniq(rows.begin(), rows.end());
        if (uniq.size() < 5) continue;
        std::vector<double> a, b;
        for (auto r : uniq) {
          a.push_back(X(r, 0));
          b.push_back(X(r, 1));
        }
        const double c = pearson(a, b);
        if (!std::isfinite(c)) continue;
        sum += std::abs(c) * static_cast<double>(uniq.size());
        weight += static_cast<double>(uniq.size());
      }
    }
    within += sum / weight;
  }
  EXPECT_LT(within, raw);
}

TEST(ArfFit, Validation) {
  const Dataset X = gen_toeplitz_gaussian({3, 1, 0.0, 1});
  ArfConfig cfg;
  cfg.delta = 0.5;
  EXPECT_THROW(arf_fit(X, cfg), InvalidArgument);
  cfg.delta = 0.0;
  cfg.max_iters = 0;
  EXPECT_THROW(arf_fit(X, cfg), InvalidArgument);
  cfg.max_iters = 10;
  cfg.forest.min_node_size = 2;
  EXPECT_THROW(arf_fit(X, cfg), InvalidArgument);
}

}  // namespace
