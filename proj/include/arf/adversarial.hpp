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

// The adversarial training loop.
//
// A forest is trained to tell the original rows (label 1) from a synthetic
// copy (label 0). The first synthetic copy draws every column independently
// from its empirical marginal; later copies draw a tree uniformly, a leaf in
// proportion to its coverage of the original data, and then every feature
// independently from the original rows in that leaf. The loop stops when a
// freshly trained challenger can no longer beat 1/2 + delta out of bag, and
// the forest whose leaves generated the fooling data is returned.
//
// Stacked training data always puts the n original rows first, so in-bag
// indices below n refer to rows of the original dataset.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "arf/error.hpp"
#include "arf/forest.hpp"
#include "arf/random.hpp"
#include "arf/tabular.hpp"

namespace arf {

struct ArfConfig {
  ForestConfig forest = [] {
    ForestConfig f;
    f.stratify_by_label = true;
    return f;
  }();
  double delta = 0.0;
  std::size_t max_iters = 10;
  std::uint64_t early_seed = 7;

  void validate() const {
    if (!(delta >= 0.0 && delta < 0.5)) throw InvalidArgument("arf: delta must lie in [0, 0.5)");
    if (max_iters < 1) throw InvalidArgument("arf: max_iters must be >= 1");
  }
};

struct ArfModel {
  Forest forest;
  std::vector<double> trace;  // OOB accuracy of every discriminator trained
  std::size_t iterations_run = 0;
  bool converged = false;
  std::size_t n_original = 0;
  ArfConfig config;
};

// m rows, each cell drawn uniformly with replacement from its own column.
inline Dataset sample_marginal_bootstrap(const Dataset& ds, std::size_t m, Engine& rng) {
  if (ds.empty()) throw InvalidArgument("sample_marginal_bootstrap: empty dataset");
  std::vector<std::vector<double>> cols(ds.cols(), std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < ds.cols(); ++j) cols[j][i] = ds(uniform_index(rng, ds.rows()), j);
  return Dataset(ds.schema(), std::move(cols));
}

// In-bag rows of `tree` with index < n_original, grouped by leaf, with
// bootstrap multiplicity.
inline std::vector<std::vector<std::uint32_t>> original_leaf_members(const Tree& tree,
                                                                     const Dataset& originals) {
  std::vector<std::vector<std::uint32_t>> members(tree.num_leaves());
  const std::size_t n = originals.rows();
  for (auto r : tree.inbag)
    if (r < n) members[tree.leaf_of(originals, r)].push_back(r);
  return members;
}

// q(leaf) = 2 * (in-bag label-1 rows in the leaf) / n_b for every tree.
inline std::vector<std::vector<double>> leaf_coverage(const Forest& forest, const Dataset& stacked,
                                                      const Labels& labels) {
  std::vector<std::vector<double>> cov(forest.size());
  parallel_for(forest.size(), forest.config.num_threads, [&](std::size_t b) {
    const Tree& t = forest.trees[b];
    std::vector<double> counts(t.num_leaves(), 0.0);
    std::size_t originals = 0;
    for (auto r : t.inbag) {
      if (!labels[r]) continue;
      counts[t.leaf_of(stacked, r)] += 1.0;
      ++originals;
    }
    if (originals == 0) throw InvalidArgument("leaf_coverage: tree has no in-bag original rows");
    const double nb = static_cast<double>(t.n_inbag);
    for (double& c : counts) c = 2.0 * c / nb;
    cov[b] = std::move(counts);
  });
  return cov;
}

namespace detail {

// Index into `cumulative` (running sums of non-negative weights) chosen with
// probability proportional to each weight; zero-weight entries are never
// chosen.
inline std::size_t draw_cumulative(std::span<const double> cumulative, Engine& rng) {
  const double total = cumulative.back();
  const double u = uniform01(rng) * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) {
    // u rounded up to total: take the last entry with positive weight.
    it = std::lower_bound(cumulative.begin(), cumulative.end(), total);
  }
  return static_cast<std::size_t>(it - cumulative.begin());
}

inline std::vector<double> cumulative_sum(std::span<const double> w) {
  std::vector<double> c(w.size());
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) c[i] = (s += w[i]);
  return c;
}

}  // namespace detail

// m synthetic rows: tree uniform, leaf with probability proportional to its
// (renormalized) coverage, then each feature independently from a uniformly
// chosen in-bag original row of that leaf. `forest` must have been trained on
// a stack whose first originals.rows() rows are `originals`.
inline Dataset sample_leafwise(const Forest& forest, const Dataset& originals,
                               const std::vector<std::vector<double>>& coverage, std::size_t m,
                               Engine& rng) {
  const std::size_t B = forest.size();
  std::vector<std::vector<std::vector<std::uint32_t>>> members(B);
  std::vector<std::vector<double>> cumulative(B);
  parallel_for(B, forest.config.num_threads, [&](std::size_t b) {
    members[b] = original_leaf_members(forest.trees[b], originals);
    cumulative[b] = detail::cumulative_sum(coverage[b]);
  });

  std::vector<std::vector<double>> cols(originals.cols(), std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = uniform_index(rng, B);
    if (cumulative[b].empty() || !(cumulative[b].back() > 0.0))
      throw InternalError("sample_leafwise: tree with zero total coverage");
    const std::size_t leaf = detail::draw_cumulative(cumulative[b], rng);
    const auto& rows = members[b][leaf];
    if (rows.empty()) throw InternalError("sample_leafwise: sampled leaf has no original rows");
    for (std::size_t j = 0; j < originals.cols(); ++j)
      cols[j][i] = originals(rows[uniform_index(rng, rows.size())], j);
  }
  return Dataset(originals.schema(), std::move(cols));
}

// Runs the adversarial loop on `ds`.
inline ArfModel arf_fit(const Dataset& ds, const ArfConfig& cfg) {
  cfg.validate();
  const std::size_t n = ds.rows();
  if (n < 2 * cfg.forest.min_node_size || n < 2)
    throw InvalidArgument("arf_fit: need at least 2 * min_node_size rows");

  Labels labels(2 * n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n), std::uint8_t{1});

  auto round_config = [&](std::size_t round) {
    ForestConfig fc = cfg.forest;
    fc.seed = derive_seed(cfg.forest.seed, {stream::kTree, round});
    return fc;
  };

  ArfModel model;
  model.config = cfg;
  model.n_original = n;

  Engine rng0 = make_engine(cfg.early_seed, {stream::kSynthetic, 0});
  Dataset stack = concat_rows(ds, sample_marginal_bootstrap(ds, n, rng0));
  Forest current = fit_forest(stack, labels, round_config(0));
  model.trace.push_back(oob_accuracy(current, stack, labels));
  if (model.trace.back() <= 0.5 + cfg.delta) {
    model.converged = true;
    model.forest = std::move(current);
    return model;
  }

  for (std::size_t round = 1; round <= cfg.max_iters; ++round) {
    Engine rng = make_engine(cfg.early_seed, {stream::kSynthetic, round});
    const auto cov = leaf_coverage(current, stack, labels);
    std::vector<std::vector<double>> normalized = cov;
    for (auto& q : normalized) {
      double total = 0.0;
      for (double v : q) total += v;
      for (double& v : q) v /= total;
    }
    Dataset next_stack = concat_rows(ds, sample_leafwise(current, ds, normalized, n, rng));
    Forest challenger = fit_forest(next_stack, labels, round_config(round));
    model.trace.push_back(oob_accuracy(challenger, next_stack, labels));
    model.iterations_run = round;
    if (model.trace.back() <= 0.5 + cfg.delta) {
      model.converged = true;
      break;
    }
    current = std::move(challenger);
    stack = std::move(next_stack);
  }
  model.forest = std::move(current);
  return model;
}

}  // namespace arf
