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

// CART trees with Gini splits and a bagged random-forest binary classifier.
//
// Split literals are X_j < t on continuous features and X_j = level on
// categorical ones. Rows satisfying the literal go left. Leaves carry soft
// labels (the fraction of label-1 rows among the rows used to grow the tree).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <type_traits>
#include <vector>

#include "arf/error.hpp"
#include "arf/normal.hpp"
#include "arf/parallel.hpp"
#include "arf/random.hpp"
#include "arf/tabular.hpp"

namespace arf {

using Labels = std::vector<std::uint8_t>;

enum class SplitKind : std::uint8_t { Less, Equal };

struct SplitLiteral {
  std::size_t feature = 0;
  SplitKind kind = SplitKind::Less;
  double value = 0.0;  // threshold for Less, level index for Equal

  bool holds(double x) const { return kind == SplitKind::Less ? x < value : x == value; }

  friend bool operator==(const SplitLiteral&, const SplitLiteral&) = default;
};

struct TreeNode {
  SplitLiteral split;
  std::int32_t left = -1;  // -1 for leaves
  std::int32_t right = -1;
  std::int32_t leaf_id = -1;
  double soft_label = 0.0;
  std::uint32_t train_count = 0;

  bool is_leaf() const { return left < 0; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;         // nodes[0] is the root
  std::vector<std::int32_t> leaf_node; // leaf id -> node index
  std::vector<std::uint32_t> inbag;    // sorted multiset of row indices; empty after reload
  std::size_t n_inbag = 0;             // n_b

  std::size_t num_leaves() const { return leaf_node.size(); }

  template <typename ValueOf>
    requires std::is_invocable_r_v<double, ValueOf&, std::size_t>
  std::size_t leaf_of(ValueOf&& value_of) const {
    std::int32_t k = 0;
    while (!nodes[k].is_leaf()) {
      const TreeNode& nd = nodes[k];
      k = nd.split.holds(value_of(nd.split.feature)) ? nd.left : nd.right;
    }
    return static_cast<std::size_t>(nodes[k].leaf_id);
  }

  std::size_t leaf_of(std::span<const double> row) const {
    return leaf_of([&](std::size_t j) { return row[j]; });
  }

  std::size_t leaf_of(const Dataset& ds, std::size_t r) const {
    return leaf_of([&](std::size_t j) { return ds(r, j); });
  }

  const TreeNode& leaf(std::size_t id) const { return nodes[leaf_node[id]]; }

  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [k, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes[k].is_leaf()) {
        stack.push_back({nodes[k].left, d + 1});
        stack.push_back({nodes[k].right, d + 1});
      }
    }
    return best;
  }

  friend bool operator==(const Tree&, const Tree&) = default;
};

enum class Resample : std::uint8_t { Bootstrap, Subsample };

struct ForestConfig {
  std::size_t num_trees = 100;
  std::optional<std::size_t> mtry;  // default floor(sqrt(d))
  std::size_t min_node_size = 2;
  Resample resample = Resample::Bootstrap;
  double sample_fraction = 1.0;  // resample size relative to n
  bool stratify_by_label = false;
  std::optional<std::size_t> max_depth;
  std::uint64_t seed = 42;
  unsigned num_threads = 0;  // 0: ARF_NUM_THREADS or hardware concurrency

  std::size_t resolved_mtry(std::size_t d) const {
    if (mtry) return std::clamp<std::size_t>(*mtry, 1, d);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
  }

  void validate(std::size_t d) const {
    if (num_trees < 1) throw InvalidArgument("forest: num_trees must be >= 1");
    if (min_node_size < 1) throw InvalidArgument("forest: min_node_size must be >= 1");
    if (mtry && (*mtry < 1 || *mtry > d)) throw InvalidArgument("forest: mtry must lie in [1, d]");
    if (!(sample_fraction > 0.0) || (resample == Resample::Subsample && sample_fraction > 1.0))
      throw InvalidArgument("forest: invalid sample fraction");
  }

  friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
};

struct Forest {
  std::vector<Tree> trees;
  ForestConfig config;
  Schema schema;

  std::size_t size() const { return trees.size(); }

  friend bool operator==(const Forest&, const Forest&) = default;
};

// ---------------------------------------------------------------------------
// Split search

// Gini impurity of a node with `pos` label-1 rows out of `n`.
inline double gini_impurity(std::uint64_t pos, std::uint64_t n) {
  if (n == 0) return 0.0;
  const double p = static_cast<double>(pos) / static_cast<double>(n);
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

inline double gini_decrease(std::uint64_t pos_left, std::uint64_t n_left, std::uint64_t pos_right,
                            std::uint64_t n_right) {
  const std::uint64_t n = n_left + n_right;
  const double nd = static_cast<double>(n);
  return gini_impurity(pos_left + pos_right, n) -
         static_cast<double>(n_left) / nd * gini_impurity(pos_left, n_left) -
         static_cast<double>(n_right) / nd * gini_impurity(pos_right, n_right);
}

struct SplitCandidate {
  SplitLiteral literal;
  double impurity_decrease = 0.0;
};

namespace detail {

// Split quality as the exact fraction num/den of
//   (pL^2 + nL0^2)/nL + (pR^2 + nR0^2)/nR,
// which orders splits exactly like the Gini decrease.
struct SplitScore {
  int128_t num = 0;
  int128_t den = 1;

  static SplitScore of(std::uint64_t pl, std::uint64_t nl, std::uint64_t pr, std::uint64_t nr) {
    const auto sq = [](std::uint64_t a, std::uint64_t b) {
      return static_cast<int128_t>(a) * a + static_cast<int128_t>(b) * b;
    };
    const int128_t a_left = sq(pl, nl - pl);
    const int128_t a_right = sq(pr, nr - pr);
    return {a_left * static_cast<int128_t>(nr) + a_right * static_cast<int128_t>(nl),
            static_cast<int128_t>(nl) * static_cast<int128_t>(nr)};
  }

  bool greater_than(const SplitScore& o) const { return num * o.den > o.num * den; }
};

struct SplitScratch {
  std::vector<std::pair<double, std::uint8_t>> pairs;
  std::vector<std::uint64_t> level_n;
  std::vector<std::uint64_t> level_pos;
};

}  // namespace detail

// Best Gini split of `rows` (a multiset of row indices) over `features`.
// Every child must keep at least `min_node_size` rows, and the split must
// strictly reduce impurity. Ties go to the lowest feature index, then the
// lowest threshold or level.
inline std::optional<SplitCandidate> best_split(const Dataset& ds, const Labels& labels,
                                                std::span<const std::uint32_t> rows,
                                                std::span<const std::size_t> features,
                                                std::size_t min_node_size,
                                                detail::SplitScratch* scratch = nullptr) {
  if (features.empty()) throw InvalidArgument("best_split: empty candidate feature set");
  detail::SplitScratch local;
  detail::SplitScratch& sc = scratch ? *scratch : local;

  const std::uint64_t n = rows.size();
  std::uint64_t pos = 0;
  for (auto r : rows) pos += labels[r];
  if (n < 2 * min_node_size || pos == 0 || pos == n) return std::nullopt;

  std::vector<std::size_t> order(features.begin(), features.end());
  std::sort(order.begin(), order.end());

  // Parent score: (pos^2 + neg^2) / n.
  const detail::SplitScore parent{static_cast<int128_t>(pos) * pos +
                                      static_cast<int128_t>(n - pos) * (n - pos),
                                  static_cast<int128_t>(n)};
  detail::SplitScore best = parent;
  std::optional<SplitLiteral> best_literal;
  std::uint64_t best_pl = 0, best_nl = 0;

  for (std::size_t j : order) {
    const Column& col = ds.schema()[j];
    const auto values = ds.column(j);
    if (col.is_categorical()) {
      const std::size_t k = col.levels.size();
      sc.level_n.assign(k, 0);
      sc.level_pos.assign(k, 0);
      for (auto r : rows) {
        const auto l = static_cast<std::size_t>(values[r]);
        ++sc.level_n[l];
        sc.level_pos[l] += labels[r];
      }
      for (std::size_t l = 0; l < k; ++l) {
        const std::uint64_t nl = sc.level_n[l];
        if (nl == 0 || nl < min_node_size || n - nl < min_node_size) continue;
        const std::uint64_t pl = sc.level_pos[l];
        const auto score = detail::SplitScore::of(pl, nl, pos - pl, n - nl);
        if (score.greater_than(best)) {
          best = score;
          best_literal = SplitLiteral{j, SplitKind::Equal, static_cast<double>(l)};
          best_pl = pl;
          best_nl = nl;
        }
      }
    } else {
      sc.pairs.clear();
      sc.pairs.reserve(n);
      for (auto r : rows) sc.pairs.emplace_back(values[r], labels[r]);
      std::sort(sc.pairs.begin(), sc.pairs.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::uint64_t nl = 0, pl = 0;
      for (std::size_t i = 0; i + 1 < sc.pairs.size(); ++i) {
        ++nl;
        pl += sc.pairs[i].second;
        const double a = sc.pairs[i].first;
        const double b = sc.pairs[i + 1].first;
        if (!(a < b)) continue;
        if (nl < min_node_size) continue;
        if (n - nl < min_node_size) break;
        const auto score = detail::SplitScore::of(pl, nl, pos - pl, n - nl);
        if (score.greater_than(best)) {
          double t = std::midpoint(a, b);
          if (!(t > a)) t = b;
          best = score;
          best_literal = SplitLiteral{j, SplitKind::Less, t};
          best_pl = pl;
          best_nl = nl;
        }
      }
    }
  }
  if (!best_literal) return std::nullopt;
  return SplitCandidate{*best_literal, gini_decrease(best_pl, best_nl, pos - best_pl, n - best_nl)};
}

// ---------------------------------------------------------------------------
// Growing

// Draws the in-bag multiset for one tree according to the resampling mode.
inline std::vector<std::uint32_t> draw_inbag(const Labels& labels, const ForestConfig& cfg,
                                             Engine& rng) {
  const std::size_t n = labels.size();
  std::vector<std::vector<std::uint32_t>> groups;
  if (cfg.stratify_by_label) {
    groups.resize(2);
    for (std::size_t i = 0; i < n; ++i) groups[labels[i] ? 1 : 0].push_back(static_cast<std::uint32_t>(i));
  } else {
    groups.emplace_back(n);
    std::iota(groups[0].begin(), groups[0].end(), 0u);
  }
  std::vector<std::uint32_t> inbag;
  for (auto& g : groups) {
    if (g.empty()) continue;
    const auto size = static_cast<std::size_t>(std::llround(cfg.sample_fraction * static_cast<double>(g.size())));
    if (cfg.resample == Resample::Bootstrap) {
      for (std::size_t k = 0; k < size; ++k) inbag.push_back(g[uniform_index(rng, g.size())]);
    } else {
      // Partial Fisher-Yates.
      for (std::size_t k = 0; k < size; ++k) {
        std::swap(g[k], g[k + uniform_index(rng, g.size() - k)]);
        inbag.push_back(g[k]);
      }
    }
  }
  std::sort(inbag.begin(), inbag.end());
  return inbag;
}

// Grows one tree on the given in-bag multiset. Nodes are expanded depth
// first, left child first; leaves are numbered in that order.
inline Tree grow_tree(const Dataset& ds, const Labels& labels, std::vector<std::uint32_t> inbag,
                      const ForestConfig& cfg, Engine& rng) {
  const std::size_t d = ds.cols();
  if (inbag.size() < cfg.min_node_size || inbag.empty())
    throw InvalidArgument("grow_tree: fewer than min_node_size in-bag rows");
  const std::size_t mtry = cfg.resolved_mtry(d);

  Tree tree;
  tree.n_inbag = inbag.size();
  std::vector<std::uint32_t> rows = inbag;
  tree.inbag = std::move(inbag);

  struct Work {
    std::int32_t node;
    std::size_t begin, end, depth;
  };
  std::vector<Work> stack;
  tree.nodes.emplace_back();
  stack.push_back({0, 0, rows.size(), 0});

  std::vector<std::size_t> all_features(d);
  std::iota(all_features.begin(), all_features.end(), 0);
  std::vector<std::size_t> candidates(mtry);
  detail::SplitScratch scratch;

  while (!stack.empty()) {
    const Work w = stack.back();
    stack.pop_back();
    const std::span<const std::uint32_t> node_rows(rows.data() + w.begin, w.end - w.begin);

    std::optional<SplitCandidate> split;
    if (!cfg.max_depth || w.depth < *cfg.max_depth) {
      // mtry features uniformly without replacement.
      for (std::size_t k = 0; k < mtry; ++k) {
        std::swap(all_features[k], all_features[k + uniform_index(rng, d - k)]);
        candidates[k] = all_features[k];
      }
      split = best_split(ds, labels, node_rows, candidates, cfg.min_node_size, &scratch);
    }

    if (!split) {
      std::uint64_t pos = 0;
      for (auto r : node_rows) pos += labels[r];
      TreeNode& leaf = tree.nodes[w.node];
      leaf.leaf_id = static_cast<std::int32_t>(tree.leaf_node.size());
      leaf.train_count = static_cast<std::uint32_t>(node_rows.size());
      leaf.soft_label = static_cast<double>(pos) / static_cast<double>(node_rows.size());
      tree.leaf_node.push_back(w.node);
      continue;
    }

    const SplitLiteral lit = split->literal;
    const auto values = ds.column(lit.feature);
    auto mid = std::partition(rows.begin() + static_cast<std::ptrdiff_t>(w.begin),
                              rows.begin() + static_cast<std::ptrdiff_t>(w.end),
                              [&](std::uint32_t r) { return lit.holds(values[r]); });
    const auto split_at = static_cast<std::size_t>(mid - rows.begin());

    const auto left = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[w.node];
    node.split = lit;
    node.left = left;
    node.right = left + 1;
    node.train_count = static_cast<std::uint32_t>(w.end - w.begin);
    stack.push_back({left + 1, split_at, w.end, w.depth + 1});
    stack.push_back({left, w.begin, split_at, w.depth + 1});
  }
  return tree;
}

inline Tree grow_tree(const Dataset& ds, const Labels& labels, const ForestConfig& cfg, Engine& rng) {
  auto inbag = draw_inbag(labels, cfg, rng);
  return grow_tree(ds, labels, std::move(inbag), cfg, rng);
}

// Trains cfg.num_trees trees on independent resamples. Tree b draws from its
// own stream derived from (cfg.seed, b), so the forest does not depend on the
// number of workers.
inline Forest fit_forest(const Dataset& ds, const Labels& labels, const ForestConfig& cfg) {
  cfg.validate(ds.cols());
  if (labels.size() != ds.rows()) throw InvalidArgument("fit_forest: label count != row count");
  for (auto y : labels)
    if (y > 1) throw InvalidArgument("fit_forest: labels must be binary");
  if (ds.rows() < cfg.min_node_size) throw InvalidArgument("fit_forest: fewer rows than min_node_size");

  Forest forest;
  forest.config = cfg;
  forest.schema = ds.schema();
  forest.trees.resize(cfg.num_trees);
  parallel_for(cfg.num_trees, cfg.num_threads, [&](std::size_t b) {
    Engine rng = make_engine(cfg.seed, {stream::kTree, b});
    forest.trees[b] = grow_tree(ds, labels, cfg, rng);
  });
  return forest;
}

// Mean soft label over all trees.
inline double predict_prob(const Forest& forest, std::span<const double> row) {
  double sum = 0.0;
  for (const auto& t : forest.trees) sum += t.leaf(t.leaf_of(row)).soft_label;
  return sum / static_cast<double>(forest.trees.size());
}

// In-bag multiplicity of every row for one tree.
inline std::vector<std::uint32_t> inbag_counts(const Tree& tree, std::size_t n) {
  std::vector<std::uint32_t> counts(n, 0);
  for (auto r : tree.inbag) ++counts[r];
  return counts;
}

// Out-of-bag accuracy: each row is scored by the mean soft label of the trees
// that did not see it, classified at 0.5 (ties go to label 1).
inline double oob_accuracy(const Forest& forest, const Dataset& ds, const Labels& labels) {
  const std::size_t n = ds.rows();
  std::vector<std::vector<std::uint8_t>> inbag(forest.trees.size());
  parallel_for(forest.trees.size(), forest.config.num_threads, [&](std::size_t b) {
    inbag[b].assign(n, 0);
    for (auto r : forest.trees[b].inbag) inbag[b][r] = 1;
  });

  constexpr std::size_t kBlock = 512;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<std::size_t> correct(blocks, 0), scored(blocks, 0);
  parallel_for(blocks, forest.config.num_threads, [&](std::size_t blk) {
    const std::size_t end = std::min(n, (blk + 1) * kBlock);
    for (std::size_t i = blk * kBlock; i < end; ++i) {
      double sum = 0.0;
      std::size_t k = 0;
      for (std::size_t b = 0; b < forest.trees.size(); ++b) {
        if (inbag[b][i]) continue;
        const Tree& t = forest.trees[b];
        sum += t.leaf(t.leaf_of(ds, i)).soft_label;
        ++k;
      }
      if (k == 0) continue;
      const std::uint8_t predicted = (sum / static_cast<double>(k) >= 0.5) ? 1 : 0;
      ++scored[blk];
      if (predicted == labels[i]) ++correct[blk];
    }
  });
  const std::size_t total = std::accumulate(scored.begin(), scored.end(), std::size_t{0});
  if (total == 0) throw InvalidArgument("oob_accuracy: no row is out-of-bag for any tree");
  return static_cast<double>(std::accumulate(correct.begin(), correct.end(), std::size_t{0})) /
         static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Leaf geometry

// Per-feature extent of a leaf: [lo, hi) for continuous features, a level
// mask for categorical ones.
struct FeatureBounds {
  double lo = -kInf;
  double hi = kInf;
  std::vector<std::uint8_t> allowed;

  bool categorical() const { return !allowed.empty(); }

  bool contains(double x) const {
    if (categorical()) {
      const auto l = static_cast<std::size_t>(x);
      return l < allowed.size() && allowed[l];
    }
    return lo <= x && x < hi;
  }

  std::size_t allowed_count() const {
    return static_cast<std::size_t>(std::count(allowed.begin(), allowed.end(), std::uint8_t{1}));
  }

  friend bool operator==(const FeatureBounds&, const FeatureBounds&) = default;
};

using LeafBounds = std::vector<FeatureBounds>;

inline LeafBounds full_space(const Schema& schema) {
  LeafBounds b(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j)
    if (schema[j].is_categorical()) b[j].allowed.assign(schema[j].levels.size(), 1);
  return b;
}

// Bounds of every leaf of `tree`, indexed by leaf id.
inline std::vector<LeafBounds> all_leaf_bounds(const Tree& tree, const Schema& schema) {
  std::vector<LeafBounds> out(tree.num_leaves());
  std::vector<std::pair<std::int32_t, LeafBounds>> stack;
  stack.emplace_back(0, full_space(schema));
  while (!stack.empty()) {
    auto [k, bounds] = std::move(stack.back());
    stack.pop_back();
    const TreeNode& nd = tree.nodes[k];
    if (nd.is_leaf()) {
      for (const auto& fb : bounds)
        if (fb.categorical() && fb.allowed_count() == 0)
          throw InternalError("leaf_bounds: empty allowed level set");
      out[nd.leaf_id] = std::move(bounds);
      continue;
    }
    const SplitLiteral& s = nd.split;
    LeafBounds left = bounds;
    LeafBounds& right = bounds;
    if (s.kind == SplitKind::Less) {
      left[s.feature].hi = std::min(left[s.feature].hi, s.value);
      right[s.feature].lo = std::max(right[s.feature].lo, s.value);
    } else {
      const auto l = static_cast<std::size_t>(s.value);
      auto& mask = left[s.feature].allowed;
      const std::uint8_t had = mask[l];
      std::fill(mask.begin(), mask.end(), std::uint8_t{0});
      mask[l] = had;
      right[s.feature].allowed[l] = 0;
    }
    stack.emplace_back(nd.right, std::move(right));
    stack.emplace_back(nd.left, std::move(left));
  }
  return out;
}

// Optionally clips continuous bounds to [min, max] global data ranges.
using GlobalRanges = std::vector<std::pair<double, double>>;

inline GlobalRanges global_ranges(const Dataset& ds) {
  GlobalRanges r(ds.cols(), {0.0, 0.0});
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    if (ds.schema()[j].is_categorical() || ds.empty()) continue;
    auto [lo, hi] = std::minmax_element(ds.column(j).begin(), ds.column(j).end());
    r[j] = {*lo, *hi};
  }
  return r;
}

inline void clip_bounds(LeafBounds& b, const Schema& schema, const GlobalRanges& ranges) {
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema[j].is_categorical()) continue;
    b[j].lo = std::max(b[j].lo, ranges[j].first);
    b[j].hi = std::min(b[j].hi, ranges[j].second);
  }
}

inline LeafBounds leaf_bounds(const Tree& tree, std::size_t leaf_id, const Schema& schema,
                              const std::optional<GlobalRanges>& ranges = std::nullopt) {
  if (leaf_id >= tree.num_leaves()) throw InvalidArgument("leaf_bounds: no such leaf");
  LeafBounds b = std::move(all_leaf_bounds(tree, schema)[leaf_id]);
  if (ranges) clip_bounds(b, schema, *ranges);
  return b;
}

}  // namespace arf
