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

// Leaf-wise density estimation on top of a converged adversarial forest.
//
// Every leaf of every tree becomes a mixture component: its weight is the
// leaf's coverage of the original data, and its density is a product of
// univariate densities fitted to the original rows in the leaf (truncated
// normal for continuous features, smoothed multinomial for categorical ones).
// The estimated density of a point averages, over trees, the weighted
// component density of the one leaf per tree that contains it.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "arf/adversarial.hpp"
#include "arf/error.hpp"
#include "arf/forest.hpp"
#include "arf/normal.hpp"
#include "arf/parallel.hpp"
#include "arf/tabular.hpp"

namespace arf {

// Normal(mu, sigma^2) truncated to [lo, hi].
struct TruncNormalParams {
  double mu = 0.0;
  double sigma = 1.0;
  double lo = -kInf;
  double hi = kInf;
  double log_norm = 0.0;  // log P(lo <= X <= hi) for the untruncated normal

  static TruncNormalParams make(double mu, double sigma, double lo, double hi) {
    if (!(sigma > 0.0)) throw InvalidArgument("truncated normal: sigma must be positive");
    if (!(lo < hi)) throw InvalidArgument("truncated normal: need lo < hi");
    return {mu, sigma, lo, hi, log_normal_interval_mass((lo - mu) / sigma, (hi - mu) / sigma)};
  }

  double log_pdf(double x) const {
    if (x < lo || x > hi) return -kInf;
    return log_normal_pdf((x - mu) / sigma) - std::log(sigma) - log_norm;
  }

  // log P(a <= X <= b) under the truncated law.
  double log_mass(double a, double b) const {
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (!(a < b)) return -kInf;
    return log_normal_interval_mass((a - mu) / sigma, (b - mu) / sigma) - log_norm;
  }

  // Inverse-CDF draw restricted to [a, b] ∩ [lo, hi] at uniform u.
  double sample(double u, double a = -kInf, double b = kInf) const {
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (!(a < b)) return a;
    const double z = truncated_std_normal_inverse((a - mu) / sigma, (b - mu) / sigma, u);
    return std::clamp(mu + sigma * z, a, b);
  }

  friend bool operator==(const TruncNormalParams&, const TruncNormalParams&) = default;
};

// Probabilities over all levels of the column; zero outside the leaf's
// allowed set.
struct CategoricalParams {
  std::vector<double> probs;

  double log_pmf(std::size_t level) const {
    return level < probs.size() && probs[level] > 0.0 ? std::log(probs[level]) : -kInf;
  }

  friend bool operator==(const CategoricalParams&, const CategoricalParams&) = default;
};

using FeatureDist = std::variant<TruncNormalParams, CategoricalParams>;

struct LeafProfile {
  std::size_t tree = 0;
  std::size_t leaf = 0;
  double coverage = 0.0;
  LeafBounds bounds;
  std::vector<FeatureDist> dist;  // empty for leaves without original rows
  std::size_t original_count = 0;

  bool empty() const { return original_count == 0; }

  friend bool operator==(const LeafProfile&, const LeafProfile&) = default;
};

struct FordeConfig {
  double prior_alpha = 1.0;
  double sigma_floor_rel = 1e-6;  // times the global per-feature standard deviation
  double sigma_floor_abs = 1e-6;  // used when that standard deviation is zero
  bool clip_to_data_range = true;  // truncate unbounded leaf sides at the training min / max
  unsigned num_threads = 0;
};

struct FordeModel {
  Schema schema;
  Forest forest;
  std::vector<std::vector<LeafProfile>> profiles;  // [tree][leaf]
  FordeConfig config;
  ArfConfig arf_config;
  std::vector<double> arf_trace;
  bool arf_converged = true;
  GlobalRanges ranges;  // training min / max used to clip leaf bounds; empty when not clipped

  std::size_t num_trees() const { return forest.size(); }
  const LeafProfile& profile(std::size_t tree, std::size_t leaf) const { return profiles[tree][leaf]; }
};

// ---------------------------------------------------------------------------

// Sample mean and standard deviation (n - 1 denominator) of `values`. When
// every value is identical the spread is unidentified and the standard
// deviation of a uniform over [lo, hi] is used instead (if finite). The
// result is floored at `sigma_floor`.
inline TruncNormalParams estimate_continuous(std::span<const double> values, double lo, double hi,
                                             double sigma_floor) {
  if (values.empty()) throw InvalidArgument("estimate_continuous: no values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double sigma = 0.0;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    sigma = std::sqrt(ss / (n - 1.0));
  }
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (*mn == *mx && std::isfinite(hi - lo)) sigma = (hi - lo) / std::sqrt(12.0);
  return TruncNormalParams::make(mean, std::max(sigma, sigma_floor), lo, hi);
}

// probs[k] = (count_k + alpha) / (N + alpha * |allowed|) on allowed levels.
inline CategoricalParams estimate_categorical(std::span<const std::size_t> values,
                                              std::span<const std::uint8_t> allowed,
                                              double prior_alpha) {
  const auto n_allowed = static_cast<std::size_t>(std::count(allowed.begin(), allowed.end(), std::uint8_t{1}));
  if (n_allowed == 0) throw InvalidArgument("estimate_categorical: empty allowed level set");
  if (!(prior_alpha > 0.0)) throw InvalidArgument("estimate_categorical: prior must be positive");
  std::vector<double> counts(allowed.size(), 0.0);
  for (auto v : values) {
    if (v >= allowed.size() || !allowed[v])
      throw InvalidArgument("estimate_categorical: value outside the allowed level set");
    counts[v] += 1.0;
  }
  const double denom = static_cast<double>(values.size()) + prior_alpha * static_cast<double>(n_allowed);
  CategoricalParams p;
  p.probs.assign(allowed.size(), 0.0);
  for (std::size_t k = 0; k < allowed.size(); ++k)
    if (allowed[k]) p.probs[k] = (counts[k] + prior_alpha) / denom;
  return p;
}

inline std::vector<double> sigma_floors(const Dataset& ds, const FordeConfig& cfg) {
  std::vector<double> floors(ds.cols(), cfg.sigma_floor_abs);
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    if (ds.schema()[j].is_categorical() || ds.rows() < 2) continue;
    const auto col = ds.column(j);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(col.size() - 1));
    if (sd > 0.0) floors[j] = cfg.sigma_floor_rel * sd;
  }
  return floors;
}

// Clips continuous sides to the training range; constant columns keep their
// leaf bounds.
inline void clip_to_ranges(LeafBounds& b, const Schema& schema, const GlobalRanges& ranges) {
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema[j].is_categorical() || !(ranges[j].first < ranges[j].second)) continue;
    b[j].lo = std::max(b[j].lo, ranges[j].first);
    b[j].hi = std::min(b[j].hi, ranges[j].second);
  }
}

// Builds the leaf profiles of a converged forest from the original data it
// was trained on.
inline FordeModel forde_fit(const ArfModel& arf, const Dataset& ds, const FordeConfig& cfg = {}) {
  if (!(arf.forest.schema == ds.schema())) throw DataError("forde_fit: schema mismatch");
  if (arf.n_original != ds.rows())
    throw DataError("forde_fit: dataset is not the one the forest was trained on");

  FordeModel model;
  model.schema = ds.schema();
  model.forest = arf.forest;
  model.config = cfg;
  model.arf_config = arf.config;
  model.arf_trace = arf.trace;
  model.arf_converged = arf.converged;
  if (cfg.clip_to_data_range) model.ranges = global_ranges(ds);

  const auto floors = sigma_floors(ds, cfg);
  const GlobalRanges ranges = global_ranges(ds);
  const std::size_t d = ds.cols();
  model.profiles.resize(arf.forest.size());
  parallel_for(arf.forest.size(), cfg.num_threads, [&](std::size_t b) {
    const Tree& tree = arf.forest.trees[b];
    const auto members = original_leaf_members(tree, ds);
    auto bounds = all_leaf_bounds(tree, ds.schema());
    if (cfg.clip_to_data_range)
      for (auto& lb : bounds) clip_to_ranges(lb, ds.schema(), ranges);

    std::vector<double> q(tree.num_leaves());
    for (std::size_t l = 0; l < q.size(); ++l)
      q[l] = 2.0 * static_cast<double>(members[l].size()) / static_cast<double>(tree.n_inbag);
    const double total = std::accumulate(q.begin(), q.end(), 0.0);
    if (!(total > 0.0)) throw InvalidArgument("forde_fit: tree has no in-bag original rows");

    auto& out = model.profiles[b];
    out.resize(tree.num_leaves());
    std::vector<double> cont;
    std::vector<std::size_t> cat;
    for (std::size_t l = 0; l < tree.num_leaves(); ++l) {
      LeafProfile& p = out[l];
      p.tree = b;
      p.leaf = l;
      p.coverage = q[l] / total;
      p.bounds = std::move(bounds[l]);
      p.original_count = members[l].size();
      if (p.empty()) continue;
      p.dist.reserve(d);
      for (std::size_t j = 0; j < d; ++j) {
        if (ds.schema()[j].is_categorical()) {
          cat.clear();
          for (auto r : members[l]) cat.push_back(ds.level(r, j));
          p.dist.emplace_back(estimate_categorical(cat, p.bounds[j].allowed, cfg.prior_alpha));
        } else {
          cont.clear();
          for (auto r : members[l]) cont.push_back(ds(r, j));
          p.dist.emplace_back(estimate_continuous(cont, p.bounds[j].lo, p.bounds[j].hi, floors[j]));
        }
      }
    }
  });
  return model;
}

// log of the component density of one leaf at `row`, including its coverage.
inline double leaf_log_term(const LeafProfile& p, std::span<const double> row) {
  if (p.empty() || !(p.coverage > 0.0)) return -kInf;
  double s = std::log(p.coverage);
  for (std::size_t j = 0; j < p.dist.size() && s > -kInf; ++j) {
    if (const auto* tn = std::get_if<TruncNormalParams>(&p.dist[j]))
      s += tn->log_pdf(row[j]);
    else
      s += std::get<CategoricalParams>(p.dist[j]).log_pmf(static_cast<std::size_t>(row[j]));
  }
  return s;
}

inline double log_sum_exp(std::span<const double> terms) {
  double mx = -kInf;
  for (double t : terms) mx = std::max(mx, t);
  if (mx == -kInf) return -kInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

// log q(x) = log( (1/B) * sum_b q(leaf_b(x)) * prod_j q_j(x_j) ).
inline double log_density(const FordeModel& model, std::span<const double> row) {
  const std::size_t B = model.num_trees();
  std::vector<double> terms(B);
  for (std::size_t b = 0; b < B; ++b) {
    const Tree& t = model.forest.trees[b];
    terms[b] = leaf_log_term(model.profiles[b][t.leaf_of(row)], row);
  }
  return log_sum_exp(terms) - std::log(static_cast<double>(B));
}

// ---------------------------------------------------------------------------
// Negative log-likelihood

struct NllConfig {
  bool zero_floor = false;
  double epsilon_floor = 1e-300;
  unsigned num_threads = 0;
};

struct NllReport {
  double mean = 0.0;       // nats
  double std_error = 0.0;
  std::size_t rows = 0;    // rows entering the mean
  std::vector<std::size_t> zero_density_rows;
};

// Mean of -log density. Rows with zero density are listed separately and
// enter the mean as -log(epsilon_floor) only when zero_floor is set.
inline NllReport nll_from_log_densities(std::span<const double> logd, const NllConfig& cfg = {}) {
  if (logd.empty()) throw InvalidArgument("nll: empty dataset");
  NllReport rep;
  std::vector<double> losses;
  losses.reserve(logd.size());
  for (std::size_t i = 0; i < logd.size(); ++i) {
    if (logd[i] == -kInf || std::isnan(logd[i])) {
      rep.zero_density_rows.push_back(i);
      if (cfg.zero_floor) losses.push_back(-std::log(cfg.epsilon_floor));
    } else {
      losses.push_back(-logd[i]);
    }
  }
  rep.rows = losses.size();
  if (losses.empty()) {
    rep.mean = kInf;
    return rep;
  }
  const double n = static_cast<double>(losses.size());
  rep.mean = std::accumulate(losses.begin(), losses.end(), 0.0) / n;
  if (losses.size() > 1) {
    double ss = 0.0;
    for (double l : losses) ss += (l - rep.mean) * (l - rep.mean);
    rep.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return rep;
}

template <typename LogDensityFn>
std::vector<double> log_densities(const Dataset& ds, LogDensityFn&& fn, unsigned threads = 0) {
  std::vector<double> out(ds.rows());
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (ds.rows() + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t blk) {
    std::vector<double> row(ds.cols());
    const std::size_t end = std::min(ds.rows(), (blk + 1) * kBlock);
    for (std::size_t i = blk * kBlock; i < end; ++i) {
      for (std::size_t j = 0; j < ds.cols(); ++j) row[j] = ds(i, j);
      out[i] = fn(std::span<const double>(row));
    }
  });
  return out;
}

inline NllReport nll(const FordeModel& model, const Dataset& ds, const NllConfig& cfg = {}) {
  if (!(model.schema == ds.schema())) throw DataError("nll: schema mismatch");
  const auto logd = log_densities(
      ds, [&](std::span<const double> row) { return log_density(model, row); }, cfg.num_threads);
  return nll_from_log_densities(logd, cfg);
}

}  // namespace arf
