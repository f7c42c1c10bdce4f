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

// Synthetic data from a leaf-wise density model, unconditionally or given
// evidence on some features.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "arf/adversarial.hpp"
#include "arf/error.hpp"
#include "arf/forde.hpp"
#include "arf/parallel.hpp"
#include "arf/random.hpp"
#include "arf/tabular.hpp"

namespace arf {

// Constraint on one feature: closed interval [lo, hi] for continuous
// features, level mask for categorical ones.
struct Constraint {
  std::size_t feature = 0;
  double lo = -kInf;
  double hi = kInf;
  std::vector<std::uint8_t> levels;
};

struct Evidence {
  std::vector<Constraint> constraints;

  bool empty() const { return constraints.empty(); }

  // One optional constraint per feature of `schema`; validates the evidence.
  std::vector<std::optional<Constraint>> by_feature(const Schema& schema) const {
    std::vector<std::optional<Constraint>> out(schema.size());
    for (const auto& c : constraints) {
      if (c.feature >= schema.size()) throw InvalidArgument("evidence: feature out of range");
      if (out[c.feature]) throw InvalidArgument("evidence: two constraints on '" + schema[c.feature].name + "'");
      if (schema[c.feature].is_categorical()) {
        if (c.levels.size() != schema[c.feature].levels.size() ||
            std::count(c.levels.begin(), c.levels.end(), std::uint8_t{1}) == 0)
          throw InvalidArgument("evidence: empty level set for '" + schema[c.feature].name + "'");
      } else if (!(c.lo <= c.hi)) {
        throw InvalidArgument("evidence: empty interval for '" + schema[c.feature].name + "'");
      }
      out[c.feature] = c;
    }
    return out;
  }
};

// Parses constraints of the form  name=lo..hi  (continuous; "inf" allowed)
// or  name=a|b|c  (categorical levels).
inline Evidence parse_evidence(const Schema& schema, const std::vector<std::string>& specs) {
  Evidence ev;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw InvalidArgument("evidence '" + spec + "': expected name=...");
    const std::string name = spec.substr(0, eq);
    const std::string rhs = spec.substr(eq + 1);
    const auto j = schema.index_of(name);
    if (!j) throw InvalidArgument("evidence: unknown column '" + name + "'");
    Constraint c;
    c.feature = *j;
    if (schema[*j].is_categorical()) {
      c.levels.assign(schema[*j].levels.size(), 0);
      std::stringstream ss(rhs);
      std::string level;
      while (std::getline(ss, level, '|')) {
        auto k = schema[*j].level_index(level);
        if (!k) throw InvalidArgument("evidence: unknown level '" + level + "' for '" + name + "'");
        c.levels[*k] = 1;
      }
    } else {
      const auto dots = rhs.find("..");
      if (dots == std::string::npos) throw InvalidArgument("evidence '" + spec + "': expected lo..hi");
      auto bound = [&](const std::string& s, double inf) -> double {
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s.empty()) return inf;
        if (auto v = parse_real(s)) return *v;
        throw InvalidArgument("evidence: cannot parse bound '" + s + "'");
      };
      c.lo = bound(rhs.substr(0, dots), -kInf);
      c.hi = bound(rhs.substr(dots + 2), kInf);
    }
    ev.constraints.push_back(std::move(c));
  }
  ev.by_feature(schema);
  return ev;
}

// How leaves are weighted under evidence.
enum class ConditionalWeighting {
  // Tree uniform over trees with a compatible leaf, leaf proportional to
  // coverage among compatible leaves.
  Coverage,
  // (tree, leaf) proportional to coverage times the leaf's probability of the
  // evidence, i.e. the posterior over mixture components.
  ExactBayes,
};

// Draws (tree, leaf) pairs for a model, optionally restricted by evidence.
class LeafSampler {
 public:
  LeafSampler(const FordeModel& model, const Evidence& evidence = {},
              ConditionalWeighting weighting = ConditionalWeighting::Coverage)
      : weighting_(weighting) {
    const auto cons = evidence.by_feature(model.schema);
    const std::size_t B = model.num_trees();
    per_tree_.resize(B);
    std::vector<double> joint;
    for (std::size_t b = 0; b < B; ++b) {
      const auto& leaves = model.profiles[b];
      std::vector<double> w(leaves.size(), 0.0);
      for (std::size_t l = 0; l < leaves.size(); ++l) {
        const LeafProfile& p = leaves[l];
        if (p.empty() || !(p.coverage > 0.0)) continue;
        double weight = p.coverage;
        for (std::size_t j = 0; j < cons.size() && weight > 0.0; ++j) {
          if (!cons[j]) continue;
          const double mass = evidence_mass(p, j, *cons[j]);
          if (mass < 0.0) {
            weight = 0.0;  // incompatible
          } else if (weighting == ConditionalWeighting::ExactBayes) {
            weight *= mass;
          }
        }
        w[l] = weight;
      }
      per_tree_[b] = detail::cumulative_sum(w);
      if (weighting == ConditionalWeighting::ExactBayes) {
        for (std::size_t l = 0; l < w.size(); ++l) {
          joint.push_back(w[l]);
          joint_index_.emplace_back(b, l);
        }
      } else if (per_tree_[b].back() > 0.0) {
        eligible_trees_.push_back(b);
      }
    }
    if (weighting == ConditionalWeighting::ExactBayes) {
      joint_ = detail::cumulative_sum(joint);
      if (joint_.empty() || !(joint_.back() > 0.0))
        throw UnsupportedEvidence("evidence is not supported by any leaf");
    } else if (eligible_trees_.empty()) {
      throw UnsupportedEvidence(evidence.empty() ? "model has no leaf with positive coverage"
                                                 : "evidence is not supported by any leaf");
    }
  }

  std::pair<std::size_t, std::size_t> draw(Engine& rng) const {
    if (weighting_ == ConditionalWeighting::ExactBayes)
      return joint_index_[detail::draw_cumulative(joint_, rng)];
    const std::size_t b = eligible_trees_[uniform_index(rng, eligible_trees_.size())];
    return {b, detail::draw_cumulative(per_tree_[b], rng)};
  }

  std::size_t eligible_tree_count() const { return eligible_trees_.size(); }

  // Probability mass the leaf assigns to constraint `c` on feature j, or -1
  // when the leaf's region does not intersect the constraint.
  static double evidence_mass(const LeafProfile& p, std::size_t j, const Constraint& c) {
    const FeatureBounds& fb = p.bounds[j];
    if (fb.categorical()) {
      const auto& probs = std::get<CategoricalParams>(p.dist[j]).probs;
      bool any = false;
      double mass = 0.0;
      for (std::size_t k = 0; k < c.levels.size(); ++k) {
        if (c.levels[k] && fb.allowed[k]) {
          any = true;
          mass += probs[k];
        }
      }
      return any ? mass : -1.0;
    }
    const double lo = std::max(fb.lo, c.lo);
    const double hi = std::min(fb.hi, c.hi);
    if (lo > hi || (lo == hi && !(fb.contains(lo)))) return -1.0;
    if (lo == hi) return 0.0;
    return std::exp(std::get<TruncNormalParams>(p.dist[j]).log_mass(lo, hi));
  }

 private:
  ConditionalWeighting weighting_;
  std::vector<std::vector<double>> per_tree_;
  std::vector<std::size_t> eligible_trees_;
  std::vector<double> joint_;
  std::vector<std::pair<std::size_t, std::size_t>> joint_index_;
};

// One (tree, leaf) draw: tree uniform, leaf with probability q.
inline std::pair<std::size_t, std::size_t> sample_leaf_index(const FordeModel& model, Engine& rng) {
  return LeafSampler(model).draw(rng);
}

namespace detail {

inline double sample_categorical(const std::vector<double>& probs, const std::vector<std::uint8_t>* mask,
                                 double u) {
  double total = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k)
    if (!mask || (*mask)[k]) total += probs[k];
  const double target = u * total;
  double acc = 0.0;
  std::size_t last = probs.size();
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if ((mask && !(*mask)[k]) || !(probs[k] > 0.0)) continue;
    acc += probs[k];
    last = k;
    if (target < acc) return static_cast<double>(k);
  }
  if (last == probs.size()) throw InternalError("categorical sampler: no support");
  return static_cast<double>(last);
}

inline Dataset sample_rows(const FordeModel& model, const LeafSampler& sampler,
                           const std::vector<std::optional<Constraint>>& cons, std::size_t m,
                           std::uint64_t seed, unsigned threads) {
  if (m < 1) throw InvalidArgument("sample size must be >= 1");
  const std::size_t d = model.schema.size();
  std::vector<std::vector<double>> cols(d, std::vector<double>(m));
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (m + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t blk) {
    const std::size_t end = std::min(m, (blk + 1) * kBlock);
    for (std::size_t i = blk * kBlock; i < end; ++i) {
      Engine rng = make_engine(seed, {stream::kForgeRow, i});
      const auto [b, l] = sampler.draw(rng);
      const LeafProfile& p = model.profiles[b][l];
      for (std::size_t j = 0; j < d; ++j) {
        const double u = uniform_open01(rng);
        const FeatureBounds& fb = p.bounds[j];
        if (const auto* tn = std::get_if<TruncNormalParams>(&p.dist[j])) {
          double x = cons[j] ? tn->sample(u, cons[j]->lo, cons[j]->hi) : tn->sample(u);
          // Leaf regions are half-open on the right.
          if (x >= fb.hi) x = std::nextafter(fb.hi, -kInf);
          cols[j][i] = x;
        } else {
          const auto& probs = std::get<CategoricalParams>(p.dist[j]).probs;
          cols[j][i] = sample_categorical(probs, cons[j] ? &cons[j]->levels : nullptr, u);
        }
      }
    }
  });
  return Dataset(model.schema, std::move(cols));
}

}  // namespace detail

// m rows: (tree, leaf) from the mixture weights, then every feature
// independently from the leaf's distribution. Row i uses its own stream
// derived from (seed, i).
inline Dataset forge_sample(const FordeModel& model, std::size_t m, std::uint64_t seed,
                            unsigned threads = 0) {
  for (std::size_t b = 0; b < model.num_trees(); ++b) {
    bool any = false;
    for (const auto& p : model.profiles[b]) any = any || (!p.empty() && p.coverage > 0.0);
    if (!any) throw InvalidArgument("forge_sample: tree " + std::to_string(b) + " has zero coverage");
  }
  const LeafSampler sampler(model);
  return detail::sample_rows(model, sampler, std::vector<std::optional<Constraint>>(model.schema.size()),
                             m, seed, threads);
}

// m rows drawn from leaves compatible with `evidence`; constrained features
// are drawn from the leaf distribution restricted to the evidence.
inline Dataset conditional_sample(const FordeModel& model, const Evidence& evidence, std::size_t m,
                                  std::uint64_t seed,
                                  ConditionalWeighting weighting = ConditionalWeighting::Coverage,
                                  unsigned threads = 0) {
  const auto cons = evidence.by_feature(model.schema);
  const LeafSampler sampler(model, evidence, weighting);
  return detail::sample_rows(model, sampler, cons, m, seed, threads);
}

}  // namespace arf
