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

// Baselines and benchmark harnesses: piecewise-constant forest densities,
// Monte-Carlo integrated squared error, the real-vs-synthetic discriminator
// and the train-on-synthetic / test-on-real efficacy pipeline.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "arf/adversarial.hpp"
#include "arf/error.hpp"
#include "arf/forde.hpp"
#include "arf/forest.hpp"
#include "arf/forge.hpp"
#include "arf/learners.hpp"
#include "arf/parallel.hpp"
#include "arf/random.hpp"
#include "arf/tabular.hpp"

namespace arf {

// ---------------------------------------------------------------------------
// Piecewise-constant densities

struct PwcLeaf {
  double coverage = 0.0;
  double log_inv_volume = -kInf;  // -inf for leaves with no extent inside the range
};

struct PwcModel {
  Schema schema;
  Forest forest;
  GlobalRanges ranges;
  std::vector<std::vector<PwcLeaf>> leaves;  // [tree][leaf]

  std::size_t num_trees() const { return forest.size(); }
};

namespace detail {

inline double log_inv_volume(const LeafBounds& b, const Schema& schema) {
  double s = 0.0;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema[j].is_categorical()) {
      s -= std::log(static_cast<double>(b[j].allowed_count()));
      continue;
    }
    const double w = b[j].hi - b[j].lo;
    if (!std::isfinite(w)) throw InternalError("pwc: unbounded leaf volume");
    // A constant column has zero range; treat its extent as unit width.
    if (w <= 0.0) {
      if (b[j].lo == b[j].hi) continue;
      return -kInf;
    }
    s -= std::log(w);
  }
  return s;
}

inline PwcModel assemble_pwc(Schema schema, Forest forest, GlobalRanges ranges,
                             const std::vector<std::vector<double>>& coverage) {
  PwcModel m{std::move(schema), std::move(forest), std::move(ranges), {}};
  m.leaves.resize(m.forest.size());
  parallel_for(m.forest.size(), m.forest.config.num_threads, [&](std::size_t b) {
    auto bounds = all_leaf_bounds(m.forest.trees[b], m.schema);
    auto& out = m.leaves[b];
    out.resize(bounds.size());
    for (std::size_t l = 0; l < bounds.size(); ++l) {
      clip_bounds(bounds[l], m.schema, m.ranges);
      out[l].coverage = coverage[b][l];
      out[l].log_inv_volume = coverage[b][l] > 0.0 ? log_inv_volume(bounds[l], m.schema) : -kInf;
    }
  });
  return m;
}

}  // namespace detail

// Uniform-within-leaf variant of a FORDE model: same forest, same coverage.
inline PwcModel fit_pwc_unsupervised(const FordeModel& model, const Dataset& train) {
  if (train.schema() != model.schema) throw InvalidArgument("pwc: schema mismatch");
  std::vector<std::vector<double>> coverage(model.num_trees());
  for (std::size_t b = 0; b < model.num_trees(); ++b)
    for (const auto& p : model.profiles[b]) coverage[b].push_back(p.coverage);
  return detail::assemble_pwc(model.schema, model.forest, global_ranges(train), coverage);
}

// Forest grown with Gini on a binary categorical target; the density covers
// the remaining columns and coverage counts every in-bag row regardless of label.
inline PwcModel fit_pwc_supervised(const Dataset& ds, std::size_t target, const ForestConfig& cfg) {
  if (target >= ds.cols() || !ds.schema()[target].is_categorical())
    throw InvalidArgument("pwc: supervised mode requires a categorical target");
  if (ds.schema()[target].levels.size() != 2)
    throw InvalidArgument("pwc: supervised mode requires a binary target");
  Labels y(ds.rows());
  for (std::size_t i = 0; i < ds.rows(); ++i) y[i] = ds.level(i, target) == 1 ? 1 : 0;
  Dataset X = ds.without_column(target);
  Forest forest = fit_forest(X, y, cfg);
  std::vector<std::vector<double>> coverage(forest.size());
  for (std::size_t b = 0; b < forest.size(); ++b) {
    const Tree& t = forest.trees[b];
    coverage[b].assign(t.num_leaves(), 0.0);
    for (auto r : t.inbag) coverage[b][t.leaf_of(X, r)] += 1.0;
    for (double& q : coverage[b]) q /= static_cast<double>(t.inbag.size());
  }
  return detail::assemble_pwc(X.schema(), std::move(forest), global_ranges(X), coverage);
}

struct PwcUnsupervised {
  ArfConfig arf;
  FordeConfig forde;
};
struct PwcSupervised {
  std::string target;
  ForestConfig forest;
};
using PwcMode = std::variant<PwcUnsupervised, PwcSupervised>;

inline PwcModel fit_pwc(const Dataset& ds, const PwcMode& mode) {
  if (const auto* u = std::get_if<PwcUnsupervised>(&mode)) {
    const ArfModel arf = arf_fit(ds, u->arf);
    return fit_pwc_unsupervised(forde_fit(arf, ds, u->forde), ds);
  }
  const auto& s = std::get<PwcSupervised>(mode);
  return fit_pwc_supervised(ds, ds.schema().require_index(s.target), s.forest);
}

inline double pwc_log_density(const PwcModel& model, std::span<const double> row) {
  if (row.size() != model.schema.size()) throw InvalidArgument("pwc: row width mismatch");
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (model.schema[j].is_categorical()) continue;
    if (!(row[j] >= model.ranges[j].first && row[j] <= model.ranges[j].second)) return -kInf;
  }
  std::vector<double> terms(model.num_trees());
  for (std::size_t b = 0; b < model.num_trees(); ++b) {
    const PwcLeaf& leaf = model.leaves[b][model.forest.trees[b].leaf_of(row)];
    terms[b] = leaf.coverage > 0.0 ? std::log(leaf.coverage) + leaf.log_inv_volume : -kInf;
  }
  return log_sum_exp(terms) - std::log(static_cast<double>(model.num_trees()));
}

inline NllReport pwc_nll(const PwcModel& model, const Dataset& ds, const NllConfig& cfg = {}) {
  if (ds.schema() != model.schema) throw DataError("pwc_nll: schema mismatch");
  const auto logd = log_densities(
      ds, [&](std::span<const double> row) { return pwc_log_density(model, row); }, cfg.num_threads);
  return nll_from_log_densities(logd, cfg);
}

// ---------------------------------------------------------------------------
// Integrated squared error by importance sampling

struct IseEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

using LogDensityFn = std::function<double(std::span<const double>)>;
// Writes a draw into `x` and returns its log proposal density.
using ProposalFn = std::function<double(Engine&, std::vector<double>& x)>;

inline IseEstimate ise_monte_carlo(const LogDensityFn& model_logd, const LogDensityFn& true_logd,
                                   const ProposalFn& proposal, std::size_t n_mc, std::uint64_t seed) {
  if (n_mc < 2) throw InvalidArgument("ise: n_mc must be >= 2");
  Engine rng = make_engine(seed, {stream::kSimulate});
  std::vector<double> x;
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const double log_g = proposal(rng, x);
    const double p = std::exp(model_logd(x));
    const double q = std::exp(true_logd(x));
    const double w = (p - q) * (p - q) / std::exp(log_g);
    if (!std::isfinite(w)) throw DataError("ise: non-finite importance weight");
    const double delta = w - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (w - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(n_mc - 1) / static_cast<double>(n_mc))};
}

// ---------------------------------------------------------------------------
// Real-vs-synthetic discriminator

// OOB accuracy of a fresh forest separating real (label 1) from synthetic
// rows. The larger set is subsampled without replacement to the size of the
// smaller one so that 0.5 means indistinguishable.
inline double discriminator_score(const Dataset& real, const Dataset& synth, ForestConfig cfg,
                                  std::uint64_t seed) {
  if (real.schema() != synth.schema()) throw InvalidArgument("discriminator: schema mismatch");
  if (real.empty() || synth.empty()) throw InvalidArgument("discriminator: empty input");
  Engine rng = make_engine(seed, {stream::kDiscriminator});
  const std::size_t k = std::min(real.rows(), synth.rows());
  auto take = [&](const Dataset& ds) {
    if (ds.rows() == k) return ds;
    std::vector<std::size_t> idx(ds.rows());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    detail::shuffle(idx, rng);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return ds.select_rows(idx);
  };
  const Dataset r = take(real);
  const Dataset s = take(synth);
  Labels y(2 * k, 0);
  std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(k), 1);
  cfg.seed = derive_seed(seed, {stream::kDiscriminator, 1});
  cfg.stratify_by_label = true;
  const Dataset stacked = concat_rows(r, s);
  return oob_accuracy(fit_forest(stacked, y, cfg), stacked, y);
}

// ---------------------------------------------------------------------------
// Efficacy pipeline

// Fits on the training data and returns a synthetic set of `rows` rows.
struct Generator {
  std::string name;
  std::function<Dataset(const Dataset& train, std::size_t rows, std::uint64_t seed, unsigned threads)> run;
};

inline Generator identity_generator() {
  return {"identity", [](const Dataset& train, std::size_t rows, std::uint64_t, unsigned) {
            if (rows != train.rows()) throw InvalidArgument("identity generator: row count must match");
            return train;
          }};
}

inline Generator marginal_generator() {
  return {"marginal", [](const Dataset& train, std::size_t rows, std::uint64_t seed, unsigned) {
            Engine rng = make_engine(seed, {stream::kGenerator});
            return sample_marginal_bootstrap(train, rows, rng);
          }};
}

// "default": 20 trees; "benchmark": 10 trees with minimum node size 5.
inline ArfConfig forge_preset(const std::string& preset) {
  ArfConfig cfg;
  if (preset == "default") {
    cfg.forest.num_trees = 20;
  } else if (preset == "benchmark") {
    cfg.forest.num_trees = 10;
    cfg.forest.min_node_size = 5;
  } else {
    throw InvalidArgument("unknown forge preset '" + preset + "'");
  }
  return cfg;
}

inline Generator forge_generator(ArfConfig cfg, const std::string& name = "forge") {
  return {name, [cfg](const Dataset& train, std::size_t rows, std::uint64_t seed, unsigned threads) {
            ArfConfig c = cfg;
            c.forest.seed = derive_seed(seed, {stream::kGenerator, 1});
            c.early_seed = derive_seed(seed, {stream::kGenerator, 2});
            c.forest.num_threads = threads;
            FordeConfig fc;
            fc.num_threads = threads;
            const FordeModel model = forde_fit(arf_fit(train, c), train, fc);
            return forge_sample(model, rows, derive_seed(seed, {stream::kGenerator, 3}), threads);
          }};
}

inline Generator make_generator(const std::string& name) {
  if (name == "identity") return identity_generator();
  if (name == "marginal") return marginal_generator();
  if (name == "forge") return forge_generator(forge_preset("default"));
  if (name == "forge-benchmark") return forge_generator(forge_preset("benchmark"), name);
  throw InvalidArgument("unknown generator '" + name + "'");
}

struct ResultRow {
  std::string dataset;
  std::string generator;
  std::string learner;
  std::string metric;
  double value = 0.0;
  std::uint64_t seed = 0;
};

inline void write_results_header(std::ostream& out) { out << "dataset,generator,learner,metric,value,seed\n"; }

inline void write_results(std::ostream& out, std::span<const ResultRow> rows, bool header = true) {
  if (header) write_results_header(out);
  for (const auto& r : rows)
    out << detail::quote_if_needed(r.dataset) << ',' << detail::quote_if_needed(r.generator) << ','
        << detail::quote_if_needed(r.learner) << ',' << detail::quote_if_needed(r.metric) << ',' << format_real(r.value)
        << ',' << r.seed << '\n';
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(std::span<const double> v) {
  MeanSe out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return out;
}

struct LearnerEfficacy {
  std::string learner;
  MeanSe oracle_accuracy, oracle_f1, synth_accuracy, synth_f1;
};

struct EfficacyReport {
  std::vector<LearnerEfficacy> per_learner;
  MeanSe oracle_accuracy, oracle_f1, synth_accuracy, synth_f1;  // over learners x seeds
  MeanSe generator_seconds;                                     // fit + sample, per seed
  std::vector<ResultRow> rows;
};

struct EfficacyOptions {
  std::string dataset = "data";
  unsigned num_threads = 0;
};

inline EfficacyReport run_efficacy(const Dataset& real_trn, const Dataset& real_tst, const std::string& target,
                                   const Generator& generator, std::span<const Learner> learners,
                                   std::span<const std::uint64_t> seeds, const EfficacyOptions& opts = {}) {
  const auto t = real_trn.schema().index_of(target);
  if (!t) throw InvalidArgument("efficacy: target '" + target + "' missing from schema");
  if (real_tst.schema() != real_trn.schema()) throw InvalidArgument("efficacy: train/test schema mismatch");
  if (learners.empty() || seeds.empty()) throw InvalidArgument("efficacy: need at least one learner and seed");

  EfficacyReport rep;
  std::vector<std::vector<double>> oa(learners.size()), of(learners.size()), sa(learners.size()),
      sf(learners.size());
  std::vector<double> secs, all_oa, all_of, all_sa, all_sf;
  for (std::uint64_t seed : seeds) {
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset synth = generator.run(real_trn, real_trn.rows(), seed, opts.num_threads);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (synth.rows() != real_trn.rows() || synth.schema() != real_trn.schema())
      throw InternalError("efficacy: generator output does not match the training data shape");
    secs.push_back(elapsed);
    rep.rows.push_back({opts.dataset, generator.name, "", "time_sec", elapsed, seed});
    for (std::size_t k = 0; k < learners.size(); ++k) {
      const std::uint64_t lseed = derive_seed(seed, {stream::kLearner, k});
      const auto oracle = train_classifier(learners[k], real_trn, *t, lseed);
      const auto synthetic = train_classifier(learners[k], synth, *t, lseed);
      const auto mo = evaluate(*oracle, real_tst, *t);
      const auto ms = evaluate(*synthetic, real_tst, *t);
      oa[k].push_back(mo.accuracy);
      of[k].push_back(mo.f1);
      sa[k].push_back(ms.accuracy);
      sf[k].push_back(ms.f1);
      const std::string ln = learner_name(learners[k]);
      rep.rows.push_back({opts.dataset, "oracle", ln, "accuracy", mo.accuracy, seed});
      rep.rows.push_back({opts.dataset, "oracle", ln, "f1", mo.f1, seed});
      rep.rows.push_back({opts.dataset, generator.name, ln, "accuracy", ms.accuracy, seed});
      rep.rows.push_back({opts.dataset, generator.name, ln, "f1", ms.f1, seed});
    }
  }
  for (std::size_t k = 0; k < learners.size(); ++k) {
    rep.per_learner.push_back(
        {learner_name(learners[k]), mean_se(oa[k]), mean_se(of[k]), mean_se(sa[k]), mean_se(sf[k])});
    all_oa.insert(all_oa.end(), oa[k].begin(), oa[k].end());
    all_of.insert(all_of.end(), of[k].begin(), of[k].end());
    all_sa.insert(all_sa.end(), sa[k].begin(), sa[k].end());
    all_sf.insert(all_sf.end(), sf[k].begin(), sf[k].end());
  }
  rep.oracle_accuracy = mean_se(all_oa);
  rep.oracle_f1 = mean_se(all_of);
  rep.synth_accuracy = mean_se(all_sa);
  rep.synth_f1 = mean_se(all_sf);
  rep.generator_seconds = mean_se(secs);
  return rep;
}

}  // namespace arf
