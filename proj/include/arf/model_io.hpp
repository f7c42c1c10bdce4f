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

// Versioned JSON persistence for fitted FORDE models. Non-finite reals are
// written as the strings "inf", "-inf" and "nan"; finite reals use the
// shortest round-trip representation, so reloaded models evaluate
// bit-identically.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "arf/adversarial.hpp"
#include "arf/error.hpp"
#include "arf/forde.hpp"
#include "arf/forest.hpp"
#include "arf/tabular.hpp"

namespace arf {

inline constexpr int kModelFormatVersion = 1;

namespace io {

using nlohmann::json;

inline json real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double real(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw DataError("model: bad real '" + s + "'");
}

inline json forest_config_to_json(const ForestConfig& c) {
  json j = {{"num_trees", c.num_trees},
            {"min_node_size", c.min_node_size},
            {"resample", c.resample == Resample::Bootstrap ? "bootstrap" : "subsample"},
            {"sample_fraction", c.sample_fraction},
            {"stratify_by_label", c.stratify_by_label},
            {"seed", c.seed}};
  j["mtry"] = c.mtry ? json(*c.mtry) : json(nullptr);
  j["max_depth"] = c.max_depth ? json(*c.max_depth) : json(nullptr);
  return j;
}

inline ForestConfig forest_config_from_json(const json& j) {
  ForestConfig c;
  c.num_trees = j.at("num_trees").get<std::size_t>();
  c.min_node_size = j.at("min_node_size").get<std::size_t>();
  const auto r = j.at("resample").get<std::string>();
  if (r != "bootstrap" && r != "subsample") throw DataError("model: unknown resample '" + r + "'");
  c.resample = r == "bootstrap" ? Resample::Bootstrap : Resample::Subsample;
  c.sample_fraction = j.at("sample_fraction").get<double>();
  c.stratify_by_label = j.at("stratify_by_label").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("mtry").is_null()) c.mtry = j.at("mtry").get<std::size_t>();
  if (!j.at("max_depth").is_null()) c.max_depth = j.at("max_depth").get<std::size_t>();
  return c;
}

inline json node_to_json(const Tree& t, std::int32_t k) {
  const TreeNode& nd = t.nodes[k];
  if (nd.is_leaf())
    return {{"leaf", nd.leaf_id}, {"p", nd.soft_label}, {"n", nd.train_count}};
  return {{"feature", nd.split.feature},
          {"op", nd.split.kind == SplitKind::Less ? "<" : "=="},
          {"value", nd.split.value},
          {"p", nd.soft_label},
          {"n", nd.train_count},
          {"left", node_to_json(t, nd.left)},
          {"right", node_to_json(t, nd.right)}};
}

inline std::int32_t node_from_json(const json& j, Tree& t, std::size_t d) {
  const auto k = static_cast<std::int32_t>(t.nodes.size());
  t.nodes.emplace_back();
  TreeNode nd;
  nd.soft_label = j.at("p").get<double>();
  nd.train_count = j.at("n").get<std::uint32_t>();
  if (j.contains("leaf")) {
    nd.leaf_id = j.at("leaf").get<std::int32_t>();
    if (nd.leaf_id < 0) throw DataError("model: negative leaf id");
    if (t.leaf_node.size() <= static_cast<std::size_t>(nd.leaf_id)) t.leaf_node.resize(nd.leaf_id + 1, -1);
    if (t.leaf_node[nd.leaf_id] != -1) throw DataError("model: duplicate leaf id");
    t.leaf_node[nd.leaf_id] = k;
    t.nodes[k] = nd;
    return k;
  }
  nd.split.feature = j.at("feature").get<std::size_t>();
  if (nd.split.feature >= d) throw DataError("model: split feature out of range");
  const auto op = j.at("op").get<std::string>();
  if (op != "<" && op != "==") throw DataError("model: unknown split operator '" + op + "'");
  nd.split.kind = op == "<" ? SplitKind::Less : SplitKind::Equal;
  nd.split.value = j.at("value").get<double>();
  nd.left = node_from_json(j.at("left"), t, d);
  nd.right = node_from_json(j.at("right"), t, d);
  t.nodes[k] = nd;
  return k;
}

inline json dist_to_json(const FeatureDist& d) {
  if (const auto* tn = std::get_if<TruncNormalParams>(&d))
    return {{"mu", tn->mu}, {"sigma", tn->sigma}, {"lo", real(tn->lo)}, {"hi", real(tn->hi)},
            {"log_norm", real(tn->log_norm)}};
  return {{"probs", std::get<CategoricalParams>(d).probs}};
}

inline FeatureDist dist_from_json(const json& j, const Column& col) {
  if (col.is_categorical()) {
    CategoricalParams c{j.at("probs").get<std::vector<double>>()};
    if (c.probs.size() != col.levels.size()) throw DataError("model: probability vector size mismatch");
    return c;
  }
  return TruncNormalParams{j.at("mu").get<double>(), j.at("sigma").get<double>(), real(j.at("lo")),
                           real(j.at("hi")), real(j.at("log_norm"))};
}

}  // namespace io

inline nlohmann::json model_to_json(const FordeModel& m) {
  using io::json;
  json trees = json::array();
  for (std::size_t b = 0; b < m.num_trees(); ++b) {
    const Tree& t = m.forest.trees[b];
    json profiles = json::array();
    for (const auto& p : m.profiles[b]) {
      json dist = json::array();
      for (const auto& d : p.dist) dist.push_back(io::dist_to_json(d));
      profiles.push_back({{"coverage", p.coverage}, {"count", p.original_count}, {"dist", std::move(dist)}});
    }
    trees.push_back({{"n_inbag", t.n_inbag}, {"root", io::node_to_json(t, 0)}, {"leaves", std::move(profiles)}});
  }
  json trace = json::array();
  for (double a : m.arf_trace) trace.push_back(a);
  json ranges = json::array();
  for (const auto& [lo, hi] : m.ranges) ranges.push_back(json::array({io::real(lo), io::real(hi)}));
  return {{"format", "arf-model"},
          {"version", kModelFormatVersion},
          {"schema", schema_to_json(m.schema)},
          {"forest_config", io::forest_config_to_json(m.forest.config)},
          {"arf", {{"delta", m.arf_config.delta},
                   {"max_iters", m.arf_config.max_iters},
                   {"early_seed", m.arf_config.early_seed},
                   {"forest_config", io::forest_config_to_json(m.arf_config.forest)},
                   {"trace", std::move(trace)},
                   {"converged", m.arf_converged}}},
          {"forde", {{"prior_alpha", m.config.prior_alpha},
                     {"sigma_floor_rel", m.config.sigma_floor_rel},
                     {"sigma_floor_abs", m.config.sigma_floor_abs}}},
          {"ranges", std::move(ranges)},
          {"trees", std::move(trees)}};
}

inline FordeModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "arf-model") throw DataError("not an arf model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw DataError("unsupported model format version " + std::to_string(version));
    FordeModel m;
    m.schema = schema_from_json(j.at("schema"));
    m.forest.schema = m.schema;
    m.forest.config = io::forest_config_from_json(j.at("forest_config"));
    const auto& ja = j.at("arf");
    m.arf_config.delta = ja.at("delta").get<double>();
    m.arf_config.max_iters = ja.at("max_iters").get<std::size_t>();
    m.arf_config.early_seed = ja.at("early_seed").get<std::uint64_t>();
    m.arf_config.forest = io::forest_config_from_json(ja.at("forest_config"));
    for (const auto& a : ja.at("trace")) m.arf_trace.push_back(io::real(a));
    m.arf_converged = ja.at("converged").get<bool>();
    const auto& jf = j.at("forde");
    m.config.prior_alpha = jf.at("prior_alpha").get<double>();
    m.config.sigma_floor_rel = jf.at("sigma_floor_rel").get<double>();
    m.config.sigma_floor_abs = jf.at("sigma_floor_abs").get<double>();

    const std::size_t d = m.schema.size();
    for (const auto& r : j.at("ranges")) m.ranges.emplace_back(io::real(r.at(0)), io::real(r.at(1)));
    if (!m.ranges.empty() && m.ranges.size() != d) throw DataError("model: range count mismatch");
    m.config.clip_to_data_range = !m.ranges.empty();
    for (const auto& jt : j.at("trees")) {
      Tree t;
      t.n_inbag = jt.at("n_inbag").get<std::size_t>();
      io::node_from_json(jt.at("root"), t, d);
      for (auto k : t.leaf_node)
        if (k < 0) throw DataError("model: leaf ids are not contiguous");
      const auto& jl = jt.at("leaves");
      if (jl.size() != t.num_leaves()) throw DataError("model: leaf profile count mismatch");
      const std::size_t b = m.forest.trees.size();
      auto bounds = all_leaf_bounds(t, m.schema);
      if (!m.ranges.empty())
        for (auto& lb : bounds) clip_to_ranges(lb, m.schema, m.ranges);
      std::vector<LeafProfile> profiles;
      for (std::size_t l = 0; l < jl.size(); ++l) {
        LeafProfile p;
        p.tree = b;
        p.leaf = l;
        p.coverage = jl[l].at("coverage").get<double>();
        p.original_count = jl[l].at("count").get<std::size_t>();
        p.bounds = bounds[l];
        const auto& jd = jl[l].at("dist");
        if (!jd.empty() && jd.size() != d) throw DataError("model: distribution count mismatch");
        for (std::size_t f = 0; f < jd.size(); ++f) p.dist.push_back(io::dist_from_json(jd[f], m.schema[f]));
        profiles.push_back(std::move(p));
      }
      m.forest.trees.push_back(std::move(t));
      m.profiles.push_back(std::move(profiles));
    }
    if (m.forest.trees.empty()) throw DataError("model: no trees");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model: ") + e.what());
  }
}

inline void save_model(const std::string& path, const FordeModel& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << model_to_json(m).dump() << '\n';
  if (!out) throw DataError("write failed for '" + path + "'");
}

inline FordeModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

}  // namespace arf
