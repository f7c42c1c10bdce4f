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

// arf: train, sample, evaluate and benchmark adversarial random forests.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "arf/arf.hpp"

namespace {

using namespace arf;
namespace fs = std::filesystem;

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kData = 3, kNotConverged = 4 };

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Writes to `path`, or stdout when it is empty or "-".
void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  fn(out);
  if (!out) throw DataError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string data, schema, out;
  std::size_t trees = 100, min_node = 2, max_iters = 10;
  double delta = 0.0;
  std::uint64_t seed = 1;
};

int cmd_train(const TrainArgs& a, unsigned threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset ds = a.schema.empty() ? load_csv(a.data) : load_csv(a.data, load_schema(a.schema));
  ArfConfig cfg;
  cfg.forest.num_trees = a.trees;
  cfg.forest.min_node_size = a.min_node;
  cfg.forest.seed = a.seed;
  cfg.forest.num_threads = threads;
  cfg.early_seed = derive_seed(a.seed, {stream::kSynthetic});
  cfg.delta = a.delta;
  cfg.max_iters = a.max_iters;
  const ArfModel arf = arf_fit(ds, cfg);
  FordeConfig fc;
  fc.num_threads = threads;
  const FordeModel model = forde_fit(arf, ds, fc);
  save_model(a.out, model);
  std::printf("rows %zu, columns %zu\n", ds.rows(), ds.cols());
  for (std::size_t i = 0; i < arf.trace.size(); ++i) std::printf("round %zu oob accuracy %.4f\n", i, arf.trace[i]);
  std::printf("iterations %zu, converged %s\n", arf.iterations_run, arf.converged ? "yes" : "no");
  std::printf("wall time %.2fs\nmodel written to %s\n", seconds_since(t0), a.out.c_str());
  if (!arf.converged) {
    std::fprintf(stderr, "warning: discriminator still above 1/2 + delta after %zu iterations\n", a.max_iters);
    return kNotConverged;
  }
  return kOk;
}

struct SampleArgs {
  std::string model, out, weighting = "coverage";
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::vector<std::string> evidence;
};

int cmd_sample(const SampleArgs& a, unsigned threads) {
  const FordeModel m = load_model(a.model);
  Dataset out;
  if (a.evidence.empty()) {
    out = forge_sample(m, a.n, a.seed, threads);
  } else {
    const auto w = a.weighting == "exact" ? ConditionalWeighting::ExactBayes : ConditionalWeighting::Coverage;
    out = conditional_sample(m, parse_evidence(m.schema, a.evidence), a.n, a.seed, w, threads);
  }
  with_output(a.out, [&](std::ostream& o) { write_csv(o, out); });
  return kOk;
}

struct NllArgs {
  std::string model, data;
  bool zero_floor = false;
};

int cmd_nll(const NllArgs& a, unsigned threads) {
  const FordeModel m = load_model(a.model);
  const Dataset ds = load_csv(a.data, m.schema);
  NllConfig cfg;
  cfg.zero_floor = a.zero_floor;
  cfg.num_threads = threads;
  const NllReport r = nll(m, ds, cfg);
  std::printf("mean nll %s nats\nstd error %s\nrows %zu\nzero-density rows %zu\n", format_real(r.mean).c_str(),
              format_real(r.std_error).c_str(), r.rows, r.zero_density_rows.size());
  return kOk;
}

struct SimulateArgs {
  std::string name, out;
  bool toeplitz = false;
  std::size_t n = 2000, d = 10;
  double rho = 0.9;
  double informative = -1.0;  // < 0: no target column
  std::uint64_t seed = 1;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.toeplitz == !a.name.empty()) throw InvalidArgument("simulate: give exactly one of --name or --toeplitz");
  Dataset ds;
  if (a.toeplitz) {
    ds = gen_toeplitz_gaussian({a.n, a.d, a.rho, a.seed});
    if (a.informative >= 0.0) ds = with_binary_target(ds, gen_logistic_target(ds, sparse_beta(a.d, a.informative), a.seed));
  } else {
    ds = gen_shape({a.name, a.n, a.seed});
  }
  with_output(a.out, [&](std::ostream& o) { write_csv(o, ds); });
  return kOk;
}

struct EfficacyArgs {
  std::string data, test, target, generator = "forge", out, learners = "logreg,dtree";
  double test_fraction = 0.3;
  std::size_t seeds = 5;
  std::uint64_t seed = 1;
};

std::vector<Learner> parse_learners(const std::string& s) {
  std::vector<Learner> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_learner(tok));
  return out;
}

int cmd_efficacy(const EfficacyArgs& a, unsigned threads) {
  Dataset trn = load_csv(a.data), tst;
  if (!a.test.empty()) {
    tst = load_csv(a.test, trn.schema());
  } else {
    auto split = split_train_test(trn, a.test_fraction, a.seed, trn.schema().require_index(a.target));
    trn = std::move(split.train);
    tst = std::move(split.test);
  }
  std::vector<std::uint64_t> seeds(a.seeds);
  for (std::size_t i = 0; i < a.seeds; ++i) seeds[i] = a.seed + i;
  EfficacyOptions opts;
  opts.dataset = fs::path(a.data).stem().string();
  opts.num_threads = threads;
  const auto learners = parse_learners(a.learners);
  const auto rep = run_efficacy(trn, tst, a.target, make_generator(a.generator), learners, seeds, opts);
  for (const auto& l : rep.per_learner)
    std::fprintf(stderr, "%-7s oracle acc %.4f +- %.4f f1 %.4f | %s acc %.4f +- %.4f f1 %.4f\n", l.learner.c_str(),
                 l.oracle_accuracy.mean, l.oracle_accuracy.se, l.oracle_f1.mean, a.generator.c_str(),
                 l.synth_accuracy.mean, l.synth_accuracy.se, l.synth_f1.mean);
  std::fprintf(stderr, "generator time %.2fs +- %.2f\n", rep.generator_seconds.mean, rep.generator_seconds.se);
  with_output(a.out, [&](std::ostream& o) { write_results(o, rep.rows); });
  return kOk;
}

// ---------------------------------------------------------------------------
// Benchmarks

struct BenchArgs {
  std::string suite, out, dir;
  std::size_t reps = 5, trees = 100;
  std::uint64_t seed = 1;
};

ArfConfig bench_config(const BenchArgs& a, std::uint64_t seed, unsigned threads) {
  ArfConfig cfg;
  cfg.forest.num_trees = a.trees;
  cfg.forest.seed = derive_seed(seed, {stream::kTree});
  cfg.forest.num_threads = threads;
  cfg.early_seed = derive_seed(seed, {stream::kSynthetic});
  return cfg;
}

// NLL of FORDE and both PWC variants on Toeplitz data with a logistic target,
// along a sample size grid (sparsity 0.5) and a sparsity grid (n = 2000).
void bench_toeplitz(const BenchArgs& a, unsigned threads, std::vector<ResultRow>& rows) {
  struct Cell {
    std::size_t n;
    double informative;
  };
  std::vector<Cell> cells;
  for (std::size_t n : {250u, 500u, 1000u, 2000u, 4000u}) cells.push_back({n, 0.5});
  for (double s : {0.0, 0.25, 0.75, 1.0}) cells.push_back({2000, s});
  for (const auto& c : cells) {
    const std::string name = "toeplitz-n" + std::to_string(c.n) + "-inf" + format_real(c.informative);
    for (std::size_t r = 0; r < a.reps; ++r) {
      const std::uint64_t seed = a.seed + r;
      const Dataset all = gen_toeplitz_gaussian({c.n + 1000, 10, 0.9, seed});
      const Labels y = gen_logistic_target(all, sparse_beta(10, c.informative), seed);
      std::vector<std::size_t> trn(c.n), tst(1000);
      std::iota(trn.begin(), trn.end(), 0);
      std::iota(tst.begin(), tst.end(), c.n);
      const Dataset Xtrn = all.select_rows(trn), Xtst = all.select_rows(tst);
      const Labels ytrn(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(c.n));
      FordeConfig fc;
      fc.num_threads = threads;
      const FordeModel m = forde_fit(arf_fit(Xtrn, bench_config(a, seed, threads)), Xtrn, fc);
      NllConfig nc;
      nc.num_threads = threads;
      const NllReport f = nll(m, Xtst, nc);
      const NllReport u = pwc_nll(fit_pwc_unsupervised(m, Xtrn), Xtst, nc);
      ForestConfig sup = bench_config(a, seed, threads).forest;
      sup.stratify_by_label = false;
      const NllReport s = pwc_nll(fit_pwc(with_binary_target(Xtrn, ytrn), PwcSupervised{"y", sup}), Xtst, nc);
      rows.push_back({name, "forde", "", "nll", f.mean, seed});
      rows.push_back({name, "pwc-unsup", "", "nll", u.mean, seed});
      rows.push_back({name, "pwc-sup", "", "nll", s.mean, seed});
      rows.push_back({name, "forde", "", "zero_density_rows", static_cast<double>(f.zero_density_rows.size()), seed});
      std::fprintf(stderr, "%s seed %llu: forde %.3f pwc-unsup %.3f pwc-sup %.3f\n", name.c_str(),
                   static_cast<unsigned long long>(seed), f.mean, u.mean, s.mean);
    }
  }
}

// Discriminator score of FORGE samples (m = n/2) for every shape dataset.
void bench_shapes(const BenchArgs& a, unsigned threads, std::vector<ResultRow>& rows) {
  for (const char* name : {"cassini", "smiley", "twomoons", "shapes"}) {
    for (std::size_t r = 0; r < a.reps; ++r) {
      const std::uint64_t seed = a.seed + r;
      const Dataset X = gen_shape({name, 2000, seed});
      FordeConfig fc;
      fc.num_threads = threads;
      const FordeModel m = forde_fit(arf_fit(X, bench_config(a, seed, threads)), X, fc);
      const Dataset S = forge_sample(m, 1000, seed, threads);
      ForestConfig dc;
      dc.num_threads = threads;
      const double score = discriminator_score(X, S, dc, seed);
      rows.push_back({name, "forge", "", "discriminator", score, seed});
      std::fprintf(stderr, "%s seed %llu: discriminator %.3f\n", name, static_cast<unsigned long long>(seed), score);
    }
  }
}

// FORDE test NLL for every <name>/<name>.{ts,valid,test}.data set under dir;
// training uses train + validation.
void bench_twentyds(const BenchArgs& a, unsigned threads, std::vector<ResultRow>& rows) {
  std::string dir = a.dir;
  if (dir.empty())
    if (const char* e = std::getenv("ARF_TWENTY_DATASETS_DIR")) dir = e;
  if (dir.empty() || !fs::is_directory(dir)) throw DataError("twentyds: pass --dir or set ARF_TWENTY_DATASETS_DIR");
  std::vector<fs::path> sets;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory() && fs::exists(e.path() / (e.path().filename().string() + ".ts.data"))) sets.push_back(e.path());
  std::sort(sets.begin(), sets.end());
  if (sets.empty()) throw DataError("twentyds: no datasets found under '" + dir + "'");
  CsvOptions opts;
  opts.has_header = false;
  for (const auto& p : sets) {
    const std::string name = p.filename().string();
    const auto file = [&](const char* ext) { return (p / (name + ext)).string(); };
    const RawTable probe = read_csv_raw(file(".ts.data"), false);
    const Schema s = binary_schema(probe.rows.at(0).size());
    const Dataset trn = concat_rows(load_csv(file(".ts.data"), s, opts), load_csv(file(".valid.data"), s, opts));
    const Dataset tst = load_csv(file(".test.data"), s, opts);
    for (std::size_t r = 0; r < a.reps; ++r) {
      const std::uint64_t seed = a.seed + r;
      const auto t0 = std::chrono::steady_clock::now();
      FordeConfig fc;
      fc.num_threads = threads;
      const FordeModel m = forde_fit(arf_fit(trn, bench_config(a, seed, threads)), trn, fc);
      NllConfig nc;
      nc.num_threads = threads;
      const NllReport rep = nll(m, tst, nc);
      rows.push_back({name, "forde", "", "nll", rep.mean, seed});
      rows.push_back({name, "forde", "", "time_sec", seconds_since(t0), seed});
      std::fprintf(stderr, "%s seed %llu: nll %.3f\n", name.c_str(), static_cast<unsigned long long>(seed), rep.mean);
    }
  }
}

int cmd_bench(const BenchArgs& a, unsigned threads) {
  std::vector<ResultRow> rows;
  if (a.suite == "toeplitz")
    bench_toeplitz(a, threads, rows);
  else if (a.suite == "shapes")
    bench_shapes(a, threads, rows);
  else if (a.suite == "twentyds")
    bench_twentyds(a, threads, rows);
  else
    throw InvalidArgument("unknown suite '" + a.suite + "'");
  with_output(a.out, [&](std::ostream& o) { write_results(o, rows); });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial random forests: density estimation and generative modeling for tabular data"};
  app.name("arf");
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0: ARF_NUM_THREADS or all cores)");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Fit ARF + FORDE and write a model file");
  train->add_option("--data", ta.data, "Training CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--schema", ta.schema, "Schema JSON (inferred when absent)")->check(CLI::ExistingFile);
  train->add_option("--trees", ta.trees, "Trees per forest")->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--min-node", ta.min_node, "Minimum node size")->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--delta", ta.delta, "Slack on the 1/2 accuracy target")->capture_default_str();
  train->add_option("--max-iters", ta.max_iters, "Adversarial rounds after the first")->capture_default_str();
  train->add_option("--seed", ta.seed, "Seed")->capture_default_str();
  train->add_option("--out", ta.out, "Model file")->required();

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw synthetic rows from a model");
  sample->add_option("--model", sa.model, "Model file")->required()->check(CLI::ExistingFile);
  sample->add_option("--n", sa.n, "Rows to draw")->capture_default_str()->check(CLI::PositiveNumber);
  sample->add_option("--seed", sa.seed, "Seed")->capture_default_str();
  sample->add_option("--evidence", sa.evidence, "Constraint name=lo..hi or name=a|b (repeatable)");
  sample->add_option("--weighting", sa.weighting, "Leaf weighting under evidence")
      ->capture_default_str()
      ->check(CLI::IsMember({"coverage", "exact"}));
  sample->add_option("--out", sa.out, "Output CSV (stdout when absent)");

  NllArgs na;
  auto* nllc = app.add_subcommand("nll", "Mean negative log-likelihood of a CSV under a model");
  nllc->add_option("--model", na.model, "Model file")->required()->check(CLI::ExistingFile);
  nllc->add_option("--data", na.data, "CSV with the training schema")->required()->check(CLI::ExistingFile);
  nllc->add_flag("--zero-floor", na.zero_floor, "Count zero-density rows at -log(1e-300) instead of excluding them");

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "Write a simulated dataset");
  sim->add_option("--name", ma.name, "Shape dataset")->check(CLI::IsMember({"cassini", "smiley", "twomoons", "shapes"}));
  sim->add_flag("--toeplitz", ma.toeplitz, "Toeplitz Gaussian instead of a shape");
  sim->add_option("--n", ma.n, "Rows")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--d", ma.d, "Toeplitz dimension")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--rho", ma.rho, "Toeplitz correlation")->capture_default_str();
  sim->add_option("--informative", ma.informative, "Add a logistic target y with this fraction of unit coefficients")
      ->check(CLI::Range(0.0, 1.0));
  sim->add_option("--seed", ma.seed, "Seed")->capture_default_str();
  sim->add_option("--out", ma.out, "Output CSV (stdout when absent)");

  EfficacyArgs ea;
  auto* eff = app.add_subcommand("efficacy", "Oracle vs synthetic-trained classifiers");
  eff->add_option("--data", ea.data, "Training CSV")->required()->check(CLI::ExistingFile);
  eff->add_option("--test", ea.test, "Test CSV (otherwise a stratified split)")->check(CLI::ExistingFile);
  eff->add_option("--test-fraction", ea.test_fraction, "Held-out fraction without --test")->capture_default_str();
  eff->add_option("--target", ea.target, "Categorical target column")->required();
  eff->add_option("--generator", ea.generator, "identity | marginal | forge | forge-benchmark")->capture_default_str();
  eff->add_option("--learners", ea.learners, "Comma-separated learners")->capture_default_str();
  eff->add_option("--seeds", ea.seeds, "Number of seeds")->capture_default_str()->check(CLI::PositiveNumber);
  eff->add_option("--seed", ea.seed, "First seed")->capture_default_str();
  eff->add_option("--out", ea.out, "Results CSV (stdout when absent)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite and write a results CSV");
  bench->add_option("--suite", ba.suite, "Suite")->required()->check(CLI::IsMember({"toeplitz", "shapes", "twentyds"}));
  bench->add_option("--reps", ba.reps, "Replicates per cell")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--trees", ba.trees, "Trees per forest")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--seed", ba.seed, "First seed")->capture_default_str();
  bench->add_option("--dir", ba.dir, "Twenty Datasets root (twentyds suite)");
  bench->add_option("--out", ba.out, "Results CSV (stdout when absent)");

  if (argc < 2) {
    std::cout << app.help();
    return kUsage;
  }
  try {
    app.require_subcommand(1);
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cmd_train(ta, threads);
    if (*sample) return cmd_sample(sa, threads);
    if (*nllc) return cmd_nll(na, threads);
    if (*sim) return cmd_simulate(ma);
    if (*eff) return cmd_efficacy(ea, threads);
    if (*bench) return cmd_bench(ba, threads);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const UnsupportedEvidence& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
