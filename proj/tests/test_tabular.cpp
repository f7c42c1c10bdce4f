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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>

#include "arf/error.hpp"
#include "arf/random.hpp"
#include "arf/tabular.hpp"

namespace {

using namespace arf;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "arf_tabular_test";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

TEST(InferSchema, ManyNumericValuesAreContinuous) {
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 50; ++i) rows.push_back({std::to_string(1.5 + i)});
  const Schema s = infer_schema(rows, {"a"});
  EXPECT_EQ(s[0].kind, ColumnKind::Continuous);
}

TEST(InferSchema, StringsAreCategoricalWithSortedLevels) {
  const Schema s = infer_schema({{"yes"}, {"no"}, {"yes"}}, {"c"});
  ASSERT_TRUE(s[0].is_categorical());
  EXPECT_EQ(s[0].levels, (std::vector<std::string>{"no", "yes"}));
}

TEST(InferSchema, FewDistinctNumbersAreCategorical) {
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 100; ++i) rows.push_back({i % 3 ? "1" : "0"});
  const Schema s = infer_schema(rows, {"b"});
  ASSERT_TRUE(s[0].is_categorical());
  EXPECT_EQ(s[0].levels, (std::vector<std::string>{"0", "1"}));
}

TEST(InferSchema, ThresholdIsConfigurable) {
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 5; ++i) rows.push_back({std::to_string(i)});
  EXPECT_TRUE(infer_schema(rows, {"x"})[0].is_categorical());
  EXPECT_EQ(infer_schema(rows, {"x"}, 4)[0].kind, ColumnKind::Continuous);
}

TEST(InferSchema, InsensitiveToRowOrder) {
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 30; ++i) rows.push_back({std::to_string(i * 0.5), i % 2 ? "b" : "a"});
  const Schema a = infer_schema(rows, {"x", "y"});
  std::reverse(rows.begin(), rows.end());
  EXPECT_EQ(a, infer_schema(rows, {"x", "y"}));
}

TEST(InferSchema, Errors) {
  EXPECT_THROW(infer_schema({}, {"a"}), DataError);
  EXPECT_THROW(infer_schema({{"1", "2"}}, {"a"}), DataError);
}

TEST(Schema, RejectsDuplicateNamesAndEmptyLevels) {
  EXPECT_THROW(Schema({{"a", ColumnKind::Continuous, {}}, {"a", ColumnKind::Continuous, {}}}), InvalidArgument);
  EXPECT_THROW(Schema({{"", ColumnKind::Continuous, {}}}), InvalidArgument);
  EXPECT_THROW(Schema({{"c", ColumnKind::Categorical, {}}}), InvalidArgument);
  EXPECT_THROW(Schema({{"c", ColumnKind::Categorical, {"x", "x"}}}), InvalidArgument);
}

TEST(LoadCsv, WithGivenSchema) {
  const auto p = scratch("given.csv");
  write_file(p, "x,c\n1.5,b\n2,a\n-3e2,b\n");
  const Schema s({{"x", ColumnKind::Continuous, {}}, {"c", ColumnKind::Categorical, {"a", "b"}}});
  const Dataset ds = load_csv(p.string(), s);
  ASSERT_EQ(ds.rows(), 3u);
  EXPECT_EQ(ds(2, 0), -300.0);
  EXPECT_EQ(ds.level(0, 1), 1u);
  EXPECT_EQ(ds.level(1, 1), 0u);
}

TEST(LoadCsv, ParseErrorNamesRowAndColumn) {
  const auto p = scratch("bad.csv");
  write_file(p, "x,y\n1,2\n3,abc\n");
  const Schema s({{"x", ColumnKind::Continuous, {}}, {"y", ColumnKind::Continuous, {}}});
  try {
    load_csv(p.string(), s);
    FAIL() << "expected a parse error";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'y'"), std::string::npos) << msg;
  }
}

TEST(LoadCsv, UnknownLevelIsAnError) {
  const auto p = scratch("level.csv");
  write_file(p, "c\na\nz\n");
  const Schema s({{"c", ColumnKind::Categorical, {"a", "b"}}});
  EXPECT_THROW(load_csv(p.string(), s), DataError);
}

TEST(LoadCsv, HeaderMismatchIsAnError) {
  const auto p = scratch("hdr.csv");
  write_file(p, "q\n1\n");
  const Schema s({{"c", ColumnKind::Continuous, {}}});
  EXPECT_THROW(load_csv(p.string(), s), DataError);
}

TEST(LoadCsv, MissingFile) { EXPECT_THROW(load_csv(scratch("nope.csv").string()), DataError); }

TEST(LoadCsv, QuotedFields) {
  const auto p = scratch("quoted.csv");
  write_file(p, "name,v\n\"a,b\",1\n\"say \"\"hi\"\"\",2\n");
  const Dataset ds = load_csv(p.string());
  ASSERT_TRUE(ds.schema()[0].is_categorical());
  EXPECT_EQ(ds.schema()[0].levels, (std::vector<std::string>{"a,b", "say \"hi\""}));
}

TEST(SaveCsv, RoundTripIsExact) {
  Engine rng = make_engine(4);
  std::vector<double> x(200), c(200);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = standard_normal(rng) * 1e-7 + (i % 5) * 1e5;
    c[i] = static_cast<double>(uniform_index(rng, 3));
  }
  const Schema s({{"x", ColumnKind::Continuous, {}}, {"c", ColumnKind::Categorical, {"lo", "mid", "hi"}}});
  const Dataset ds(s, {x, c});
  const auto p = scratch("rt.csv");
  save_csv(p.string(), ds);
  EXPECT_EQ(load_csv(p.string(), s), ds);
}

TEST(SchemaJson, RoundTrip) {
  const Schema s({{"x", ColumnKind::Continuous, {}}, {"c", ColumnKind::Categorical, {"b", "a"}}});
  const auto p = scratch("schema.json");
  save_schema(p.string(), s);
  EXPECT_EQ(load_schema(p.string()), s);
}

Dataset binary_column(std::size_t n, std::size_t ones) {
  std::vector<double> c(n, 0.0), id(n);
  for (std::size_t i = 0; i < ones; ++i) c[i] = 1.0;
  std::iota(id.begin(), id.end(), 0.0);
  return Dataset(Schema({{"id", ColumnKind::Continuous, {}}, {"c", ColumnKind::Categorical, {"0", "1"}}}),
                 {id, c});
}

TEST(Split, SizesAndDeterminism) {
  const Dataset ds = binary_column(10, 5);
  const auto a = split_train_test(ds, 0.3, 17);
  const auto b = split_train_test(ds, 0.3, 17);
  EXPECT_EQ(a.train.rows(), 7u);
  EXPECT_EQ(a.test.rows(), 3u);
  EXPECT_EQ(a.train_rows, b.train_rows);
  EXPECT_EQ(a.test, b.test);
}

TEST(Split, DisjointAndComplete) {
  const Dataset ds = binary_column(101, 40);
  const auto s = split_train_test(ds, 0.25, 3);
  std::vector<std::size_t> all = s.train_rows;
  all.insert(all.end(), s.test_rows.begin(), s.test_rows.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);
}

TEST(Split, StratifiedProportions) {
  const Dataset ds = binary_column(1000, 500);
  const auto s = split_train_test(ds, 0.1, 5, 1);
  auto ones = [](const Dataset& d) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < d.rows(); ++i) k += d.level(i, 1);
    return k;
  };
  EXPECT_NEAR(static_cast<double>(ones(s.test)), s.test.rows() / 2.0, 1.0);
  EXPECT_NEAR(static_cast<double>(ones(s.train)), s.train.rows() / 2.0, 1.0);
}

TEST(Split, AdultLikeProportion) {
  const Dataset ds = binary_column(33000, 8000);
  const auto s = split_train_test(ds, 10000.0 / 33000.0, 1);
  EXPECT_NEAR(static_cast<double>(s.train.rows()), 23000.0, 1.0);
  EXPECT_NEAR(static_cast<double>(s.test.rows()), 10000.0, 1.0);
}

TEST(Split, Errors) {
  const Dataset ds = binary_column(10, 1);
  EXPECT_THROW(split_train_test(ds, 0.0, 1), InvalidArgument);
  EXPECT_THROW(split_train_test(ds, 1.0, 1), InvalidArgument);
  EXPECT_THROW(split_train_test(ds, 0.3, 1, 1), InvalidArgument);  // stratum of one row
  EXPECT_THROW(split_train_test(ds, 0.3, 1, 0), InvalidArgument);  // not categorical
}

TEST(Dataset, RejectsBadCells) {
  const Schema s({{"c", ColumnKind::Categorical, {"a"}}});
  EXPECT_THROW(Dataset(s, {{1.0}}), DataError);
  const Schema x({{"x", ColumnKind::Continuous, {}}});
  EXPECT_THROW(Dataset(x, {{std::nan("")}}), DataError);
}

}  // namespace
