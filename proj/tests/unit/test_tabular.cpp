// Copyright 2026 The modelsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "modelsum/frame.hpp"
#include "modelsum/task.hpp"
#include "support/testing.hpp"

using namespace modelsum;
using testing_support::Gen;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Csv, InfersKinds) {
  Frame f = parse_csv("a,b\n1,x\n2,y\n");
  ASSERT_EQ(f.n_rows(), 2u);
  EXPECT_EQ(f.column("a").kind(), ColumnKind::numeric);
  EXPECT_EQ(f.column("a")[0], 1.0);
  EXPECT_EQ(f.column("a")[1], 2.0);
  EXPECT_EQ(f.column("b").kind(), ColumnKind::categorical);
  EXPECT_EQ(f.column("b").levels(), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(f.column("b").level(1), "y");
}

TEST(Csv, ParsesFloats) {
  Frame f = parse_csv("v\n1\n2.5\n3e-1\n");
  EXPECT_EQ(f.column("v").kind(), ColumnKind::numeric);
  EXPECT_EQ(f.column("v")[2], 0.3);
  EXPECT_EQ(f.column("v")[1], 2.5);
}

TEST(Csv, OverrideToNumericNamesRowAndColumn) {
  SchemaOverrides o{{"b", ColumnKind::numeric}};
  EXPECT_EQ(error_of([&] { parse_csv("a,b\n1,x\n2,y\n", o); }), "unparseable numeric at row 1, column b");
}

TEST(Csv, OverrideToCategorical) {
  SchemaOverrides o{{"a", ColumnKind::categorical}};
  Frame f = parse_csv("a\n2\n1\n2\n", o);
  EXPECT_EQ(f.column("a").levels(), (std::vector<std::string>{"2", "1"}));
}

TEST(Csv, RejectsMissingValues) {
  EXPECT_NE(error_of([] { parse_csv("a,b\n1,\n"); }).find("missing value at row 1, column b"), std::string::npos);
  EXPECT_NE(error_of([] { parse_csv("a,b\n1,x\nNA,y\n"); }).find("row 2, column a"), std::string::npos);
}

TEST(Csv, RejectsEmptyAndDuplicateHeaders) {
  EXPECT_THROW(parse_csv(""), Error);
  EXPECT_NE(error_of([] { parse_csv("a,a\n1,2\n"); }).find("duplicate"), std::string::npos);
}

TEST(Csv, QuotedFields) {
  Frame f = parse_csv("name,v\n\"a, b\",1\n\"say \"\"hi\"\"\",2\n");
  EXPECT_EQ(f.column("name").level(0), "a, b");
  EXPECT_EQ(f.column("name").level(1), "say \"hi\"");
}

TEST(Csv, LoadsFromFile) {
  const std::string path = ::testing::TempDir() + "modelsum_load.csv";
  {
    std::ofstream out(path);
    out << "a,b\r\n1,x\r\n2,y\r\n";
  }
  Frame f = load_csv(path);
  EXPECT_EQ(f.n_rows(), 2u);
  EXPECT_EQ(f.column("b").levels(), (std::vector<std::string>{"x", "y"}));
  std::remove(path.c_str());
  EXPECT_THROW(load_csv(path), Error);
}

TEST(Csv, RoundTripProperty) {
  Gen g(11);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = testing_support::pick(g, 1, 30);
    std::vector<Column> cols;
    const std::size_t p = testing_support::pick(g, 1, 5);
    for (std::size_t j = 0; j < p; ++j) {
      const std::string name = j % 2 ? "c" + std::to_string(j) : "n, " + std::to_string(j);
      if (testing_support::pick(g, 0, 1)) {
        std::vector<double> v(n);
        for (auto& x : v) x = std::normal_distribution<double>(0, 1e3)(g);
        cols.push_back(Column::numeric(name, v));
      } else {
        static const std::vector<std::string> pool = {"lo", "hi \"q\"", "a,b", "zz", "line\nbreak"};
        std::vector<std::string> s(n);
        for (auto& x : s) x = pool[testing_support::pick(g, 0, pool.size() - 1)];
        cols.push_back(Column::categorical_from_strings(name, s));
      }
    }
    Frame f(std::move(cols));
    Frame back = parse_csv(to_csv(f));
    ASSERT_TRUE(back == f) << "instance " << inst;
  }
}

TEST(Frame, RejectsBadShapes) {
  EXPECT_THROW(Frame({Column::numeric("a", {1, 2}), Column::numeric("b", {1})}), Error);
  EXPECT_THROW(Frame({Column::numeric("a", {1}), Column::numeric("a", {1})}), Error);
}

TEST(Frame, LevelCodesDecode) {
  Column c = Column::categorical_from_strings("c", {"b", "a", "b", "c"});
  EXPECT_EQ(c.levels(), (std::vector<std::string>{"b", "a", "c"}));
  EXPECT_EQ(c.code(2), 0u);
  EXPECT_EQ(c.level(3), "c");
  Column d = Column::categorical_from_strings("d", {"b", "a"}, std::vector<std::string>{"a", "b", "z"});
  EXPECT_EQ(d.levels(), (std::vector<std::string>{"a", "b", "z"}));
  EXPECT_EQ(d.code(0), 1u);
}

TEST(Task, BinaryWithPositiveClass) {
  Frame f = parse_csv("age,risk\n20,good\n30,bad\n40,good\n");
  TaskOptions o;
  o.positive_class = "good";
  Task t = make_task(f, "risk", o);
  EXPECT_EQ(t.type, TaskType::binary_classification);
  EXPECT_EQ(*t.positive_class, "good");
  EXPECT_EQ(t.feature_names, (std::vector<std::string>{"age"}));
}

TEST(Task, DefaultPositiveIsFirstLevel) {
  Task t = make_task(parse_csv("x,y\n1,bad\n2,good\n"), "y");
  EXPECT_EQ(*t.positive_class, "bad");
}

TEST(Task, RegressionAndMulticlass) {
  Task r = make_task(parse_csv("x,y\n1,2\n2,3\n"), "y");
  EXPECT_EQ(r.type, TaskType::regression);
  EXPECT_FALSE(r.positive_class.has_value());
  Task m = make_task(parse_csv("x,y\n1,a\n2,b\n3,c\n"), "y");
  EXPECT_EQ(m.type, TaskType::multiclass_classification);
}

TEST(Task, Errors) {
  Frame f = parse_csv("x,y,g\n1,2,a\n2,3,b\n");
  TaskOptions pos;
  pos.positive_class = "a";
  EXPECT_THROW(make_task(f, "y", pos), Error);
  TaskOptions prot;
  prot.protected_attribute = "x";
  EXPECT_THROW(make_task(f, "y", prot), Error);
  EXPECT_THROW(make_task(parse_csv("x,y\n1,2\n2,2\n"), "y"), Error);
  EXPECT_THROW(make_task(parse_csv("x,y\n1,a\n2,a\n"), "y"), Error);
  EXPECT_THROW(make_task(f, "nope"), Error);
}

TEST(Task, ProtectedAttributeRole) {
  Frame f = parse_csv("x,sex,y\n1,m,2\n2,f,3\n3,m,1\n");
  TaskOptions o;
  o.protected_attribute = "sex";
  Task t = make_task(f, "y", o);
  EXPECT_EQ(t.feature_names, (std::vector<std::string>{"x"}));
  o.keep_protected_as_feature = true;
  Task k = make_task(f, "y", o);
  EXPECT_EQ(k.feature_names, (std::vector<std::string>{"x", "sex"}));
  EXPECT_TRUE(k.protected_is_feature);
}

TEST(Task, DoesNotMutateFrame) {
  Frame f = parse_csv("x,y\n1,a\n2,b\n");
  Frame copy = f;
  Task a = make_task(f, "y");
  Task b = make_task(f, "y");
  EXPECT_TRUE(f == copy);
  EXPECT_EQ(a.feature_names, b.feature_names);
  EXPECT_EQ(a.type, b.type);
}
