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

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "modelsum/learners.hpp"
#include "modelsum/simulate.hpp"
#include "support/testing.hpp"

using namespace modelsum;
using testing_support::Gen;
using testing_support::iota;
using testing_support::pick;
using testing_support::unif;

namespace {

Task random_task(Gen& g, TaskType type, std::size_t n, std::size_t p) {
  std::vector<Column> cols;
  for (std::size_t j = 0; j < p; ++j) {
    const std::string name = "f" + std::to_string(j);
    if (j % 3 == 2) {
      std::vector<std::string> s(n);
      for (auto& x : s) x = std::string(1, static_cast<char>('a' + pick(g, 0, 3)));
      cols.push_back(Column::categorical_from_strings(name, s));
    } else {
      std::vector<double> v(n);
      for (auto& x : v) x = unif(g, -2, 2);
      cols.push_back(Column::numeric(name, v));
    }
  }
  if (type == TaskType::regression) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = cols[0][i] + unif(g);
    cols.push_back(Column::numeric("y", y));
  } else {
    const std::size_t k = type == TaskType::binary_classification ? 2 : 3;
    std::vector<std::string> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = "k" + std::to_string(i < k ? i : pick(g, 0, k - 1));
    }
    cols.push_back(Column::categorical_from_strings("y", y));
  }
  return make_task(Frame(std::move(cols)), "y");
}

}  // namespace

TEST(Featureless, RegressionMean) {
  Task t = make_task(parse_csv("x,y\n0,1\n0,2\n0,3\n"), "y");
  FittedModel m = fit(make_learner("featureless"), t, 1);
  Prediction p = m.predict(*t.frame);
  for (double v : p.response) EXPECT_EQ(v, 2.0);
}

TEST(Featureless, ClassFrequencies) {
  std::string csv = "x,y\n";
  for (int i = 0; i < 10; ++i) csv += "1," + std::string(i < 7 ? "good" : "bad") + "\n";
  Task t = make_task(parse_csv(csv), "y");
  FittedModel m = fit(make_learner("featureless"), t, 1);
  Prediction p = m.predict(*t.frame);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_DOUBLE_EQ(p.probability(i, 0), 0.7);
    EXPECT_DOUBLE_EQ(p.probability(i, 1), 0.3);
    EXPECT_EQ(p.labels[i], 0u);
  }
}

TEST(Featureless, MeanPropertyExact) {
  Gen g(3);
  for (int inst = 0; inst < 100; ++inst) {
    Task t = random_task(g, TaskType::regression, pick(g, 2, 40), 2);
    FittedModel m = fit(make_learner("featureless"), t, 1);
    double s = 0.0;
    for (std::size_t i = 0; i < t.n_rows(); ++i) s += t.target_column()[i];
    EXPECT_EQ(m.predict(*t.frame).response[0], s / static_cast<double>(t.n_rows()));
  }
}

TEST(Linear, ExactLine) {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i * 0.7 - 1.0);
    y.push_back(2.0 * x.back() + 1.0);
  }
  Task t = make_task(Frame({Column::numeric("x", x), Column::numeric("y", y)}), "y");
  FittedModel m = fit(make_learner("linear"), t, 1);
  const auto& coef = dynamic_cast<const learners::LinearPredictor&>(m.impl()).coefficients();
  EXPECT_NEAR(coef[0], 1.0, 1e-10);
  EXPECT_NEAR(coef[1], 2.0, 1e-10);
  EXPECT_TRUE(m.warnings().empty());
}

TEST(Linear, ResidualsOrthogonalToFeatures) {
  Gen g(5);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = pick(g, 10, 60);
    Task t = random_task(g, TaskType::regression, n, 2);
    FittedModel m = fit(make_learner("linear"), t, 1);
    auto pred = m.predict(*t.frame).response;
    for (const auto& f : t.feature_names) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += (t.target_column()[i] - pred[i]) * t.frame->column(f)[i];
      EXPECT_LT(std::abs(dot), 1e-8 * static_cast<double>(n));
    }
  }
}

TEST(Linear, SingularDesignFallsBackToRidge) {
  std::vector<double> a = {1, 2, 3, 4, 5}, y = {2, 4, 6.5, 8, 10};
  Task t = make_task(Frame({Column::numeric("a", a), Column::numeric("b", a), Column::numeric("y", y)}), "y");
  FittedModel m = fit(make_learner("linear"), t, 1);
  ASSERT_FALSE(m.warnings().empty());
  auto pred = m.predict(*t.frame).response;
  for (double v : pred) EXPECT_TRUE(std::isfinite(v));
}

TEST(Logistic, ZeroCoefficientsGiveHalf) {
  Task t = make_task(parse_csv("x,y\n1,a\n1,b\n2,a\n2,b\n"), "y");
  FittedModel m = fit(make_learner("logistic"), t, 1);
  Prediction p = m.predict(*t.frame);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_NEAR(p.probability(i, 0), 0.5, 1e-12);
    EXPECT_EQ(p.labels[i], 0u);  // tie goes to the lower level
  }
}

TEST(Logistic, SeparationWarns) {
  Task t = make_task(parse_csv("x,y\n1,a\n2,a\n3,b\n4,b\n"), "y");
  FittedModel m = fit(make_learner("logistic"), t, 1);
  EXPECT_FALSE(m.warnings().empty());
  Prediction p = m.predict(*t.frame);
  EXPECT_GT(p.probability(0, 0), 0.99);
  EXPECT_GT(p.probability(3, 1), 0.99);
}

TEST(Tree, PureLeavesOnHandData) {
  // Traced by hand: the root split x <= 2.5 removes all Gini impurity (4/9),
  // leaving two pure leaves.
  Task t = make_task(parse_csv("x,z,y\n1,u,a\n2,v,a\n3,u,b\n4,v,b\n5,u,b\n6,v,b\n"), "y");
  FittedModel m = fit(make_learner("tree"), t, 1);
  Prediction p = m.predict(*t.frame);
  for (std::size_t i = 0; i < 6; ++i) {
    const std::uint32_t own = t.target_column().code(i);
    EXPECT_EQ(p.probability(i, own), 1.0);
    EXPECT_EQ(p.labels[i], own);
  }
  // Midpoint threshold: 2.5 separates, so 2.4 is class a and 2.6 class b.
  Frame probe({Column::numeric("x", {2.4, 2.6}), Column::categorical_from_strings("z", {"u", "u"})});
  Prediction q = m.predict(probe);
  EXPECT_EQ(q.labels[0], 0u);
  EXPECT_EQ(q.labels[1], 1u);
}

TEST(Tree, CategoricalOneVsRest) {
  Task t = make_task(parse_csv("c,y\nr,1\ng,5\nb,1\nr,1\ng,5\nb,1\n"), "y");
  LearnerSpec spec = parse_learner_spec("tree:min_node_size=1");
  FittedModel m = fit(spec, t, 1);
  auto pred = m.predict(*t.frame).response;
  EXPECT_EQ(pred, (std::vector<double>{1, 5, 1, 1, 5, 1}));
}

TEST(Forest, DeterministicGivenSeed) {
  Task t = make_task(simulate(200, 6, 4), "y");
  LearnerSpec spec = parse_learner_spec("random_forest:num_trees=20");
  auto a = fit(spec, t, 9).predict(*t.frame).response;
  auto b = fit(spec, t, 9).predict(*t.frame).response;
  EXPECT_EQ(0, std::memcmp(a.data(), b.data(), a.size() * sizeof(double)));
  auto c = fit(spec, t, 10).predict(*t.frame).response;
  EXPECT_NE(a, c);
}

TEST(Forest, SingleUnsampledTreeEqualsCart) {
  Gen g(8);
  for (int inst = 0; inst < 100; ++inst) {
    const TaskType type = inst % 2 ? TaskType::regression : TaskType::binary_classification;
    Task t = random_task(g, type, pick(g, 8, 40), 4);
    LearnerSpec rf = parse_learner_spec("random_forest:num_trees=1,replace=false,mtry=4");
    auto a = fit(rf, t, inst).predict(*t.frame);
    auto b = fit(make_learner("tree"), t, inst).predict(*t.frame);
    ASSERT_EQ(a.response, b.response);
    ASSERT_EQ(a.prob, b.prob);
  }
}

TEST(Prediction, ProbabilityRowsSumToOne) {
  Gen g(21);
  const std::vector<std::string> specs = {"featureless", "logistic", "tree",
                                          "random_forest:num_trees=5"};
  for (int inst = 0; inst < 100; ++inst) {
    const TaskType type =
        inst % 2 ? TaskType::binary_classification : TaskType::multiclass_classification;
    Task t = random_task(g, type, pick(g, 12, 50), 3);
    const std::string& s = specs[static_cast<std::size_t>(inst) % specs.size()];
    if (s == "logistic" && type != TaskType::binary_classification) continue;
    FittedModel m = fit(parse_learner_spec(s), t, inst);
    Prediction p = m.predict(*t.frame);
    for (std::size_t i = 0; i < p.size(); ++i) {
      double sum = 0.0;
      for (std::size_t c = 0; c < p.n_classes; ++c) {
        const double v = p.probability(i, c);
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
        sum += v;
      }
      ASSERT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

TEST(Prediction, UnseenLevelNamesFeature) {
  Task t = make_task(parse_csv("c,y\nr,1\ng,2\nr,1\n"), "y");
  FittedModel m = fit(make_learner("linear"), t, 1);
  Frame probe({Column::categorical_from_strings("c", {"blue"})});
  try {
    m.predict(probe);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unseen level 'blue' in feature c"), std::string::npos);
  }
}

TEST(Prediction, LevelOrderRemappedByName) {
  Task t = make_task(parse_csv("c,y\nr,1\ng,5\nr,1\ng,5\n"), "y");
  FittedModel m = fit(make_learner("linear"), t, 1);
  Frame probe({Column::categorical_from_strings("c", {"g", "r"})});
  auto pred = m.predict(probe).response;
  EXPECT_NEAR(pred[0], 5.0, 1e-12);
  EXPECT_NEAR(pred[1], 1.0, 1e-12);
}

TEST(Fit, Errors) {
  Task c = make_task(parse_csv("x,y\n1,a\n2,b\n3,a\n"), "y");
  EXPECT_THROW(fit(make_learner("linear"), c, 1), Error);
  std::vector<std::size_t> same_class = {0, 2};
  EXPECT_THROW(fit(make_learner("tree"), c, same_class, 1), Error);
  std::vector<std::size_t> none;
  EXPECT_THROW(fit(make_learner("tree"), c, none, 1), Error);
  EXPECT_THROW(make_learner("svm"), UsageError);
}

TEST(Hyperparameters, NonDefaultSummary) {
  EXPECT_TRUE(hyperparameter_summary(make_learner("random_forest")).empty());
  EXPECT_TRUE(hyperparameter_summary(parse_learner_spec("random_forest:num_trees=500")).empty());
  auto rf = hyperparameter_summary(parse_learner_spec("random_forest:num_trees=100"));
  ASSERT_EQ(rf.size(), 1u);
  EXPECT_EQ(rf[0], (std::pair<std::string, std::string>{"num_trees", "100"}));
  auto lr = hyperparameter_summary(parse_learner_spec("logistic:max_iter=200"));
  ASSERT_EQ(lr.size(), 1u);
  EXPECT_EQ(lr[0].first, "max_iter");
  EXPECT_EQ(lr[0].second, "200");
  EXPECT_THROW(parse_learner_spec("tree:depth=3"), UsageError);
  EXPECT_THROW(parse_learner_spec("tree:max_depth=abc"), UsageError);
}
