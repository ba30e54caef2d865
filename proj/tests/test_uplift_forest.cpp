#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ucmab/errors.hpp"
#include "ucmab/uplift_forest.hpp"

using namespace ucmab;

namespace {

LabeledExample row(std::vector<double> x, int arm, bool y) {
  return {ContextPoint(std::move(x)), treatment_from_index(arm), Outcome{y}};
}

// Naive reference learner: recompute every candidate split from scratch.
struct OracleNode {
  int feature = -1;
  double split = 0;
  double value = 0;
  std::unique_ptr<OracleNode> left, right;
};

double rate_diff(const std::vector<LabeledExample>& rows) {
  double r[2] = {0, 0}, n[2] = {0, 0};
  for (const auto& e : rows) {
    n[index_of(e.arm)] += 1;
    r[index_of(e.arm)] += e.y.responded;
  }
  return r[1] / n[1] - r[0] / n[0];
}

bool has_groups(const std::vector<LabeledExample>& rows, std::size_t min_group) {
  std::size_t n[2] = {0, 0};
  for (const auto& e : rows) ++n[index_of(e.arm)];
  return n[0] >= std::max<std::size_t>(min_group, 1) && n[1] >= std::max<std::size_t>(min_group, 1);
}

std::unique_ptr<OracleNode> oracle_fit(const std::vector<LabeledExample>& rows, std::size_t depth,
                                       std::size_t max_depth, std::size_t min_group) {
  auto node = std::make_unique<OracleNode>();
  node->value = rate_diff(rows);
  if (depth >= max_depth) return node;
  double best = 0;
  std::vector<LabeledExample> best_l, best_r;
  const std::size_t dim = rows.front().x.dimension();
  for (std::size_t f = 0; f < dim; ++f) {
    std::set<double> values;
    for (const auto& e : rows) values.insert(e.x[f]);
    std::vector<double> v(values.begin(), values.end());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double t = (v[i] + v[i + 1]) / 2;
      std::vector<LabeledExample> l, r;
      for (const auto& e : rows) (e.x[f] <= t ? l : r).push_back(e);
      if (!has_groups(l, min_group) || !has_groups(r, min_group)) continue;
      const double wl = double(l.size()) / double(rows.size()), wr = double(r.size()) / double(rows.size());
      const double gain = wl * std::pow(rate_diff(l) - node->value, 2) + wr * std::pow(rate_diff(r) - node->value, 2);
      if (gain > best + 1e-12) {
        best = gain;
        node->feature = static_cast<int>(f);
        node->split = t;
        best_l = l;
        best_r = r;
      }
    }
  }
  if (node->feature >= 0) {
    node->left = oracle_fit(best_l, depth + 1, max_depth, min_group);
    node->right = oracle_fit(best_r, depth + 1, max_depth, min_group);
  }
  return node;
}

double oracle_predict(const OracleNode& n, const ContextPoint& x) {
  if (n.feature < 0) return n.value;
  return oracle_predict(x[static_cast<std::size_t>(n.feature)] <= n.split ? *n.left : *n.right, x);
}

std::size_t oracle_leaves(const OracleNode& n) {
  return n.feature < 0 ? 1 : oracle_leaves(*n.left) + oracle_leaves(*n.right);
}

UpliftTree::Node leaf(double value) {
  UpliftTree::Node n;
  n.value = value;
  return n;
}

UpliftTree::Node split(int feature, double at, int left, int right) {
  UpliftTree::Node n;
  n.feature = feature;
  n.split = at;
  n.left = left;
  n.right = right;
  return n;
}

}  // namespace

TEST_CASE("split lands on the uplift boundary") {
  std::vector<LabeledExample> data;
  Rng rng(3);
  for (int i = 0; i < 400; ++i) {
    const double x0 = (i + 0.5) / 400.0, x1 = rng.uniform();
    const int arm = i % 2;
    const bool persuadable = x0 < 0.5;
    data.push_back(row({x0, x1}, arm, persuadable ? arm == 1 : arm == 0));
  }
  TreeParams p;
  p.max_depth = 1;
  const auto tree = fit_tree(data, p);
  const auto& root = tree.nodes().front();
  CHECK(root.feature == 0);
  CHECK(root.split == doctest::Approx(0.5).epsilon(0.01));
  CHECK(tree.predict(ContextPoint{0.2, 0.5}) == 1.0);
  CHECK(tree.predict(ContextPoint{0.8, 0.5}) == -1.0);
}

TEST_CASE("identical response rates give a single zero leaf") {
  std::vector<LabeledExample> data;
  for (int i = 0; i < 100; ++i) data.push_back(row({i / 100.0, (i * 7 % 100) / 100.0}, i % 2, true));
  const auto tree = fit_tree(data, TreeParams{});
  CHECK(tree.leaf_count() == 1);
  CHECK(tree.predict(ContextPoint{0.3, 0.3}) == 0.0);
}

TEST_CASE("eight-row tree matches the brute-force learner") {
  const std::vector<LabeledExample> data{
      row({0.1, 0.9}, 1, true),  row({0.2, 0.1}, 0, false), row({0.3, 0.7}, 1, true),  row({0.4, 0.3}, 0, true),
      row({0.6, 0.8}, 1, false), row({0.7, 0.2}, 0, true),  row({0.8, 0.6}, 1, false), row({0.9, 0.4}, 0, false),
  };
  for (std::size_t depth : {1u, 2u, 3u}) {
    TreeParams p;
    p.max_depth = depth;
    p.min_group = 1;
    const auto tree = fit_tree(data, p);
    const auto oracle = oracle_fit(data, 0, depth, 1);
    CHECK(tree.leaf_count() == oracle_leaves(*oracle));
    for (const auto& e : data) CHECK(tree.predict(e.x) == doctest::Approx(oracle_predict(*oracle, e.x)).epsilon(1e-12));
    for (double a = 0.05; a < 1; a += 0.1)
      for (double b = 0.05; b < 1; b += 0.1)
        CHECK(tree.predict(ContextPoint{a, b}) == doctest::Approx(oracle_predict(*oracle, ContextPoint{a, b})));
  }
  // Hand check of the root: x0 <= 0.35 leaves treated rate 1 against control
  // rate 0 (uplift 1); the right side has treated 0 and control 2/3. Its gain
  // 3/8 + 5/8 * 4/9 beats the split at 0.5 (gain 1/4). No x1 split keeps both
  // arms on both sides.
  TreeParams stump;
  stump.max_depth = 1;
  stump.min_group = 1;
  const auto tree = fit_tree(data, stump);
  CHECK(tree.nodes().front().feature == 0);
  CHECK(tree.nodes().front().split == doctest::Approx(0.35));
  CHECK(tree.predict(ContextPoint{0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(tree.predict(ContextPoint{1.0, 0.0}) == doctest::Approx(-2.0 / 3.0));
}

TEST_CASE("leaves respect min_group per arm") {
  Rng rng(11);
  std::vector<LabeledExample> data;
  for (int i = 0; i < 600; ++i)
    data.push_back(row({rng.uniform(), rng.uniform(), rng.uniform()}, rng.coin(), rng.bernoulli(0.4)));
  TreeParams p;
  p.min_group = 20;
  const auto tree = fit_tree(data, p);
  for (const auto& n : tree.nodes()) {
    if (!n.is_leaf()) continue;
    CHECK(n.counts.n[0] >= 20);
    CHECK(n.counts.n[1] >= 20);
  }
  CHECK(tree.depth() <= p.max_depth);
}

TEST_CASE("leaf estimates recover piecewise-constant uplift") {
  // Quadrant uplifts over a control rate of 0.05.
  auto true_uplift = [](double a, double b) {
    if (a <= 0.5) return b <= 0.5 ? 0.4 : 0.2;
    return b <= 0.5 ? 0.0 : -0.05;
  };
  Rng rng(21);
  std::vector<LabeledExample> data;
  for (int i = 0; i < 20000; ++i) {
    const double a = rng.uniform(), b = rng.uniform();
    const int arm = rng.coin();
    data.push_back(row({a, b}, arm, rng.bernoulli(0.05 + (arm ? true_uplift(a, b) : 0.0))));
  }
  TreeParams p;
  p.max_depth = 2;
  p.min_group = 50;
  const auto tree = fit_tree(data, p);
  CHECK(tree.leaf_count() == 4);
  for (double a : {0.25, 0.75}) {
    for (double b : {0.25, 0.75}) {
      const auto& n = tree.leaf_for(ContextPoint{a, b});
      const double tol = 1.0 / std::sqrt(double(std::min(n.counts.n[0], n.counts.n[1])));
      CHECK(std::abs(n.value - true_uplift(a, b)) < tol);
    }
  }
}

TEST_CASE("fit errors") {
  CHECK_THROWS_AS(fit_tree({}, TreeParams{}), FitError);
  std::vector<LabeledExample> one_arm{row({0.1}, 1, true), row({0.2}, 1, false)};
  CHECK_THROWS_AS(fit_tree(one_arm, TreeParams{}), FitError);
  std::vector<LabeledExample> small{row({0.1}, 1, true), row({0.2}, 0, false)};
  CHECK_THROWS_AS(fit_tree(small, TreeParams{}), FitError);
  TreeParams loose;
  loose.min_group = 1;
  CHECK(fit_tree(small, loose).leaf_count() == 1);
}

TEST_CASE("forests") {
  Rng rng(4);
  std::vector<LabeledExample> data;
  for (int i = 0; i < 800; ++i) {
    const double a = rng.uniform(), b = rng.uniform(), c = rng.uniform(), d = rng.uniform();
    const int arm = rng.coin();
    data.push_back(row({a, b, c, d}, arm, rng.bernoulli(0.3 + (arm && a < 0.5 ? 0.4 : 0.0))));
  }

  SUBCASE("degenerate forest equals a single tree") {
    ForestParams p;
    p.n_trees = 1;
    p.bootstrap = false;
    p.subsample_features = false;
    const auto forest = fit_forest(data, p, 9);
    REQUIRE(forest.trees().size() == 1);
    CHECK(forest.trees()[0] == fit_tree(data, p.tree));
  }
  SUBCASE("same seed, same forest") {
    ForestParams p;
    p.n_trees = 10;
    CHECK(fit_forest(data, p, 5) == fit_forest(data, p, 5));
    CHECK_FALSE(fit_forest(data, p, 5) == fit_forest(data, p, 6));
    CHECK(fit_forest(data, p, 5).to_json() == fit_forest(data, p, 5).to_json());
  }
  SUBCASE("predictions stay in [-1, 1] and separate the regions") {
    ForestParams p;
    p.n_trees = 20;
    const auto forest = fit_forest(data, p, 1);
    double lo = 0, hi = 0;
    for (int i = 0; i < 200; ++i) {
      const ContextPoint x{rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()};
      const double u = predict_uplift(forest, x);
      REQUIRE(u >= -1.0);
      REQUIRE(u <= 1.0);
      (x[0] < 0.5 ? lo : hi) += u;
    }
    CHECK(lo > hi);
  }
  SUBCASE("two-model estimator") {
    ForestParams p;
    p.n_trees = 20;
    const auto model = TwoModelEstimator::fit(data, p, 2);
    CHECK(model.predict(ContextPoint{0.2, 0.5, 0.5, 0.5}) > model.predict(ContextPoint{0.8, 0.5, 0.5, 0.5}));
    const ContextPoint x{0.3, 0.1, 0.9, 0.4};
    CHECK(model.predict(x) ==
          doctest::Approx(predict_uplift(model.treated_model(), x) - predict_uplift(model.control_model(), x)));
  }
}

TEST_CASE("forest prediction is the mean of its trees") {
  UpliftTree a({split(0, 0.5, 1, 2), leaf(0.3), leaf(-0.1)});
  UpliftTree b({split(1, 0.25, 1, 2), leaf(0.6), split(0, 0.75, 3, 4), leaf(0.0), leaf(0.9)});
  UpliftTree c({leaf(-0.2)});
  const UpliftForest forest({a, b, c});
  CHECK(predict_uplift(forest, ContextPoint{0.4, 0.1}) == doctest::Approx((0.3 + 0.6 - 0.2) / 3));
  CHECK(predict_uplift(forest, ContextPoint{0.6, 0.5}) == doctest::Approx((-0.1 + 0.0 - 0.2) / 3));
  CHECK(predict_uplift(forest, ContextPoint{0.9, 0.9}) == doctest::Approx((-0.1 + 0.9 - 0.2) / 3));

  const UpliftForest constant({c, c});
  CHECK(predict_uplift(constant, ContextPoint{0.1, 0.2}) == doctest::Approx(-0.2));
  CHECK(predict_uplift(constant, ContextPoint{0.9, 0.7}) == doctest::Approx(-0.2));

  CHECK_THROWS_AS(UpliftTree({split(0, 0.5, 0, 1), leaf(0)}), DomainError);
  CHECK_THROWS_AS(predict_uplift(UpliftForest{}, ContextPoint{0.1}), StateError);
}
