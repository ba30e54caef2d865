#include "ucmab/uplift_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "ucmab/errors.hpp"

namespace ucmab {

double ArmCounts::rate(Treatment arm) const {
  const auto a = static_cast<std::size_t>(index_of(arm));
  if (n[a] == 0) return 0.0;
  return static_cast<double>(responders[a]) / static_cast<double>(n[a]);
}

double ArmCounts::pooled_rate() const {
  if (total() == 0) return 0.0;
  return static_cast<double>(responders[0] + responders[1]) / static_cast<double>(total());
}

namespace {

double node_value(const ArmCounts& c, TreeTarget target) {
  return target == TreeTarget::uplift ? c.uplift() : c.pooled_rate();
}

bool admissible(const ArmCounts& c, const TreeParams& p) {
  if (p.target == TreeTarget::uplift) {
    return c.n[0] >= p.min_group && c.n[1] >= p.min_group && c.n[0] > 0 && c.n[1] > 0;
  }
  return c.total() >= std::max<std::size_t>(p.min_group, 1);
}

void add(ArmCounts& c, const LabeledExample& e) {
  const auto a = static_cast<std::size_t>(index_of(e.arm));
  ++c.n[a];
  if (e.y.responded) ++c.responders[a];
}

void remove(ArmCounts& c, const LabeledExample& e) {
  const auto a = static_cast<std::size_t>(index_of(e.arm));
  --c.n[a];
  if (e.y.responded) --c.responders[a];
}

struct SplitChoice {
  int feature = -1;
  double split = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const LabeledExample> data, const TreeParams& params, Rng* rng)
      : data_(data), params_(params), rng_(rng), n_features_(data.front().x.dimension()) {}

  std::vector<UpliftTree::Node> build() {
    std::vector<std::size_t> rows(data_.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t>& rows, std::size_t depth) {
    UpliftTree::Node node;
    for (std::size_t r : rows) add(node.counts, data_[r]);
    node.value = node_value(node.counts, params_.target);
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (depth >= params_.max_depth) return id;

    const SplitChoice best = best_split(rows, node.counts);
    if (best.feature < 0 || !(best.gain > 0.0)) return id;

    const auto f = static_cast<std::size_t>(best.feature);
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : rows) (data_[r].x[f] <= best.split ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    nodes_[id].feature = best.feature;
    nodes_[id].split = best.split;
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> features(n_features_);
    std::iota(features.begin(), features.end(), std::size_t{0});
    const std::size_t k = params_.features_per_split;
    if (k == 0 || k >= n_features_) return features;
    if (rng_ == nullptr) throw StateError("feature subsampling needs a generator");
    // Partial Fisher-Yates; keep the drawn subset in ascending order so
    // gain ties resolve by feature index.
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_->below(n_features_ - i));
      std::swap(features[i], features[j]);
    }
    features.resize(k);
    std::sort(features.begin(), features.end());
    return features;
  }

  SplitChoice best_split(const std::vector<std::size_t>& rows, const ArmCounts& parent) {
    SplitChoice best;
    const double parent_value = node_value(parent, params_.target);
    const double total = static_cast<double>(rows.size());
    std::vector<std::pair<double, std::size_t>> sorted(rows.size());

    for (std::size_t f : candidate_features()) {
      for (std::size_t i = 0; i < rows.size(); ++i) sorted[i] = {data_[rows[i]].x[f], rows[i]};
      std::sort(sorted.begin(), sorted.end());

      ArmCounts left;
      ArmCounts right = parent;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const auto& e = data_[sorted[i].second];
        add(left, e);
        remove(right, e);
        const double lo = sorted[i].first;
        const double hi = sorted[i + 1].first;
        if (!(lo < hi)) continue;
        if (!admissible(left, params_) || !admissible(right, params_)) continue;
        const double dl = node_value(left, params_.target) - parent_value;
        const double dr = node_value(right, params_.target) - parent_value;
        const double gain = static_cast<double>(left.total()) / total * dl * dl +
                            static_cast<double>(right.total()) / total * dr * dr;
        if (gain > best.gain) {
          double split = lo + (hi - lo) / 2.0;
          if (!(split < hi)) split = lo;
          best = {static_cast<int>(f), split, gain};
        }
      }
    }
    return best;
  }

  std::span<const LabeledExample> data_;
  const TreeParams& params_;
  Rng* rng_;
  std::size_t n_features_;
  std::vector<UpliftTree::Node> nodes_;
};

void check_fit_data(std::span<const LabeledExample> data, const TreeParams& params) {
  if (data.empty()) throw FitError("no training data");
  const std::size_t dim = data.front().x.dimension();
  if (dim == 0) throw FitError("training rows have no features");
  ArmCounts root;
  for (const auto& e : data) {
    if (e.x.dimension() != dim) throw FitError("training rows differ in dimension");
    add(root, e);
  }
  if (params.target == TreeTarget::uplift) {
    if (root.n[0] == 0 || root.n[1] == 0) throw FitError("uplift fit needs both arms in the data");
    if (!admissible(root, params)) throw FitError("an arm has fewer rows than min_group");
  } else if (!admissible(root, params)) {
    throw FitError("fewer rows than min_group");
  }
}

}  // namespace

bool operator==(const UpliftTree::Node& a, const UpliftTree::Node& b) {
  return a.feature == b.feature && a.split == b.split && a.left == b.left && a.right == b.right &&
         a.counts.n == b.counts.n && a.counts.responders == b.counts.responders && a.value == b.value;
}

bool operator==(const UpliftTree& a, const UpliftTree& b) { return a.nodes_ == b.nodes_; }

UpliftTree::UpliftTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw DomainError("tree needs a root node");
  const int count = static_cast<int>(nodes_.size());
  for (int i = 0; i < count; ++i) {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.is_leaf()) continue;
    // Children must come after their parent, which also rules out cycles.
    if (n.left <= i || n.right <= i || n.left >= count || n.right >= count)
      throw DomainError("tree node " + std::to_string(i) + " has invalid children");
  }
}

const UpliftTree::Node& UpliftTree::leaf_for(const ContextPoint& x) const {
  if (nodes_.empty()) throw StateError("tree is empty");
  const Node* node = &nodes_.front();
  while (!node->is_leaf()) {
    const auto f = static_cast<std::size_t>(node->feature);
    if (f >= x.dimension()) throw DomainError("context has too few features for this tree");
    node = &nodes_[static_cast<std::size_t>(x[f] <= node->split ? node->left : node->right)];
  }
  return *node;
}

double UpliftTree::predict(const ContextPoint& x) const { return leaf_for(x).value; }

std::size_t UpliftTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::size_t UpliftTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

nlohmann::json UpliftTree::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const Node& n : nodes_) {
    nlohmann::json j = {{"n", n.counts.n}, {"responders", n.counts.responders}, {"value", n.value}};
    if (!n.is_leaf()) {
      j["feature"] = n.feature;
      j["split"] = n.split;
      j["left"] = n.left;
      j["right"] = n.right;
    }
    out.push_back(std::move(j));
  }
  return out;
}

UpliftTree fit_tree(std::span<const LabeledExample> data, const TreeParams& params, Rng* feature_rng) {
  check_fit_data(data, params);
  UpliftTree tree;
  tree.nodes_ = TreeBuilder(data, params, feature_rng).build();
  return tree;
}

UpliftForest::UpliftForest(std::vector<UpliftTree> trees, std::vector<std::uint64_t> seeds)
    : trees_(std::move(trees)), seeds_(std::move(seeds)) {
  if (trees_.empty()) throw DomainError("forest needs at least one tree");
}

nlohmann::json UpliftForest::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"format", "ucmab-uplift-forest"}, {"tree_seeds", seeds_}, {"trees", std::move(trees)}};
}

UpliftForest fit_forest(std::span<const LabeledExample> data, const ForestParams& params, std::uint64_t seed) {
  if (params.n_trees < 1) throw ConfigError("n_trees must be >= 1");
  check_fit_data(data, params.tree);

  TreeParams tree_params = params.tree;
  const std::size_t n_features = data.front().x.dimension();
  if (params.subsample_features && tree_params.features_per_split == 0) {
    tree_params.features_per_split =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features)))));
  }

  std::array<std::vector<std::size_t>, 2> by_arm;
  for (std::size_t i = 0; i < data.size(); ++i) by_arm[static_cast<std::size_t>(index_of(data[i].arm))].push_back(i);

  std::vector<UpliftTree> trees;
  std::vector<std::uint64_t> seeds;
  trees.reserve(params.n_trees);
  std::vector<LabeledExample> sample;
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    const std::uint64_t tree_seed = mix_seed(seed, t);
    Rng rng(tree_seed);
    std::span<const LabeledExample> tree_data = data;
    if (params.bootstrap) {
      sample.clear();
      sample.reserve(data.size());
      for (const auto& rows : by_arm) {
        for (std::size_t k = 0; k < rows.size(); ++k) sample.push_back(data[rows[rng.below(rows.size())]]);
      }
      tree_data = sample;
    }
    trees.push_back(fit_tree(tree_data, tree_params, &rng));
    seeds.push_back(tree_seed);
  }
  return UpliftForest(std::move(trees), std::move(seeds));
}

double predict_uplift(const UpliftForest& model, const ContextPoint& x) {
  if (!model.fitted()) throw StateError("uplift forest is not fitted");
  double sum = 0.0;
  for (const auto& tree : model.trees()) sum += tree.predict(x);
  return sum / static_cast<double>(model.trees().size());
}

TwoModelEstimator TwoModelEstimator::fit(std::span<const LabeledExample> data, ForestParams params,
                                         std::uint64_t seed) {
  std::vector<LabeledExample> treated;
  std::vector<LabeledExample> control;
  for (const auto& e : data) (e.arm == Treatment::treated ? treated : control).push_back(e);
  if (treated.empty() || control.empty()) throw FitError("two-model fit needs both arms in the data");
  params.tree.target = TreeTarget::response;
  TwoModelEstimator out;
  out.treated_ = fit_forest(treated, params, mix_seed(seed, 1));
  out.control_ = fit_forest(control, params, mix_seed(seed, 0));
  return out;
}

double TwoModelEstimator::predict(const ContextPoint& x) const {
  return predict_uplift(treated_, x) - predict_uplift(control_, x);
}

}  // namespace ucmab
