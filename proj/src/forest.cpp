#include "usast/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "usast/parallel.hpp"
#include "usast/rng.hpp"

namespace usast {

namespace {

double entropy(const std::vector<double>& counts, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c <= 0.0) continue;
    const double p = c / total;
    h -= p * std::log2(p);
  }
  return h;
}

struct TreeBuilder {
  const FeatureMatrix& x;
  const std::vector<int>& y;
  std::size_t n_classes;
  const ForestParams& params;
  std::size_t max_features;
  Rng rng;
  DecisionTree tree;
  // (value, sample) scratch reused across nodes
  std::vector<std::pair<double, std::size_t>> sorted;

  int build(std::vector<std::size_t>& samples) {
    const std::size_t n = samples.size();
    std::vector<double> counts(n_classes, 0.0);
    for (std::size_t s : samples) counts[y[s]] += 1.0;
    const double node_entropy = entropy(counts, static_cast<double>(n));

    const bool pure = node_entropy == 0.0;
    if (pure || n < 2 * params.min_samples_leaf) return make_leaf(counts);

    // Draw the feature subset without replacement.
    const std::size_t f_total = x.layout.columns();
    std::vector<std::size_t> features(f_total);
    std::iota(features.begin(), features.end(), 0);
    for (std::size_t i = 0; i < max_features; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, f_total - 1);
      std::swap(features[i], features[pick(rng)]);
    }
    features.resize(max_features);
    std::sort(features.begin(), features.end());  // deterministic tie rule

    double best_gain = 0.0;
    std::size_t best_feature = 0;
    double best_threshold = 0.0;
    bool found = false;

    std::vector<double> left_counts(n_classes);
    for (std::size_t f : features) {
      sorted.clear();
      for (std::size_t s : samples) sorted.emplace_back(x.at(s, f), s);
      std::sort(sorted.begin(), sorted.end());

      std::fill(left_counts.begin(), left_counts.end(), 0.0);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_counts[y[sorted[i].second]] += 1.0;
        if (sorted[i].first == sorted[i + 1].first) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < params.min_samples_leaf ||
            n_right < params.min_samples_leaf)
          continue;
        std::vector<double> right_counts(n_classes);
        for (std::size_t c = 0; c < n_classes; ++c)
          right_counts[c] = counts[c] - left_counts[c];
        const double gain =
            node_entropy -
            (static_cast<double>(n_left) / n) *
                entropy(left_counts, static_cast<double>(n_left)) -
            (static_cast<double>(n_right) / n) *
                entropy(right_counts, static_cast<double>(n_right));
        if (gain <= 0.0) continue;
        // midpoint rule, strictly between the two observed values
        const double thr = sorted[i].first +
                           (sorted[i + 1].first - sorted[i].first) / 2.0;
        // ties: lowest feature index, then lowest threshold (features are
        // scanned in ascending order, thresholds ascending per feature)
        if (!found || gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = thr;
          found = true;
        }
      }
    }

    if (!found) return make_leaf(counts);

    std::vector<std::size_t> left_samples, right_samples;
    for (std::size_t s : samples) {
      if (x.at(s, best_feature) <= best_threshold)
        left_samples.push_back(s);
      else
        right_samples.push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();

    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[node_id].feature = static_cast<int>(best_feature);
    tree.nodes[node_id].threshold = best_threshold;
    const int left_id = build(left_samples);
    tree.nodes[node_id].left = left_id;
    const int right_id = build(right_samples);
    tree.nodes[node_id].right = right_id;
    return node_id;
  }

  int make_leaf(std::vector<double> counts) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[id].class_counts = std::move(counts);
    return id;
  }
};

// Post-order node ids from build() start at the root only when the root is
// created first; build() above creates split nodes before children, so node
// 0 is the root whenever a split exists, and the single leaf otherwise.

std::vector<double> leaf_distribution(const TreeNode& leaf) {
  double total = 0.0;
  for (double c : leaf.class_counts) total += c;
  std::vector<double> p(leaf.class_counts.size(), 0.0);
  if (total > 0.0)
    for (std::size_t c = 0; c < p.size(); ++c)
      p[c] = leaf.class_counts[c] / total;
  return p;
}

}  // namespace

const TreeNode& DecisionTree::leaf_for(const double* row) const {
  const TreeNode* node = &nodes[0];
  while (node->feature >= 0)
    node = &nodes[row[node->feature] <= node->threshold ? node->left
                                                        : node->right];
  return *node;
}

ForestModel ForestModel::fit(const FeatureMatrix& x, const std::vector<int>& y,
                             std::size_t n_classes, const ForestParams& params,
                             std::uint64_t seed, std::size_t workers) {
  const std::size_t n = x.rows;
  if (n < 2) throw std::invalid_argument("fit_forest: need at least 2 samples");
  if (y.size() != n)
    throw std::invalid_argument("fit_forest: label count mismatch");
  std::set<int> present(y.begin(), y.end());
  if (present.size() < 2)
    throw std::invalid_argument("fit_forest: single-class targets");
  for (double v : x.data)
    if (!std::isfinite(v))
      throw std::invalid_argument("fit_forest: non-finite feature value");

  const std::size_t f = x.layout.columns();
  std::size_t max_features = params.max_features;
  if (max_features == 0)
    max_features = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::sqrt(static_cast<double>(f))));
  max_features = std::min(max_features, f);

  ForestModel model;
  model.feature_count_ = f;
  model.n_classes_ = n_classes;
  model.trees_.resize(params.n_trees);

  parallel_for(params.n_trees, workers, [&](std::size_t t) {
    TreeBuilder builder{x, y, n_classes, params, max_features,
                        Rng(derive_seed(seed, t)), {}, {}};
    std::vector<std::size_t> bootstrap(n);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (auto& s : bootstrap) s = pick(builder.rng);
    builder.build(bootstrap);
    model.trees_[t] = std::move(builder.tree);
  });
  return model;
}

void ForestModel::check_features(const FeatureMatrix& x) const {
  if (x.layout.columns() != feature_count_)
    throw std::invalid_argument("forest: feature count mismatch (" +
                                std::to_string(x.layout.columns()) + " vs " +
                                std::to_string(feature_count_) + ")");
}

std::vector<std::vector<double>> ForestModel::predict_proba(
    const FeatureMatrix& x) const {
  check_features(x);
  std::vector<std::vector<double>> out(x.rows,
                                       std::vector<double>(n_classes_, 0.0));
  const std::size_t cols = x.layout.columns();
  for (std::size_t r = 0; r < x.rows; ++r) {
    const double* row = x.data.data() + r * cols;
    for (const auto& tree : trees_) {
      const auto p = leaf_distribution(tree.leaf_for(row));
      for (std::size_t c = 0; c < n_classes_; ++c) out[r][c] += p[c];
    }
    for (auto& v : out[r]) v /= static_cast<double>(trees_.size());
  }
  return out;
}

std::vector<int> ForestModel::predict(const FeatureMatrix& x) const {
  const auto proba = predict_proba(x);
  std::vector<int> out(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < n_classes_; ++c)
      if (proba[r][c] > proba[r][best]) best = c;
    out[r] = static_cast<int>(best);
  }
  return out;
}

std::vector<double> ForestModel::feature_importance() const {
  std::vector<double> imp(feature_count_, 0.0);
  for (const auto& tree : trees_) {
    // recompute node sample counts bottom-up from leaf counts
    std::vector<double> node_n(tree.nodes.size(), 0.0);
    std::vector<std::vector<double>> node_counts(tree.nodes.size());
    for (std::size_t i = tree.nodes.size(); i-- > 0;) {
      const auto& node = tree.nodes[i];
      if (node.feature < 0) {
        node_counts[i] = node.class_counts;
      } else {
        node_counts[i].assign(n_classes_, 0.0);
        for (std::size_t c = 0; c < n_classes_; ++c)
          node_counts[i][c] = node_counts[node.left][c] +
                              node_counts[node.right][c];
      }
      for (double c : node_counts[i]) node_n[i] += c;
    }
    const double root_n = node_n.empty() ? 0.0 : node_n[0];
    if (root_n <= 0.0) continue;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const auto& node = tree.nodes[i];
      if (node.feature < 0) continue;
      const double nl = node_n[node.left];
      const double nr = node_n[node.right];
      const double nn = node_n[i];
      const double decrease =
          entropy(node_counts[i], nn) -
          (nl / nn) * entropy(node_counts[node.left], nl) -
          (nr / nn) * entropy(node_counts[node.right], nr);
      imp[node.feature] += (nn / root_n) * decrease;
    }
  }
  double total = 0.0;
  for (double v : imp) total += v;
  if (total > 0.0)
    for (double& v : imp) v /= total;
  return imp;
}

ForestModel ForestModel::from_parts(std::vector<DecisionTree> trees,
                                    std::size_t feature_count,
                                    std::size_t n_classes) {
  ForestModel m;
  m.trees_ = std::move(trees);
  m.feature_count_ = feature_count;
  m.n_classes_ = n_classes;
  return m;
}

}  // namespace usast
