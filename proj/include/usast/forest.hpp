#pragma once

#include <cstdint>
#include <vector>

#include "usast/transform.hpp"

namespace usast {

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> class_counts;  // leaves only
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root

  const TreeNode& leaf_for(const double* row) const;
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_features = 0;  // 0 means floor(sqrt(F)), at least 1
  std::size_t min_samples_leaf = 1;
};

class ForestModel {
 public:
  ForestModel() = default;

  // Bagged information-gain trees. Deterministic given seed; trees are grown
  // in parallel with per-tree derived seeds.
  static ForestModel fit(const FeatureMatrix& x,
                         const std::vector<int>& y, std::size_t n_classes,
                         const ForestParams& params, std::uint64_t seed,
                         std::size_t workers = 0);

  std::vector<int> predict(const FeatureMatrix& x) const;
  // Rows: mean of per-tree leaf class frequencies; each sums to 1.
  std::vector<std::vector<double>> predict_proba(const FeatureMatrix& x) const;
  // Mean decrease in impurity, weighted by node sample counts, normalized to
  // sum 1 (all-zero when no split was ever made).
  std::vector<double> feature_importance() const;

  std::size_t feature_count() const { return feature_count_; }
  std::size_t n_classes() const { return n_classes_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

  // Used by model (de)serialization.
  static ForestModel from_parts(std::vector<DecisionTree> trees,
                                std::size_t feature_count,
                                std::size_t n_classes);

 private:
  void check_features(const FeatureMatrix& x) const;

  std::vector<DecisionTree> trees_;
  std::size_t feature_count_ = 0;
  std::size_t n_classes_ = 0;
};

}  // namespace usast
