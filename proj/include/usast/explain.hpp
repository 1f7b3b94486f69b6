#pragma once

#include "usast/forest.hpp"
#include "usast/pool.hpp"
#include "usast/transform.hpp"

namespace usast {

struct GlobalExplanationEntry {
  std::size_t rank = 0;
  std::size_t column = 0;
  Provenance provenance;
  std::size_t length = 0;
  FeatureLayout::Block feature_type = FeatureLayout::Block::Value;
  double importance = 0.0;
  std::vector<UncertainValue> points;
};

struct GlobalExplanation {
  std::vector<GlobalExplanationEntry> entries;  // importance non-increasing
};

struct LocalExplanationEntry {
  std::size_t column = 0;
  Provenance provenance;
  std::size_t length = 0;
  FeatureLayout::Block feature_type = FeatureLayout::Block::Value;
  double contribution = 0.0;
  double feature_value = 0.0;
  std::size_t best_match_start = 0;  // window start in the instance
  std::vector<UncertainValue> window_points;
};

struct LocalExplanation {
  std::string instance_id;
  int predicted_class = 0;
  double predicted_probability = 0.0;
  double base_rate = 0.0;  // mean root probability of the predicted class
  std::vector<LocalExplanationEntry> entries;  // |contribution| descending
  // base_rate + sum of ALL per-feature contributions = predicted_probability
  std::vector<double> all_contributions;       // one per feature column
};

// Top-k features by importance, mapped back through the layout to pool
// entries; ties broken by column index.
GlobalExplanation explain_global(const ForestModel& model,
                                 const SubsequencePool& pool,
                                 const FeatureLayout& layout,
                                 std::size_t top_k = 20);

// Decision-path attribution: each split's change in predicted-class
// probability is credited to its split feature, averaged over trees. The
// best-match window of each reported feature is recovered in the instance.
LocalExplanation explain_local(const ForestModel& model,
                               const SubsequencePool& pool,
                               const FeatureLayout& layout,
                               const MultivariateInstance& instance,
                               const VariantConfig& cfg, std::size_t top = 3);

// Plot-ready JSON (documented, versioned schema).
std::string global_explanation_json(const GlobalExplanation& g,
                                    const std::vector<std::string>& classes);
std::string local_explanation_json(const LocalExplanation& l,
                                   const MultivariateInstance& instance,
                                   const std::vector<std::string>& classes);

}  // namespace usast
