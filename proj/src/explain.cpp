#include "usast/explain.hpp"

#include <algorithm>
#include <cmath>

#include "usast/distance.hpp"

#include <json.hpp>

namespace usast {

namespace {

double node_probability(const std::vector<std::vector<double>>& counts,
                        std::size_t node, int cls) {
  double total = 0.0;
  for (double c : counts[node]) total += c;
  return total > 0.0 ? counts[node][cls] / total : 0.0;
}

// class-count vectors for every node, recomputed bottom-up from the leaves
std::vector<std::vector<double>> all_node_counts(const DecisionTree& tree,
                                                 std::size_t n_classes) {
  std::vector<std::vector<double>> counts(tree.nodes.size());
  for (std::size_t i = tree.nodes.size(); i-- > 0;) {
    const auto& node = tree.nodes[i];
    if (node.feature < 0) {
      counts[i] = node.class_counts;
    } else {
      counts[i].assign(n_classes, 0.0);
      for (std::size_t c = 0; c < n_classes; ++c)
        counts[i][c] = counts[node.left][c] + counts[node.right][c];
    }
  }
  return counts;
}

std::string json_points(const std::vector<UncertainValue>& pts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pts) arr.push_back({p.value, p.uncertainty});
  return arr.dump();
}

}  // namespace

GlobalExplanation explain_global(const ForestModel& model,
                                 const SubsequencePool& pool,
                                 const FeatureLayout& layout,
                                 std::size_t top_k) {
  if (layout.pool_size != pool.size())
    throw std::invalid_argument("explain_global: layout/pool size mismatch");
  if (layout.columns() != model.feature_count())
    throw std::invalid_argument("explain_global: layout/model mismatch");

  const auto importance = model.feature_importance();
  std::vector<std::size_t> cols(importance.size());
  for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
  std::stable_sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) {
    return importance[a] > importance[b];  // stable => column-index tie rule
  });

  GlobalExplanation g;
  const std::size_t take = std::min(top_k, cols.size());
  for (std::size_t r = 0; r < take; ++r) {
    const std::size_t col = cols[r];
    const auto& entry = pool.entries[layout.entry_of(col)];
    GlobalExplanationEntry e;
    e.rank = r + 1;
    e.column = col;
    e.provenance = entry.provenance;
    e.length = entry.size();
    e.feature_type = layout.block_of(col);
    e.importance = importance[col];
    e.points = entry.points;
    g.entries.push_back(std::move(e));
  }
  return g;
}

LocalExplanation explain_local(const ForestModel& model,
                               const SubsequencePool& pool,
                               const FeatureLayout& layout,
                               const MultivariateInstance& instance,
                               const VariantConfig& cfg, std::size_t top) {
  const FeatureMatrix x = transform({instance}, pool, cfg, 1);
  const auto proba = model.predict_proba(x);
  const int cls = model.predict(x)[0];

  LocalExplanation l;
  l.instance_id = instance.id;
  l.predicted_class = cls;
  l.predicted_probability = proba[0][cls];
  l.all_contributions.assign(model.feature_count(), 0.0);

  double base = 0.0;
  const double* row = x.data.data();
  for (const auto& tree : model.trees()) {
    const auto counts = all_node_counts(tree, model.n_classes());
    base += node_probability(counts, 0, cls);
    std::size_t node = 0;
    while (tree.nodes[node].feature >= 0) {
      const auto& split = tree.nodes[node];
      const std::size_t child =
          row[split.feature] <= split.threshold ? split.left : split.right;
      l.all_contributions[split.feature] +=
          node_probability(counts, child, cls) -
          node_probability(counts, node, cls);
      node = child;
    }
  }
  const double n_trees = static_cast<double>(model.trees().size());
  base /= n_trees;
  for (double& c : l.all_contributions) c /= n_trees;
  l.base_rate = base;

  std::vector<std::size_t> cols(l.all_contributions.size());
  for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
  std::stable_sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(l.all_contributions[a]) > std::abs(l.all_contributions[b]);
  });

  const DistanceOptions opt{cfg.normalize_by_length, cfg.znormalize_windows};
  const std::size_t take = std::min(top, cols.size());
  for (std::size_t r = 0; r < take; ++r) {
    const std::size_t col = cols[r];
    const auto& entry = pool.entries[layout.entry_of(col)];
    const UncertainSeries* series = instance.find_dim(entry.provenance.dimension);
    if (!series)
      throw std::invalid_argument("explain_local: instance missing dimension " +
                                  entry.provenance.dimension);
    const MatchResult match =
        sliding_min_distance(as_span(entry), as_span(*series), opt);

    LocalExplanationEntry e;
    e.column = col;
    e.provenance = entry.provenance;
    e.length = entry.size();
    e.feature_type = layout.block_of(col);
    e.contribution = l.all_contributions[col];
    e.feature_value = x.at(0, col);
    e.best_match_start = match.position;
    e.window_points.assign(
        series->points.begin() + match.position,
        series->points.begin() + match.position + entry.size());
    l.entries.push_back(std::move(e));
  }
  return l;
}

std::string global_explanation_json(const GlobalExplanation& g,
                                    const std::vector<std::string>& classes) {
  nlohmann::ordered_json doc;
  doc["schema"] = "usast-global-explanation";
  doc["schema_version"] = 1;
  auto& arr = doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : g.entries) {
    nlohmann::ordered_json j;
    j["rank"] = e.rank;
    j["class"] = e.provenance.class_id;
    j["dimension"] = e.provenance.dimension;
    j["ref_instance"] = e.provenance.ref_instance_id;
    j["start"] = e.provenance.start_index;
    j["length"] = e.length;
    j["type"] = FeatureLayout::block_name(e.feature_type);
    j["importance"] = e.importance;
    j["points"] = nlohmann::ordered_json::parse(json_points(e.points));
    arr.push_back(std::move(j));
  }
  doc["classes"] = classes;
  return doc.dump(2);
}

std::string local_explanation_json(const LocalExplanation& l,
                                   const MultivariateInstance& instance,
                                   const std::vector<std::string>& classes) {
  nlohmann::ordered_json doc;
  doc["schema"] = "usast-local-explanation";
  doc["schema_version"] = 1;
  doc["instance_id"] = l.instance_id;
  doc["predicted_class"] =
      l.predicted_class < static_cast<int>(classes.size())
          ? classes[l.predicted_class]
          : std::to_string(l.predicted_class);
  doc["predicted_probability"] = l.predicted_probability;
  doc["base_rate"] = l.base_rate;

  auto& series = doc["series"] = nlohmann::ordered_json::object();
  for (const auto& [dim, s] : instance.dims)
    series[dim] = nlohmann::ordered_json::parse(json_points(s.points));

  auto& arr = doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : l.entries) {
    nlohmann::ordered_json j;
    j["class"] = e.provenance.class_id;
    j["dimension"] = e.provenance.dimension;
    j["type"] = FeatureLayout::block_name(e.feature_type);
    j["contribution"] = e.contribution;
    j["feature_value"] = e.feature_value;
    j["window_start"] = e.best_match_start;
    j["window_length"] = e.length;
    j["window_points"] = nlohmann::ordered_json::parse(
        json_points(e.window_points));
    arr.push_back(std::move(j));
  }
  return doc.dump(2);
}

}  // namespace usast
