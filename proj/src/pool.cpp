#include "usast/pool.hpp"

#include <algorithm>
#include <map>

#include "usast/rng.hpp"

namespace usast {

std::vector<MultivariateInstance> select_references(
    const LabeledDataset& d, std::size_t k, std::uint64_t seed,
    std::vector<std::string>* warnings) {
  if (d.instances.empty())
    throw std::invalid_argument("select_references: empty dataset");
  if (d.labels.size() != d.instances.size())
    throw std::invalid_argument("select_references: label/instance mismatch");

  // class id -> indices, ordered by class id for a canonical output order
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < d.instances.size(); ++i)
    by_class[d.labels[i]].push_back(i);

  std::vector<MultivariateInstance> out;
  std::size_t class_index = 0;
  for (auto& [cls, members] : by_class) {
    Rng rng(derive_seed(seed, class_index++));
    if (members.size() < k && warnings)
      warnings->push_back("class " + cls + " has only " +
                          std::to_string(members.size()) +
                          " instances; taking all (k=" + std::to_string(k) +
                          ")");
    const std::size_t take = std::min(k, members.size());
    // partial Fisher-Yates
    for (std::size_t i = 0; i < take; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, members.size() - 1);
      std::swap(members[i], members[pick(rng)]);
    }
    for (std::size_t i = 0; i < take; ++i)
      out.push_back(d.instances[members[i]]);
  }
  return out;
}

std::vector<UncertainSubsequence> greedy_dedup(
    const std::vector<UncertainSubsequence>& candidates, double epsilon,
    const DistanceOptions& opt) {
  std::vector<UncertainSubsequence> kept;
  // group key -> indices into kept, same (dimension, length) only
  std::map<std::pair<std::string, std::size_t>, std::vector<std::size_t>>
      groups;
  for (const auto& cand : candidates) {
    auto& group = groups[{cand.provenance.dimension, cand.size()}];
    bool similar = false;
    for (std::size_t ki : group) {
      if (epsilon_similar(as_span(cand), as_span(kept[ki]), epsilon, opt)) {
        similar = true;
        break;
      }
    }
    if (!similar) {
      group.push_back(kept.size());
      kept.push_back(cand);
    }
  }
  return kept;
}

SubsequencePool generate_subsequences(
    const std::vector<MultivariateInstance>& refs,
    const std::vector<std::string>& ref_classes,
    const std::vector<std::size_t>& length_list, double epsilon, bool dedup,
    const DistanceOptions& opt) {
  if (refs.size() != ref_classes.size())
    throw std::invalid_argument(
        "generate_subsequences: refs/classes size mismatch");

  std::vector<std::size_t> lengths = length_list;
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());

  for (const auto& ref : refs)
    for (const auto& [dim, series] : ref.dims)
      for (std::size_t l : lengths)
        if (l > series.size())
          throw std::invalid_argument(
              "generate_subsequences: length " + std::to_string(l) +
              " exceeds series length " + std::to_string(series.size()) +
              " (instance " + ref.id + ", dimension " + dim + ")");

  // Canonical order: class, reference, dimension, length asc, start asc.
  // refs arrive already ordered by class then draw; keep that order.
  std::vector<UncertainSubsequence> candidates;
  for (std::size_t r = 0; r < refs.size(); ++r) {
    const auto& ref = refs[r];
    for (const auto& [dim, series] : ref.dims) {
      for (std::size_t l : lengths) {
        for (std::size_t start = 0; start + l <= series.size(); ++start) {
          UncertainSubsequence s;
          s.points.assign(series.points.begin() + start,
                          series.points.begin() + start + l);
          s.provenance = {ref.id, ref_classes[r], dim, start};
          candidates.push_back(std::move(s));
        }
      }
    }
  }

  SubsequencePool pool;
  pool.epsilon = epsilon;
  pool.length_list = lengths;
  pool.dedup = dedup;
  pool.distance_options = opt;
  pool.entries =
      dedup ? greedy_dedup(candidates, epsilon, opt) : std::move(candidates);
  return pool;
}

}  // namespace usast
