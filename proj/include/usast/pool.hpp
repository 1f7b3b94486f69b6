#pragma once

#include "usast/core.hpp"
#include "usast/distance.hpp"

namespace usast {

struct SubsequencePool {
  std::vector<UncertainSubsequence> entries;  // canonical order
  // Config snapshot taken at generation time.
  double epsilon = 0.25;
  std::vector<std::size_t> length_list;
  bool dedup = false;
  DistanceOptions distance_options;

  std::size_t size() const { return entries.size(); }
};

// k instances per class, uniform without replacement, seeded. Classes with
// fewer than k members contribute all of them (a warning is appended to
// `warnings` when given). Output order: class id ascending, then draw order.
std::vector<MultivariateInstance> select_references(
    const LabeledDataset& d, std::size_t k, std::uint64_t seed,
    std::vector<std::string>* warnings = nullptr);

// All windows of every listed length from every dimension of every
// reference, in canonical order; greedy first-kept-wins epsilon-similarity
// filter per (dimension, length) group when dedup is on.
SubsequencePool generate_subsequences(
    const std::vector<MultivariateInstance>& refs,
    const std::vector<std::string>& ref_classes,
    const std::vector<std::size_t>& length_list, double epsilon, bool dedup,
    const DistanceOptions& opt = {});

// The greedy filter alone; exposed so re-running it on a pool can be checked
// for idempotence.
std::vector<UncertainSubsequence> greedy_dedup(
    const std::vector<UncertainSubsequence>& candidates, double epsilon,
    const DistanceOptions& opt = {});

}  // namespace usast
