#pragma once

#include <optional>
#include <span>

#include "usast/core.hpp"

namespace usast {

// A distance estimate with its propagated one-sigma band.
struct UncertainScalar {
  double value = 0.0;
  double uncertainty = 0.0;
};

struct MatchResult {
  UncertainScalar distance;
  std::size_t position = 0;  // window start in the scanned series
  std::optional<std::size_t> count;  // occurrences, set by dist_and_count
};

struct DistanceOptions {
  // Divide both UED components by the window length. Keeps one epsilon
  // meaningful across different subsequence lengths.
  bool length_normalize = true;
  // Per-window z-normalization of the value track; uncertainties are scaled
  // by the same 1/std factor (std floored at 1e-8).
  bool znormalize = false;
};

// Squared Euclidean distance between value tracks plus the first-order
// propagated uncertainty term. No square root is ever taken.
UncertainScalar ued(std::span<const UncertainValue> s1,
                    std::span<const UncertainValue> s2,
                    const DistanceOptions& opt = {});

// Minimum-UED window of T for the query S. Ties broken by smaller
// uncertainty, then smaller start index.
MatchResult sliding_min_distance(std::span<const UncertainValue> s,
                                 std::span<const UncertainValue> t,
                                 const DistanceOptions& opt = {});

// Single pass: minimum window plus the number of windows within epsilon.
// The threshold test uses the same normalization as the reported distance.
MatchResult dist_and_count(std::span<const UncertainValue> s,
                           std::span<const UncertainValue> t, double epsilon,
                           const DistanceOptions& opt = {});

// UED value component <= epsilon. The uncertainty band plays no part here.
bool epsilon_similar(std::span<const UncertainValue> s1,
                     std::span<const UncertainValue> s2, double epsilon,
                     const DistanceOptions& opt = {});

// Value track to mean 0 / variance 1; uncertainties divided by the value
// standard deviation (floored at 1e-8).
std::vector<UncertainValue> znormalized(std::span<const UncertainValue> s);

inline std::span<const UncertainValue> as_span(const UncertainSeries& t) {
  return {t.points.data(), t.points.size()};
}
inline std::span<const UncertainValue> as_span(const UncertainSubsequence& s) {
  return {s.points.data(), s.points.size()};
}

}  // namespace usast
