#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace usast {

// One measurement: best estimate plus a one-sigma absolute half-width.
struct UncertainValue {
  double value = 0.0;
  double uncertainty = 0.0;
};

inline bool is_valid(const UncertainValue& p) {
  return std::isfinite(p.value) && std::isfinite(p.uncertainty) &&
         p.uncertainty >= 0.0;
}

struct UncertainSeries {
  std::vector<UncertainValue> points;

  std::size_t size() const { return points.size(); }
  const UncertainValue& operator[](std::size_t i) const { return points[i]; }
};

// One object: named dimensions (e.g. photometric bands), equal length after
// preprocessing.
struct MultivariateInstance {
  std::string id;
  std::vector<std::pair<std::string, UncertainSeries>> dims;

  const UncertainSeries* find_dim(const std::string& name) const {
    for (const auto& d : dims)
      if (d.first == name) return &d.second;
    return nullptr;
  }
};

struct LabeledDataset {
  std::vector<MultivariateInstance> instances;
  std::vector<std::string> labels;
  std::vector<std::map<std::string, std::string>> metadata;  // per instance

  std::vector<std::string> class_set() const {
    std::set<std::string> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
  }
};

struct Provenance {
  std::string ref_instance_id;
  std::string class_id;
  std::string dimension;
  std::size_t start_index = 0;
};

struct UncertainSubsequence {
  std::vector<UncertainValue> points;
  Provenance provenance;

  std::size_t size() const { return points.size(); }
};

struct VariantConfig {
  bool use_uncertainty = true;
  bool drop_duplicates = true;
  bool count_frequency = false;
  double epsilon = 0.25;
  double count_epsilon = -1.0;  // < 0 means "use epsilon"
  std::vector<std::size_t> length_list = {20, 30, 40, 50, 60};
  std::size_t k_per_class = 1;
  bool normalize_by_length = true;
  bool znormalize_windows = false;
  std::uint64_t seed = 1;

  double effective_count_epsilon() const {
    return count_epsilon < 0.0 ? epsilon : count_epsilon;
  }

  // Throws std::invalid_argument on inconsistent flags.
  void validate() const;
};

// Maps the short variant names (SAST, SASTd, SASTdc, uSAST, uSASTd,
// uSASTdc) onto the three orthogonal flags. Throws on unknown name.
void apply_variant_name(VariantConfig& cfg, const std::string& name);
std::string variant_name(const VariantConfig& cfg);

struct Violation {
  std::string instance_id;
  std::string dimension;
  long index = -1;  // -1 when not index-specific
  std::string message;
};

// Reports every invariant breach; never throws.
std::vector<Violation> validate_dataset(const LabeledDataset& d);

}  // namespace usast
