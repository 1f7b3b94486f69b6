#include "usast/core.hpp"

#include <algorithm>

namespace usast {

void VariantConfig::validate() const {
  if (count_frequency && !drop_duplicates)
    throw std::invalid_argument(
        "count_frequency requires drop_duplicates (the dc variant extends d)");
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  if (k_per_class == 0) throw std::invalid_argument("k_per_class must be >= 1");
  if (length_list.empty())
    throw std::invalid_argument("length_list must not be empty");
  for (std::size_t l : length_list)
    if (l == 0) throw std::invalid_argument("subsequence lengths must be >= 1");
}

void apply_variant_name(VariantConfig& cfg, const std::string& name) {
  std::string base = name;
  cfg.use_uncertainty = false;
  if (!base.empty() && base[0] == 'u') {
    cfg.use_uncertainty = true;
    base = base.substr(1);
  }
  if (base == "SAST") {
    cfg.drop_duplicates = false;
    cfg.count_frequency = false;
  } else if (base == "SASTd") {
    cfg.drop_duplicates = true;
    cfg.count_frequency = false;
  } else if (base == "SASTdc") {
    cfg.drop_duplicates = true;
    cfg.count_frequency = true;
  } else {
    throw std::invalid_argument("unknown variant name: " + name);
  }
}

std::string variant_name(const VariantConfig& cfg) {
  std::string n = cfg.use_uncertainty ? "uSAST" : "SAST";
  if (cfg.drop_duplicates) n += "d";
  if (cfg.count_frequency) n += "c";
  return n;
}

std::vector<Violation> validate_dataset(const LabeledDataset& d) {
  std::vector<Violation> out;
  if (d.labels.size() != d.instances.size())
    out.push_back({"", "", -1,
                   "label count (" + std::to_string(d.labels.size()) +
                       ") does not match instance count (" +
                       std::to_string(d.instances.size()) + ")"});
  if (!d.metadata.empty() && d.metadata.size() != d.instances.size())
    out.push_back({"", "", -1, "metadata count does not match instance count"});

  for (const auto& inst : d.instances) {
    if (inst.dims.empty()) {
      out.push_back({inst.id, "", -1, "instance has no dimensions"});
      continue;
    }
    std::set<std::string> names;
    std::size_t len0 = inst.dims.front().second.size();
    for (const auto& [name, series] : inst.dims) {
      if (!names.insert(name).second)
        out.push_back({inst.id, name, -1, "duplicate dimension name"});
      if (series.size() == 0)
        out.push_back({inst.id, name, -1, "empty series"});
      if (series.size() != len0)
        out.push_back({inst.id, name, -1,
                       "dimension length " + std::to_string(series.size()) +
                           " differs from first dimension (" +
                           std::to_string(len0) + ")"});
      for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& p = series[i];
        if (!std::isfinite(p.value) || !std::isfinite(p.uncertainty))
          out.push_back(
              {inst.id, name, static_cast<long>(i), "non-finite point"});
        else if (p.uncertainty < 0.0)
          out.push_back(
              {inst.id, name, static_cast<long>(i), "negative uncertainty"});
      }
    }
  }
  return out;
}

}  // namespace usast
