#pragma once

#include <random>
#include <vector>

#include "usast/core.hpp"
#include "usast/distance.hpp"

namespace testutil {

using usast::UncertainValue;

inline std::vector<UncertainValue> uv(std::initializer_list<double> values,
                                      std::initializer_list<double> uncs) {
  std::vector<UncertainValue> out;
  auto u = uncs.begin();
  for (double v : values) out.push_back({v, *u++});
  return out;
}

inline std::vector<UncertainValue> random_points(std::mt19937_64& rng,
                                                 std::size_t n,
                                                 double unc_scale = 0.5) {
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::uniform_real_distribution<double> unc(0.0, unc_scale);
  std::vector<UncertainValue> out(n);
  for (auto& p : out) p = {val(rng), unc(rng)};
  return out;
}

// Independent direct-formula evaluation used as the oracle for UED.
inline usast::UncertainScalar ued_reference(
    const std::vector<UncertainValue>& a, const std::vector<UncertainValue>& b,
    bool normalize) {
  double value = 0.0, unc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i].value - b[i].value;
    value += d * d;
    unc += 2.0 * std::abs(d) * (a[i].uncertainty + b[i].uncertainty);
  }
  if (normalize) {
    value /= static_cast<double>(a.size());
    unc /= static_cast<double>(a.size());
  }
  return {value, unc};
}

struct WindowScan {
  usast::UncertainScalar distance;
  std::size_t position = 0;
  std::size_t count = 0;
};

// Exhaustive window enumeration oracle for sliding_min_distance and
// dist_and_count.
inline WindowScan exhaustive_scan(const std::vector<UncertainValue>& s,
                                  const std::vector<UncertainValue>& t,
                                  double epsilon, bool normalize) {
  WindowScan best;
  bool first = true;
  for (std::size_t pos = 0; pos + s.size() <= t.size(); ++pos) {
    std::vector<UncertainValue> window(t.begin() + pos,
                                       t.begin() + pos + s.size());
    const auto d = ued_reference(s, window, normalize);
    if (epsilon >= 0.0 && d.value <= epsilon) ++best.count;
    if (first || d.value < best.distance.value ||
        (d.value == best.distance.value &&
         d.uncertainty < best.distance.uncertainty)) {
      best.distance = d;
      best.position = pos;
      first = false;
    }
  }
  return best;
}

inline usast::UncertainSeries series_of(std::vector<UncertainValue> pts) {
  return {std::move(pts)};
}

inline usast::MultivariateInstance instance_of(
    const std::string& id, std::vector<UncertainValue> pts) {
  usast::MultivariateInstance inst;
  inst.id = id;
  inst.dims.emplace_back("dim0", series_of(std::move(pts)));
  return inst;
}

}  // namespace testutil
