#include "usast/distance.hpp"

#include <algorithm>
#include <cmath>

namespace usast {

namespace {

constexpr double kStdFloor = 1e-8;

UncertainScalar ued_raw(std::span<const UncertainValue> s1,
                        std::span<const UncertainValue> s2) {
  double value = 0.0;
  double unc = 0.0;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    const double d = s1[i].value - s2[i].value;
    value += d * d;
    unc += 2.0 * std::abs(d) * (s1[i].uncertainty + s2[i].uncertainty);
  }
  return {value, unc};
}

}  // namespace

std::vector<UncertainValue> znormalized(std::span<const UncertainValue> s) {
  const std::size_t l = s.size();
  double mean = 0.0;
  for (const auto& p : s) mean += p.value;
  mean /= static_cast<double>(l);
  double var = 0.0;
  for (const auto& p : s) {
    const double d = p.value - mean;
    var += d * d;
  }
  var /= static_cast<double>(l);
  const double sd = std::max(std::sqrt(var), kStdFloor);
  std::vector<UncertainValue> out(l);
  for (std::size_t i = 0; i < l; ++i)
    out[i] = {(s[i].value - mean) / sd, s[i].uncertainty / sd};
  return out;
}

UncertainScalar ued(std::span<const UncertainValue> s1,
                    std::span<const UncertainValue> s2,
                    const DistanceOptions& opt) {
  if (s1.size() != s2.size())
    throw std::invalid_argument("ued: length mismatch (" +
                                std::to_string(s1.size()) + " vs " +
                                std::to_string(s2.size()) + ")");
  if (s1.empty()) throw std::invalid_argument("ued: empty subsequence");

  UncertainScalar r;
  if (opt.znormalize) {
    const auto z1 = znormalized(s1);
    const auto z2 = znormalized(s2);
    r = ued_raw(z1, z2);
  } else {
    r = ued_raw(s1, s2);
  }
  if (opt.length_normalize) {
    const double l = static_cast<double>(s1.size());
    r.value /= l;
    r.uncertainty /= l;
  }
  return r;
}

MatchResult sliding_min_distance(std::span<const UncertainValue> s,
                                 std::span<const UncertainValue> t,
                                 const DistanceOptions& opt) {
  return dist_and_count(s, t, -1.0, opt);
}

MatchResult dist_and_count(std::span<const UncertainValue> s,
                           std::span<const UncertainValue> t, double epsilon,
                           const DistanceOptions& opt) {
  const std::size_t l = s.size();
  const std::size_t m = t.size();
  if (l == 0) throw std::invalid_argument("dist_and_count: empty query");
  if (l > m)
    throw std::invalid_argument("dist_and_count: query length " +
                                std::to_string(l) +
                                " exceeds series length " + std::to_string(m));

  std::vector<UncertainValue> zq;
  std::span<const UncertainValue> query = s;
  if (opt.znormalize) {
    zq = znormalized(s);
    query = zq;
  }

  MatchResult best;
  bool have_best = false;
  std::size_t count = 0;
  for (std::size_t pos = 0; pos + l <= m; ++pos) {
    UncertainScalar d;
    if (opt.znormalize) {
      const auto zw = znormalized(t.subspan(pos, l));
      d = ued_raw(query, zw);
    } else {
      d = ued_raw(query, t.subspan(pos, l));
    }
    if (opt.length_normalize) {
      d.value /= static_cast<double>(l);
      d.uncertainty /= static_cast<double>(l);
    }
    if (epsilon >= 0.0 && d.value <= epsilon) ++count;
    if (!have_best || d.value < best.distance.value ||
        (d.value == best.distance.value &&
         d.uncertainty < best.distance.uncertainty)) {
      best.distance = d;
      best.position = pos;
      have_best = true;
    }
  }
  if (epsilon >= 0.0) best.count = count;
  return best;
}

bool epsilon_similar(std::span<const UncertainValue> s1,
                     std::span<const UncertainValue> s2, double epsilon,
                     const DistanceOptions& opt) {
  if (epsilon < 0.0)
    throw std::invalid_argument("epsilon_similar: epsilon must be >= 0");
  return ued(s1, s2, opt).value <= epsilon;
}

}  // namespace usast
