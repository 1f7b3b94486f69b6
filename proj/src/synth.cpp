#include "usast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "usast/rng.hpp"

namespace usast {

MotifShape motif_shape_from_name(const std::string& name) {
  if (name == "box") return MotifShape::Box;
  if (name == "ramp") return MotifShape::Ramp;
  if (name == "burst") return MotifShape::Burst;
  if (name == "dip") return MotifShape::Dip;
  throw std::invalid_argument("unknown motif shape: " + name);
}

const char* motif_shape_name(MotifShape s) {
  switch (s) {
    case MotifShape::Box:
      return "box";
    case MotifShape::Ramp:
      return "ramp";
    case MotifShape::Burst:
      return "burst";
    case MotifShape::Dip:
      return "dip";
  }
  return "?";
}

std::vector<double> motif_values(MotifShape shape, std::size_t length,
                                 double amplitude) {
  std::vector<double> v(length, 0.0);
  const double l = static_cast<double>(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double t = static_cast<double>(i) / (l - 1.0);
    switch (shape) {
      case MotifShape::Box:
        v[i] = amplitude;
        break;
      case MotifShape::Ramp:
        v[i] = amplitude * t;
        break;
      case MotifShape::Burst:
        // fast rise, slow exponential decay, supernova-like
        v[i] = t < 0.2 ? amplitude * (t / 0.2)
                       : amplitude * std::exp(-3.0 * (t - 0.2));
        break;
      case MotifShape::Dip:
        // smooth eclipse-like dip
        v[i] = -amplitude * std::sin(t * M_PI) * std::sin(t * M_PI);
        break;
    }
  }
  return v;
}

LabeledDataset generate(const SynthSpec& spec) {
  if (spec.classes.empty())
    throw std::invalid_argument("generate: no classes in spec");
  for (const auto& cls : spec.classes)
    if (cls.motif_length >= spec.m)
      throw std::invalid_argument("generate: motif length " +
                                  std::to_string(cls.motif_length) +
                                  " not shorter than m=" +
                                  std::to_string(spec.m));

  LabeledDataset d;
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    const auto& cls = spec.classes[c];
    const std::string cname =
        cls.name.empty() ? "c" + std::to_string(c) : cls.name;
    const auto motif =
        motif_values(cls.motif, cls.motif_length, cls.motif_amplitude);

    for (std::size_t i = 0; i < spec.n_per_class; ++i) {
      Rng rng(derive_seed(spec.seed, c * 1000003ULL + i));
      std::normal_distribution<double> noise(0.0, 1.0);
      std::uniform_real_distribution<double> unc_jitter(0.8, 1.2);

      MultivariateInstance inst;
      inst.id = cname + "_" + std::to_string(i);

      // same injection positions across dimensions
      std::vector<std::size_t> starts;
      if (!cls.uncertainty_only && cls.motif_count > 0) {
        // non-overlapping slots, randomly chosen
        const std::size_t slots = spec.m / cls.motif_length;
        if (cls.motif_count > slots)
          throw std::invalid_argument(
              "generate: motif_count does not fit series length");
        std::vector<std::size_t> slot_ids(slots);
        for (std::size_t s = 0; s < slots; ++s) slot_ids[s] = s;
        for (std::size_t s = 0; s < cls.motif_count; ++s) {
          std::uniform_int_distribution<std::size_t> pick(s, slots - 1);
          std::swap(slot_ids[s], slot_ids[pick(rng)]);
        }
        for (std::size_t s = 0; s < cls.motif_count; ++s)
          starts.push_back(slot_ids[s] * cls.motif_length);
        std::sort(starts.begin(), starts.end());
      }

      for (std::size_t dim = 0; dim < spec.n_dims; ++dim) {
        UncertainSeries series;
        series.points.resize(spec.m);
        for (std::size_t t = 0; t < spec.m; ++t) {
          series.points[t].value = cls.noise_sigma * noise(rng);
          series.points[t].uncertainty =
              cls.uncertainty_level * unc_jitter(rng);
        }
        for (std::size_t start : starts)
          for (std::size_t j = 0; j < cls.motif_length; ++j)
            series.points[start + j].value += motif[j];
        inst.dims.emplace_back("dim" + std::to_string(dim),
                               std::move(series));
      }

      std::map<std::string, std::string> md;
      std::string spans;
      for (std::size_t start : starts) {
        if (!spans.empty()) spans += ',';
        spans += std::to_string(start) + ":" +
                 std::to_string(cls.motif_length);
      }
      md["motif_spans"] = spans;
      md["class"] = cname;

      d.instances.push_back(std::move(inst));
      d.labels.push_back(cname);
      d.metadata.push_back(std::move(md));
    }
  }
  return d;
}

void write_long_csv(std::ostream& observations, std::ostream& metadata,
                    const LabeledDataset& d) {
  observations << "object_id,mjd,passband,flux,flux_err\n";
  observations.precision(17);
  for (const auto& inst : d.instances)
    for (const auto& [dim, series] : inst.dims)
      for (std::size_t t = 0; t < series.size(); ++t)
        observations << inst.id << ',' << t << ',' << dim << ','
                     << series[t].value << ',' << series[t].uncertainty
                     << '\n';

  // collect the free metadata columns
  std::set<std::string> extra;
  for (const auto& md : d.metadata)
    for (const auto& [k, v] : md)
      if (k != "class") extra.insert(k);

  metadata << "object_id,target";
  for (const auto& k : extra) metadata << ',' << k;
  metadata << '\n';
  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    metadata << d.instances[i].id << ',' << d.labels[i];
    for (const auto& k : extra) {
      metadata << ',';
      if (i < d.metadata.size()) {
        auto it = d.metadata[i].find(k);
        if (it != d.metadata[i].end()) metadata << it->second;
      }
    }
    metadata << '\n';
  }
}

SynthSpec separable_preset(std::uint64_t seed) {
  SynthSpec spec;
  spec.n_per_class = 60;
  spec.m = 120;
  spec.n_dims = 2;
  spec.seed = seed;
  ClassSpec burst{"burst", MotifShape::Burst, 5.0, 1, 24, 0.25, 0.1, false};
  ClassSpec dip{"dip", MotifShape::Dip, 5.0, 1, 24, 0.25, 0.1, false};
  ClassSpec ramp{"ramp", MotifShape::Ramp, 5.0, 1, 24, 0.25, 0.1, false};
  spec.classes = {burst, dip, ramp};
  return spec;
}

SynthSpec uncertainty_only_preset(std::uint64_t seed) {
  SynthSpec spec;
  spec.n_per_class = 100;
  spec.m = 120;
  spec.n_dims = 1;
  spec.seed = seed;
  ClassSpec low{"low_err", MotifShape::Box, 0.0, 0, 20, 0.5, 0.1, true};
  ClassSpec high{"high_err", MotifShape::Box, 0.0, 0, 20, 0.5, 1.0, true};
  spec.classes = {low, high};
  return spec;
}

SynthSpec frequency_preset(std::uint64_t seed) {
  SynthSpec spec;
  spec.n_per_class = 60;
  // long series keep plenty of motif-free stretches in both classes, so the
  // minimum distance alone carries no occurrence-count information
  spec.m = 300;
  spec.n_dims = 1;
  spec.seed = seed;
  ClassSpec rare{"rare", MotifShape::Box, 4.0, 2, 20, 0.1, 0.1, false};
  ClassSpec frequent{"frequent", MotifShape::Box, 4.0, 5, 20, 0.1, 0.1, false};
  spec.classes = {rare, frequent};
  return spec;
}

SynthSpec periodic_preset(std::uint64_t seed) {
  SynthSpec spec;
  spec.n_per_class = 30;
  spec.m = 120;
  spec.n_dims = 1;
  spec.seed = seed;
  // repeated identical dips make most windows near-duplicates
  ClassSpec a{"periodic_a", MotifShape::Dip, 4.0, 5, 20, 0.05, 0.1, false};
  ClassSpec b{"periodic_b", MotifShape::Box, 4.0, 5, 20, 0.05, 0.1, false};
  spec.classes = {a, b};
  return spec;
}

}  // namespace usast
