#pragma once

#include <cstdint>
#include <iosfwd>

#include "usast/core.hpp"

namespace usast {

enum class MotifShape { Box, Ramp, Burst, Dip };

MotifShape motif_shape_from_name(const std::string& name);
const char* motif_shape_name(MotifShape s);

struct ClassSpec {
  std::string name;
  MotifShape motif = MotifShape::Box;
  double motif_amplitude = 4.0;
  std::size_t motif_count = 1;
  std::size_t motif_length = 20;
  double noise_sigma = 0.25;
  double uncertainty_level = 0.1;
  // When set, no motif is injected: classes differ only in their
  // uncertainty profiles.
  bool uncertainty_only = false;
};

struct SynthSpec {
  std::size_t n_per_class = 60;
  std::size_t m = 120;
  std::size_t n_dims = 2;
  std::vector<ClassSpec> classes;
  std::uint64_t seed = 1;
};

// Seeded, deterministic. Injected motif spans are recorded per instance in
// metadata under "motif_spans" as "start:length,start:length,...".
LabeledDataset generate(const SynthSpec& spec);

std::vector<double> motif_values(MotifShape shape, std::size_t length,
                                 double amplitude);

// Emits the same long-format CSV pair the ingest module reads (times are
// grid indices, one observation per bin).
void write_long_csv(std::ostream& observations, std::ostream& metadata,
                    const LabeledDataset& d);

// Ready-made specs used by tests and the CLI synth presets.
SynthSpec separable_preset(std::uint64_t seed);        // 3 motif classes
SynthSpec uncertainty_only_preset(std::uint64_t seed); // 2 delta-profile classes
SynthSpec frequency_preset(std::uint64_t seed);        // 2 count classes
SynthSpec periodic_preset(std::uint64_t seed);         // repetitive patterns

}  // namespace usast
