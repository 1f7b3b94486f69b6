#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "usast/distance.hpp"
#include "usast/ingest.hpp"
#include "usast/synth.hpp"

using namespace usast;

TEST_CASE("same seed gives identical datasets") {
  const auto spec = separable_preset(5);
  const auto d1 = generate(spec);
  const auto d2 = generate(spec);
  REQUIRE(d1.instances.size() == d2.instances.size());
  for (std::size_t i = 0; i < d1.instances.size(); ++i) {
    CHECK(d1.instances[i].id == d2.instances[i].id);
    for (std::size_t k = 0; k < d1.instances[i].dims.size(); ++k) {
      const auto& a = d1.instances[i].dims[k].second.points;
      const auto& b = d2.instances[i].dims[k].second.points;
      for (std::size_t t = 0; t < a.size(); ++t) {
        CHECK(a[t].value == b[t].value);
        CHECK(a[t].uncertainty == b[t].uncertainty);
      }
    }
  }
}

TEST_CASE("generated datasets pass validation") {
  for (auto spec : {separable_preset(1), uncertainty_only_preset(2),
                    frequency_preset(3), periodic_preset(4)}) {
    const auto d = generate(spec);
    CHECK(validate_dataset(d).empty());
    CHECK(d.instances.size() ==
          spec.n_per_class * spec.classes.size());
  }
}

TEST_CASE("zero-noise injection leaves the motif at distance zero") {
  SynthSpec spec;
  spec.n_per_class = 2;
  spec.m = 60;
  spec.n_dims = 1;
  spec.seed = 9;
  spec.classes = {{"pure", MotifShape::Burst, 4.0, 1, 16, 0.0, 0.0, false}};
  const auto d = generate(spec);
  const auto motif = motif_values(MotifShape::Burst, 16, 4.0);

  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    const auto& md = d.metadata[i].at("motif_spans");
    const std::size_t start = std::stoul(md.substr(0, md.find(':')));
    std::vector<UncertainValue> q(16);
    for (std::size_t j = 0; j < 16; ++j) q[j] = {motif[j], 0.0};
    const auto r = sliding_min_distance(
        q, as_span(d.instances[i].dims[0].second), {true, false});
    CHECK(r.distance.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.position == start);
  }
}

TEST_CASE("motif spans recorded in metadata match the configured count") {
  const auto d = generate(frequency_preset(11));
  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    const auto& spans = d.metadata[i].at("motif_spans");
    const std::size_t commas =
        static_cast<std::size_t>(std::count(spans.begin(), spans.end(), ','));
    const std::size_t n_spans = spans.empty() ? 0 : commas + 1;
    CHECK(n_spans == (d.labels[i] == "rare" ? 2 : 5));
  }
}

TEST_CASE("uncertainty-only classes differ in delta but not value moments") {
  const auto d = generate(uncertainty_only_preset(13));
  double val_mean[2] = {0, 0}, val_sq[2] = {0, 0}, unc_mean[2] = {0, 0};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < d.instances.size(); ++i) {
    const int c = d.labels[i] == "low_err" ? 0 : 1;
    for (const auto& p : d.instances[i].dims[0].second.points) {
      val_mean[c] += p.value;
      val_sq[c] += p.value * p.value;
      unc_mean[c] += p.uncertainty;
      ++count[c];
    }
  }
  for (int c = 0; c < 2; ++c) {
    val_mean[c] /= count[c];
    val_sq[c] /= count[c];
    unc_mean[c] /= count[c];
  }
  // two-sample z-test on the value means; n is large so this is tight
  const double var0 = val_sq[0] - val_mean[0] * val_mean[0];
  const double var1 = val_sq[1] - val_mean[1] * val_mean[1];
  const double se =
      std::sqrt(var0 / count[0] + var1 / count[1]);
  const double z = (val_mean[0] - val_mean[1]) / se;
  CHECK(std::abs(z) < 2.6);  // p > 0.01
  // the delta profiles are unmistakably different
  CHECK(unc_mean[1] > 5.0 * unc_mean[0]);
}

TEST_CASE("motif longer than the series is rejected") {
  SynthSpec spec = separable_preset(1);
  spec.classes[0].motif_length = spec.m;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("long csv round-trips through ingest") {
  SynthSpec spec = separable_preset(21);
  spec.n_per_class = 3;
  const auto d = generate(spec);
  std::ostringstream obs, meta;
  write_long_csv(obs, meta, d);

  const auto dir = std::filesystem::temp_directory_path();
  const auto obs_path = (dir / "usast_synth_obs.csv").string();
  const auto meta_path = (dir / "usast_synth_meta.csv").string();
  {
    std::ofstream(obs_path) << obs.str();
    std::ofstream(meta_path) << meta.str();
  }
  const auto ingest = parse_long_csv(obs_path, meta_path);
  GridSpec grid{0.0, 1.0, spec.m};
  const auto back = preprocess(ingest, grid, 5);
  REQUIRE(back.instances.size() == d.instances.size());

  // instances come back sorted by id; compare via lookup
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < d.instances.size(); ++i)
    index[d.instances[i].id] = i;
  for (std::size_t i = 0; i < back.instances.size(); ++i) {
    const auto& orig = d.instances[index.at(back.instances[i].id)];
    for (std::size_t k = 0; k < orig.dims.size(); ++k) {
      const auto& a = orig.dims[k].second.points;
      const auto& b = back.instances[i].dims[k].second.points;
      REQUIRE(a.size() == b.size());
      for (std::size_t t = 0; t < a.size(); ++t) {
        CHECK(b[t].value == doctest::Approx(a[t].value).epsilon(1e-12));
        CHECK(b[t].uncertainty ==
              doctest::Approx(a[t].uncertainty).epsilon(1e-12));
      }
    }
  }
  std::filesystem::remove(obs_path);
  std::filesystem::remove(meta_path);
}
