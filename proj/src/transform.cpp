#include "usast/transform.hpp"

#include <ostream>

#include "usast/distance.hpp"
#include "usast/parallel.hpp"

namespace usast {

FeatureLayout::Block FeatureLayout::block_of(std::size_t col) const {
  const std::size_t b = col / pool_size;
  if (b == 0) return Block::Value;
  if (b == 1 && has_uncertainty) return Block::Uncertainty;
  return Block::Count;
}

std::size_t FeatureLayout::column_of(Block b, std::size_t entry) const {
  switch (b) {
    case Block::Value:
      return entry;
    case Block::Uncertainty:
      return pool_size + entry;
    case Block::Count:
      return pool_size * (has_uncertainty ? 2 : 1) + entry;
  }
  return entry;
}

const char* FeatureLayout::block_name(Block b) {
  switch (b) {
    case Block::Value:
      return "Value";
    case Block::Uncertainty:
      return "Uncertainty";
    case Block::Count:
      return "Count";
  }
  return "?";
}

FeatureMatrix transform(const std::vector<MultivariateInstance>& instances,
                        const SubsequencePool& pool, const VariantConfig& cfg,
                        std::size_t workers) {
  const std::size_t p = pool.size();

  for (const auto& inst : instances) {
    for (const auto& entry : pool.entries) {
      const UncertainSeries* series = inst.find_dim(entry.provenance.dimension);
      if (!series)
        throw std::invalid_argument("transform: instance " + inst.id +
                                    " is missing dimension " +
                                    entry.provenance.dimension);
      if (series->size() < entry.size())
        throw std::invalid_argument(
            "transform: instance " + inst.id + " series length " +
            std::to_string(series->size()) + " shorter than pool length " +
            std::to_string(entry.size()));
    }
  }

  FeatureMatrix x;
  x.rows = instances.size();
  x.layout.pool_size = p;
  x.layout.has_uncertainty = cfg.use_uncertainty;
  x.layout.has_count = cfg.count_frequency;
  x.data.assign(x.rows * x.layout.columns(), 0.0);

  const DistanceOptions opt{cfg.normalize_by_length, cfg.znormalize_windows};
  const double eps = cfg.effective_count_epsilon();

  parallel_for(instances.size(), workers, [&](std::size_t i) {
    const auto& inst = instances[i];
    for (std::size_t j = 0; j < p; ++j) {
      const auto& entry = pool.entries[j];
      const UncertainSeries* series = inst.find_dim(entry.provenance.dimension);
      const MatchResult r =
          dist_and_count(as_span(entry), as_span(*series), eps, opt);
      x.at(i, x.layout.column_of(FeatureLayout::Block::Value, j)) =
          r.distance.value;
      if (cfg.use_uncertainty)
        x.at(i, x.layout.column_of(FeatureLayout::Block::Uncertainty, j)) =
            r.distance.uncertainty;
      if (cfg.count_frequency)
        x.at(i, x.layout.column_of(FeatureLayout::Block::Count, j)) =
            static_cast<double>(*r.count);
    }
  });
  return x;
}

void write_feature_csv(std::ostream& os, const FeatureMatrix& x) {
  const auto& lay = x.layout;
  for (std::size_t c = 0; c < lay.columns(); ++c) {
    if (c) os << ',';
    char prefix = 'd';
    switch (lay.block_of(c)) {
      case FeatureLayout::Block::Value:
        prefix = 'd';
        break;
      case FeatureLayout::Block::Uncertainty:
        prefix = 'u';
        break;
      case FeatureLayout::Block::Count:
        prefix = 'c';
        break;
    }
    os << prefix << '_' << lay.entry_of(c);
  }
  os << '\n';
  os.precision(17);
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < lay.columns(); ++c) {
      if (c) os << ',';
      os << x.at(r, c);
    }
    os << '\n';
  }
}

}  // namespace usast
