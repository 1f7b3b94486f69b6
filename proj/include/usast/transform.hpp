#pragma once

#include <iosfwd>

#include "usast/core.hpp"
#include "usast/pool.hpp"

namespace usast {

// Column blocks: [distance values][distance uncertainties?][counts?], each of
// width pool_size; column j of a block maps to pool entry j.
struct FeatureLayout {
  std::size_t pool_size = 0;
  bool has_uncertainty = false;
  bool has_count = false;

  std::size_t columns() const {
    return pool_size * (1 + (has_uncertainty ? 1 : 0) + (has_count ? 1 : 0));
  }

  enum class Block { Value, Uncertainty, Count };

  Block block_of(std::size_t col) const;
  std::size_t entry_of(std::size_t col) const { return col % pool_size; }
  std::size_t column_of(Block b, std::size_t entry) const;

  static const char* block_name(Block b);
};

struct FeatureMatrix {
  std::size_t rows = 0;
  FeatureLayout layout;
  std::vector<double> data;  // row-major, rows x layout.columns()

  double at(std::size_t r, std::size_t c) const {
    return data[r * layout.columns() + c];
  }
  double& at(std::size_t r, std::size_t c) {
    return data[r * layout.columns() + c];
  }
};

// One dist_and_count per (instance, pool entry), matched on dimension.
// Deterministic and independent of the worker count.
FeatureMatrix transform(const std::vector<MultivariateInstance>& instances,
                        const SubsequencePool& pool, const VariantConfig& cfg,
                        std::size_t workers = 0);

// Header encodes the layout: d_<j>, u_<j>, c_<j>.
void write_feature_csv(std::ostream& os, const FeatureMatrix& x);

}  // namespace usast
