#pragma once

#include <iosfwd>
#include <optional>

#include "usast/core.hpp"

namespace usast {

struct ObservationRecord {
  std::string object_id;
  double time = 0.0;
  std::string dimension;
  double value = 0.0;
  double uncertainty = 0.0;
};

struct RawObservationTable {
  std::vector<ObservationRecord> records;
  std::size_t dropped_rows = 0;  // non-finite or negative-uncertainty rows
};

struct GridSpec {
  double start = 0.0;
  double step = 1.0;
  std::size_t n_points = 0;
};

struct ColumnMap {
  std::string object_id = "object_id";
  std::string time = "mjd";
  std::string dimension = "passband";
  std::string value = "flux";
  std::string uncertainty = "flux_err";
  std::string label = "target";
};

struct IngestResult {
  RawObservationTable table;
  std::map<std::string, std::string> labels;  // object id -> class
  std::map<std::string, std::map<std::string, std::string>> metadata;
};

// Long-format observations plus a metadata file carrying labels and free
// grouping columns. Every object in the observations must have a label.
IngestResult parse_long_csv(const std::string& observations_path,
                            const std::string& metadata_path,
                            const ColumnMap& columns = {});

// Observations alone, without labels (for inference on unlabeled data).
RawObservationTable parse_observations_csv(const std::string& path,
                                           const ColumnMap& columns = {});

// Missing marker inside a gridded series, before imputation.
struct GriddedPoint {
  bool present = false;
  double value = 0.0;
  double uncertainty = 0.0;
};

// Bin mean value, RMS of bin uncertainties; empty bins become missing
// markers. Auto grid: step = median inter-observation gap, start = min time.
GridSpec auto_grid(const RawObservationTable& table);
std::vector<GriddedPoint> resample_series(
    std::vector<ObservationRecord> observations, const GridSpec& grid);

// Centered rolling window (truncated at boundaries): missing points take
// the mean and population standard deviation of the window's non-missing
// values; passes repeat until nothing is missing.
UncertainSeries impute_rolling(const std::vector<GriddedPoint>& gridded,
                               std::size_t window = 5,
                               const std::string& context = "");

// Whole-dataset preprocessing: resample every (object, dimension) onto one
// grid and impute. Objects end up with the same dimension set, length
// grid.n_points. Dimensions are the sorted union over the table.
LabeledDataset preprocess(const IngestResult& ingest,
                          std::optional<GridSpec> grid = std::nullopt,
                          std::size_t window = 5,
                          GridSpec* used_grid = nullptr);

// Columnar cache dump: object_id,dimension,grid_index,value,uncertainty.
void write_preprocessed_csv(std::ostream& os, const LabeledDataset& d);

}  // namespace usast
