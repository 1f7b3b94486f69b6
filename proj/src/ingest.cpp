#include "usast/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace usast {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::size_t require_column(const std::vector<std::string>& header,
                           const std::string& name, const std::string& file) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    throw std::invalid_argument("missing required column '" + name + "' in " +
                                file);
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

IngestResult parse_long_csv(const std::string& observations_path,
                            const std::string& metadata_path,
                            const ColumnMap& columns) {
  std::ifstream obs(observations_path);
  if (!obs) throw std::runtime_error("cannot open " + observations_path);
  std::ifstream meta(metadata_path);
  if (!meta) throw std::runtime_error("cannot open " + metadata_path);

  IngestResult result;

  std::string line;
  if (!std::getline(meta, line))
    throw std::invalid_argument("empty metadata file " + metadata_path);
  const auto meta_header = split_csv_line(line);
  const std::size_t mid = require_column(meta_header, columns.object_id,
                                         metadata_path);
  const std::size_t mtarget =
      require_column(meta_header, columns.label, metadata_path);
  while (std::getline(meta, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string& id = fields.at(mid);
    result.labels[id] = fields.at(mtarget);
    auto& md = result.metadata[id];
    for (std::size_t c = 0; c < meta_header.size() && c < fields.size(); ++c)
      if (c != mid && c != mtarget) md[meta_header[c]] = fields[c];
  }

  result.table = parse_observations_csv(observations_path, columns);

  for (const auto& rec : result.table.records)
    if (!result.labels.count(rec.object_id))
      throw std::invalid_argument("label missing for object " + rec.object_id);
  return result;
}

RawObservationTable parse_observations_csv(const std::string& path,
                                           const ColumnMap& columns) {
  std::ifstream obs(path);
  if (!obs) throw std::runtime_error("cannot open " + path);

  RawObservationTable table;
  std::string line;
  if (!std::getline(obs, line))
    throw std::invalid_argument("empty observations file " + path);
  const auto header = split_csv_line(line);
  const std::size_t cid = require_column(header, columns.object_id, path);
  const std::size_t ctime = require_column(header, columns.time, path);
  const std::size_t cdim = require_column(header, columns.dimension, path);
  const std::size_t cval = require_column(header, columns.value, path);
  const std::size_t cunc = require_column(header, columns.uncertainty, path);

  while (std::getline(obs, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    ObservationRecord rec;
    rec.object_id = fields.at(cid);
    rec.time = std::stod(fields.at(ctime));
    rec.dimension = fields.at(cdim);
    rec.value = std::stod(fields.at(cval));
    rec.uncertainty = std::stod(fields.at(cunc));
    if (!std::isfinite(rec.value) || !std::isfinite(rec.uncertainty) ||
        !std::isfinite(rec.time) || rec.uncertainty < 0.0) {
      ++table.dropped_rows;
      continue;
    }
    table.records.push_back(std::move(rec));
  }
  if (table.records.empty())
    throw std::invalid_argument("no records in " + path);
  return table;
}

GridSpec auto_grid(const RawObservationTable& table) {
  // median inter-observation gap per (object, dimension), pooled
  std::map<std::pair<std::string, std::string>, std::vector<double>> times;
  double tmin = 0.0, tmax = 0.0;
  bool first = true;
  for (const auto& rec : table.records) {
    times[{rec.object_id, rec.dimension}].push_back(rec.time);
    if (first) {
      tmin = tmax = rec.time;
      first = false;
    } else {
      tmin = std::min(tmin, rec.time);
      tmax = std::max(tmax, rec.time);
    }
  }
  std::vector<double> gaps;
  for (auto& [key, ts] : times) {
    std::sort(ts.begin(), ts.end());
    for (std::size_t i = 1; i < ts.size(); ++i) {
      const double g = ts[i] - ts[i - 1];
      if (g > 0.0) gaps.push_back(g);
    }
  }
  GridSpec grid;
  grid.start = tmin;
  if (gaps.empty()) {
    grid.step = 1.0;
  } else {
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    grid.step = gaps[gaps.size() / 2];
  }
  grid.n_points =
      static_cast<std::size_t>(std::ceil((tmax - tmin) / grid.step)) + 1;
  return grid;
}

std::vector<GriddedPoint> resample_series(
    std::vector<ObservationRecord> observations, const GridSpec& grid) {
  if (grid.step <= 0.0)
    throw std::invalid_argument("resample_series: step must be > 0");
  std::sort(observations.begin(), observations.end(),
            [](const auto& a, const auto& b) { return a.time < b.time; });

  std::vector<double> sum(grid.n_points, 0.0);
  std::vector<double> sq_unc(grid.n_points, 0.0);
  std::vector<std::size_t> counts(grid.n_points, 0);
  for (const auto& rec : observations) {
    const double pos = (rec.time - grid.start) / grid.step;
    if (pos < 0.0) continue;
    const auto bin = static_cast<std::size_t>(pos);
    if (bin >= grid.n_points) continue;
    sum[bin] += rec.value;
    sq_unc[bin] += rec.uncertainty * rec.uncertainty;
    counts[bin]++;
  }

  std::vector<GriddedPoint> out(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    if (counts[i] == 0) continue;
    out[i].present = true;
    out[i].value = sum[i] / static_cast<double>(counts[i]);
    out[i].uncertainty =
        std::sqrt(sq_unc[i] / static_cast<double>(counts[i]));
  }
  return out;
}

UncertainSeries impute_rolling(const std::vector<GriddedPoint>& gridded,
                               std::size_t window, const std::string& context) {
  if (gridded.empty())
    throw std::invalid_argument("impute_rolling: empty series " + context);
  bool any_present = false;
  for (const auto& p : gridded) any_present |= p.present;
  if (!any_present)
    throw std::invalid_argument("impute_rolling: all values missing " +
                                context);

  const std::size_t n = gridded.size();
  const std::size_t half = window / 2;
  std::vector<GriddedPoint> cur = gridded;
  bool missing_left = true;
  while (missing_left) {
    missing_left = false;
    const std::vector<GriddedPoint> prev = cur;  // fill against a snapshot
    for (std::size_t i = 0; i < n; ++i) {
      if (prev[i].present) continue;
      const std::size_t lo = i >= half ? i - half : 0;
      const std::size_t hi = std::min(n - 1, i + half);
      double mean = 0.0;
      std::size_t cnt = 0;
      for (std::size_t j = lo; j <= hi; ++j) {
        if (!prev[j].present) continue;
        mean += prev[j].value;
        ++cnt;
      }
      if (cnt == 0) {
        missing_left = true;  // wide gap, next pass reaches further in
        continue;
      }
      mean /= static_cast<double>(cnt);
      double var = 0.0;
      for (std::size_t j = lo; j <= hi; ++j) {
        if (!prev[j].present) continue;
        const double d = prev[j].value - mean;
        var += d * d;
      }
      var /= static_cast<double>(cnt);  // population convention
      cur[i] = {true, mean, std::sqrt(var)};
    }
  }

  UncertainSeries series;
  series.points.reserve(n);
  for (const auto& p : cur) series.points.push_back({p.value, p.uncertainty});
  return series;
}

LabeledDataset preprocess(const IngestResult& ingest,
                          std::optional<GridSpec> grid, std::size_t window,
                          GridSpec* used_grid) {
  const GridSpec g = grid ? *grid : auto_grid(ingest.table);
  if (used_grid) *used_grid = g;

  // object -> dimension -> observations
  std::map<std::string, std::map<std::string, std::vector<ObservationRecord>>>
      grouped;
  std::set<std::string> all_dims;
  for (const auto& rec : ingest.table.records) {
    grouped[rec.object_id][rec.dimension].push_back(rec);
    all_dims.insert(rec.dimension);
  }

  LabeledDataset d;
  for (const auto& [object_id, dims] : grouped) {
    MultivariateInstance inst;
    inst.id = object_id;
    for (const auto& dim : all_dims) {
      auto it = dims.find(dim);
      std::vector<GriddedPoint> gridded;
      if (it != dims.end()) {
        gridded = resample_series(it->second, g);
      } else {
        gridded.assign(g.n_points, {});
      }
      inst.dims.emplace_back(
          dim, impute_rolling(gridded, window,
                              "(object " + object_id + ", dimension " + dim +
                                  ")"));
    }
    d.instances.push_back(std::move(inst));
    d.labels.push_back(ingest.labels.at(object_id));
    auto mit = ingest.metadata.find(object_id);
    d.metadata.push_back(mit != ingest.metadata.end()
                             ? mit->second
                             : std::map<std::string, std::string>{});
  }
  return d;
}

void write_preprocessed_csv(std::ostream& os, const LabeledDataset& d) {
  os << "object_id,dimension,grid_index,value,uncertainty\n";
  os.precision(17);
  for (const auto& inst : d.instances)
    for (const auto& [dim, series] : inst.dims)
      for (std::size_t i = 0; i < series.size(); ++i)
        os << inst.id << ',' << dim << ',' << i << ',' << series[i].value
           << ',' << series[i].uncertainty << '\n';
}

}  // namespace usast
