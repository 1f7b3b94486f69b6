#pragma once

#include <optional>

#include "usast/core.hpp"
#include "usast/explain.hpp"
#include "usast/forest.hpp"
#include "usast/ingest.hpp"
#include "usast/metrics.hpp"
#include "usast/pool.hpp"
#include "usast/ridge.hpp"
#include "usast/transform.hpp"

namespace usast {

enum class ClassifierKind { Forest, Ridge };

struct TrainingSummary {
  std::size_t pool_size_raw = 0;
  std::size_t pool_size_final = 0;
  double pool_seconds = 0.0;
  double transform_seconds = 0.0;
  double fit_seconds = 0.0;
  std::uint64_t seed = 0;
};

struct TrainedModel {
  static constexpr int kSchemaVersion = 1;

  VariantConfig config;
  std::optional<GridSpec> grid;
  std::size_t impute_window = 5;
  SubsequencePool pool;
  FeatureLayout layout;
  ClassifierKind classifier = ClassifierKind::Forest;
  ForestModel forest;
  RidgeModel ridge;
  std::vector<std::string> classes;  // index -> class id, stable
  TrainingSummary summary;

  int class_index(const std::string& cls) const;
};

struct ForestFitOptions {
  ForestParams params;
};

// Full run: select references, build the pool, transform, fit.
TrainedModel train(const LabeledDataset& dataset, const VariantConfig& config,
                   ClassifierKind classifier, std::size_t workers = 0,
                   const ForestParams& forest_params = {},
                   const std::vector<double>& ridge_alphas = {0.1, 1.0, 10.0},
                   std::vector<std::string>* warnings = nullptr);

struct Predictions {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> proba;  // empty for ridge models
};

Predictions predict(const TrainedModel& model,
                    const std::vector<MultivariateInstance>& instances,
                    std::size_t workers = 0);

struct EvaluationSet {
  EvaluationReport marginal;
  std::vector<EvaluationReport> grouped;
  std::optional<BinaryScore> one_vs_rest;
  std::string positive_class;
};

EvaluationSet evaluate(const TrainedModel& model, const LabeledDataset& data,
                       const std::vector<std::string>& group_columns = {},
                       const std::optional<std::string>& positive_class =
                           std::nullopt,
                       std::size_t workers = 0);

// Stratified split preserving class proportions within +-1 per class.
void split_stratified(const LabeledDataset& d, double train_fraction,
                      std::uint64_t seed, LabeledDataset& train,
                      LabeledDataset& test);

// Single self-describing JSON container; all reals stored as decimal
// strings so round-trips are byte identical.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

}  // namespace usast
