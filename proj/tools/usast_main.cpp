// usast: uncertainty-aware subsequence-transform classifier for uncertain
// time series. Subcommands: synth, train, predict, evaluate, explain,
// validate. Every run is reproducible from its flags and seed; outputs land
// only under the chosen output directory.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "usast/explain.hpp"
#include "usast/pipeline.hpp"
#include "usast/synth.hpp"

using namespace usast;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSchemaHelp = R"(File formats:
  observations CSV (long format): object_id,mjd,passband,flux,flux_err
  metadata CSV: object_id,target[,free grouping columns...]
  predictions CSV: object_id,label[,p_<class>...]
  model file: versioned JSON container, schema "usast-model" version 1
Variant aliases (--variant): SAST, SASTd, SASTdc, uSAST, uSASTd, uSASTdc
  (u = uncertainty features, d = drop near-duplicates, c = count occurrences))";

struct VariantFlags {
  VariantConfig cfg;
  std::string variant_alias;

  void attach(CLI::App* cmd) {
    cmd->add_flag(
        "--no-uncertainty",
        [this](std::int64_t) { cfg.use_uncertainty = false; },
        "Drop the propagated-uncertainty feature block");
    cmd->add_flag(
        "--no-dedup", [this](std::int64_t) { cfg.drop_duplicates = false; },
        "Keep near-duplicate subsequences in the pool");
    cmd->add_flag(
        "--count", [this](std::int64_t) { cfg.count_frequency = true; },
        "Add occurrence-count features (requires deduplication)");
    cmd->add_option("--variant", variant_alias,
                    "Variant alias overriding the three flags above "
                    "(SAST, SASTd, SASTdc, uSAST, uSASTd, uSASTdc)");
    cmd->add_option("--epsilon", cfg.epsilon,
                    "Similarity threshold on the normalized distance value")
        ->capture_default_str();
    cmd->add_option("--count-epsilon", cfg.count_epsilon,
                    "Occurrence-count threshold (< 0 reuses --epsilon)")
        ->capture_default_str();
    cmd->add_option("--lengths", cfg.length_list, "Subsequence lengths")
        ->capture_default_str();
    cmd->add_option("--k", cfg.k_per_class,
                    "Reference series drawn per class")
        ->capture_default_str();
    cmd->add_flag(
        "--no-length-normalize",
        [this](std::int64_t) { cfg.normalize_by_length = false; },
        "Do not divide distances by the window length");
    cmd->add_flag(
        "--znormalize", [this](std::int64_t) { cfg.znormalize_windows = true; },
        "Z-normalize every window before the distance");
    cmd->add_option("--seed", cfg.seed, "Master RNG seed")
        ->capture_default_str();
  }

  VariantConfig resolve() const {
    VariantConfig out = cfg;
    if (!variant_alias.empty()) apply_variant_name(out, variant_alias);
    out.validate();
    return out;
  }
};

struct DataFlags {
  std::string observations, metadata;
  std::size_t window = 5;
  double grid_start = 0.0, grid_step = 0.0;
  std::size_t grid_points = 0;

  void attach(CLI::App* cmd, bool metadata_required) {
    cmd->add_option("--observations", observations,
                    "Long-format observations CSV")
        ->required();
    auto* m = cmd->add_option("--metadata", metadata,
                              "Metadata CSV with labels");
    if (metadata_required) m->required();
    cmd->add_option("--window", window,
                    "Rolling-average imputation window length")
        ->capture_default_str();
    cmd->add_option("--grid-start", grid_start, "Resampling grid start time");
    cmd->add_option("--grid-step", grid_step,
                    "Resampling grid step (0 = auto from median gap)");
    cmd->add_option("--grid-points", grid_points,
                    "Resampling grid length (0 = auto)");
  }

  std::optional<GridSpec> grid() const {
    if (grid_step > 0.0 && grid_points > 0)
      return GridSpec{grid_start, grid_step, grid_points};
    return std::nullopt;
  }

  LabeledDataset load(GridSpec* used = nullptr) const {
    IngestResult ingest;
    if (!metadata.empty()) {
      ingest = parse_long_csv(observations, metadata);
    } else {
      ingest.table = parse_observations_csv(observations);
      for (const auto& rec : ingest.table.records)
        ingest.labels.emplace(rec.object_id, "?");
    }
    return preprocess(ingest, grid(), window, used);
  }
};

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("failed writing " + path.string());
  std::printf("wrote %s\n", path.string().c_str());
}

ordered_json report_json(const EvaluationReport& r) {
  ordered_json j;
  if (!r.group_key.empty()) j["group"] = r.group_key;
  j["n_samples"] = r.n_samples;
  j["accuracy"] = r.accuracy;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  if (r.log_loss) j["log_loss"] = *r.log_loss;
  ordered_json per_class = ordered_json::array();
  for (const auto& c : r.per_class) {
    ordered_json jc;
    jc["class"] = c.class_id;
    jc["precision"] = c.precision;
    jc["recall"] = c.recall;
    jc["f1"] = c.f1;
    jc["support"] = c.support;
    if (c.zero_predicted) jc["never_predicted"] = true;
    per_class.push_back(std::move(jc));
  }
  j["per_class"] = std::move(per_class);
  j["class_order"] = r.class_order;
  j["confusion"] = r.confusion;
  return j;
}

ordered_json evaluation_set_json(const EvaluationSet& ev) {
  ordered_json j;
  j["marginal"] = report_json(ev.marginal);
  if (!ev.grouped.empty()) {
    ordered_json g = ordered_json::array();
    for (const auto& r : ev.grouped) g.push_back(report_json(r));
    j["grouped"] = std::move(g);
  }
  if (ev.one_vs_rest) {
    ordered_json o;
    o["positive_class"] = ev.positive_class;
    o["precision"] = ev.one_vs_rest->precision;
    o["recall"] = ev.one_vs_rest->recall;
    o["f1"] = ev.one_vs_rest->f1;
    j["one_vs_rest"] = std::move(o);
  }
  return j;
}

struct MeanStd {
  double mean = 0.0, std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

// ------------------------------------------------------------------ commands

int cmd_synth(const std::string& preset, std::uint64_t seed,
              const std::string& out) {
  SynthSpec spec;
  if (preset == "separable")
    spec = separable_preset(seed);
  else if (preset == "uncertainty")
    spec = uncertainty_only_preset(seed);
  else if (preset == "frequency")
    spec = frequency_preset(seed);
  else if (preset == "periodic")
    spec = periodic_preset(seed);
  else
    throw std::invalid_argument("unknown preset '" + preset + "'");

  const auto data = generate(spec);
  const auto dir = prepare_out_dir(out);
  std::ostringstream obs, meta;
  write_long_csv(obs, meta, data);
  write_text(dir / "observations.csv", obs.str());
  write_text(dir / "metadata.csv", meta.str());
  std::printf("generated %zu instances, %zu classes, length %zu\n",
              data.instances.size(), data.class_set().size(), spec.m);
  return 0;
}

int cmd_validate(const DataFlags& data) {
  GridSpec used;
  const auto d = data.load(&used);
  const auto violations = validate_dataset(d);
  std::printf("grid: start=%g step=%g points=%zu; %zu instances\n",
              used.start, used.step, used.n_points, d.instances.size());
  for (const auto& v : violations)
    std::printf("violation: instance=%s dimension=%s index=%ld %s\n",
                v.instance_id.c_str(), v.dimension.c_str(), v.index,
                v.message.c_str());
  if (violations.empty()) {
    std::printf("dataset valid\n");
    return 0;
  }
  std::printf("%zu violations\n", violations.size());
  return 1;
}

ClassifierKind parse_classifier(const std::string& name) {
  if (name == "forest") return ClassifierKind::Forest;
  if (name == "ridge") return ClassifierKind::Ridge;
  throw std::invalid_argument("unknown classifier '" + name +
                              "' (expected forest or ridge)");
}

int cmd_train(const DataFlags& data, const VariantFlags& variant,
              const std::string& classifier, std::size_t trees,
              std::size_t workers, const std::string& out) {
  const auto cfg = variant.resolve();
  GridSpec used;
  const auto dataset = data.load(&used);

  std::vector<std::string> warnings;
  ForestParams fp;
  fp.n_trees = trees;
  auto model = train(dataset, cfg, parse_classifier(classifier), workers, fp,
                     {0.1, 1.0, 10.0}, &warnings);
  model.grid = used;
  model.impute_window = data.window;

  const auto dir = prepare_out_dir(out);
  save_model(model, (dir / "model.json").string());
  std::printf("wrote %s\n", (dir / "model.json").string().c_str());

  ordered_json s;
  s["variant"] = variant_name(cfg);
  s["classifier"] = classifier;
  s["classes"] = model.classes;
  s["n_instances"] = dataset.instances.size();
  s["pool_size_raw"] = model.summary.pool_size_raw;
  s["pool_size_final"] = model.summary.pool_size_final;
  s["feature_columns"] = model.layout.columns();
  s["pool_seconds"] = model.summary.pool_seconds;
  s["transform_seconds"] = model.summary.transform_seconds;
  s["fit_seconds"] = model.summary.fit_seconds;
  s["seed"] = model.summary.seed;
  if (!warnings.empty()) s["warnings"] = warnings;
  write_text(dir / "train_summary.json", s.dump(2) + "\n");
  for (const auto& w : warnings)
    std::printf("warning: %s\n", w.c_str());
  std::printf("trained %s on %zu instances: pool %zu -> %zu, %zu features\n",
              variant_name(cfg).c_str(), dataset.instances.size(),
              model.summary.pool_size_raw, model.summary.pool_size_final,
              model.layout.columns());
  return 0;
}

LabeledDataset load_for_model(const DataFlags& data,
                              const TrainedModel& model) {
  DataFlags adjusted = data;
  if (adjusted.window == 5) adjusted.window = model.impute_window;
  if (model.grid && adjusted.grid_points == 0) {
    adjusted.grid_start = model.grid->start;
    adjusted.grid_step = model.grid->step;
    adjusted.grid_points = model.grid->n_points;
  }
  return adjusted.load();
}

int cmd_predict(const DataFlags& data, const std::string& model_path,
                std::size_t workers, const std::string& out) {
  const auto model = load_model(model_path);
  const auto dataset = load_for_model(data, model);
  const auto pred = predict(model, dataset.instances, workers);

  std::ostringstream csv;
  csv << "object_id,label";
  if (!pred.proba.empty())
    for (const auto& c : model.classes) csv << ",p_" << c;
  csv << "\n";
  for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
    csv << dataset.instances[i].id << "," << pred.labels[i];
    if (!pred.proba.empty()) {
      char buf[32];
      for (double p : pred.proba[i]) {
        std::snprintf(buf, sizeof(buf), ",%.6f", p);
        csv << buf;
      }
    }
    csv << "\n";
  }
  const auto dir = prepare_out_dir(out);
  write_text(dir / "predictions.csv", csv.str());
  return 0;
}

int cmd_evaluate(const DataFlags& data, const VariantFlags& variant,
                 const std::string& model_path, const std::string& classifier,
                 std::size_t trees, double split,
                 const std::vector<std::uint64_t>& seeds,
                 const std::vector<std::string>& group_columns,
                 const std::string& positive_class, std::size_t workers,
                 const std::string& out) {
  const auto dir = prepare_out_dir(out);
  const std::optional<std::string> positive =
      positive_class.empty() ? std::nullopt
                             : std::optional<std::string>(positive_class);

  if (!model_path.empty()) {
    const auto model = load_model(model_path);
    const auto dataset = load_for_model(data, model);
    const auto ev = evaluate(model, dataset, group_columns, positive, workers);
    ordered_json j;
    j["schema"] = "usast-evaluation";
    j["schema_version"] = 1;
    j["mode"] = "fixed-model";
    j["result"] = evaluation_set_json(ev);
    write_text(dir / "report.json", j.dump(2) + "\n");
    write_text(dir / "report.txt", report_to_text(ev.marginal));
    std::printf("%s", report_to_text(ev.marginal).c_str());
    return 0;
  }

  if (seeds.empty()) throw std::invalid_argument("at least one seed required");
  const auto cfg_base = variant.resolve();
  GridSpec used;
  const auto dataset = data.load(&used);

  ordered_json runs = ordered_json::array();
  std::vector<double> acc, pre, rec, f1, ll;
  for (std::uint64_t seed : seeds) {
    VariantConfig cfg = cfg_base;
    cfg.seed = seed;
    LabeledDataset train_set, test_set;
    split_stratified(dataset, split, seed, train_set, test_set);
    ForestParams fp;
    fp.n_trees = trees;
    const auto model =
        train(train_set, cfg, parse_classifier(classifier), workers, fp);
    const auto ev = evaluate(model, test_set, group_columns, positive, workers);

    ordered_json r;
    r["seed"] = seed;
    r["n_train"] = train_set.instances.size();
    r["n_test"] = test_set.instances.size();
    r["result"] = evaluation_set_json(ev);
    runs.push_back(std::move(r));
    acc.push_back(ev.marginal.accuracy);
    pre.push_back(ev.marginal.precision);
    rec.push_back(ev.marginal.recall);
    f1.push_back(ev.marginal.f1);
    if (ev.marginal.log_loss) ll.push_back(*ev.marginal.log_loss);
  }

  ordered_json agg;
  std::ostringstream table;
  table << "variant   metric     mean +- std over " << seeds.size()
        << " seeds\n";
  auto add = [&](const char* name, const std::vector<double>& xs) {
    if (xs.empty()) return;
    const auto ms = mean_std(xs);
    agg[name] = {{"mean", ms.mean}, {"std", ms.std}};
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-9s %-10s %.4f +- %.4f\n",
                  variant_name(cfg_base).c_str(), name, ms.mean, ms.std);
    table << buf;
  };
  add("accuracy", acc);
  add("precision", pre);
  add("recall", rec);
  add("f1", f1);
  add("log_loss", ll);

  ordered_json j;
  j["schema"] = "usast-evaluation";
  j["schema_version"] = 1;
  j["mode"] = "split-and-train";
  j["variant"] = variant_name(cfg_base);
  j["classifier"] = classifier;
  j["split"] = split;
  j["seeds"] = seeds;
  j["runs"] = std::move(runs);
  j["aggregate"] = std::move(agg);
  write_text(dir / "report.json", j.dump(2) + "\n");
  write_text(dir / "report.txt", table.str());
  std::printf("%s", table.str().c_str());
  return 0;
}

int cmd_explain(const DataFlags& data, const std::string& model_path,
                bool want_global, std::size_t top_k,
                const std::vector<std::string>& instances, std::size_t top,
                const std::string& out) {
  const auto model = load_model(model_path);
  if (model.classifier != ClassifierKind::Forest)
    throw std::invalid_argument(
        "explain requires a forest model (ridge has no per-feature paths)");
  const auto dir = prepare_out_dir(out);

  if (want_global || instances.empty()) {
    const auto g =
        explain_global(model.forest, model.pool, model.layout, top_k);
    write_text(dir / "explain_global.json",
               global_explanation_json(g, model.classes) + "\n");
  }

  if (!instances.empty()) {
    if (data.observations.empty())
      throw std::invalid_argument(
          "--observations required for local explanations");
    const auto dataset = load_for_model(data, model);
    for (const auto& id : instances) {
      const MultivariateInstance* inst = nullptr;
      for (const auto& i : dataset.instances)
        if (i.id == id) inst = &i;
      if (!inst)
        throw std::invalid_argument("instance '" + id +
                                    "' not found in the observations");
      const auto l = explain_local(model.forest, model.pool, model.layout,
                                   *inst, model.config, top);
      write_text(dir / ("explain_local_" + id + ".json"),
                 local_explanation_json(l, *inst, model.classes) + "\n");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "usast: subsequence-transform classification of uncertain time series"};
  app.require_subcommand(1);
  app.footer(kSchemaHelp);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string synth_preset = "separable";
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  synth->add_option("--preset", synth_preset,
                    "separable | uncertainty | frequency | periodic")
      ->capture_default_str();
  synth->add_option("--seed", synth_seed, "RNG seed")->capture_default_str();
  synth->add_option("-o,--out", synth_out, "Output directory")->required();

  // validate
  auto* validate = app.add_subcommand(
      "validate", "Preprocess a dataset and report invariant violations");
  DataFlags validate_data;
  validate_data.attach(validate, true);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  DataFlags train_data;
  VariantFlags train_variant;
  std::string train_classifier = "forest";
  std::size_t train_trees = 100;
  std::size_t train_workers = 0;
  std::string train_out;
  train_data.attach(train_cmd, true);
  train_variant.attach(train_cmd);
  train_cmd->add_option("--classifier", train_classifier, "forest | ridge")
      ->capture_default_str();
  train_cmd->add_option("--trees", train_trees, "Trees in the forest")
      ->capture_default_str();
  train_cmd->add_option("--workers", train_workers, "Worker threads (0 = all)")
      ->capture_default_str();
  train_cmd->add_option("-o,--out", train_out, "Output directory")->required();

  // predict
  auto* predict_cmd =
      app.add_subcommand("predict", "Predict labels with a trained model");
  DataFlags predict_data;
  std::string predict_model, predict_out;
  std::size_t predict_workers = 0;
  predict_data.attach(predict_cmd, false);
  predict_cmd->add_option("--model", predict_model, "Model file")->required();
  predict_cmd->add_option("--workers", predict_workers,
                          "Worker threads (0 = all)");
  predict_cmd->add_option("-o,--out", predict_out, "Output directory")
      ->required();

  // evaluate
  auto* eval_cmd = app.add_subcommand(
      "evaluate",
      "Evaluate a saved model, or train/test over a seed list and aggregate");
  DataFlags eval_data;
  VariantFlags eval_variant;
  std::string eval_model, eval_classifier = "forest", eval_positive, eval_out;
  std::size_t eval_trees = 100, eval_workers = 0;
  double eval_split = 0.8;
  std::vector<std::uint64_t> eval_seeds = {1, 2, 3};
  std::vector<std::string> eval_groups;
  eval_data.attach(eval_cmd, true);
  eval_variant.attach(eval_cmd);
  eval_cmd->add_option("--model", eval_model,
                       "Evaluate this model instead of training");
  eval_cmd->add_option("--classifier", eval_classifier, "forest | ridge")
      ->capture_default_str();
  eval_cmd->add_option("--trees", eval_trees, "Trees in the forest")
      ->capture_default_str();
  eval_cmd->add_option("--split", eval_split, "Training fraction")
      ->capture_default_str();
  eval_cmd->add_option("--seeds", eval_seeds, "Seeds for split-and-train runs")
      ->capture_default_str();
  eval_cmd->add_option("--group-columns", eval_groups,
                       "Metadata columns for grouped reports");
  eval_cmd->add_option("--positive-class", eval_positive,
                       "Class for the one-vs-rest report");
  eval_cmd->add_option("--workers", eval_workers, "Worker threads (0 = all)");
  eval_cmd->add_option("-o,--out", eval_out, "Output directory")->required();

  // explain
  auto* explain_cmd =
      app.add_subcommand("explain", "Export global/local explanations");
  DataFlags explain_data;
  std::string explain_model, explain_out;
  bool explain_global_flag = false;
  std::size_t explain_top_k = 20, explain_top = 3;
  std::vector<std::string> explain_instances;
  explain_cmd->add_option("--model", explain_model, "Model file")->required();
  explain_cmd->add_flag("--global", explain_global_flag,
                        "Write the global explanation (default when no "
                        "--instance is given)");
  explain_cmd->add_option("--top-k", explain_top_k,
                          "Global entries to report")
      ->capture_default_str();
  explain_cmd
      ->add_option("--instance", explain_instances,
                   "Instance id for a local explanation (repeatable)")
      ->take_all();
  explain_cmd->add_option("--top", explain_top, "Local entries to report")
      ->capture_default_str();
  explain_cmd
      ->add_option("--observations", explain_data.observations,
                   "Observations CSV holding the instances to explain");
  explain_cmd->add_option("--metadata", explain_data.metadata,
                          "Optional metadata CSV");
  explain_cmd->add_option("--window", explain_data.window,
                          "Imputation window override");
  explain_cmd->add_option("-o,--out", explain_out, "Output directory")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(synth_preset, synth_seed, synth_out);
    if (validate->parsed()) return cmd_validate(validate_data);
    if (train_cmd->parsed())
      return cmd_train(train_data, train_variant, train_classifier,
                       train_trees, train_workers, train_out);
    if (predict_cmd->parsed())
      return cmd_predict(predict_data, predict_model, predict_workers,
                         predict_out);
    if (eval_cmd->parsed())
      return cmd_evaluate(eval_data, eval_variant, eval_model, eval_classifier,
                          eval_trees, eval_split, eval_seeds, eval_groups,
                          eval_positive, eval_workers, eval_out);
    if (explain_cmd->parsed())
      return cmd_explain(explain_data, explain_model, explain_global_flag,
                         explain_top_k, explain_instances, explain_top,
                         explain_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
