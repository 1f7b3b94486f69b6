#include "usast/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "usast/rng.hpp"

namespace usast {

namespace {

using json = nlohmann::ordered_json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string d2s(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double s2d(const std::string& s) { return std::stod(s); }

json points_to_json(const std::vector<UncertainValue>& pts) {
  json arr = json::array();
  for (const auto& p : pts)
    arr.push_back(json::array({d2s(p.value), d2s(p.uncertainty)}));
  return arr;
}

std::vector<UncertainValue> points_from_json(const json& arr) {
  std::vector<UncertainValue> pts;
  for (const auto& p : arr)
    pts.push_back({s2d(p.at(0).get<std::string>()),
                   s2d(p.at(1).get<std::string>())});
  return pts;
}

}  // namespace

int TrainedModel::class_index(const std::string& cls) const {
  auto it = std::find(classes.begin(), classes.end(), cls);
  return it == classes.end() ? -1
                             : static_cast<int>(it - classes.begin());
}

TrainedModel train(const LabeledDataset& dataset, const VariantConfig& config,
                   ClassifierKind classifier, std::size_t workers,
                   const ForestParams& forest_params,
                   const std::vector<double>& ridge_alphas,
                   std::vector<std::string>* warnings) {
  config.validate();
  {
    const auto violations = validate_dataset(dataset);
    if (!violations.empty())
      throw std::invalid_argument("train: dataset has " +
                                  std::to_string(violations.size()) +
                                  " violations; first: " +
                                  violations.front().message);
  }

  TrainedModel model;
  model.config = config;
  model.classifier = classifier;
  model.classes = dataset.class_set();
  model.summary.seed = config.seed;

  std::map<std::string, std::string> label_of;
  for (std::size_t i = 0; i < dataset.instances.size(); ++i)
    label_of[dataset.instances[i].id] = dataset.labels[i];

  auto t0 = std::chrono::steady_clock::now();
  const auto refs =
      select_references(dataset, config.k_per_class, config.seed, warnings);
  std::vector<std::string> ref_classes;
  for (const auto& r : refs) ref_classes.push_back(label_of.at(r.id));

  const DistanceOptions opt{config.normalize_by_length,
                            config.znormalize_windows};
  // raw size for the summary, then the configured pool
  {
    std::size_t raw = 0;
    for (const auto& r : refs)
      for (const auto& [dim, series] : r.dims)
        for (std::size_t l : config.length_list)
          if (l <= series.size()) raw += series.size() - l + 1;
    model.summary.pool_size_raw = raw;
  }
  model.pool = generate_subsequences(refs, ref_classes, config.length_list,
                                     config.epsilon, config.drop_duplicates,
                                     opt);
  model.summary.pool_size_final = model.pool.size();
  model.summary.pool_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const FeatureMatrix x = transform(dataset.instances, model.pool, config,
                                    workers);
  model.layout = x.layout;
  model.summary.transform_seconds = seconds_since(t0);

  std::vector<int> y(dataset.labels.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = model.class_index(dataset.labels[i]);

  t0 = std::chrono::steady_clock::now();
  if (classifier == ClassifierKind::Forest) {
    model.forest = ForestModel::fit(x, y, model.classes.size(), forest_params,
                                    config.seed, workers);
  } else {
    model.ridge = fit_ridge_loocv(x, y, model.classes.size(), ridge_alphas);
  }
  model.summary.fit_seconds = seconds_since(t0);
  return model;
}

Predictions predict(const TrainedModel& model,
                    const std::vector<MultivariateInstance>& instances,
                    std::size_t workers) {
  const FeatureMatrix x =
      transform(instances, model.pool, model.config, workers);
  Predictions out;
  std::vector<int> idx;
  if (model.classifier == ClassifierKind::Forest) {
    idx = model.forest.predict(x);
    out.proba = model.forest.predict_proba(x);
  } else {
    idx = model.ridge.predict(x);
  }
  for (int i : idx) out.labels.push_back(model.classes.at(i));
  return out;
}

EvaluationSet evaluate(const TrainedModel& model, const LabeledDataset& data,
                       const std::vector<std::string>& group_columns,
                       const std::optional<std::string>& positive_class,
                       std::size_t workers) {
  const Predictions pred = predict(model, data.instances, workers);
  EvaluationSet set;
  set.marginal = weighted_scores(data.labels, pred.labels);
  if (!pred.proba.empty())
    set.marginal.log_loss =
        cross_entropy(data.labels, pred.proba, model.classes);
  if (!group_columns.empty())
    set.grouped =
        grouped_report(data.labels, pred.labels, data.metadata, group_columns);
  if (positive_class) {
    set.one_vs_rest =
        one_vs_rest_report(data.labels, pred.labels, *positive_class);
    set.positive_class = *positive_class;
  }
  return set;
}

void split_stratified(const LabeledDataset& d, double train_fraction,
                      std::uint64_t seed, LabeledDataset& train,
                      LabeledDataset& test) {
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < d.instances.size(); ++i)
    by_class[d.labels[i]].push_back(i);

  std::vector<std::size_t> train_idx, test_idx;
  std::size_t stream = 0;
  for (auto& [cls, members] : by_class) {
    Rng rng(derive_seed(seed, 0x9000000000ULL + stream++));
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < members.size(); ++i)
      (i < n_train ? train_idx : test_idx).push_back(members[i]);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  auto take = [&](const std::vector<std::size_t>& idx, LabeledDataset& out) {
    out = {};
    for (std::size_t i : idx) {
      out.instances.push_back(d.instances[i]);
      out.labels.push_back(d.labels[i]);
      if (!d.metadata.empty()) out.metadata.push_back(d.metadata[i]);
    }
  };
  take(train_idx, train);
  take(test_idx, test);
}

std::string model_to_json(const TrainedModel& model) {
  json doc;
  doc["schema"] = "usast-model";
  doc["schema_version"] = TrainedModel::kSchemaVersion;

  const auto& cfg = model.config;
  json jc;
  jc["use_uncertainty"] = cfg.use_uncertainty;
  jc["drop_duplicates"] = cfg.drop_duplicates;
  jc["count_frequency"] = cfg.count_frequency;
  jc["epsilon"] = d2s(cfg.epsilon);
  jc["count_epsilon"] = d2s(cfg.count_epsilon);
  jc["length_list"] = cfg.length_list;
  jc["k_per_class"] = cfg.k_per_class;
  jc["normalize_by_length"] = cfg.normalize_by_length;
  jc["znormalize_windows"] = cfg.znormalize_windows;
  jc["seed"] = cfg.seed;
  doc["variant"] = jc;

  if (model.grid) {
    json jg;
    jg["start"] = d2s(model.grid->start);
    jg["step"] = d2s(model.grid->step);
    jg["n_points"] = model.grid->n_points;
    doc["grid"] = jg;
  }
  doc["impute_window"] = model.impute_window;

  json jp;
  jp["epsilon"] = d2s(model.pool.epsilon);
  jp["length_list"] = model.pool.length_list;
  jp["dedup"] = model.pool.dedup;
  jp["length_normalize"] = model.pool.distance_options.length_normalize;
  jp["znormalize"] = model.pool.distance_options.znormalize;
  json entries = json::array();
  for (const auto& e : model.pool.entries) {
    json je;
    je["ref"] = e.provenance.ref_instance_id;
    je["class"] = e.provenance.class_id;
    je["dim"] = e.provenance.dimension;
    je["start"] = e.provenance.start_index;
    je["points"] = points_to_json(e.points);
    entries.push_back(std::move(je));
  }
  jp["entries"] = std::move(entries);
  doc["pool"] = std::move(jp);

  json jl;
  jl["pool_size"] = model.layout.pool_size;
  jl["has_uncertainty"] = model.layout.has_uncertainty;
  jl["has_count"] = model.layout.has_count;
  doc["layout"] = jl;

  doc["classes"] = model.classes;

  json jclf;
  if (model.classifier == ClassifierKind::Forest) {
    jclf["kind"] = "forest";
    jclf["feature_count"] = model.forest.feature_count();
    jclf["n_classes"] = model.forest.n_classes();
    json trees = json::array();
    for (const auto& tree : model.forest.trees()) {
      json nodes = json::array();
      for (const auto& node : tree.nodes) {
        json jn;
        jn["f"] = node.feature;
        if (node.feature >= 0) {
          jn["t"] = d2s(node.threshold);
          jn["l"] = node.left;
          jn["r"] = node.right;
        } else {
          json counts = json::array();
          for (double c : node.class_counts) counts.push_back(d2s(c));
          jn["c"] = std::move(counts);
        }
        nodes.push_back(std::move(jn));
      }
      trees.push_back(std::move(nodes));
    }
    jclf["trees"] = std::move(trees);
  } else {
    jclf["kind"] = "ridge";
    jclf["alpha"] = d2s(model.ridge.selected_alpha);
    json grid = json::array();
    for (double a : model.ridge.alpha_grid) grid.push_back(d2s(a));
    jclf["alpha_grid"] = std::move(grid);
    json w = json::array();
    for (const auto& wc : model.ridge.weights) {
      json row = json::array();
      for (double v : wc) row.push_back(d2s(v));
      w.push_back(std::move(row));
    }
    jclf["weights"] = std::move(w);
    json b = json::array();
    for (double v : model.ridge.intercepts) b.push_back(d2s(v));
    jclf["intercepts"] = std::move(b);
  }
  doc["classifier"] = std::move(jclf);

  json js;
  js["pool_size_raw"] = model.summary.pool_size_raw;
  js["pool_size_final"] = model.summary.pool_size_final;
  js["seed"] = model.summary.seed;
  doc["summary"] = js;

  return doc.dump(1);
}

TrainedModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("model file is not valid JSON: ") +
                             e.what());
  }
  if (!doc.contains("schema_version") ||
      doc["schema_version"].get<int>() != TrainedModel::kSchemaVersion)
    throw std::runtime_error("unsupported model schema_version");

  TrainedModel model;
  const auto& jc = doc.at("variant");
  model.config.use_uncertainty = jc.at("use_uncertainty").get<bool>();
  model.config.drop_duplicates = jc.at("drop_duplicates").get<bool>();
  model.config.count_frequency = jc.at("count_frequency").get<bool>();
  model.config.epsilon = s2d(jc.at("epsilon").get<std::string>());
  model.config.count_epsilon = s2d(jc.at("count_epsilon").get<std::string>());
  model.config.length_list =
      jc.at("length_list").get<std::vector<std::size_t>>();
  model.config.k_per_class = jc.at("k_per_class").get<std::size_t>();
  model.config.normalize_by_length = jc.at("normalize_by_length").get<bool>();
  model.config.znormalize_windows = jc.at("znormalize_windows").get<bool>();
  model.config.seed = jc.at("seed").get<std::uint64_t>();

  if (doc.contains("grid")) {
    GridSpec g;
    g.start = s2d(doc["grid"].at("start").get<std::string>());
    g.step = s2d(doc["grid"].at("step").get<std::string>());
    g.n_points = doc["grid"].at("n_points").get<std::size_t>();
    model.grid = g;
  }
  if (doc.contains("impute_window"))
    model.impute_window = doc["impute_window"].get<std::size_t>();

  const auto& jp = doc.at("pool");
  model.pool.epsilon = s2d(jp.at("epsilon").get<std::string>());
  model.pool.length_list =
      jp.at("length_list").get<std::vector<std::size_t>>();
  model.pool.dedup = jp.at("dedup").get<bool>();
  model.pool.distance_options.length_normalize =
      jp.at("length_normalize").get<bool>();
  model.pool.distance_options.znormalize = jp.at("znormalize").get<bool>();
  for (const auto& je : jp.at("entries")) {
    UncertainSubsequence e;
    e.provenance.ref_instance_id = je.at("ref").get<std::string>();
    e.provenance.class_id = je.at("class").get<std::string>();
    e.provenance.dimension = je.at("dim").get<std::string>();
    e.provenance.start_index = je.at("start").get<std::size_t>();
    e.points = points_from_json(je.at("points"));
    model.pool.entries.push_back(std::move(e));
  }

  const auto& jl = doc.at("layout");
  model.layout.pool_size = jl.at("pool_size").get<std::size_t>();
  model.layout.has_uncertainty = jl.at("has_uncertainty").get<bool>();
  model.layout.has_count = jl.at("has_count").get<bool>();

  model.classes = doc.at("classes").get<std::vector<std::string>>();

  const auto& jclf = doc.at("classifier");
  const std::string kind = jclf.at("kind").get<std::string>();
  if (kind == "forest") {
    model.classifier = ClassifierKind::Forest;
    std::vector<DecisionTree> trees;
    for (const auto& jt : jclf.at("trees")) {
      DecisionTree tree;
      for (const auto& jn : jt) {
        TreeNode node;
        node.feature = jn.at("f").get<int>();
        if (node.feature >= 0) {
          node.threshold = s2d(jn.at("t").get<std::string>());
          node.left = jn.at("l").get<int>();
          node.right = jn.at("r").get<int>();
        } else {
          for (const auto& c : jn.at("c"))
            node.class_counts.push_back(s2d(c.get<std::string>()));
        }
        tree.nodes.push_back(std::move(node));
      }
      trees.push_back(std::move(tree));
    }
    model.forest = ForestModel::from_parts(
        std::move(trees), jclf.at("feature_count").get<std::size_t>(),
        jclf.at("n_classes").get<std::size_t>());
  } else if (kind == "ridge") {
    model.classifier = ClassifierKind::Ridge;
    model.ridge.selected_alpha = s2d(jclf.at("alpha").get<std::string>());
    for (const auto& a : jclf.at("alpha_grid"))
      model.ridge.alpha_grid.push_back(s2d(a.get<std::string>()));
    for (const auto& row : jclf.at("weights")) {
      std::vector<double> wc;
      for (const auto& v : row) wc.push_back(s2d(v.get<std::string>()));
      model.ridge.weights.push_back(std::move(wc));
    }
    for (const auto& v : jclf.at("intercepts"))
      model.ridge.intercepts.push_back(s2d(v.get<std::string>()));
  } else {
    throw std::runtime_error("unknown classifier kind in model file: " + kind);
  }

  if (doc.contains("summary")) {
    model.summary.pool_size_raw =
        doc["summary"].at("pool_size_raw").get<std::size_t>();
    model.summary.pool_size_final =
        doc["summary"].at("pool_size_final").get<std::size_t>();
    model.summary.seed = doc["summary"].at("seed").get<std::uint64_t>();
  }
  return model;
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write model file " + path);
  os << model_to_json(model);
  if (!os) throw std::runtime_error("failed writing model file " + path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open model file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace usast
