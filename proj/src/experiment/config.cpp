#include "xaieval/experiment/config.hpp"

#include <fstream>
#include <set>

#include "xaieval/core/error.hpp"
#include "xaieval/metrics/sparsity.hpp"

namespace xaieval::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!keys.count(key)) throw ConfigError("unknown key " + (where.empty() ? key : where + "." + key));
}

// Runs `fn`, rewrapping library and JSON errors as ConfigError naming `where`.
template <typename Fn>
auto section(const std::string& where, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty()) return p;
  return fs::absolute(p.is_absolute() ? p : base / p).lexically_normal();
}

DatasetSource parse_dataset(const json& j, const fs::path& base) {
  check_keys(j, "dataset", {"synthetic", "csv", "test_csv", "schema", "max_rows", "id"});
  DatasetSource src;
  src.id = j.value("id", std::string());
  if (j.contains("synthetic")) {
    if (j.contains("csv")) throw ConfigError("dataset: give either synthetic or csv, not both");
    src.synthetic = section("dataset.synthetic", [&] { return data::SyntheticSpec::from_json(j.at("synthetic")); });
    return src;
  }
  if (!j.contains("csv")) throw ConfigError("dataset: missing 'csv' path (or a 'synthetic' recipe)");
  src.csv = resolve(j.at("csv").get<std::string>(), base);
  if (j.contains("test_csv")) src.test_csv = resolve(j.at("test_csv").get<std::string>(), base);
  if (!j.contains("schema")) throw ConfigError("dataset: missing 'schema' (path or inline object)");
  const auto& schema = j.at("schema");
  src.schema = section("dataset.schema", [&] {
    return schema.is_string() ? data::DatasetSchema::load(resolve(schema.get<std::string>(), base))
                              : data::DatasetSchema::from_json(schema);
  });
  src.max_rows = j.value("max_rows", std::size_t{0});
  return src;
}

json dataset_json(const DatasetSource& src) {
  json j;
  if (src.synthetic) {
    j["synthetic"] = src.synthetic->to_json();
  } else {
    j["csv"] = src.csv.string();
    if (!src.test_csv.empty()) j["test_csv"] = src.test_csv.string();
    j["schema"] = src.schema ? src.schema->to_json() : json::object();
    j["max_rows"] = src.max_rows;
  }
  if (!src.id.empty()) j["id"] = src.id;
  return j;
}

MetricSettings parse_metrics(const json& j) {
  check_keys(j, "metrics",
             {"descriptive_accuracy", "sparsity", "efficiency", "stability", "robustness", "completeness"});
  MetricSettings m;
  if (j.contains("descriptive_accuracy")) {
    const auto& s = j.at("descriptive_accuracy");
    check_keys(s, "metrics.descriptive_accuracy", {"k_list", "mode", "parallel"});
    section("metrics.descriptive_accuracy", [&] {
      auto& c = m.descriptive_accuracy;
      c.k_list = s.value("k_list", c.k_list);
      if (s.contains("mode")) c.mode = metrics::removal_mode_from_string(s.at("mode").get<std::string>());
      c.parallel = s.value("parallel", c.parallel);
      return 0;
    });
  }
  if (j.contains("sparsity")) {
    const auto& s = j.at("sparsity");
    check_keys(s, "metrics.sparsity", {"thresholds"});
    m.sparsity_thresholds = section("metrics.sparsity", [&] { return s.value("thresholds", std::vector<double>{}); });
  }
  if (j.contains("efficiency")) {
    const auto& s = j.at("efficiency");
    check_keys(s, "metrics.efficiency", {"counts", "repeats"});
    section("metrics.efficiency", [&] {
      m.efficiency.counts = s.value("counts", m.efficiency.counts);
      m.efficiency.repeats = s.value("repeats", m.efficiency.repeats);
      return 0;
    });
  }
  if (j.contains("stability")) {
    const auto& s = j.at("stability");
    check_keys(s, "metrics.stability", {"n_runs", "top_k", "scope", "mode", "instance"});
    section("metrics.stability", [&] {
      auto& c = m.stability;
      c.n_runs = s.value("n_runs", c.n_runs);
      c.top_k = s.value("top_k", c.top_k);
      if (s.contains("scope")) c.scope = metrics::stability_scope_from_string(s.at("scope").get<std::string>());
      if (s.contains("mode")) c.mode = metrics::stability_mode_from_string(s.at("mode").get<std::string>());
      c.instance = s.value("instance", c.instance);
      return 0;
    });
  }
  if (j.contains("robustness")) {
    const auto& s = j.at("robustness");
    check_keys(s, "metrics.robustness",
               {"trials", "ranks", "unrelated", "constant_value", "unrelated_name", "biased_feature"});
    section("metrics.robustness", [&] {
      auto& c = m.robustness;
      c.trials = s.value("trials", c.trials);
      c.ranks = s.value("ranks", c.ranks);
      if (s.contains("unrelated"))
        c.columns.mode = metrics::unrelated_mode_from_string(s.at("unrelated").get<std::string>());
      c.columns.constant_value = s.value("constant_value", c.columns.constant_value);
      c.columns.unrelated_name = s.value("unrelated_name", c.columns.unrelated_name);
      m.biased_feature = s.value("biased_feature", m.biased_feature);
      return 0;
    });
  }
  if (j.contains("completeness")) {
    const auto& s = j.at("completeness");
    check_keys(s, "metrics.completeness", {"batch_per_class", "max_features", "step", "classes"});
    section("metrics.completeness", [&] {
      auto& c = m.completeness;
      c.batch_per_class = s.value("batch_per_class", c.batch_per_class);
      c.max_features = s.value("max_features", c.max_features);
      c.step = s.value("step", c.step);
      c.classes = s.value("classes", c.classes);
      return 0;
    });
  }
  return m;
}

json metrics_json(const MetricSettings& m) {
  const auto& da = m.descriptive_accuracy;
  const auto& st = m.stability;
  const auto& rb = m.robustness;
  const auto& cp = m.completeness;
  return {{"descriptive_accuracy",
           {{"k_list", da.k_list}, {"mode", metrics::to_string(da.mode)}, {"parallel", da.parallel}}},
          {"sparsity",
           {{"thresholds", m.sparsity_thresholds.empty() ? metrics::default_thresholds() : m.sparsity_thresholds}}},
          {"efficiency", {{"counts", m.efficiency.counts}, {"repeats", m.efficiency.repeats}}},
          {"stability",
           {{"n_runs", st.n_runs},
            {"top_k", st.top_k},
            {"scope", metrics::to_string(st.scope)},
            {"mode", metrics::to_string(st.mode)},
            {"instance", st.instance}}},
          {"robustness",
           {{"trials", rb.trials},
            {"ranks", rb.ranks},
            {"unrelated", metrics::to_string(rb.columns.mode)},
            {"constant_value", rb.columns.constant_value},
            {"unrelated_name", rb.columns.unrelated_name},
            {"biased_feature", m.biased_feature}}},
          {"completeness",
           {{"batch_per_class", cp.batch_per_class},
            {"max_features", cp.max_features},
            {"step", cp.step},
            {"classes", cp.classes}}}};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j, const fs::path& base_dir) {
  check_keys(j, "", {"seed", "dataset", "split_ratio", "architecture", "train", "methods", "attribution",
                     "metrics", "output_dir", "threads", "execution"});
  if (!j.contains("seed")) throw ConfigError("missing required key 'seed'");
  ExperimentConfig c;
  c.seed = section("seed", [&] { return j.at("seed").get<std::uint64_t>(); });
  if (!j.contains("dataset")) throw ConfigError("missing required key 'dataset'");
  c.dataset = parse_dataset(j.at("dataset"), base_dir);
  c.split_ratio = section("split_ratio", [&] { return j.value("split_ratio", c.split_ratio); });
  if (j.contains("architecture")) {
    check_keys(j.at("architecture"), "architecture", {"hidden"});
    c.architecture = section("architecture", [&] { return nn::Architecture::from_json(j.at("architecture")); });
  }
  c.train.seed = c.seed;
  if (j.contains("train")) {
    check_keys(j.at("train"), "train",
               {"learning_rate", "max_epochs", "early_stop_patience", "seed", "optimizer", "batch_size",
                "validation_fraction"});
    json t = j.at("train");
    if (!t.contains("seed")) t["seed"] = c.seed;
    c.train = section("train", [&] { return nn::TrainConfig::from_json(t); });
  }
  if (j.contains("methods")) {
    c.methods = section("methods", [&] {
      std::vector<attribution::Method> methods;
      for (const auto& name : j.at("methods")) methods.push_back(attribution::method_from_string(name.get<std::string>()));
      return methods;
    });
  }
  if (j.contains("attribution"))
    c.attribution = section("attribution", [&] { return attribution::AttributionSettings::from_json(j.at("attribution")); });
  if (j.contains("execution"))
    c.attribution.execution =
        section("execution", [&] { return execution_from_string(j.at("execution").get<std::string>().c_str()); });
  if (j.contains("metrics")) c.metrics = parse_metrics(j.at("metrics"));
  c.output_dir = section("output_dir", [&] { return fs::path(j.value("output_dir", std::string("out"))); });
  c.threads = section("threads", [&] { return j.value("threads", 0); });
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config file not found: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j, fs::absolute(path).parent_path());
}

json ExperimentConfig::to_json() const {
  std::vector<std::string> method_names;
  for (auto m : methods) method_names.emplace_back(attribution::to_string(m));
  return {{"seed", seed},
          {"dataset", dataset_json(dataset)},
          {"split_ratio", split_ratio},
          {"architecture", architecture.to_json()},
          {"train", train.to_json()},
          {"methods", method_names},
          {"attribution", attribution.to_json()},
          {"execution", to_string(attribution.execution)},
          {"metrics", metrics_json(metrics)},
          {"output_dir", output_dir.string()},
          {"threads", threads}};
}

void ExperimentConfig::validate() const {
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ConfigError("split_ratio must lie in (0, 1)");
  if (methods.empty()) throw ConfigError("methods must list at least one of ig, lrp, deeplift");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (!dataset.synthetic) {
    if (!fs::is_regular_file(dataset.csv)) throw ConfigError("dataset.csv: file not found: " + dataset.csv.string());
    if (!dataset.test_csv.empty() && !fs::is_regular_file(dataset.test_csv))
      throw ConfigError("dataset.test_csv: file not found: " + dataset.test_csv.string());
  }
  if (metrics.stability.n_runs < 2) throw ConfigError("metrics.stability.n_runs must be >= 2");
  if (metrics.stability.top_k < 1) throw ConfigError("metrics.stability.top_k must be >= 1");
  if (metrics.efficiency.counts.empty()) throw ConfigError("metrics.efficiency.counts must not be empty");
  if (metrics.efficiency.repeats < 1) throw ConfigError("metrics.efficiency.repeats must be >= 1");
  if (metrics.robustness.trials < 1) throw ConfigError("metrics.robustness.trials must be >= 1");
  if (metrics.completeness.batch_per_class < 1) throw ConfigError("metrics.completeness.batch_per_class must be >= 1");
  if (metrics.completeness.max_features < 1) throw ConfigError("metrics.completeness.max_features must be >= 1");
  section("metrics.completeness.step", [&] { return metrics::sweep_grid(metrics.completeness.step); });
}

}  // namespace xaieval::experiment
