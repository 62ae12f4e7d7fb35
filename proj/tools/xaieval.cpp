// xaieval: train models, explain them and evaluate the explanations.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include "xaieval/attribution/ranking.hpp"
#include "xaieval/core/error.hpp"
#include "xaieval/core/random.hpp"
#include "xaieval/data/synth.hpp"
#include "xaieval/experiment/config.hpp"
#include "xaieval/experiment/experiment.hpp"
#include "xaieval/experiment/render.hpp"
#include "xaieval/metrics/report.hpp"
#include "xaieval/nn/model_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace xaieval;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

// Configuration problems detected before any output is produced.
struct UsageError : Error {
  using Error::Error;
};

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> methods;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config = true) {
  auto* opt = cmd->add_option("-c,--config", c.config, "Experiment config (JSON)");
  if (needs_config) opt->required();
  cmd->add_option("--seed", c.seed, "Override the master seed");
  cmd->add_option("--out", c.out, "Output directory (overrides output_dir)");
  cmd->add_option("--method", c.methods, "Attribution method: ig, lrp or deeplift (repeatable)");
}

experiment::ExperimentConfig load_config(const Common& c) {
  std::ifstream in(c.config);
  if (!in) throw UsageError("config file not found: " + c.config);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw UsageError(c.config + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError(c.config + ": config must be a JSON object");
  if (c.seed) j["seed"] = *c.seed;
  if (!c.out.empty()) j["output_dir"] = c.out;
  if (!c.methods.empty()) j["methods"] = c.methods;
  try {
    return experiment::ExperimentConfig::from_json(j, fs::absolute(c.config).parent_path());
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

// Keeps generated names inside the output directory.
std::string safe_name(const std::string& s) {
  std::string out;
  for (char ch : s) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.') ? ch : '_';
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

void write_text(const fs::path& dir, const std::string& rel, const std::string& content) {
  const fs::path path = dir / rel;
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

json artifact_header(experiment::Experiment& ex) {
  return {{"tool_version", metrics::tool_version()},
          {"seed", ex.config().seed},
          {"dataset_id", ex.data().dataset_id},
          {"config", ex.snapshot()}};
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string num(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string out = "data";
  std::uint64_t seed = 0;
  std::string kind = "synthetic";
  std::string rule = "threshold";
  std::size_t n = 1000, d = 10, classes = 2, rows = 10000;
  std::string name;
};

int cmd_synth(const SynthArgs& a) {
  if (a.kind == "nslkdd") {
    if (a.rows < 10) throw UsageError("--rows must be at least 10");
    const std::string stem = a.name.empty() ? "nslkdd_like" : safe_name(a.name);
    const fs::path dir(a.out);
    fs::create_directories(dir);
    data::write_nslkdd_like_csv(dir / (stem + ".csv"), a.rows, a.seed);
    write_text(dir, stem + ".schema.json", data::nslkdd_schema(false).to_json().dump(2) + "\n");
    std::cout << "wrote " << (dir / (stem + ".csv")).string() << " (" << a.rows << " rows) and schema\n";
    return kOk;
  }
  if (a.kind != "synthetic") throw UsageError("--kind must be synthetic or nslkdd");
  data::SyntheticSpec spec;
  try {
    spec.n = a.n;
    spec.d = a.d;
    spec.num_classes = a.classes;
    spec.rule = data::synthetic_rule_from_string(a.rule);
    if (spec.rule == data::SyntheticRule::Linear) spec.weights.assign(spec.d, 1.0);
    spec.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto ds = data::synthesize(spec, a.seed);
  const std::string stem = a.name.empty() ? "synthetic_" + a.rule : safe_name(a.name);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  data::write_csv(ds, dir / (stem + ".csv"));
  json schema = {{"label_column", "label"}, {"class_names", ds.class_names}};
  write_text(dir, stem + ".schema.json", schema.dump(2) + "\n");
  write_text(dir, stem + ".spec.json",
             json{{"tool_version", metrics::tool_version()}, {"seed", a.seed}, {"spec", spec.to_json()}}.dump(2) + "\n");
  std::cout << "wrote " << (dir / (stem + ".csv")).string() << " (" << ds.rows() << " rows, " << ds.cols()
            << " features)\n";
  return kOk;
}

// ---- train ---------------------------------------------------------------

int cmd_train(const Common& c) {
  experiment::Experiment ex(load_config(c));
  const auto& net = ex.model();
  const auto& report = ex.train_report();
  json j = artifact_header(ex);
  j["ingest"] = ex.data().ingest.to_json();
  j["train_rows"] = ex.data().train.rows();
  j["test_rows"] = ex.data().test.rows();
  j["training"] = report.to_json();
  j["test_accuracy"] = nn::accuracy(net, ex.data().test);
  const fs::path dir = ex.config().output_dir;
  fs::create_directories(dir);
  nn::save_model(net, dir / "model.txt");
  write_text(dir, "train_report.json", j.dump(2) + "\n");
  std::cout << "dataset " << ex.data().dataset_id << ": " << ex.data().train.rows() << " train / "
            << ex.data().test.rows() << " test rows, " << ex.data().train.cols() << " features\n"
            << "epochs " << report.epochs_run << " (best " << report.best_epoch << ")"
            << ", train accuracy " << num(report.final_train_accuracy, "%.4f") << ", validation accuracy "
            << num(report.final_validation_accuracy, "%.4f") << ", test accuracy "
            << num(j["test_accuracy"].get<double>(), "%.4f") << "\n"
            << "wrote " << (dir / "model.txt").string() << "\n";
  return kOk;
}

// ---- explain -------------------------------------------------------------

struct ExplainArgs {
  std::string model;
  std::optional<std::size_t> instance;
  bool global = false;
};

int cmd_explain(const Common& c, const ExplainArgs& a) {
  auto cfg = load_config(c);
  if (a.instance.has_value() == a.global) throw UsageError("give exactly one of --instance ID or --global");
  if (!a.model.empty() && !fs::is_regular_file(a.model)) throw UsageError("model file not found: " + a.model);
  const auto method = cfg.methods.front();
  experiment::Experiment ex(cfg);
  if (!a.model.empty()) ex.set_model(nn::load_model(a.model));
  const auto& test = ex.data().test;
  json j = artifact_header(ex);
  j["method"] = attribution::to_string(method);
  j["params"] = ex.params().to_json();
  std::string file;
  std::vector<std::tuple<std::string, double, double>> top;
  if (a.global) {
    const auto& ranking = ex.ranking(method);
    j["ranking"] = ranking.to_json();
    for (std::size_t i = 0; i < std::min<std::size_t>(10, ranking.entries.size()); ++i)
      top.emplace_back(ranking.entries[i].feature, ranking.entries[i].raw, ranking.entries[i].normalized);
    file = std::string("explain_") + attribution::to_string(method) + "_global.json";
    std::cout << "global " << attribution::to_string(method) << " ranking over " << ranking.n_samples_aggregated
              << " test samples\n";
  } else {
    if (*a.instance >= test.rows())
      throw UsageError("unknown instance " + std::to_string(*a.instance) + " (test split has " +
                       std::to_string(test.rows()) + " rows)");
    const auto x = test.row(*a.instance);
    const auto target = ex.config().attribution.target == attribution::TargetPolicy::Predicted
                            ? nn::predict(ex.model(), x)
                            : test.labels[*a.instance];
    auto attr = attribution::explain(ex.model(), x, target, method, ex.params());
    attr.instance_id = std::to_string(*a.instance);
    j["attribution"] = attr.to_json(test.feature_names);
    j["true_class"] = test.class_names[test.labels[*a.instance]];
    j["target_class_name"] = test.class_names[target];
    for (std::size_t idx : attribution::rank_by_magnitude(attr.scores)) {
      if (top.size() == 10) break;
      top.emplace_back(test.feature_names[idx], attr.scores[idx], std::abs(attr.scores[idx]));
    }
    file = std::string("explain_") + attribution::to_string(method) + "_instance" + std::to_string(*a.instance) + ".json";
    std::cout << "instance " << *a.instance << " (true " << test.class_names[test.labels[*a.instance]]
              << ", explained class " << test.class_names[target] << "), residual " << num(attr.residual, "%.3g")
              << "\n";
  }
  std::cout << pad("rank", 6) << pad("feature", 32) << pad("score", 16) << (a.global ? "normalized" : "|score|") << "\n";
  for (std::size_t i = 0; i < top.size(); ++i)
    std::cout << pad(std::to_string(i + 1), 6) << pad(std::get<0>(top[i]), 32) << pad(num(std::get<1>(top[i])), 16)
              << num(std::get<2>(top[i]), "%.4f") << "\n";
  write_text(ex.config().output_dir, file, j.dump(2) + "\n");
  std::cout << "wrote " << (ex.config().output_dir / file).string() << "\n";
  return kOk;
}

// ---- eval ----------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> metrics;
  bool confirm_large = false;
};

constexpr std::size_t kLargeRows = 200000;

std::size_t count_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  return lines;
}

int cmd_eval(const Common& c, const EvalArgs& a) {
  auto cfg = load_config(c);
  std::vector<metrics::Metric> selected;
  try {
    for (const auto& name : a.metrics) {
      if (name == "all") {
        selected.assign(metrics::kAllMetrics.begin(), metrics::kAllMetrics.end());
        continue;
      }
      const auto m = metrics::metric_from_string(name);
      if (std::find(selected.begin(), selected.end(), m) == selected.end()) selected.push_back(m);
    }
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (selected.empty()) throw UsageError("name at least one metric (or 'all')");
  std::sort(selected.begin(), selected.end());

  if (!cfg.dataset.synthetic) {
    std::size_t rows = count_lines(cfg.dataset.csv);
    if (cfg.dataset.max_rows) rows = std::min(rows, cfg.dataset.max_rows);
    const std::size_t runs = selected.size() * cfg.methods.size();
    const std::size_t fits = 1 + (std::count(selected.begin(), selected.end(), metrics::Metric::DescriptiveAccuracy)
                                      ? cfg.methods.size() * 6
                                      : 0) +
                             (std::count(selected.begin(), selected.end(), metrics::Metric::Robustness)
                                  ? cfg.methods.size() * 2
                                  : 0);
    std::cout << "estimated cost: " << rows << " rows, " << runs << " metric runs, about " << fits
              << " model fits of up to " << cfg.train.max_epochs << " epochs\n";
    if (rows > kLargeRows && !a.confirm_large)
      throw UsageError("dataset has more than " + std::to_string(kLargeRows) +
                       " rows; rerun with --confirm-large or set dataset.max_rows");
  }

  experiment::Experiment ex(cfg);
  ex.data();
  const fs::path dir = ex.config().output_dir;
  std::size_t failures = 0;
  std::vector<std::string> summary;
  for (auto metric : selected)
    for (auto method : cfg.methods) {
      const std::string label = std::string(metrics::to_string(metric)) + "/" + attribution::to_string(method);
      try {
        const auto report = ex.run(metric, method);
        fs::create_directories(dir);
        metrics::write_report(report, dir / (report.file_stem() + ".json"));
        for (const auto& [suffix, csv] : metrics::report_csvs(report))
          write_text(dir, report.file_stem() + (suffix.empty() ? "" : "_" + suffix) + ".csv", csv);
        summary.push_back("ok      " + label);
        std::cout << "ok      " << label << "\n" << std::flush;
      } catch (const std::exception& e) {
        ++failures;
        summary.push_back("FAILED  " + label + ": " + e.what());
        std::cout << "FAILED  " << label << ": " << e.what() << "\n" << std::flush;
      }
    }
  std::cout << (summary.size() - failures) << " of " << summary.size() << " metric runs completed";
  if (failures) {
    std::cout << "; failures:\n";
    for (const auto& s : summary)
      if (s.rfind("FAILED", 0) == 0) std::cout << "  " << s << "\n";
  } else {
    std::cout << "\n";
  }
  return failures ? kRuntime : kOk;
}

// ---- render --------------------------------------------------------------

int cmd_render(const std::vector<std::string>& inputs, const std::string& out) {
  if (out.empty()) throw UsageError("render needs --out DIR");
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(in)) {
        const auto name = entry.path().filename().string();
        if (entry.path().extension() != ".json") continue;
        for (auto m : metrics::kAllMetrics)
          if (name.rfind(std::string(metrics::to_string(m)) + "_", 0) == 0) {
            found.push_back(entry.path());
            break;
          }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(in)) {
      files.emplace_back(in);
    } else {
      throw UsageError("no such report file or directory: " + in);
    }
  }
  if (files.empty()) throw UsageError("no reports to render");
  std::vector<metrics::MetricReport> reports;
  for (const auto& f : files) {
    try {
      reports.push_back(metrics::read_report(f));
    } catch (const DecodeError& e) {
      throw UsageError(e.what());
    }
    reports.back().dataset_id = safe_name(reports.back().dataset_id);
  }
  const auto rendered = experiment::render(reports);
  for (const auto& file : rendered) write_text(out, file.path, file.content);
  std::cout << "rendered " << reports.size() << " report(s) into " << rendered.size() << " file(s) under " << out
            << "\n";
  return kOk;
}

// ---- replay --------------------------------------------------------------

int cmd_replay(const std::string& path, const std::string& out) {
  metrics::MetricReport report;
  try {
    report = metrics::read_report(path);
  } catch (const DecodeError& e) {
    throw UsageError(e.what());
  }
  experiment::ReplayResult result;
  try {
    result = experiment::replay(report);
  } catch (const ConfigError& e) {
    throw UsageError(std::string("embedded config: ") + e.what());
  }
  if (!out.empty()) {
    fs::create_directories(out);
    metrics::write_report(result.replayed, fs::path(out) / (result.replayed.file_stem() + ".json"));
  }
  std::cout << (result.identical ? "identical" : "DIFFERENT") << ": " << result.original.file_stem() << " on "
            << result.original.dataset_id << " (seed " << result.original.seed << ")\n";
  return result.identical ? kOk : kRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train neural network models, explain them with IG, LRP and DeepLift, and score the explanations."};
  app.require_subcommand(1);
  app.set_version_flag("--version", metrics::tool_version());

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic or NSL-KDD-shaped dataset CSV");
  synth_cmd->add_option("--out", synth.out, "Output directory")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--kind", synth.kind, "synthetic or nslkdd")->capture_default_str();
  synth_cmd->add_option("--rule", synth.rule, "threshold, linear or xor")->capture_default_str();
  synth_cmd->add_option("--n", synth.n, "Rows (synthetic)")->capture_default_str();
  synth_cmd->add_option("--d", synth.d, "Features (synthetic)")->capture_default_str();
  synth_cmd->add_option("--classes", synth.classes, "Classes (linear rule)")->capture_default_str();
  synth_cmd->add_option("--rows", synth.rows, "Rows (nslkdd)")->capture_default_str();
  synth_cmd->add_option("--name", synth.name, "File stem");

  Common train;
  auto* train_cmd = app.add_subcommand("train", "Train the configured model and save it");
  add_common(train_cmd, train);

  Common explain;
  ExplainArgs explain_args;
  auto* explain_cmd = app.add_subcommand("explain", "Explain one test instance or the whole model");
  add_common(explain_cmd, explain);
  explain_cmd->add_option("--model", explain_args.model, "Saved model (default: train from the config)");
  explain_cmd->add_option("--instance", explain_args.instance, "Test-split row to explain");
  explain_cmd->add_flag("--global", explain_args.global, "Global ranking over the test split");

  Common eval;
  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Run evaluation metrics and write reports");
  add_common(eval_cmd, eval);
  eval_cmd->add_option("metrics", eval_args.metrics,
                       "descriptive_accuracy, sparsity, efficiency, stability, robustness, completeness or all");
  eval_cmd->add_option("--metric", eval_args.metrics, "Metric to run (repeatable)");
  eval_cmd->add_flag("--confirm-large", eval_args.confirm_large, "Allow runs on very large datasets");

  std::vector<std::string> render_inputs;
  std::string render_out;
  auto* render_cmd = app.add_subcommand("render", "Turn report files into plot CSVs and a Markdown summary");
  render_cmd->add_option("reports", render_inputs, "Report files or directories")->required();
  render_cmd->add_option("--out", render_out, "Output directory")->required();

  std::string replay_report, replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a report from its embedded config and compare payloads");
  replay_cmd->add_option("report", replay_report, "Report file")->required();
  replay_cmd->add_option("--out", replay_out, "Write the replayed report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth);
    if (*train_cmd) return cmd_train(train);
    if (*explain_cmd) return cmd_explain(explain, explain_args);
    if (*eval_cmd) return cmd_eval(eval, eval_args);
    if (*render_cmd) return cmd_render(render_inputs, render_out);
    if (*replay_cmd) return cmd_replay(replay_report, replay_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
