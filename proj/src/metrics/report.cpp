#include "xaieval/metrics/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "xaieval/core/error.hpp"

namespace xaieval::metrics {

namespace {

constexpr const char* kMetricNames[] = {"descriptive_accuracy", "sparsity",   "efficiency",
                                        "stability",            "robustness", "completeness"};

template <typename T>
T required(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw DecodeError(std::string("report is missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("report field '") + key + "': " + e.what());
  }
}

std::string curve_csv(const nlohmann::json& points, const char* x_key, const char* y_key) {
  std::ostringstream out;
  out << x_key << ',' << y_key << '\n';
  for (const auto& p : points)
    out << format_number(p.at(x_key).get<double>()) << ',' << format_number(p.at(y_key).get<double>())
        << '\n';
  return out.str();
}

}  // namespace

const char* to_string(Metric metric) { return kMetricNames[static_cast<int>(metric)]; }

Metric metric_from_string(const std::string& name) {
  for (Metric m : kAllMetrics)
    if (name == to_string(m)) return m;
  throw InvalidArgument("unknown metric '" + name +
                        "' (expected descriptive_accuracy, sparsity, efficiency, stability, "
                        "robustness or completeness)");
}

const char* tool_version() { return "0.1.0"; }

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["tool_version"] = tool_version();
  j["metric"] = to_string(metric);
  j["method"] = attribution::to_string(method);
  j["dataset_id"] = dataset_id;
  j["seed"] = seed;
  j["config"] = config;
  j["payload"] = payload;
  j["measurements"] = measurements;
  return j;
}

MetricReport MetricReport::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DecodeError("report must be a JSON object");
  const int version = required<int>(j, "schema_version");
  if (version != kReportSchemaVersion)
    throw DecodeError("report schema_version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kReportSchemaVersion) + ")");
  MetricReport r;
  try {
    r.metric = metric_from_string(required<std::string>(j, "metric"));
    r.method = attribution::method_from_string(required<std::string>(j, "method"));
  } catch (const InvalidArgument& e) {
    throw DecodeError(e.what());
  }
  r.dataset_id = required<std::string>(j, "dataset_id");
  r.seed = required<std::uint64_t>(j, "seed");
  r.config = required<nlohmann::json>(j, "config");
  r.payload = required<nlohmann::json>(j, "payload");
  r.measurements = j.value("measurements", nlohmann::json::object());
  return r;
}

std::string MetricReport::file_stem() const {
  return std::string(to_string(metric)) + "_" + attribution::to_string(method);
}

void write_report(const MetricReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << report.to_json().dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

MetricReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot read report " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
  return MetricReport::from_json(j);
}

std::vector<std::pair<std::string, std::string>> report_csvs(const MetricReport& report) {
  const auto& p = report.payload;
  std::vector<std::pair<std::string, std::string>> out;
  try {
    switch (report.metric) {
      case Metric::DescriptiveAccuracy:
        out.emplace_back("", curve_csv(p.at("points"), "k", "accuracy"));
        break;
      case Metric::Sparsity:
        out.emplace_back("", curve_csv(p.at("points"), "threshold", "sparsity"));
        break;
      case Metric::Efficiency: {
        std::ostringstream csv;
        csv << "samples,median_seconds\n";
        for (const auto& row : report.measurements.at("rows"))
          csv << row.at("samples").get<std::size_t>() << ','
              << format_number(row.at("median_seconds").get<double>()) << '\n';
        out.emplace_back("", csv.str());
        break;
      }
      case Metric::Stability: {
        std::ostringstream csv;
        csv << "run,rank,feature\n";
        std::size_t run = 0;
        for (const auto& top : p.at("runs")) {
          std::size_t rank = 1;
          for (const auto& name : top) csv << run << ',' << rank++ << ',' << name.get<std::string>() << '\n';
          ++run;
        }
        out.emplace_back("", csv.str());
        break;
      }
      case Metric::Robustness: {
        std::ostringstream csv;
        csv << "model,rank,feature_category,percentage\n";
        for (const char* model : {"biased", "adversarial"})
          for (const auto& share : p.at(model).at("ranks"))
            for (const char* cat : {"biased", "unrelated", "other"})
              csv << model << ',' << share.at("rank").get<std::size_t>() << ',' << cat << ','
                  << format_number(share.at(cat).get<double>()) << '\n';
        out.emplace_back("", csv.str());
        break;
      }
      case Metric::Completeness: {
        std::ostringstream classes;
        classes << "class,total,changed,percent\n";
        for (const auto& c : p.at("per_class"))
          classes << c.at("class").get<std::string>() << ',' << c.at("total").get<std::size_t>() << ','
                  << c.at("changed").get<std::size_t>() << ','
                  << format_number(c.at("percent").get<double>()) << '\n';
        out.emplace_back("", classes.str());
        out.emplace_back("curve", curve_csv(p.at("curve"), "step", "remaining"));
        break;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("malformed ") + to_string(report.metric) + " payload: " + e.what());
  }
  return out;
}

}  // namespace xaieval::metrics
