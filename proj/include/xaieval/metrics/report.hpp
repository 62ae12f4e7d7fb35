#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xaieval/attribution/methods.hpp"

namespace xaieval::metrics {

// Listed in evaluation order: descriptive accuracy first, completeness last.
enum class Metric { DescriptiveAccuracy, Sparsity, Efficiency, Stability, Robustness, Completeness };

inline constexpr std::array<Metric, 6> kAllMetrics = {
    Metric::DescriptiveAccuracy, Metric::Sparsity,   Metric::Efficiency,
    Metric::Stability,           Metric::Robustness, Metric::Completeness};

const char* to_string(Metric metric);
Metric metric_from_string(const std::string& name);

inline constexpr int kReportSchemaVersion = 1;
const char* tool_version();

// One metric evaluated for one attribution method. `payload` is fully
// determined by `config` and `seed`; wall-clock data goes to `measurements`
// so replays can compare payloads byte for byte.
struct MetricReport {
  Metric metric = Metric::Sparsity;
  attribution::Method method = attribution::Method::IG;
  std::string dataset_id;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json payload = nlohmann::json::object();
  nlohmann::json measurements = nlohmann::json::object();

  nlohmann::json to_json() const;
  // Throws DecodeError on a schema-version mismatch or missing field.
  static MetricReport from_json(const nlohmann::json& j);

  std::string payload_text() const { return payload.dump(); }
  std::string file_stem() const;
};

void write_report(const MetricReport& report, const std::filesystem::path& path);
MetricReport read_report(const std::filesystem::path& path);

// Plot data derived from a report: (suffix, CSV text) pairs. Curves are two
// columns, robustness is long form. The suffix is empty for the main CSV.
std::vector<std::pair<std::string, std::string>> report_csvs(const MetricReport& report);

// Shortest round-trip decimal form, used in every CSV cell.
std::string format_number(double value);

}  // namespace xaieval::metrics
