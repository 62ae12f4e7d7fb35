#include "xaieval/experiment/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "xaieval/core/error.hpp"

namespace xaieval::experiment {

using metrics::Metric;
using metrics::MetricReport;
using nlohmann::json;

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string seconds(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string method_name(const MetricReport& r) { return attribution::to_string(r.method); }

std::string column(const MetricReport& r) { return r.dataset_id + " / " + method_name(r); }

void table(std::ostringstream& md, const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows) {
  md << '|';
  for (const auto& h : header) md << ' ' << h << " |";
  md << "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) md << (i == 0 ? "---|" : "---:|");
  md << '\n';
  for (const auto& row : rows) {
    md << '|';
    for (const auto& cell : row) md << ' ' << cell << " |";
    md << '\n';
  }
  md << '\n';
}

// x-value -> label -> y-value table, x in first-seen numeric order.
void curve_table(std::ostringstream& md, const std::vector<const MetricReport*>& reports, const char* x_name,
                 const char* x_key, const char* y_key, int digits) {
  std::vector<std::string> header = {x_name};
  std::map<double, std::vector<std::string>> rows;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    header.push_back(column(*reports[i]));
    for (const auto& p : reports[i]->payload.at("points")) {
      auto& row = rows[p.at(x_key).get<double>()];
      row.resize(reports.size(), "");
      row[i] = fixed(p.at(y_key).get<double>(), digits);
    }
  }
  std::vector<std::vector<std::string>> body;
  for (auto& [x, cells] : rows) {
    cells.resize(reports.size(), "");
    std::vector<std::string> row = {metrics::format_number(x)};
    row.insert(row.end(), cells.begin(), cells.end());
    body.push_back(std::move(row));
  }
  table(md, header, body);
}

}  // namespace

double method_score(const MetricReport& r, bool* higher_is_better) {
  const auto& p = r.payload;
  *higher_is_better = true;
  switch (r.metric) {
    case Metric::DescriptiveAccuracy: {
      *higher_is_better = false;
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& pt : p.at("points"))
        if (pt.at("k").get<std::size_t>() > 0) {
          sum += pt.at("accuracy").get<double>();
          ++n;
        }
      return n ? sum / static_cast<double>(n) : std::nan("");
    }
    case Metric::Sparsity: {
      double sum = 0.0;
      for (const auto& pt : p.at("points")) sum += pt.at("sparsity").get<double>();
      return sum / static_cast<double>(p.at("points").size());
    }
    case Metric::Efficiency: {
      *higher_is_better = false;
      const auto& rows = r.measurements.at("rows");
      return rows.back().at("median_seconds").get<double>();
    }
    case Metric::Stability:
      return p.at("score").get<double>();
    case Metric::Robustness: {
      const auto& adv = p.at("adversarial");
      return adv.at("ranks").at(0).at("biased").get<double>() - adv.at("unrelated_in_top").get<double>();
    }
    case Metric::Completeness:
      return p.at("overall_percent").get<double>();
  }
  return std::nan("");
}

std::vector<RenderedFile> render(const std::vector<MetricReport>& reports) {
  if (reports.empty()) throw InvalidArgument("render needs at least one report");
  std::vector<RenderedFile> files;
  std::map<Metric, std::vector<const MetricReport*>> by_metric;
  std::set<std::string> datasets;
  for (const auto& r : reports) {
    for (auto& [suffix, csv] : metrics::report_csvs(r))
      files.push_back({r.dataset_id + "/" + r.file_stem() + (suffix.empty() ? "" : "_" + suffix) + ".csv", csv});
    by_metric[r.metric].push_back(&r);
    datasets.insert(r.dataset_id);
  }

  std::ostringstream md;
  md << "# Evaluation summary\n\n";
  md << "Tool version " << metrics::tool_version() << ", " << reports.size() << " report(s).\n\n";
  try {
    for (auto& [metric, group] : by_metric) {
      std::stable_sort(group.begin(), group.end(), [](const MetricReport* a, const MetricReport* b) {
        return std::make_pair(a->dataset_id, a->method) < std::make_pair(b->dataset_id, b->method);
      });
      std::ostringstream csv;
      switch (metric) {
        case Metric::DescriptiveAccuracy: {
          md << "## Descriptive accuracy\n\nTest accuracy after removing the top-k features.\n\n";
          curve_table(md, group, "k", "k", "accuracy", 3);
          csv << "dataset,method,k,accuracy\n";
          for (const auto* r : group)
            for (const auto& p : r->payload.at("points"))
              csv << r->dataset_id << ',' << method_name(*r) << ',' << p.at("k").get<std::size_t>() << ','
                  << metrics::format_number(p.at("accuracy").get<double>()) << '\n';
          break;
        }
        case Metric::Sparsity: {
          md << "## Sparsity\n\nFraction of features with normalized score at or below the threshold.\n\n";
          curve_table(md, group, "threshold", "threshold", "sparsity", 3);
          csv << "dataset,method,threshold,sparsity\n";
          for (const auto* r : group)
            for (const auto& p : r->payload.at("points"))
              csv << r->dataset_id << ',' << method_name(*r) << ','
                  << metrics::format_number(p.at("threshold").get<double>()) << ','
                  << metrics::format_number(p.at("sparsity").get<double>()) << '\n';
          break;
        }
        case Metric::Efficiency: {
          md << "## Efficiency\n\nMedian seconds to explain the given number of samples.\n\n";
          std::vector<std::string> header = {"Samples"};
          std::vector<std::vector<std::string>> body;
          for (std::size_t i = 0; i < group.size(); ++i) {
            header.push_back(column(*group[i]));
            const auto& labels = group[i]->payload.at("rows");
            const auto& rows = group[i]->measurements.at("rows");
            for (std::size_t k = 0; k < rows.size(); ++k) {
              if (body.size() <= k) body.push_back({labels.at(k).at("label").get<std::string>()});
              body[k].resize(i + 1, "");
              body[k].push_back(seconds(rows.at(k).at("median_seconds").get<double>()));
            }
          }
          for (auto& row : body) row.resize(header.size(), "");
          table(md, header, body);
          csv << "dataset,method,samples,with_replacement,median_seconds\n";
          for (const auto* r : group)
            for (std::size_t k = 0; k < r->measurements.at("rows").size(); ++k)
              csv << r->dataset_id << ',' << method_name(*r) << ','
                  << r->payload.at("rows").at(k).at("samples").get<std::size_t>() << ','
                  << (r->payload.at("rows").at(k).at("with_replacement").get<bool>() ? "true" : "false") << ','
                  << metrics::format_number(r->measurements.at("rows").at(k).at("median_seconds").get<double>())
                  << '\n';
          break;
        }
        case Metric::Stability: {
          md << "## Stability\n\nShare of top-k features common to every run.\n\n";
          std::vector<std::string> header = {"Method"};
          std::map<std::string, std::size_t> col;
          for (const auto& ds : datasets) {
            col[ds] = header.size();
            header.push_back(ds);
          }
          std::map<std::string, std::vector<std::string>> rows;
          for (const auto* r : group) {
            auto& row = rows[method_name(*r)];
            row.resize(header.size(), "");
            row[0] = method_name(*r);
            row[col[r->dataset_id]] = fixed(r->payload.at("score").get<double>(), 2) + " (" +
                                      r->payload.at("scope").get<std::string>() + ", k=" +
                                      std::to_string(r->payload.at("top_k").get<std::size_t>()) + ")";
          }
          std::vector<std::vector<std::string>> body;
          for (auto& [name, row] : rows) body.push_back(row);
          table(md, header, body);
          csv << "dataset,method,scope,mode,top_k,score\n";
          for (const auto* r : group)
            csv << r->dataset_id << ',' << method_name(*r) << ',' << r->payload.at("scope").get<std::string>()
                << ',' << r->payload.at("mode").get<std::string>() << ','
                << r->payload.at("top_k").get<std::size_t>() << ','
                << metrics::format_number(r->payload.at("score").get<double>()) << '\n';
          break;
        }
        case Metric::Robustness: {
          md << "## Robustness\n\nPercent of trials by feature category at each attribution rank.\n\n";
          std::vector<std::vector<std::string>> body;
          csv << "dataset,method,model,rank,feature_category,percentage\n";
          for (const auto* r : group)
            for (const char* model : {"biased", "adversarial"})
              for (const auto& s : r->payload.at(model).at("ranks")) {
                const auto rank = s.at("rank").get<std::size_t>();
                body.push_back({r->dataset_id, method_name(*r), model, std::to_string(rank),
                                fixed(s.at("biased").get<double>(), 1), fixed(s.at("unrelated").get<double>(), 1),
                                fixed(s.at("other").get<double>(), 1)});
                for (const char* cat : {"biased", "unrelated", "other"})
                  csv << r->dataset_id << ',' << method_name(*r) << ',' << model << ',' << rank << ',' << cat
                      << ',' << metrics::format_number(s.at(cat).get<double>()) << '\n';
              }
          table(md, {"Dataset", "Method", "Model", "Rank", "Biased %", "Unrelated %", "Other %"}, body);
          break;
        }
        case Metric::Completeness: {
          md << "## Completeness\n\nPercent of samples whose prediction changed under top-feature perturbation.\n\n";
          std::vector<std::string> header = {"Class"};
          std::vector<std::string> class_order;
          std::map<std::string, std::vector<std::string>> rows;
          for (std::size_t i = 0; i < group.size(); ++i) {
            header.push_back(column(*group[i]));
            for (const auto& c : group[i]->payload.at("per_class")) {
              const auto name = c.at("class").get<std::string>();
              if (!rows.count(name)) class_order.push_back(name);
              auto& row = rows[name];
              row.resize(group.size(), "");
              row[i] = fixed(c.at("percent").get<double>(), 1);
            }
          }
          std::vector<std::vector<std::string>> body;
          for (const auto& name : class_order) {
            auto cells = rows[name];
            cells.resize(group.size(), "");
            std::vector<std::string> row = {name};
            row.insert(row.end(), cells.begin(), cells.end());
            body.push_back(std::move(row));
          }
          table(md, header, body);
          csv << "dataset,method,class,total,changed,percent\n";
          std::ostringstream curve;
          curve << "dataset,method,step,remaining\n";
          for (const auto* r : group) {
            for (const auto& c : r->payload.at("per_class"))
              csv << r->dataset_id << ',' << method_name(*r) << ',' << c.at("class").get<std::string>() << ','
                  << c.at("total").get<std::size_t>() << ',' << c.at("changed").get<std::size_t>() << ','
                  << metrics::format_number(c.at("percent").get<double>()) << '\n';
            for (const auto& p : r->payload.at("curve"))
              curve << r->dataset_id << ',' << method_name(*r) << ',' << p.at("step").get<std::size_t>() << ','
                    << metrics::format_number(p.at("remaining").get<double>()) << '\n';
          }
          files.push_back({"completeness_curve.csv", curve.str()});
          break;
        }
      }
      files.push_back({std::string(metrics::to_string(metric)) + ".csv", csv.str()});
    }

    md << "## Best method per metric\n\n";
    std::vector<std::string> header = {"Metric"};
    std::vector<std::pair<std::string, attribution::Method>> cols;
    for (const auto& ds : datasets)
      for (auto m : attribution::kAllMethods) {
        cols.emplace_back(ds, m);
        header.push_back(ds + " / " + attribution::to_string(m));
      }
    std::vector<std::vector<std::string>> body;
    for (const auto& [metric, group] : by_metric) {
      std::vector<std::string> row(header.size(), "");
      row[0] = metrics::to_string(metric);
      for (const auto& ds : datasets) {
        std::vector<std::pair<double, attribution::Method>> scored;
        bool higher = true;
        for (const auto* r : group)
          if (r->dataset_id == ds) {
            const double s = method_score(*r, &higher);
            if (!std::isnan(s)) scored.emplace_back(higher ? s : -s, r->method);
          }
        if (scored.empty()) continue;
        double best = scored.front().first;
        for (const auto& [s, m] : scored) best = std::max(best, s);
        for (const auto& [s, m] : scored) {
          const auto at = std::find(cols.begin(), cols.end(), std::make_pair(ds, m)) - cols.begin();
          row[static_cast<std::size_t>(at) + 1] = s >= best - 1e-12 ? "✓" : "";
        }
      }
      body.push_back(std::move(row));
    }
    table(md, header, body);
  } catch (const json::exception& e) {
    throw DecodeError(std::string("malformed report payload: ") + e.what());
  }
  files.push_back({"summary.md", md.str()});
  return files;
}

}  // namespace xaieval::experiment
