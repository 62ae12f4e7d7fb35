#pragma once

#include <string>
#include <utility>
#include <vector>

#include "xaieval/metrics/report.hpp"

namespace xaieval::experiment {

// A rendered file: path relative to the output directory plus contents.
struct RenderedFile {
  std::string path;
  std::string content;
};

// Plot-ready tables for a set of reports:
//   <dataset>/<metric>_<method>[_suffix].csv  same bytes as eval writes
//   <metric>.csv                              long form across datasets/methods
//   summary.md                                per-metric tables and best-method marks
// Throws InvalidArgument on an empty report set.
std::vector<RenderedFile> render(const std::vector<metrics::MetricReport>& reports);

// Best method per metric for one dataset; ties share the mark.
// Descriptive accuracy: lowest mean accuracy over k > 0 (steepest drop).
// Sparsity: highest mean sparsity over thresholds.
// Efficiency: lowest median time at the largest count.
// Stability: highest score.
// Robustness: highest adversarial rank-1 biased share minus unrelated top-n share.
// Completeness: highest overall percentage.
double method_score(const metrics::MetricReport& report, bool* higher_is_better);

}  // namespace xaieval::experiment
