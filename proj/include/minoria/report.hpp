#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "minoria/dataset.hpp"
#include "minoria/dual.hpp"
#include "minoria/kmeans.hpp"
#include "minoria/mining.hpp"

namespace minoria {

struct Metrics {
  double accuracy = 0.0;
  double f1 = 0.0;
};

// Accuracy and F1 of prediction vs label over the given row subset.
// Binary tasks (at most two distinct label/prediction values in the
// dataset) use positive_class; tasks with more classes use the
// macro-averaged F1 and ignore positive_class. The subset must be
// non-empty and the columns present.
Metrics metrics(const Dataset& ds, const std::vector<int>& subset,
                int positive_class = 1);

struct TailReport {
  double percentile = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
  std::optional<double> group_ratio;
  std::size_t tail_size = 0;
};

struct ReportOptions {
  int positive_class = 1;
  int minority_group = 1;
  RatioMode ratio_mode = RatioMode::kMinorOverMajor;
};

// Metric rows for nested p-tails of one direction, sorted by descending
// percentile (percentile 1 = the whole dataset). group_ratio is filled
// when the dataset has a group column.
std::vector<TailReport> tail_report(const Dataset& ds, const Direction& f,
                                    std::vector<double> percentiles,
                                    const ReportOptions& opts = {});

// Header "percentile,accuracy,f1,group_ratio,tail_size"; group_ratio cell
// left empty when absent.
void write_report_csv(const std::vector<TailReport>& rows, std::ostream& out);

// JSON result document: a provenance object (heuristic, seed, applied
// transforms, parameters) plus one entry per candidate with fields
// {heuristic, direction, skew, tail_indices, tail_size, disparity,
// accepted, metrics{accuracy, f1, group_ratio?}}. metrics is present only
// when the dataset carries labels and predictions. The document re-emits
// byte-identically after a parse round trip.
std::string candidates_to_json(const std::vector<MiningCandidate>& candidates,
                               const Dataset& ds, const std::string& provenance_json,
                               const ReportOptions& opts = {});

// Parses candidates_to_json output back into candidates (direction, skew,
// tail, disparity, accepted, heuristic).
std::vector<MiningCandidate> candidates_from_json(const std::string& text);

}  // namespace minoria
