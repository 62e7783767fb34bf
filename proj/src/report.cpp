#include "minoria/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace minoria {

namespace {

using ordered_json = nlohmann::ordered_json;

void put_double(std::ostream& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, ptr - buf);
}

double f1_binary(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

double subset_group_ratio(const Dataset& ds, const std::vector<int>& subset,
                          int minority_group, RatioMode mode) {
  std::size_t minority = 0;
  for (int i : subset) {
    if ((*ds.group)[static_cast<std::size_t>(i)] == minority_group) ++minority;
  }
  if (mode == RatioMode::kMinorOverTotal) {
    return subset.empty()
               ? 0.0
               : static_cast<double>(minority) / static_cast<double>(subset.size());
  }
  const std::size_t rest = subset.size() - minority;
  if (rest == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(minority) / static_cast<double>(rest);
}

}  // namespace

Metrics metrics(const Dataset& ds, const std::vector<int>& subset,
                int positive_class) {
  if (!ds.label || !ds.prediction) {
    throw std::runtime_error("metrics: dataset needs label and prediction columns");
  }
  if (subset.empty()) throw std::invalid_argument("metrics: empty subset");
  const std::vector<int>& y = *ds.label;
  const std::vector<int>& yhat = *ds.prediction;
  for (int i : subset) {
    if (i < 0 || static_cast<std::size_t>(i) >= ds.n()) {
      throw std::invalid_argument("metrics: subset index out of range");
    }
  }

  Metrics m;
  std::size_t correct = 0;
  for (int i : subset) {
    if (y[static_cast<std::size_t>(i)] == yhat[static_cast<std::size_t>(i)]) {
      ++correct;
    }
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(subset.size());

  // Class inventory over the whole dataset decides binary vs macro.
  std::set<int> classes(y.begin(), y.end());
  classes.insert(yhat.begin(), yhat.end());

  if (classes.size() <= 2) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (int i : subset) {
      const bool is_pos = y[static_cast<std::size_t>(i)] == positive_class;
      const bool said_pos = yhat[static_cast<std::size_t>(i)] == positive_class;
      if (said_pos && is_pos) ++tp;
      if (said_pos && !is_pos) ++fp;
      if (!said_pos && is_pos) ++fn;
    }
    m.f1 = f1_binary(tp, fp, fn);
    return m;
  }

  // Macro-F1 over the classes that appear in the subset.
  std::set<int> present;
  for (int i : subset) {
    present.insert(y[static_cast<std::size_t>(i)]);
    present.insert(yhat[static_cast<std::size_t>(i)]);
  }
  double sum_f1 = 0.0;
  for (int c : present) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (int i : subset) {
      const bool is_c = y[static_cast<std::size_t>(i)] == c;
      const bool said_c = yhat[static_cast<std::size_t>(i)] == c;
      if (said_c && is_c) ++tp;
      if (said_c && !is_c) ++fp;
      if (!said_c && is_c) ++fn;
    }
    sum_f1 += f1_binary(tp, fp, fn);
  }
  m.f1 = sum_f1 / static_cast<double>(present.size());
  return m;
}

std::vector<TailReport> tail_report(const Dataset& ds, const Direction& f,
                                    std::vector<double> percentiles,
                                    const ReportOptions& opts) {
  if (percentiles.empty()) {
    throw std::invalid_argument("tail_report: no percentiles given");
  }
  for (double p : percentiles) {
    if (!(p > 0.0) || p > 1.0) {
      throw std::invalid_argument("tail_report: percentiles must be in (0, 1]");
    }
  }
  std::sort(percentiles.begin(), percentiles.end(), std::greater<>());
  percentiles.erase(std::unique(percentiles.begin(), percentiles.end()),
                    percentiles.end());

  std::vector<TailReport> rows;
  rows.reserve(percentiles.size());
  for (double p : percentiles) {
    std::vector<int> subset;
    if (p == 1.0) {
      subset.resize(ds.n());
      std::iota(subset.begin(), subset.end(), 0);
    } else {
      subset = p_tail(ds, f, p);
    }
    TailReport row;
    row.percentile = p;
    const Metrics m = metrics(ds, subset, opts.positive_class);
    row.accuracy = m.accuracy;
    row.f1 = m.f1;
    row.tail_size = subset.size();
    if (ds.group) {
      row.group_ratio =
          subset_group_ratio(ds, subset, opts.minority_group, opts.ratio_mode);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_report_csv(const std::vector<TailReport>& rows, std::ostream& out) {
  out << "percentile,accuracy,f1,group_ratio,tail_size\n";
  for (const TailReport& row : rows) {
    put_double(out, row.percentile);
    out << ',';
    put_double(out, row.accuracy);
    out << ',';
    put_double(out, row.f1);
    out << ',';
    if (row.group_ratio) {
      if (std::isinf(*row.group_ratio)) {
        out << "inf";
      } else {
        put_double(out, *row.group_ratio);
      }
    }
    out << ',' << row.tail_size << "\n";
  }
}

std::string candidates_to_json(const std::vector<MiningCandidate>& candidates,
                               const Dataset& ds,
                               const std::string& provenance_json,
                               const ReportOptions& opts) {
  ordered_json doc;
  doc["provenance"] = provenance_json.empty()
                          ? ordered_json::object()
                          : ordered_json::parse(provenance_json);
  doc["candidates"] = ordered_json::array();
  const bool has_metrics = ds.label.has_value() && ds.prediction.has_value();
  for (const MiningCandidate& c : candidates) {
    ordered_json entry;
    entry["heuristic"] = c.heuristic;
    entry["direction"] = std::vector<double>(
        c.direction.vec().data(), c.direction.vec().data() + c.direction.dim());
    entry["skew"] = c.skew;
    entry["tail_indices"] = c.tail;
    entry["tail_size"] = c.tail.size();
    entry["disparity"] = c.disparity;
    entry["accepted"] = c.accepted;
    if (has_metrics && !c.tail.empty()) {
      const Metrics m = metrics(ds, c.tail, opts.positive_class);
      ordered_json mj;
      mj["accuracy"] = m.accuracy;
      mj["f1"] = m.f1;
      if (ds.group) {
        const double r =
            subset_group_ratio(ds, c.tail, opts.minority_group, opts.ratio_mode);
        if (std::isfinite(r)) mj["group_ratio"] = r;
      }
      entry["metrics"] = std::move(mj);
    }
    doc["candidates"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

std::vector<MiningCandidate> candidates_from_json(const std::string& text) {
  const ordered_json doc = ordered_json::parse(text);
  if (!doc.contains("candidates") || !doc["candidates"].is_array()) {
    throw std::runtime_error("candidates json: missing candidates array");
  }
  std::vector<MiningCandidate> out;
  for (const ordered_json& entry : doc["candidates"]) {
    const std::vector<double> dir = entry.at("direction").get<std::vector<double>>();
    Eigen::VectorXd v(static_cast<Eigen::Index>(dir.size()));
    for (std::size_t i = 0; i < dir.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = dir[i];
    }
    MiningCandidate c{Direction(std::move(v)),
                      entry.at("skew").get<double>(),
                      entry.at("tail_indices").get<std::vector<int>>(),
                      entry.at("disparity").get<double>(),
                      entry.at("accepted").get<bool>(),
                      entry.at("heuristic").get<std::string>()};
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace minoria
