#include "minoria/kmeans.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "minoria/rng.hpp"

namespace minoria {

namespace {

void put_double(std::ostream& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, ptr - buf);
}

double sq_dist(const Eigen::MatrixXd& x, std::size_t row,
               const Eigen::MatrixXd& centroids, int c) {
  return (x.row(static_cast<Eigen::Index>(row)) - centroids.row(c))
      .squaredNorm();
}

// k-means++: D^2-weighted sampling of initial centroids.
Eigen::MatrixXd seed_centroids(const Eigen::MatrixXd& x, int k, Rng& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  Eigen::MatrixXd centroids(k, x.cols());
  centroids.row(0) = x.row(static_cast<Eigen::Index>(rng.uniform_index(n)));
  std::vector<double> min_d2(n, 0.0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = sq_dist(x, i, centroids, 0);
      for (int j = 1; j < c; ++j) best = std::min(best, sq_dist(x, i, centroids, j));
      min_d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        r -= min_d2[i];
        if (r <= 0.0) {
          pick = i;
          break;
        }
        pick = i;  // guard against fp leftover: fall back to the last row
      }
    } else {
      // All points coincide with existing centroids; take the first row
      // not yet used so k distinct slots still exist.
      pick = std::min<std::size_t>(static_cast<std::size_t>(c), n - 1);
    }
    centroids.row(c) = x.row(static_cast<Eigen::Index>(pick));
  }
  return centroids;
}

}  // namespace

Clustering kmeans(const Dataset& ds, int k, std::uint64_t seed, int max_iter) {
  const std::size_t n = ds.n();
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("kmeans: k exceeds the number of rows");
  }
  if (max_iter < 1) throw std::invalid_argument("kmeans: max_iter must be >= 1");

  const Eigen::MatrixXd& x = ds.features;
  Rng rng(seed);
  Clustering out;
  out.centroids = seed_centroids(x, k, rng);
  out.assignment.assign(n, 0);
  std::vector<int> prev(n, -1);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment step; ties go to the lower cluster id via strict <.
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best_c = 0;
      double best_d = sq_dist(x, i, out.centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(x, i, out.centroids, c);
        if (d < best_d) {
          best_d = d;
          best_c = c;
        }
      }
      out.assignment[i] = best_c;
      inertia += best_d;
    }
    out.inertia_history.push_back(inertia);
    out.inertia = inertia;
    out.iterations = iter + 1;
    if (out.assignment == prev) break;
    prev = out.assignment;

    // Update step.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(out.assignment[i]) += x.row(static_cast<Eigen::Index>(i));
      ++counts[static_cast<std::size_t>(out.assignment[i])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        out.centroids.row(c) =
            sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      // Re-seed an emptied cluster at the point farthest from its own
      // centroid; that point's residual is the largest contributor.
      std::size_t far_i = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = sq_dist(x, i, out.centroids, out.assignment[i]);
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      out.centroids.row(c) = x.row(static_cast<Eigen::Index>(far_i));
      out.assignment[far_i] = c;  // keep the next farthest search honest
    }
  }
  return out;
}

const char* ratio_mode_name(RatioMode mode) {
  switch (mode) {
    case RatioMode::kMinorOverTotal:
      return "minor_over_total";
    case RatioMode::kMinorOverMajor:
      return "minor_over_major";
  }
  throw std::invalid_argument("ratio_mode_name: unknown mode");
}

namespace {

double group_ratio_value(std::size_t minority, std::size_t size, RatioMode mode) {
  if (mode == RatioMode::kMinorOverTotal) {
    return size == 0 ? 0.0
                     : static_cast<double>(minority) / static_cast<double>(size);
  }
  const std::size_t rest = size - minority;
  if (rest == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(minority) / static_cast<double>(rest);
}

}  // namespace

std::vector<GroupRatioRow> cluster_group_ratios(const Dataset& ds,
                                                const Clustering& clustering,
                                                int minority_group,
                                                RatioMode mode) {
  if (!ds.group) {
    throw std::runtime_error("cluster_group_ratios: dataset has no group column");
  }
  if (clustering.assignment.size() != ds.n()) {
    throw std::invalid_argument(
        "cluster_group_ratios: assignment size does not match the dataset");
  }
  const int k = static_cast<int>(clustering.centroids.rows());
  const std::vector<int>& group = *ds.group;

  std::vector<GroupRatioRow> rows;
  rows.reserve(static_cast<std::size_t>(k) + 1);
  GroupRatioRow overall;
  overall.cluster_id = -1;
  overall.size = ds.n();
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (group[i] == minority_group) ++overall.minority_count;
  }
  overall.ratio = group_ratio_value(overall.minority_count, overall.size, mode);
  rows.push_back(overall);

  for (int c = 0; c < k; ++c) {
    GroupRatioRow row;
    row.cluster_id = c;
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (clustering.assignment[i] != c) continue;
      ++row.size;
      if (group[i] == minority_group) ++row.minority_count;
    }
    row.ratio = group_ratio_value(row.minority_count, row.size, mode);
    rows.push_back(row);
  }
  return rows;
}

void write_group_ratio_csv(const std::vector<GroupRatioRow>& rows,
                           RatioMode mode, std::ostream& out) {
  out << "cluster_id,size,minority_count," << ratio_mode_name(mode) << "\n";
  for (const GroupRatioRow& row : rows) {
    out << row.cluster_id << ',' << row.size << ',' << row.minority_count << ',';
    if (std::isinf(row.ratio)) {
      out << "inf";
    } else {
      put_double(out, row.ratio);
    }
    out << "\n";
  }
}

void write_assignment_csv(const Clustering& clustering, std::ostream& out) {
  out << "row_id,cluster_id\n";
  for (std::size_t i = 0; i < clustering.assignment.size(); ++i) {
    out << i << ',' << clustering.assignment[i] << "\n";
  }
}

std::vector<int> read_assignment_csv(std::istream& in, std::size_t n_rows) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("assignment csv: empty input");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "row_id,cluster_id") {
    throw std::runtime_error("assignment csv: expected header row_id,cluster_id");
  }
  std::vector<int> assignment(n_rows, -1);
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("assignment csv: malformed line '" + line + "'");
    }
    std::size_t row_id = 0;
    int cluster = 0;
    const char* b = line.data();
    auto r1 = std::from_chars(b, b + comma, row_id);
    auto r2 = std::from_chars(b + comma + 1, b + line.size(), cluster);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} ||
        r1.ptr != b + comma || r2.ptr != b + line.size()) {
      throw std::runtime_error("assignment csv: malformed line '" + line + "'");
    }
    if (row_id >= n_rows) {
      throw std::runtime_error("assignment csv: row_id out of range");
    }
    if (cluster < 0) {
      throw std::runtime_error("assignment csv: negative cluster_id");
    }
    if (assignment[row_id] != -1) {
      throw std::runtime_error("assignment csv: duplicate row_id");
    }
    assignment[row_id] = cluster;
    ++seen;
  }
  if (seen != n_rows) {
    throw std::runtime_error("assignment csv: expected one line per row");
  }
  return assignment;
}

}  // namespace minoria
