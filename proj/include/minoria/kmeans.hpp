#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "minoria/dataset.hpp"

namespace minoria {

struct Clustering {
  std::vector<int> assignment;        // row -> cluster id in [0, k)
  Eigen::MatrixXd centroids;          // k x d
  double inertia = 0.0;               // sum of squared distances
  std::vector<double> inertia_history;  // one entry per Lloyd iteration
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding (deterministic per seed).
// An emptied cluster is re-seeded at the point farthest from its assigned
// centroid. Ties in nearest-centroid assignment go to the lower cluster id.
Clustering kmeans(const Dataset& ds, int k, std::uint64_t seed,
                  int max_iter = 300);

enum class RatioMode {
  kMinorOverTotal,   // minority count / cluster size
  kMinorOverMajor,   // minority count / rest of the cluster
};

const char* ratio_mode_name(RatioMode mode);

// Per-cluster minority composition, plus a whole-dataset row with
// cluster_id = -1. ratio is +inf when the MinorOverMajor denominator is 0.
struct GroupRatioRow {
  int cluster_id = -1;
  std::size_t size = 0;
  std::size_t minority_count = 0;
  double ratio = 0.0;
};

std::vector<GroupRatioRow> cluster_group_ratios(const Dataset& ds,
                                                const Clustering& clustering,
                                                int minority_group,
                                                RatioMode mode);

// cluster_id,size,minority_count,<mode name> -- the ratio column is named
// after the mode so the two ratio conventions cannot be confused.
void write_group_ratio_csv(const std::vector<GroupRatioRow>& rows,
                           RatioMode mode, std::ostream& out);

// Assignment exchange format: header "row_id,cluster_id", one row per
// point. Lets externally produced clusterings go through the same
// composition table.
void write_assignment_csv(const Clustering& clustering, std::ostream& out);
std::vector<int> read_assignment_csv(std::istream& in, std::size_t n_rows);

}  // namespace minoria
