#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "minoria/dataset.hpp"
#include "minoria/dual.hpp"

namespace minoria {

// Shared knobs for every miner: how many groups to return, the tail
// percentile, the loss-disparity acceptance threshold, the maximum allowed
// pairwise cosine between returned directions, and (2-d only) whether a
// second pass through rotate_negative covers directions with a negative
// component.
struct MiningParams {
  std::size_t top_l = 3;
  double p = 0.1;
  double tau = 0.0;
  double min_sep_cos = std::cos(std::numbers::pi / 12.0);
  int passes = 2;
};

// One mined group candidate: the projection direction (oriented so skew is
// positive), its skew, the tail row ids (ascending), the loss disparity of
// that tail, and which heuristic produced it.
struct MiningCandidate {
  Direction direction;
  double skew = 0.0;
  std::vector<int> tail;
  double disparity = 0.0;
  bool accepted = false;
  std::string heuristic;
};

// Number of rows in a p-tail of n rows: the whole-row count inside the
// percentile mass, floor(p*n), but never less than 1. (A strict ceiling
// would disagree with the intended p-tail of small datasets; see the
// p = 0.34, n = 3 case in the tests, whose tail is one row.)
std::size_t tail_count(double p, std::size_t n);

// Rows on the long-tail side of the projections: the highest projections
// when mean > median along f, otherwise the lowest (including the exactly
// symmetric case). Ties broken by ascending row index. Returned ids are
// sorted ascending.
std::vector<int> p_tail(const Dataset& ds, const Direction& f, double p);

// Mean loss over the tail minus mean loss over the whole dataset.
// Requires the loss column and a non-empty tail.
double disparity(const Dataset& ds, const std::vector<int>& tail);

// Reference 2-d miner: evaluates skew_naive at every median-region
// boundary direction (arrangement vertices plus the two axes), then pops
// candidates in decreasing |skew|, keeping those whose tail disparity
// reaches tau and that stay angularly separated from earlier picks, until
// top_l are accepted.
std::vector<MiningCandidate> mine_warmup(const Dataset& ds,
                                         const MiningParams& params);

enum class SweepMode {
  kBoundaryOnly,  // candidates are region boundaries only (matches warmup)
  kStationary,      // per-region argmax incl. the interior stationary point
};

// Event-driven 2-d miner: one sweep over the median regions, scoring each
// region by region_max_skew (or its boundaries only), with candidate
// selection identical to mine_warmup.
std::vector<MiningCandidate> mine_raysweep(const Dataset& ds,
                                           const MiningParams& params,
                                           SweepMode mode = SweepMode::kStationary);

}  // namespace minoria
