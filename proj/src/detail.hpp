#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "minoria/dataset.hpp"
#include "minoria/dual.hpp"
#include "minoria/mining.hpp"

namespace minoria::detail {

// Optional replacement for the gate value compared against tau.  When empty
// the gate value is the whole-tail disparity.  The candidate's recorded
// disparity is always the whole-tail disparity either way.
using GateFn =
    std::function<double(const Dataset&, const Direction&, const std::vector<int>&)>;

// Shared candidate accept loop (defined in mining.cpp): rank by |skew|,
// orient positive, gate on disparity, enforce angular separation.
std::vector<MiningCandidate> select_candidates(
    const Dataset& ds, std::vector<std::pair<Direction, double>> pool,
    const MiningParams& params, const std::string& heuristic,
    const GateFn& gate = {});

// Original-frame equivalent of a direction found in the rotate_negative
// frame.
Direction unrotate_direction(const Direction& fp);

}  // namespace minoria::detail
