#pragma once

#include <cstdint>
#include <vector>

#include "minoria/dataset.hpp"
#include "minoria/dual.hpp"
#include "minoria/mining.hpp"
#include "minoria/rng.hpp"

namespace minoria {

// --- High-dimensional direction search -----------------------------------
// Above d = 2 the exact sweep is off the table; these heuristics generate
// candidate directions and push them through the same accept loop as the
// 2-d miners (skew ranking, p-tail, disparity gate, angular separation).

// Loss-guided pair sampling. S = the top-K loss fraction of the rows;
// sampled pairs (s in S, t outside S) propose directions (s - t)/|s - t|.
// The acceptance gate can use the Alg-style error head of the tail
// (top-K_err loss share of the p-tail) or the plain whole-tail disparity.
struct FocusedParams {
  double K = 0.1;                // fraction of rows forming the high-loss set
  double K_err = 0.5;            // fraction of the tail forming T_err
  std::size_t sample_s = 40;     // pairs sampled from S
  std::size_t sample_t = 40;     // pairs sampled from the complement
  std::uint64_t seed = 0;
  bool gate_on_error_head = true;  // false: gate on whole-tail disparity
  MiningParams mining;
};

std::vector<MiningCandidate> focused_explore(const Dataset& ds,
                                             const FocusedParams& params);

// Epsilon-greedy explore/exploit search on the unit sphere.
struct EEParams {
  double eps_explore = 0.4;      // probability of a fresh random direction
  double tau_prime = 0.95;       // exploit cone: cos(new, best) >= tau_prime
  std::size_t iterations = 10000;
  int n_starts = 6;              // size of the seeded initial direction set
  std::uint64_t seed = 0;
  MiningParams mining;
};

std::vector<MiningCandidate> ee_search(const Dataset& ds,
                                       const EEParams& params);

// Polar grid over the positive orthant: each of the d-1 spherical angles
// takes cell-center values spaced uniformly in [0, pi/2). The effective
// spacing is (pi/2)/ceil(pi/(2*eps_angle)) <= eps_angle, so the centers
// cover every positive direction within eps_angle*sqrt(d-1)/2. Throws when
// the grid would exceed `cap` directions.
std::vector<Direction> grid_directions(int d, double eps_angle,
                                       std::size_t cap = 1000000);

// Greedy farthest-point subset: seeded random start, then repeatedly add
// the direction maximizing the minimum angle to the chosen set (ties by
// lowest index).
std::vector<Direction> diverse_sample(const std::vector<Direction>& dirs,
                                      std::size_t l, std::uint64_t seed);

// Appends to P the unit vector minimizing the maximum inner product with
// P's members (positive orthant). Solved by projected subgradient descent
// on the sphere with nonnegative clamping and seeded restarts; returns the
// new vector and the achieved max inner product y.
std::pair<Direction, double> qp_diversify(const std::vector<Direction>& P,
                                          std::uint64_t seed);

// Uniform sample from the spherical cap {unit f : cos(f, center) >= tau_prime}.
// tau_prime == 1 returns the center itself.
Direction cone_sample(const Direction& center, double tau_prime, Rng& rng);

// Drivers for the grid and QP candidate generators (used by the CLI):
// generate, thin to a diverse subset / grow a diverse set, then run the
// standard accept loop.
struct GridParams {
  double eps_angle = 0.2;
  std::size_t max_eval = 512;    // diverse subset size evaluated
  std::size_t cap = 1000000;
  std::uint64_t seed = 0;
  MiningParams mining;
};

std::vector<MiningCandidate> mine_grid(const Dataset& ds,
                                       const GridParams& params);

struct QpParams {
  std::size_t count = 64;        // directions generated beyond the axes
  std::uint64_t seed = 0;
  MiningParams mining;
};

std::vector<MiningCandidate> mine_qp(const Dataset& ds,
                                     const QpParams& params);

}  // namespace minoria
