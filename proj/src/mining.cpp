#include "minoria/mining.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "detail.hpp"
#include "minoria/median_level.hpp"
#include "minoria/skew.hpp"

namespace minoria {

std::size_t tail_count(double p, std::size_t n) {
  if (!(p > 0.0) || !(p <= 1.0)) {
    throw std::invalid_argument("tail_count: p must be in (0, 1]");
  }
  if (n == 0) throw std::invalid_argument("tail_count: empty dataset");
  // Small forward nudge so exact products (e.g. 0.2 * 5) are not floored
  // away by representation error.
  const double scaled = p * static_cast<double>(n) + 1e-9;
  const auto c = static_cast<std::size_t>(scaled);
  return std::clamp<std::size_t>(c, 1, n);
}

std::vector<int> p_tail(const Dataset& ds, const Direction& f, double p) {
  const std::size_t n = ds.n();
  const std::size_t c = tail_count(p, n);
  const Eigen::VectorXd proj = ds.features * f.vec();
  const double mu = proj.mean();
  const double nu = proj(median_row_at(ds, f));
  const bool high_side = (mu - nu) > 0.0;  // skew sign; ties go low

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto cmp = [&](int a, int b) {
    if (proj(a) != proj(b)) return high_side ? proj(a) > proj(b) : proj(a) < proj(b);
    return a < b;
  };
  std::nth_element(idx.begin(), idx.begin() + (c - 1), idx.end(), cmp);
  std::vector<int> tail(idx.begin(), idx.begin() + c);
  std::sort(tail.begin(), tail.end());
  return tail;
}

double disparity(const Dataset& ds, const std::vector<int>& tail) {
  if (!ds.loss) {
    throw std::runtime_error("disparity: dataset has no loss column");
  }
  if (tail.empty()) {
    throw std::invalid_argument("disparity: empty tail");
  }
  const std::vector<double>& loss = *ds.loss;
  double tail_sum = 0.0;
  for (int i : tail) tail_sum += loss[static_cast<std::size_t>(i)];
  const double all =
      std::accumulate(loss.begin(), loss.end(), 0.0) / static_cast<double>(loss.size());
  return tail_sum / static_cast<double>(tail.size()) - all;
}

namespace detail {

// Shared accept loop: rank raw (direction, skew) proposals by |skew|,
// re-orient popped ones so skew is positive, gate on tail disparity, and
// enforce angular separation against already accepted picks.
std::vector<MiningCandidate> select_candidates(
    const Dataset& ds, std::vector<std::pair<Direction, double>> pool,
    const MiningParams& params, const std::string& heuristic,
    const GateFn& gate) {
  std::sort(pool.begin(), pool.end(),
            [](const auto& a, const auto& b) {
              const double sa = std::abs(a.second), sb = std::abs(b.second);
              if (sa != sb) return sa > sb;
              // Deterministic tie order: lexicographic on the vector.
              const Eigen::VectorXd& va = a.first.vec();
              const Eigen::VectorXd& vb = b.first.vec();
              for (Eigen::Index i = 0; i < va.size(); ++i) {
                if (va(i) != vb(i)) return va(i) < vb(i);
              }
              return false;
            });

  std::vector<MiningCandidate> accepted;
  for (auto& [f, skew] : pool) {
    if (accepted.size() >= params.top_l) break;
    Direction dir = f;
    double s = skew;
    try {
      if (s < 0.0) {
        dir = -f;
        s = skew_naive(ds, dir);  // exact value for the flipped orientation
      }
      const std::vector<int> tail = p_tail(ds, dir, params.p);
      const double disp = disparity(ds, tail);
      const double gate_value = gate ? gate(ds, dir, tail) : disp;
      if (gate_value < params.tau) continue;
      const bool too_close =
          std::any_of(accepted.begin(), accepted.end(), [&](const MiningCandidate& c) {
            return cosine(c.direction, dir) > params.min_sep_cos;
          });
      if (too_close) continue;
      accepted.push_back({dir, s, tail, disp, true, heuristic});
    } catch (const std::domain_error&) {
      continue;  // degenerate direction: skip, keep sweeping
    }
  }
  std::stable_sort(accepted.begin(), accepted.end(),
                   [](const MiningCandidate& a, const MiningCandidate& b) {
                     return a.skew > b.skew;
                   });
  return accepted;
}

// Direction in the original frame equivalent to direction fp in the
// rotate_negative frame: projections onto fp there equal projections onto
// (-fp_y, fp_x) here, up to an additive constant that skew ignores.
Direction unrotate_direction(const Direction& fp) {
  Eigen::VectorXd g(2);
  g << -fp.vec()(1), fp.vec()(0);
  return Direction(std::move(g));
}

}  // namespace detail

namespace {

void check_minable(const Dataset& ds, const MiningParams& params) {
  if (ds.dim() != 2) {
    throw std::invalid_argument("2-d miner: requires d == 2");
  }
  if (ds.n() < 2) {
    throw std::invalid_argument("2-d miner: need n >= 2");
  }
  if (params.passes != 1 && params.passes != 2) {
    throw std::invalid_argument("2-d miner: passes must be 1 or 2");
  }
  if (!ds.loss) {
    throw std::runtime_error("2-d miner: dataset has no loss column");
  }
}

// Boundary directions of the region decomposition: theta = 0, every
// arrangement vertex, theta = pi/2. Built from the vertices themselves so
// both miners evaluate bit-identical directions.
std::vector<std::pair<Direction, int>> boundary_directions(
    const std::vector<MedianRegion>& regions) {
  std::vector<std::pair<Direction, int>> dirs;  // direction, adjacent median
  dirs.emplace_back(Direction::axis(2, 0), regions.front().median_index);
  for (const auto& r : regions) {
    if (r.boundary_vertex) {
      dirs.emplace_back(Direction(Eigen::VectorXd(*r.boundary_vertex)),
                        r.median_index);
    }
  }
  dirs.emplace_back(Direction::axis(2, 1), regions.back().median_index);
  return dirs;
}

}  // namespace

std::vector<MiningCandidate> mine_warmup(const Dataset& ds,
                                         const MiningParams& params) {
  check_minable(ds, params);
  std::vector<std::pair<Direction, double>> pool;
  for (int pass = 0; pass < params.passes; ++pass) {
    const Dataset data =
        pass == 0 ? ds : rotate_negative(ds, default_rotation_offset(ds));
    const auto regions = enumerate_median_regions(data);
    for (const auto& [dir, med] : boundary_directions(regions)) {
      (void)med;
      try {
        const double s = skew_naive(data, dir);
        pool.emplace_back(pass == 0 ? dir : detail::unrotate_direction(dir), s);
      } catch (const std::domain_error&) {
        continue;
      }
    }
  }
  return detail::select_candidates(ds, std::move(pool), params, "warmup");
}

std::vector<MiningCandidate> mine_raysweep(const Dataset& ds,
                                           const MiningParams& params,
                                           SweepMode mode) {
  check_minable(ds, params);
  std::vector<std::pair<Direction, double>> pool;
  for (int pass = 0; pass < params.passes; ++pass) {
    const Dataset data =
        pass == 0 ? ds : rotate_negative(ds, default_rotation_offset(ds));
    const auto regions = enumerate_median_regions(data);
    const SkewAggregates agg = precompute_aggregates(data);
    if (mode == SweepMode::kBoundaryOnly) {
      for (const auto& [dir, med] : boundary_directions(regions)) {
        try {
          const double s = skew_fast(agg, dir, med, data.row(med));
          pool.emplace_back(pass == 0 ? dir : detail::unrotate_direction(dir), s);
        } catch (const std::domain_error&) {
          continue;
        }
      }
    } else {
      for (const auto& region : regions) {
        try {
          auto [dir, s] = region_max_skew(agg, region, data);
          pool.emplace_back(pass == 0 ? dir : detail::unrotate_direction(dir), s);
        } catch (const std::domain_error&) {
          continue;
        }
      }
    }
  }
  return detail::select_candidates(ds, std::move(pool), params, "raysweep");
}

}  // namespace minoria
