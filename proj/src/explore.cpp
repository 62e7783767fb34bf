#include "minoria/explore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "detail.hpp"
#include "minoria/skew.hpp"

namespace minoria {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

Eigen::VectorXd random_positive_unit(int d, Rng& rng) {
  Eigen::VectorXd v(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) v(i) = std::abs(rng.normal());
    norm = v.norm();
  } while (!(norm > 0.0));
  return v / norm;
}

// Sample without replacement: first k entries of a partially shuffled copy.
std::vector<int> sample_without_replacement(const std::vector<int>& items,
                                            std::size_t k, Rng& rng) {
  std::vector<int> pool = items;
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

double signed_skew(const Dataset& ds, const SkewAggregates& agg,
                   const Direction& f) {
  const int m = median_row_at(ds, f);
  return skew_fast(agg, f, m, ds.row(m));
}

double mean_loss(const std::vector<double>& loss) {
  return std::accumulate(loss.begin(), loss.end(), 0.0) /
         static_cast<double>(loss.size());
}

}  // namespace

std::vector<MiningCandidate> focused_explore(const Dataset& ds,
                                             const FocusedParams& params) {
  if (!ds.loss) {
    throw std::runtime_error("focused_explore: dataset has no loss column");
  }
  if (ds.n() < 2) {
    throw std::invalid_argument("focused_explore: need n >= 2");
  }
  if (!(params.K > 0.0) || !(params.K < 1.0)) {
    throw std::invalid_argument("focused_explore: K must be in (0, 1)");
  }
  if (!(params.K_err > 0.0) || params.K_err > 1.0) {
    throw std::invalid_argument("focused_explore: K_err must be in (0, 1]");
  }
  const std::size_t n = ds.n();
  const std::vector<double>& loss = *ds.loss;

  // Rows in descending loss order, ties by row index; the head is the
  // high-loss set S.
  std::vector<int> by_loss(n);
  std::iota(by_loss.begin(), by_loss.end(), 0);
  std::sort(by_loss.begin(), by_loss.end(), [&](int a, int b) {
    if (loss[a] != loss[b]) return loss[a] > loss[b];
    return a < b;
  });
  const std::size_t s_size = tail_count(params.K, n);
  std::vector<int> high(by_loss.begin(), by_loss.begin() + s_size);
  std::vector<int> rest(by_loss.begin() + s_size, by_loss.end());

  Rng rng(params.seed);
  const std::vector<int> from_s =
      sample_without_replacement(high, params.sample_s, rng);
  const std::vector<int> from_t =
      sample_without_replacement(rest, params.sample_t, rng);

  const SkewAggregates agg = precompute_aggregates(ds);
  std::vector<std::pair<Direction, double>> pool;
  pool.reserve(from_s.size() * from_t.size());
  for (int s : from_s) {
    for (int t : from_t) {
      const Eigen::VectorXd delta = ds.row(s) - ds.row(t);
      if (!(delta.norm() > 1e-12)) continue;  // coincident pair
      Direction f{delta};
      try {
        pool.emplace_back(f, signed_skew(ds, agg, f));
      } catch (const std::domain_error&) {
      }
    }
  }

  detail::GateFn gate;
  if (params.gate_on_error_head) {
    const double k_err = params.K_err;
    gate = [k_err](const Dataset& data, const Direction&,
                   const std::vector<int>& tail) {
      // Gate value: mean loss over the top-K_err loss share of the tail,
      // minus the global mean loss.
      const std::vector<double>& l = *data.loss;
      std::vector<int> head = tail;
      std::sort(head.begin(), head.end(), [&](int a, int b) {
        if (l[a] != l[b]) return l[a] > l[b];
        return a < b;
      });
      head.resize(tail_count(k_err, head.size()));
      double sum = 0.0;
      for (int i : head) sum += l[i];
      return sum / static_cast<double>(head.size()) - mean_loss(l);
    };
  }
  return detail::select_candidates(ds, std::move(pool), params.mining,
                                   "focused", gate);
}

Direction cone_sample(const Direction& center, double tau_prime, Rng& rng) {
  if (!(tau_prime > -1.0) || !(tau_prime <= 1.0)) {
    throw std::invalid_argument("cone_sample: tau_prime must be in (-1, 1]");
  }
  if (tau_prime >= 1.0) return center;
  const int d = center.dim();
  const Eigen::VectorXd& c = center.vec();
  if (d == 2) {
    // The cap is an arc; its uniform measure is uniform in the angle.
    const double max_angle = std::acos(std::clamp(tau_prime, -1.0, 1.0));
    const double phi = rng.uniform(-max_angle, max_angle);
    Eigen::VectorXd v(2);
    v << std::cos(phi) * c(0) - std::sin(phi) * c(1),
        std::sin(phi) * c(0) + std::cos(phi) * c(1);
    return Direction(std::move(v));
  }
  // Polar-angle rejection: density of t = cos(angle) on [tau', 1] is
  // proportional to (1 - t^2)^((d-3)/2); the envelope peaks at
  // max(tau', 0).
  const double expo = 0.5 * static_cast<double>(d - 3);
  const double t_peak = std::max(tau_prime, 0.0);
  const double peak = std::pow(1.0 - t_peak * t_peak, expo);
  double t = 1.0;
  for (;;) {
    t = rng.uniform(tau_prime, 1.0);
    const double dens = std::pow(1.0 - t * t, expo);
    if (rng.uniform() * peak <= dens) break;
  }
  // Uniform direction in the orthogonal complement of the center.
  Eigen::VectorXd w(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) w(i) = rng.normal();
    w -= w.dot(c) * c;
    norm = w.norm();
  } while (!(norm > 1e-12));
  w /= norm;
  return Direction(t * c + std::sqrt(std::max(0.0, 1.0 - t * t)) * w);
}

std::vector<MiningCandidate> ee_search(const Dataset& ds,
                                       const EEParams& params) {
  if (!ds.loss) {
    throw std::runtime_error("ee_search: dataset has no loss column");
  }
  if (ds.n() < 2) {
    throw std::invalid_argument("ee_search: need n >= 2");
  }
  if (!(params.eps_explore >= 0.0) || !(params.eps_explore <= 1.0)) {
    throw std::invalid_argument("ee_search: eps_explore must be in [0, 1]");
  }
  if (params.n_starts < 1) {
    throw std::invalid_argument("ee_search: n_starts must be >= 1");
  }
  const int d = ds.dim();
  Rng rng(params.seed);
  const SkewAggregates agg = precompute_aggregates(ds);

  std::vector<std::pair<Direction, double>> evaluated;
  Direction best = Direction::axis(d, 0);
  double best_abs = -1.0;
  auto consider = [&](Direction f) {
    try {
      const double s = signed_skew(ds, agg, f);
      evaluated.emplace_back(f, s);
      if (std::abs(s) > best_abs) {
        best_abs = std::abs(s);
        best = f;
      }
    } catch (const std::domain_error&) {
    }
  };

  for (int i = 0; i < params.n_starts; ++i) {
    consider(Direction(random_positive_unit(d, rng)));
  }
  for (std::size_t it = 0; it < params.iterations; ++it) {
    if (rng.uniform() < params.eps_explore || best_abs < 0.0) {
      consider(Direction(random_positive_unit(d, rng)));
    } else {
      consider(cone_sample(best, params.tau_prime, rng));
    }
  }

  // Bounded candidate heap: only the 10*top_l strongest-|skew| directions
  // go through the accept loop.
  const std::size_t keep = std::min<std::size_t>(
      evaluated.size(), 10 * std::max<std::size_t>(1, params.mining.top_l));
  std::partial_sort(evaluated.begin(), evaluated.begin() + keep, evaluated.end(),
                    [](const auto& a, const auto& b) {
                      return std::abs(a.second) > std::abs(b.second);
                    });
  evaluated.erase(evaluated.begin() + static_cast<std::ptrdiff_t>(keep),
                  evaluated.end());
  return detail::select_candidates(ds, std::move(evaluated), params.mining,
                                   "ee");
}

std::vector<Direction> grid_directions(int d, double eps_angle,
                                       std::size_t cap) {
  if (d < 2) throw std::invalid_argument("grid_directions: d must be >= 2");
  if (!(eps_angle > 0.0)) {
    throw std::invalid_argument("grid_directions: eps_angle must be > 0");
  }
  const auto cells =
      static_cast<std::size_t>(std::ceil(kHalfPi / eps_angle - 1e-12));
  const std::size_t per_axis = std::max<std::size_t>(1, cells);
  double total = 1.0;
  for (int i = 0; i < d - 1; ++i) total *= static_cast<double>(per_axis);
  if (total > static_cast<double>(cap)) {
    throw std::invalid_argument(
        "grid_directions: grid exceeds the direction cap; coarsen eps_angle");
  }
  const double spacing = kHalfPi / static_cast<double>(per_axis);

  std::vector<Direction> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> digits(static_cast<std::size_t>(d - 1), 0);
  for (;;) {
    Eigen::VectorXd v(d);
    double sines = 1.0;
    for (int i = 0; i < d - 1; ++i) {
      const double a = (static_cast<double>(digits[i]) + 0.5) * spacing;
      v(i) = sines * std::cos(a);
      sines *= std::sin(a);
    }
    v(d - 1) = sines;
    out.emplace_back(std::move(v));
    int pos = d - 2;
    while (pos >= 0 && ++digits[pos] == per_axis) digits[pos--] = 0;
    if (pos < 0) break;
  }
  return out;
}

std::vector<Direction> diverse_sample(const std::vector<Direction>& dirs,
                                      std::size_t l, std::uint64_t seed) {
  if (dirs.empty()) {
    throw std::invalid_argument("diverse_sample: empty direction set");
  }
  if (l >= dirs.size()) return dirs;
  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.push_back(rng.uniform_index(dirs.size()));
  std::vector<double> min_angle(dirs.size(),
                                std::numeric_limits<double>::infinity());
  while (chosen.size() < l) {
    const Direction& last = dirs[chosen.back()];
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const double a =
          std::acos(std::clamp(cosine(dirs[i], last), -1.0, 1.0));
      min_angle[i] = std::min(min_angle[i], a);
    }
    std::size_t next = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      if (min_angle[i] > best) {
        best = min_angle[i];
        next = i;
      }
    }
    chosen.push_back(next);
    min_angle[next] = -1.0;  // never re-picked
  }
  std::vector<Direction> out;
  out.reserve(chosen.size());
  for (std::size_t i : chosen) out.push_back(dirs[i]);
  return out;
}

std::pair<Direction, double> qp_diversify(const std::vector<Direction>& P,
                                          std::uint64_t seed) {
  if (P.empty()) throw std::invalid_argument("qp_diversify: P is empty");
  const int d = P.front().dim();
  if (d < 2) throw std::invalid_argument("qp_diversify: d must be >= 2");

  auto max_dot = [&](const Eigen::VectorXd& p, std::size_t* arg) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    for (std::size_t j = 0; j < P.size(); ++j) {
      const double v = P[j].vec().dot(p);
      if (v > best) {
        best = v;
        bi = j;
      }
    }
    if (arg) *arg = bi;
    return best;
  };

  Rng rng(seed);
  Eigen::VectorXd best_p;
  double best_y = std::numeric_limits<double>::infinity();
  constexpr int kRestarts = 8;
  constexpr int kIters = 1000;
  for (int r = 0; r < kRestarts; ++r) {
    Eigen::VectorXd p = random_positive_unit(d, rng);
    double step = 0.2;
    for (int it = 0; it < kIters; ++it) {
      std::size_t j = 0;
      const double y = max_dot(p, &j);
      if (y < best_y) {
        best_y = y;
        best_p = p;
      }
      p -= step * P[j].vec();
      p = p.cwiseMax(0.0);  // stay in the positive orthant
      const double norm = p.norm();
      if (!(norm > 1e-12)) {
        p = random_positive_unit(d, rng);
      } else {
        p /= norm;
      }
      step *= 0.99;
    }
    const double y = max_dot(p, nullptr);
    if (y < best_y) {
      best_y = y;
      best_p = p;
    }
  }
  if (best_p.size() == 0 || !best_p.allFinite()) {
    throw std::runtime_error("qp_diversify: optimizer failed to converge");
  }
  return {Direction(best_p), best_y};
}

std::vector<MiningCandidate> mine_grid(const Dataset& ds,
                                       const GridParams& params) {
  if (!ds.loss) {
    throw std::runtime_error("mine_grid: dataset has no loss column");
  }
  const auto dirs = grid_directions(ds.dim(), params.eps_angle, params.cap);
  const auto subset =
      diverse_sample(dirs, std::min(params.max_eval, dirs.size()), params.seed);
  const SkewAggregates agg = precompute_aggregates(ds);
  std::vector<std::pair<Direction, double>> pool;
  pool.reserve(subset.size());
  for (const Direction& f : subset) {
    try {
      pool.emplace_back(f, signed_skew(ds, agg, f));
    } catch (const std::domain_error&) {
    }
  }
  return detail::select_candidates(ds, std::move(pool), params.mining, "grid");
}

std::vector<MiningCandidate> mine_qp(const Dataset& ds,
                                     const QpParams& params) {
  if (!ds.loss) {
    throw std::runtime_error("mine_qp: dataset has no loss column");
  }
  const int d = ds.dim();
  std::vector<Direction> P;
  P.reserve(static_cast<std::size_t>(d) + params.count);
  for (int i = 0; i < d; ++i) P.push_back(Direction::axis(d, i));
  for (std::size_t i = 0; i < params.count; ++i) {
    auto [p, y] = qp_diversify(P, params.seed + i);
    (void)y;
    P.push_back(p);
  }
  const SkewAggregates agg = precompute_aggregates(ds);
  std::vector<std::pair<Direction, double>> pool;
  pool.reserve(P.size());
  for (const Direction& f : P) {
    try {
      pool.emplace_back(f, signed_skew(ds, agg, f));
    } catch (const std::domain_error&) {
    }
  }
  return detail::select_candidates(ds, std::move(pool), params.mining, "qp");
}

}  // namespace minoria
