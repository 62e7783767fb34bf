#include "minoria/skew.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace minoria {

namespace {

// Relative floors below which a projected variance is treated as zero.
// The naive path computes the variance from centered values (no
// cancellation), the aggregate path from uncentered sums, hence the looser
// floor there.
constexpr double kNaiveVarFloor = 1e-24;
constexpr double kFastVarFloor = 1e-12;

[[noreturn]] void throw_degenerate() {
  throw std::domain_error(
      "skew: projections have zero variance along this direction");
}

}  // namespace

SkewAggregates precompute_aggregates(const Dataset& ds) {
  if (ds.n() < 2) {
    throw std::invalid_argument("precompute_aggregates: need n >= 2");
  }
  SkewAggregates agg;
  agg.n = ds.n();
  agg.sum_vec = ds.features.colwise().sum().transpose();
  agg.mean_vec = agg.sum_vec / static_cast<double>(agg.n);
  agg.gram = ds.features.transpose() * ds.features;
  const Eigen::MatrixXd centered =
      ds.features.rowwise() - agg.mean_vec.transpose();
  agg.cov_gram = centered.transpose() * centered;
  return agg;
}

int median_row_at(const Dataset& ds, const Direction& f) {
  const std::size_t n = ds.n();
  if (n == 0) throw std::invalid_argument("median_row_at: empty dataset");
  const Eigen::VectorXd proj = ds.features * f.vec();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t k = (n + 1) / 2;  // ascending rank ceil(n/2)
  auto cmp = [&](int a, int b) {
    if (proj(a) != proj(b)) return proj(a) < proj(b);
    return a < b;
  };
  std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), cmp);
  return idx[k - 1];
}

double skew_naive(const Dataset& ds, const Direction& f) {
  const std::size_t n = ds.n();
  if (n < 2) throw std::invalid_argument("skew_naive: need n >= 2");
  if (ds.dim() != f.dim()) {
    throw std::invalid_argument("skew_naive: dimension mismatch");
  }
  const Eigen::VectorXd proj = ds.features * f.vec();
  const double mu = proj.mean();
  const double nu = proj(median_row_at(ds, f));
  const double var = (proj.array() - mu).square().sum() / static_cast<double>(n);
  const double scale = std::max(1.0, mu * mu);
  if (!(var > kNaiveVarFloor * scale)) throw_degenerate();
  return 3.0 * (mu - nu) / std::sqrt(var);
}

double skew_fast(const SkewAggregates& agg, const Direction& f,
                 int median_index, const Eigen::VectorXd& median_row) {
  if (median_index < 0 || static_cast<std::size_t>(median_index) >= agg.n) {
    throw std::invalid_argument("skew_fast: median index out of range");
  }
  const Eigen::VectorXd& v = f.vec();
  const double n = static_cast<double>(agg.n);
  const double mu = agg.mean_vec.dot(v);
  const double nu = median_row.dot(v);
  const double quad = v.dot(agg.gram * v);
  const double var = (quad - 2.0 * mu * agg.sum_vec.dot(v) + n * mu * mu) / n;
  const double scale = std::max(quad / n, 1e-300);
  if (!(var > kFastVarFloor * scale)) throw_degenerate();
  return 3.0 * (mu - nu) / std::sqrt(var);
}

Direction stationary_direction(const SkewAggregates& agg, int median_index,
                             const Eigen::VectorXd& median_row) {
  if (median_index < 0 || static_cast<std::size_t>(median_index) >= agg.n) {
    throw std::invalid_argument("stationary_direction: median index out of range");
  }
  const Eigen::VectorXd q = median_row - agg.mean_vec;
  const double q_scale = median_row.norm() + agg.mean_vec.norm() + 1.0;
  if (!(q.norm() > 1e-12 * q_scale)) {
    throw std::domain_error(
        "stationary_direction: median coincides with the mean");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(agg.cov_gram);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("stationary_direction: eigendecomposition failed");
  }
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  if (!(hi > 0.0) || lo <= 1e-12 * hi) {
    throw std::domain_error(
        "stationary_direction: centered Gram matrix is singular "
        "(reciprocal condition below 1e-12)");
  }
  const Eigen::VectorXd x =
      es.eigenvectors() *
      (es.eigenvectors().transpose() * q).cwiseQuotient(ev).matrix();
  return Direction(x);
}

namespace {

// Signed skew at a 2-d sweep angle with the region's median row. At a
// region boundary the swapping pair has equal projections, so either
// adjacent region's median row yields the same value.
double skew_at_angle(const SkewAggregates& agg, const Dataset& ds,
                     double theta, int median_index) {
  const Direction f = Direction::from_angle(theta);
  return skew_fast(agg, f, median_index, ds.row(median_index));
}

}  // namespace

std::pair<Direction, double> region_max_skew(const SkewAggregates& agg,
                                             const MedianRegion& region,
                                             const Dataset& ds) {
  struct Candidate {
    double theta;
    double skew;
  };
  std::vector<Candidate> evaluated;
  bool degenerate_seen = false;
  auto try_angle = [&](double theta) {
    try {
      evaluated.push_back({theta, skew_at_angle(agg, ds, theta, region.median_index)});
    } catch (const std::domain_error&) {
      degenerate_seen = true;
    }
  };
  try_angle(region.theta_lo);
  try_angle(region.theta_hi);
  try {
    const Direction cand =
        stationary_direction(agg, region.median_index, ds.row(region.median_index));
    // Map the sign-free candidate onto the first quadrant if possible.
    Eigen::Vector2d v = cand.vec();
    if (v(0) < 0.0) v = -v;
    if (v(0) > 0.0 && v(1) > 0.0) {
      const double theta = std::atan2(v(1), v(0));
      if (theta > region.theta_lo && theta < region.theta_hi) try_angle(theta);
    }
  } catch (const std::domain_error&) {
    // No interior candidate (singular Gram or median == mean): boundaries
    // alone decide, as they do for n == 2.
  }
  if (evaluated.empty()) {
    if (degenerate_seen) throw_degenerate();
    throw std::logic_error("region_max_skew: no evaluable candidate");
  }
  const Candidate best = *std::max_element(
      evaluated.begin(), evaluated.end(), [](const Candidate& a, const Candidate& b) {
        if (std::abs(a.skew) != std::abs(b.skew))
          return std::abs(a.skew) < std::abs(b.skew);
        return a.theta > b.theta;  // ties: prefer the smaller angle
      });
  Direction f = Direction::from_angle(best.theta);
  if (best.skew >= 0.0) return {f, best.skew};
  // Report the long-tail-up orientation. The flipped direction's median is
  // the ascending rank ceil(n/2) along -f, re-selected exactly.
  Direction g = -f;
  const int m = median_row_at(ds, g);
  return {g, skew_fast(agg, g, m, ds.row(m))};
}

std::pair<double, double> rotation_bound_check(const Dataset& ds,
                                               const Direction& f,
                                               double alpha) {
  if (ds.dim() != 2 || f.dim() != 2) {
    throw std::invalid_argument("rotation_bound_check: requires d == 2");
  }
  const Eigen::Vector2d v = f.vec();
  Eigen::Vector2d rv;
  rv << std::cos(alpha) * v(0) - std::sin(alpha) * v(1),
      std::sin(alpha) * v(0) + std::cos(alpha) * v(1);
  const Direction rf{Eigen::VectorXd(rv)};

  const int m = median_row_at(ds, f);
  if (median_row_at(ds, rf) != m) {
    throw std::runtime_error(
        "rotation_bound_check: rotation changes the median; bound inapplicable");
  }
  const double s0 = skew_naive(ds, f);
  const double s1 = skew_naive(ds, rf);
  const double ratio = s1 / s0;

  const Eigen::VectorXd mean = ds.features.colwise().mean().transpose();
  const Eigen::Vector2d q = ds.row(m) - mean;
  const double dot = std::abs(v.dot(q));
  const double cross = std::abs(v(0) * q(1) - v(1) * q(0));
  // beta is the acute angle between the *lines* of f and q (q's sign
  // carries no information), so tan(beta) >= 0 and the bound is >= 1.
  const double bound =
      dot > 0.0 ? 1.0 + std::abs(std::tan(alpha)) * (cross / dot)
                : std::numeric_limits<double>::infinity();
  return {ratio, bound};
}

}  // namespace minoria
