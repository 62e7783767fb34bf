#pragma once

#include <Eigen/Dense>
#include <utility>

#include "minoria/dataset.hpp"
#include "minoria/dual.hpp"
#include "minoria/median_level.hpp"

namespace minoria {

// Direction-independent sums that make a single skew evaluation O(d^2)
// instead of O(n d): column mean, column sum, the Gram matrix T'T, and the
// centered Gram sum_i q_i q_i' with q_i = t_i - mean. cov_gram is
// accumulated in a separate centered pass, so cov_gram == gram - n*mu*mu'
// is a meaningful consistency check rather than an identity by
// construction.
struct SkewAggregates {
  std::size_t n = 0;
  Eigen::VectorXd mean_vec;
  Eigen::VectorXd sum_vec;
  Eigen::MatrixXd gram;
  Eigen::MatrixXd cov_gram;
};

SkewAggregates precompute_aggregates(const Dataset& ds);

// Pearson median skewness of the projections t_i.f:
//   3 * (mean - median) / sigma
// with the population sigma (divide by n) and the single-tuple median at
// ascending rank ceil(n/2), ties by row index. Brute force, O(n log n);
// this is the oracle the fast path is checked against. Throws when n < 2
// or sigma is zero within tolerance.
double skew_naive(const Dataset& ds, const Direction& f);

// Row id of the projection median along f (ascending rank ceil(n/2),
// ties by ascending row index). O(n) selection.
int median_row_at(const Dataset& ds, const Direction& f);

// Same value as skew_naive but from precomputed aggregates plus the known
// median row: sigma^2 = (f'T'Tf - 2*mu_f*(sum.f) + n*mu_f^2) / n, all
// O(d^2) and independent of n.
double skew_fast(const SkewAggregates& agg, const Direction& f,
                 int median_index, const Eigen::VectorXd& median_row);

// Interior candidate for the per-region |skew| maximum: the stationary
// direction (QQ')^{-1} q_m for median row m, q_m = t_m - mean. The sign of
// the returned direction is not meaningful (the optimality argument is in
// skew^2). Solved symmetrically with a conditioning check: reciprocal
// condition < 1e-12 or q_m == 0 throws.
Direction stationary_direction(const SkewAggregates& agg, int median_index,
                             const Eigen::VectorXd& median_row);

// Maximum-|skew| direction over one median region: the two boundary
// directions, plus the stationary candidate when its angle falls strictly
// inside the region. Returns the orientation with positive skew (long
// tail on the high-projection side) and that orientation's skew.
// Candidates whose sigma degenerates are skipped; if every candidate
// degenerates the error propagates.
std::pair<Direction, double> region_max_skew(const SkewAggregates& agg,
                                             const MedianRegion& region,
                                             const Dataset& ds);

// For a rotation R_alpha (2-d, alpha in radians, counter-clockwise):
//   ratio = skew(R_alpha f) / skew(f)
//   bound = 1 + |tan(alpha)| * tan(beta_m)
// where beta_m is the acute angle between the lines spanned by f and by
// q_m = t_m - mean of f's median row m. The bound applies when both skews
// are positive and f attains the region maximum; rotating within the
// region then cannot grow skew past it. Throws when the rotation changes
// the median ("bound inapplicable").
std::pair<double, double> rotation_bound_check(const Dataset& ds,
                                               const Direction& f,
                                               double alpha);

}  // namespace minoria
