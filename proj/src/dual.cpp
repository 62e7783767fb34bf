#include "minoria/dual.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace minoria {

Direction::Direction(Eigen::VectorXd v) : f_(std::move(v)) {
  if (f_.size() < 2) {
    throw std::invalid_argument("Direction: dimension must be >= 2");
  }
  const double norm = f_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("Direction: zero or non-finite vector");
  }
  f_ /= norm;
}

Direction Direction::from_angle(double theta) {
  Eigen::VectorXd v(2);
  v << std::cos(theta), std::sin(theta);
  return Direction(std::move(v));
}

Direction Direction::axis(int d, int i) {
  if (i < 0 || i >= d) {
    throw std::invalid_argument("Direction::axis: index out of range");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  v(i) = 1.0;
  return Direction(std::move(v));
}

double Direction::angle() const {
  if (dim() != 2) {
    throw std::logic_error("Direction::angle: defined for d == 2 only");
  }
  return std::atan2(f_(1), f_(0));
}

Direction Direction::operator-() const { return Direction(-f_); }

DualLine dualize(const Eigen::VectorXd& row, int index) {
  return DualLine{row, index};
}

double ray_intersection(const DualLine& line, const Direction& f) {
  const double denom = line.coeffs.dot(f.vec());
  if (!(denom > 0.0)) {
    throw std::domain_error(
        "ray_intersection: ray does not cross the line at positive radius");
  }
  return 1.0 / denom;
}

std::optional<Eigen::Vector2d> pairwise_intersection(const DualLine& a,
                                                     const DualLine& b) {
  if (a.coeffs.size() != 2 || b.coeffs.size() != 2) {
    throw std::invalid_argument("pairwise_intersection: requires d == 2");
  }
  const double a1 = a.coeffs(0), a2 = a.coeffs(1);
  const double b1 = b.coeffs(0), b2 = b.coeffs(1);
  const double det = a1 * b2 - a2 * b1;
  const double scale = std::max({std::abs(a1), std::abs(a2), std::abs(b1),
                                 std::abs(b2), 1e-300});
  if (std::abs(det) <= 1e-12 * scale * scale) {
    return std::nullopt;  // parallel within tolerance
  }
  // Solve a.x = 1, b.x = 1 by Cramer's rule.
  Eigen::Vector2d p;
  p << (b2 - a2) / det, (a1 - b1) / det;
  return p;
}

std::vector<int> projection_order(const Dataset& ds, const Direction& f) {
  if (ds.dim() != f.dim()) {
    throw std::invalid_argument("projection_order: dimension mismatch");
  }
  const Eigen::VectorXd proj = ds.features * f.vec();
  std::vector<int> order(ds.n());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (proj(a) != proj(b)) return proj(a) < proj(b);
    return a < b;
  });
  return order;
}

}  // namespace minoria
