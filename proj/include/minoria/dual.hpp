#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "minoria/dataset.hpp"

namespace minoria {

// Unit direction vector. Construction normalizes, so |vec()| == 1 holds
// (within 1e-12) for every live instance.
class Direction {
 public:
  explicit Direction(Eigen::VectorXd v);
  static Direction from_angle(double theta);  // 2-d, (cos t, sin t)
  static Direction axis(int d, int i);

  const Eigen::VectorXd& vec() const { return f_; }
  int dim() const { return static_cast<int>(f_.size()); }
  double angle() const;  // 2-d only: atan2(y, x)
  Direction operator-() const;

 private:
  Eigen::VectorXd f_;
};

inline double cosine(const Direction& a, const Direction& b) {
  return a.vec().dot(b.vec());
}

// Point t maps to the hyperplane {x : t.x = 1}. Stored as the coefficient
// vector plus the row id it came from.
struct DualLine {
  Eigen::VectorXd coeffs;
  int source_index = -1;
};

DualLine dualize(const Eigen::VectorXd& row, int index);

// Radius along ray {r*f : r >= 0} at which the ray crosses the line:
// 1 / (t.f). Throws when t.f <= 0 (ray parallel to or leaving the line).
// The intersection point itself is radius * f.
double ray_intersection(const DualLine& line, const Direction& f);

// Intersection point of two dual lines in 2-d, or nullopt for (near-)
// parallel lines: |det| <= 1e-12 * max coefficient scale.
std::optional<Eigen::Vector2d> pairwise_intersection(const DualLine& a,
                                                     const DualLine& b);

// Row indices in ascending projection order along f; equal projections
// tie-break by ascending row index.
std::vector<int> projection_order(const Dataset& ds, const Direction& f);

}  // namespace minoria
