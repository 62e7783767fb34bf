#pragma once

#include <Eigen/Dense>
#include <optional>
#include <ostream>
#include <vector>

#include "minoria/dataset.hpp"

namespace minoria {

// Maximal angular interval of sweep directions f(theta), theta in
// [theta_lo, theta_hi] within [0, pi/2], over which the projection median
// is one fixed tuple. boundary_vertex is the arrangement vertex (pairwise
// dual-line intersection) at theta_hi; the last region has none.
struct MedianRegion {
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  int median_index = -1;
  std::optional<Eigen::Vector2d> boundary_vertex;
};

// One pairwise dual-line crossing strictly inside the open first quadrant.
// When the sweep ray passes through it, rows i and j (i < j) swap places
// in the projection order.
struct SweepEvent {
  double theta = 0.0;
  double radius = 0.0;
  int i = -1;
  int j = -1;
  Eigen::Vector2d vertex = Eigen::Vector2d::Zero();
};

// All swap events, sorted by (theta, radius, i, j). Crossings on the axes
// themselves are excluded; identical rows produce parallel lines and no
// event.
std::vector<SweepEvent> sweep_events(const Dataset& ds);

// Sweeps theta from 0 to pi/2 maintaining the ascending projection order
// as a kinetic sorted list (each event swaps two adjacent entries -- this
// adjacency is asserted). A swap that changes the occupant of the median
// rank ceil(n/2) closes the current region. Regions tile [0, pi/2] with
// consecutive regions holding different medians.
//
// Requires d == 2 and strictly positive features (run normalize_positive
// first); n >= 1.
std::vector<MedianRegion> enumerate_median_regions(const Dataset& ds);

// Median row id at angle theta in [0, pi/2]. A boundary angle resolves to
// the region on its counter-clockwise side.
int median_at(const std::vector<MedianRegion>& regions, double theta);

// Debug dump: theta_lo,theta_hi,median_index,vertex_x,vertex_y. The last
// region leaves the vertex cells empty.
void write_regions_csv(const std::vector<MedianRegion>& regions,
                       std::ostream& out);

}  // namespace minoria
