#include "minoria/median_level.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "minoria/dual.hpp"

namespace minoria {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_sweepable(const Dataset& ds) {
  if (ds.dim() != 2) {
    throw std::invalid_argument("median sweep: requires d == 2");
  }
  if (ds.n() == 0) {
    throw std::invalid_argument("median sweep: empty dataset");
  }
  if (!(ds.features.minCoeff() > 0.0)) {
    throw std::runtime_error(
        "median sweep: features must be strictly positive; run "
        "normalize_positive first");
  }
}

}  // namespace

std::vector<SweepEvent> sweep_events(const Dataset& ds) {
  check_sweepable(ds);
  const int n = static_cast<int>(ds.n());
  std::vector<SweepEvent> events;
  for (int i = 0; i < n; ++i) {
    const DualLine li = dualize(ds.row(i), i);
    for (int j = i + 1; j < n; ++j) {
      const DualLine lj = dualize(ds.row(j), j);
      const auto p = pairwise_intersection(li, lj);
      if (!p) continue;
      const double x = (*p)(0), y = (*p)(1);
      // Only crossings strictly inside the open first quadrant generate
      // swaps; points on the axes would sit at theta 0 or pi/2 where the
      // sweep order is pinned by the tie rule instead.
      if (!(x > 0.0) || !(y > 0.0)) continue;
      const double theta = std::atan2(y, x);
      if (!(theta > 0.0) || !(theta < kHalfPi)) continue;
      events.push_back({theta, std::hypot(x, y), i, j, *p});
    }
  }
  std::sort(events.begin(), events.end(),
            [](const SweepEvent& a, const SweepEvent& b) {
              if (a.theta != b.theta) return a.theta < b.theta;
              if (a.radius != b.radius) return a.radius < b.radius;
              if (a.i != b.i) return a.i < b.i;
              return a.j < b.j;
            });
  return events;
}

std::vector<MedianRegion> enumerate_median_regions(const Dataset& ds) {
  check_sweepable(ds);
  const int n = static_cast<int>(ds.n());
  // Ascending projection order along f(0) = (1, 0): ascending x, ties by
  // row index.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double xa = ds.features(a, 0), xb = ds.features(b, 0);
    if (xa != xb) return xa < xb;
    return a < b;
  });
  std::vector<int> pos(n);
  for (int p = 0; p < n; ++p) pos[order[p]] = p;

  const int m0 = (n + 1) / 2 - 1;  // median slot: ascending rank ceil(n/2)

  std::vector<MedianRegion> regions;
  double cur_lo = 0.0;
  int cur_med = order[m0];

  for (const SweepEvent& e : sweep_events(ds)) {
    const int pi_ = pos[e.i];
    const int pj_ = pos[e.j];
    if (std::abs(pi_ - pj_) != 1) {
      std::ostringstream msg;
      msg << "median sweep: event (" << e.i << "," << e.j
          << ") swaps non-adjacent slots " << pi_ << "," << pj_
          << " -- degenerate input beyond the supported tie rules";
      throw std::logic_error(msg.str());
    }
    std::swap(order[pi_], order[pj_]);
    pos[e.i] = pj_;
    pos[e.j] = pi_;

    const int med = order[m0];
    if (med == cur_med) continue;
    if (e.theta == cur_lo) {
      // Coincident events: the median changed again at the same angle, so
      // overwrite the still-zero-width pending region instead of emitting
      // it, and merge back into the previous region if we returned to its
      // median.
      cur_med = med;
      if (!regions.empty() && regions.back().median_index == cur_med &&
          regions.back().theta_hi == cur_lo) {
        cur_lo = regions.back().theta_lo;
        regions.pop_back();
      }
      continue;
    }
    regions.push_back({cur_lo, e.theta, cur_med, e.vertex});
    cur_lo = e.theta;
    cur_med = med;
  }
  regions.push_back({cur_lo, kHalfPi, cur_med, std::nullopt});
  return regions;
}

int median_at(const std::vector<MedianRegion>& regions, double theta) {
  if (regions.empty()) {
    throw std::invalid_argument("median_at: no regions");
  }
  if (!(theta >= 0.0) || !(theta <= kHalfPi)) {
    throw std::domain_error("median_at: theta outside [0, pi/2]");
  }
  // First region whose theta_hi exceeds theta; a boundary angle therefore
  // resolves to the region opening at it (counter-clockwise side).
  auto it = std::upper_bound(regions.begin(), regions.end(), theta,
                             [](double t, const MedianRegion& r) {
                               return t < r.theta_hi;
                             });
  if (it == regions.end()) --it;  // theta == pi/2
  return it->median_index;
}

void write_regions_csv(const std::vector<MedianRegion>& regions,
                       std::ostream& out) {
  auto put = [&out](double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    out.write(buf, ptr - buf);
  };
  out << "theta_lo,theta_hi,median_index,vertex_x,vertex_y\n";
  for (const auto& r : regions) {
    put(r.theta_lo);
    out << ',';
    put(r.theta_hi);
    out << ',' << r.median_index << ',';
    if (r.boundary_vertex) {
      put((*r.boundary_vertex)(0));
      out << ',';
      put((*r.boundary_vertex)(1));
    } else {
      out << ',';
    }
    out << '\n';
  }
}

}  // namespace minoria
