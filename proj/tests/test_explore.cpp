#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "minoria/explore.hpp"
#include "minoria/rng.hpp"
#include "oracles.hpp"

using namespace minoria;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// d-dimensional two-blob instance: minority shifted along u, loss planted
// on the minority rows.
Dataset blob_instance(int d, std::size_t n_major, std::size_t n_minor,
                      double separation, std::uint64_t seed) {
  SynthSpec spec;
  spec.d = d;
  spec.n_major = n_major;
  spec.n_minor = n_minor;
  spec.mean_major = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(d);
  u.normalize();
  spec.mean_minor = separation * u;
  spec.seed = seed;
  Dataset ds = generate_synthetic(spec);
  std::vector<double> loss(ds.n(), 0.0);
  for (std::size_t i = n_major; i < ds.n(); ++i) loss[i] = 1.0;
  ds.loss = std::move(loss);
  return ds;
}

double minority_fraction(const Dataset& ds, const std::vector<int>& rows) {
  std::size_t minors = 0;
  for (int i : rows) {
    if ((*ds.group)[static_cast<std::size_t>(i)] == 1) ++minors;
  }
  return static_cast<double>(minors) / static_cast<double>(rows.size());
}

}  // namespace

TEST_CASE("grid_directions tiles the quadrant at cell centers") {
  const auto two = grid_directions(2, std::numbers::pi / 4.0, 1000);
  REQUIRE(two.size() == 2);
  CHECK(two[0].angle() == doctest::Approx(std::numbers::pi / 8.0).epsilon(1e-12));
  CHECK(two[1].angle() == doctest::Approx(3.0 * std::numbers::pi / 8.0).epsilon(1e-12));

  const auto one = grid_directions(2, kHalfPi, 1000);
  REQUIRE(one.size() == 1);
  CHECK(one[0].angle() == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-12));

  // eps that does not divide pi/2: spacing tightens instead of loosening.
  const auto odd = grid_directions(2, 0.9, 1000);
  REQUIRE(odd.size() == 2);

  const auto d3 = grid_directions(3, std::numbers::pi / 4.0, 1000);
  REQUIRE(d3.size() == 4);
  for (const Direction& f : d3) {
    CHECK(f.vec().norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.vec().minCoeff() >= 0.0);
  }
}

TEST_CASE("grid covering radius") {
  Rng rng(17);
  for (auto [d, eps] : {std::pair{2, 0.2}, std::pair{3, 0.3}}) {
    const auto grid = grid_directions(d, eps, 1000000);
    const double radius = eps * std::sqrt(static_cast<double>(d - 1)) / 2.0;
    for (int rep = 0; rep < 300; ++rep) {
      Eigen::VectorXd v(d);
      for (int i = 0; i < d; ++i) v(i) = std::abs(rng.normal());
      const Direction probe{v};
      double best = 10.0;
      for (const Direction& g : grid) {
        best = std::min(best,
                        std::acos(std::clamp(cosine(probe, g), -1.0, 1.0)));
      }
      CHECK(best <= radius + 1e-9);
    }
  }
}

TEST_CASE("grid_directions enforces the cap") {
  CHECK_THROWS_AS(grid_directions(20, 0.2, 1000000), std::invalid_argument);
  CHECK_THROWS_AS(grid_directions(1, 0.2, 1000), std::invalid_argument);
  CHECK_THROWS_AS(grid_directions(2, 0.0, 1000), std::invalid_argument);
}

TEST_CASE("diverse_sample spreads picks and stays deterministic") {
  const auto grid = grid_directions(2, 0.05, 1000000);
  const auto a = diverse_sample(grid, 5, 42);
  const auto b = diverse_sample(grid, 5, 42);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(cosine(a[i], b[i]) == doctest::Approx(1.0).epsilon(1e-15));
  }
  // Greedy farthest-point: after the seed pick, the two quadrant extremes
  // must be in the set, so the spread covers nearly the whole quadrant.
  double min_pair = 10.0;
  double max_pair = -10.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double ang = std::acos(std::clamp(cosine(a[i], a[j]), -1.0, 1.0));
      min_pair = std::min(min_pair, ang);
      max_pair = std::max(max_pair, ang);
    }
  }
  CHECK(max_pair > kHalfPi - 0.1);
  CHECK(min_pair > 0.2);  // no two picks collapse together

  const auto all = diverse_sample(grid, grid.size() + 10, 1);
  CHECK(all.size() == grid.size());
}

TEST_CASE("qp_diversify closed-form cases") {
  const std::vector<Direction> axes2 = {Direction::axis(2, 0),
                                        Direction::axis(2, 1)};
  const auto [p2, y2] = qp_diversify(axes2, 5);
  CHECK(y2 == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-4));
  CHECK(p2.vec()(0) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-3));
  CHECK(p2.vec()(1) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-3));

  const std::vector<Direction> axes3 = {Direction::axis(3, 0),
                                        Direction::axis(3, 1),
                                        Direction::axis(3, 2)};
  const auto [p3, y3] = qp_diversify(axes3, 5);
  CHECK(y3 == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-4));
  for (int i = 0; i < 3; ++i) {
    CHECK(p3.vec()(i) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-3));
  }

  // A single occupied axis leaves a perfectly orthogonal choice.
  const std::vector<Direction> one = {Direction::axis(2, 0)};
  const auto [p1, y1] = qp_diversify(one, 5);
  CHECK(y1 <= 1e-6);
  CHECK(p1.vec()(1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("qp_diversify objective grows as the set fills") {
  std::vector<Direction> P = {Direction::axis(3, 0)};
  double prev = -1.0;
  for (int step = 0; step < 5; ++step) {
    const auto [p, y] = qp_diversify(P, 99 + step);
    CHECK(y >= prev - 1e-9);
    prev = y;
    P.push_back(p);
  }
  CHECK(prev > 0.5);  // a crowded positive orthant has no orthogonal slot left
}

TEST_CASE("cone_sample stays in the cap and hits it uniformly in 2d") {
  Rng rng(7);
  const Direction center = Direction::from_angle(0.9);
  const double tau_prime = std::cos(0.3);
  int left = 0;
  for (int k = 0; k < 4000; ++k) {
    const Direction s = cone_sample(center, tau_prime, rng);
    CHECK(cosine(s, center) >= tau_prime - 1e-12);
    if (s.angle() < 0.9) ++left;
  }
  // Uniform over the arc: the left half gets ~2000 draws; 4 sigma ~ 126.
  CHECK(std::abs(left - 2000) < 130);

  const Direction exact = cone_sample(center, 1.0, rng);
  CHECK(cosine(exact, center) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cone_sample respects the cap in higher dimensions") {
  Rng rng(8);
  Eigen::VectorXd c(5);
  c << 1.0, 2.0, 0.5, 1.5, 1.0;
  const Direction center{c};
  for (double tau_prime : {0.95, 0.5, -0.2}) {
    for (int k = 0; k < 500; ++k) {
      const Direction s = cone_sample(center, tau_prime, rng);
      CHECK(s.vec().norm() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(cosine(s, center) >= tau_prime - 1e-12);
    }
  }
}

TEST_CASE("focused_explore recovers a planted lossy axis") {
  // x0 is long-tailed; the high-x0 rows carry the loss. Pair directions
  // between lossy and clean rows concentrate near e0.
  Rng rng(2024);
  const std::size_t n = 2000;
  Dataset ds;
  ds.features.resize(n, 5);
  for (std::size_t i = 0; i < n; ++i) {
    ds.features(static_cast<Eigen::Index>(i), 0) =
        -std::log(1.0 - rng.uniform());  // Exponential(1)
    for (int j = 1; j < 5; ++j) {
      ds.features(static_cast<Eigen::Index>(i), j) = rng.normal();
    }
  }
  ds.offset = Eigen::VectorXd::Zero(5);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return ds.features(a, 0) > ds.features(b, 0);
  });
  std::vector<double> loss(n, 0.0);
  for (int i = 0; i < 200; ++i) loss[static_cast<std::size_t>(order[i])] = 1.0;
  ds.loss = std::move(loss);

  FocusedParams params;
  params.K = 0.1;
  params.K_err = 0.5;
  params.seed = 3;
  params.mining.top_l = 1;
  params.mining.p = 0.1;
  params.mining.tau = 0.5;
  const auto got = focused_explore(ds, params);
  REQUIRE(got.size() == 1);
  CHECK(std::abs(got.front().direction.vec()(0)) >= 0.9);
  CHECK(got.front().disparity >= 0.5);

  const auto again = focused_explore(ds, params);
  REQUIRE(again.size() == 1);
  CHECK(cosine(got.front().direction, again.front().direction) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("focused gate modes differ when only the error head is lossy") {
  // Tail of e0: rows 4..9 (p=0.6 of 10). Only two of them are lossy, so
  // the whole-tail disparity is weak but the error head is pure loss.
  Dataset ds;
  ds.features.resize(10, 2);
  for (int i = 0; i < 10; ++i) {
    ds.features(i, 0) = static_cast<double>(i);
    ds.features(i, 1) = 10.0 - 0.1 * static_cast<double>(i);
  }
  ds.offset = Eigen::VectorXd::Zero(2);
  std::vector<double> loss(10, 0.0);
  loss[8] = 1.0;
  loss[9] = 1.0;
  ds.loss = std::move(loss);

  FocusedParams params;
  params.K = 0.2;
  params.K_err = 1.0 / 3.0;
  params.sample_s = 10;
  params.sample_t = 10;
  params.seed = 1;
  params.mining.top_l = 1;
  params.mining.p = 0.6;
  params.mining.tau = 0.6;

  params.gate_on_error_head = true;
  const auto strict = focused_explore(ds, params);
  REQUIRE(strict.size() == 1);
  // Whole-tail disparity is recorded even when the gate used the head.
  CHECK(strict.front().disparity ==
        doctest::Approx(2.0 / 6.0 - 0.2).epsilon(1e-12));

  params.gate_on_error_head = false;
  CHECK(focused_explore(ds, params).empty());
}

TEST_CASE("ee_search finds the separable minority blob") {
  const Dataset ds = blob_instance(8, 4000, 200, 6.0, 5);
  EEParams params;
  params.seed = 5;
  params.iterations = 1500;
  params.mining.top_l = 1;
  params.mining.p = 0.05;
  params.mining.tau = 0.5;
  const auto got = ee_search(ds, params);
  REQUIRE(!got.empty());
  const double frac = minority_fraction(ds, got.front().tail);
  const double global =
      static_cast<double>(200) / static_cast<double>(ds.n());
  CHECK(frac >= 2.0 * global);
}

TEST_CASE("ee_search corner settings stay deterministic") {
  const Dataset ds = blob_instance(4, 300, 30, 4.0, 6);
  EEParams params;
  params.seed = 9;
  params.iterations = 0;  // starts only
  params.mining.top_l = 2;
  params.mining.tau = -10.0;
  const auto a = ee_search(ds, params);
  const auto b = ee_search(ds, params);
  REQUIRE(!a.empty());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(cosine(a[i].direction, b[i].direction) ==
          doctest::Approx(1.0).epsilon(1e-15));
  }

  params.eps_explore = 1.0;  // pure random search never needs a best yet
  params.iterations = 50;
  CHECK(!ee_search(ds, params).empty());
  params.eps_explore = 0.0;  // pure exploitation after the starts
  CHECK(!ee_search(ds, params).empty());
}

TEST_CASE("mine_grid and mine_qp run the shared accept loop") {
  const Dataset ds = blob_instance(3, 500, 50, 5.0, 11);
  GridParams gp;
  gp.eps_angle = 0.15;
  gp.max_eval = 128;
  gp.seed = 2;
  gp.mining.top_l = 2;
  gp.mining.p = 0.1;
  gp.mining.tau = 0.0;
  const auto from_grid = mine_grid(ds, gp);
  CHECK(!from_grid.empty());
  for (const auto& c : from_grid) {
    CHECK(c.heuristic == "grid");
    CHECK(c.skew > 0.0);
    CHECK(c.disparity >= 0.0);
  }

  QpParams qp;
  qp.count = 30;
  qp.seed = 2;
  qp.mining = gp.mining;
  const auto from_qp = mine_qp(ds, qp);
  CHECK(!from_qp.empty());
  for (const auto& c : from_qp) {
    CHECK(c.heuristic == "qp");
    CHECK(c.skew > 0.0);
  }
}
