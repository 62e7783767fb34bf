#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "minoria/median_level.hpp"
#include "oracles.hpp"

using namespace minoria;

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
}

TEST_CASE("running example: three regions, two vertices") {
  const Dataset ds = oracle::toy();
  const auto regions = enumerate_median_regions(ds);
  REQUIRE(regions.size() == 3);

  CHECK(regions[0].theta_lo == 0.0);
  CHECK(regions[0].median_index == 1);
  CHECK(regions[0].theta_hi == doctest::Approx(0.5880026035475675).epsilon(1e-12));
  REQUIRE(regions[0].boundary_vertex.has_value());
  CHECK((*regions[0].boundary_vertex)(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK((*regions[0].boundary_vertex)(1) == doctest::Approx(4.0 / 9.0).epsilon(1e-9));

  CHECK(regions[1].median_index == 0);
  CHECK(regions[1].theta_lo == regions[0].theta_hi);
  CHECK(regions[1].theta_hi == doctest::Approx(1.2490457723982544).epsilon(1e-12));
  REQUIRE(regions[1].boundary_vertex.has_value());
  CHECK((*regions[1].boundary_vertex)(0) == doctest::Approx(0.2).epsilon(1e-9));
  CHECK((*regions[1].boundary_vertex)(1) == doctest::Approx(0.6).epsilon(1e-9));

  CHECK(regions[2].median_index == 2);
  CHECK(regions[2].theta_lo == regions[1].theta_hi);
  CHECK(regions[2].theta_hi == kHalfPi);
  CHECK(!regions[2].boundary_vertex.has_value());
}

TEST_CASE("sweep_events ordering and quadrant filter") {
  const Dataset ds = oracle::toy();
  const auto events = sweep_events(ds);
  // The (t2, t3) dual intersection lies outside the first quadrant.
  REQUIRE(events.size() == 2);
  CHECK(events[0].theta < events[1].theta);
  CHECK(events[0].i == 0);
  CHECK(events[0].j == 1);
  CHECK(events[1].i == 0);
  CHECK(events[1].j == 2);
}

TEST_CASE("median_at agrees with the brute-force median") {
  Rng rng(57);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 3 + 2 * rng.uniform_index(10);  // odd sizes 3..21
    const Dataset ds = oracle::random_positive(rng, n, 2);
    const auto regions = enumerate_median_regions(ds);
    for (int k = 0; k < 200; ++k) {
      const double theta = rng.uniform(0.0, kHalfPi);
      const int got = median_at(regions, theta);
      const int want = oracle::brute_median(ds, Direction::from_angle(theta));
      REQUIRE(got == want);
    }
    // Both endpoints, where the interval convention matters.
    CHECK(median_at(regions, 0.0) ==
          oracle::brute_median(ds, Direction::from_angle(0.0)));
    CHECK(median_at(regions, kHalfPi) ==
          oracle::brute_median(ds, Direction::from_angle(kHalfPi)));
  }
}

TEST_CASE("even n uses the single-tuple lower median") {
  const Dataset ds =
      oracle::make_dataset({{1.0, 4.0}, {2.0, 3.0}, {3.0, 2.0}, {4.0, 1.0}});
  const auto regions = enumerate_median_regions(ds);
  // rank ceil(4/2) = 2nd smallest everywhere
  CHECK(median_at(regions, 0.0) == 1);
  CHECK(median_at(regions, kHalfPi) == 2);
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const double theta = rng.uniform(0.0, kHalfPi);
    CHECK(median_at(regions, theta) ==
          oracle::brute_median(ds, Direction::from_angle(theta)));
  }
}

TEST_CASE("tiny inputs") {
  const Dataset one = oracle::make_dataset({{2.0, 3.0}});
  const auto r1 = enumerate_median_regions(one);
  REQUIRE(r1.size() == 1);
  CHECK(r1[0].theta_lo == 0.0);
  CHECK(r1[0].theta_hi == kHalfPi);
  CHECK(r1[0].median_index == 0);

  const Dataset two = oracle::make_dataset({{1.0, 2.0}, {2.0, 1.0}});
  const auto r2 = enumerate_median_regions(two);
  REQUIRE(r2.size() == 2);
  CHECK(r2[0].median_index == 0);  // n=2 median is the lower one
  CHECK(r2[1].median_index == 1);
  CHECK(r2[0].theta_hi == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-12));
}

TEST_CASE("duplicate rows produce no events and keep id order") {
  const Dataset ds =
      oracle::make_dataset({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}});
  const auto regions = enumerate_median_regions(ds);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].median_index == 1);  // rank 2 of ids {0,1,2}
}

TEST_CASE("collinear points: concurrent dual lines collapse to one region") {
  // (1,3),(2,2),(3,1) lie on x+y=4, so all three dual intersections
  // coincide at (1/4,1/4): the sweep sees three simultaneous swaps whose
  // net media change cancels (zero-width regions must merge away).
  const Dataset ds = oracle::make_dataset({{1.0, 3.0}, {2.0, 2.0}, {3.0, 1.0}});
  const auto regions = enumerate_median_regions(ds);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].median_index == 1);
  CHECK(regions[0].theta_lo == 0.0);
  CHECK(regions[0].theta_hi == kHalfPi);
}

TEST_CASE("region invariants on random data") {
  Rng rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    const Dataset ds = oracle::random_positive(rng, 9, 2);
    const auto regions = enumerate_median_regions(ds);
    REQUIRE(!regions.empty());
    CHECK(regions.front().theta_lo == 0.0);
    CHECK(regions.back().theta_hi == kHalfPi);
    for (std::size_t i = 0; i < regions.size(); ++i) {
      CHECK(regions[i].theta_lo < regions[i].theta_hi);
      if (i > 0) {
        CHECK(regions[i].theta_lo == regions[i - 1].theta_hi);
        CHECK(regions[i].median_index != regions[i - 1].median_index);
        REQUIRE(regions[i - 1].boundary_vertex.has_value());
        const Eigen::Vector2d v = *regions[i - 1].boundary_vertex;
        CHECK(v(0) > 0.0);
        CHECK(v(1) > 0.0);
        CHECK(std::atan2(v(1), v(0)) ==
              doctest::Approx(regions[i - 1].theta_hi).epsilon(1e-12));
      }
    }
    CHECK(!regions.back().boundary_vertex.has_value());
  }
}

TEST_CASE("median_at rejects out-of-range angles") {
  const auto regions = enumerate_median_regions(oracle::toy());
  CHECK_THROWS_AS(median_at(regions, -0.1), std::domain_error);
  CHECK_THROWS_AS(median_at(regions, kHalfPi + 0.1), std::domain_error);
}

TEST_CASE("regions csv shape") {
  const auto regions = enumerate_median_regions(oracle::toy());
  std::ostringstream out;
  write_regions_csv(regions, out);
  const std::string text = out.str();
  CHECK(text.rfind("theta_lo,theta_hi,median_index,vertex_x,vertex_y\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  // The last region has no vertex: its trailing cells stay empty.
  CHECK(text.substr(text.size() - 3) == ",,\n");
}

TEST_CASE("positivity is required") {
  const Dataset bad = oracle::make_dataset({{1.0, 2.0}, {-0.5, 1.0}});
  CHECK_THROWS_AS(enumerate_median_regions(bad), std::runtime_error);
}
