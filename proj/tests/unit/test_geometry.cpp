#include <doctest.h>

#include <cmath>
#include <random>

#include "planar_ot/geometry.hpp"
#include "support.hpp"

using namespace planar_ot;
using planar_ot::testing::random_lattice_point;
using planar_ot::testing::random_point;

TEST_CASE("distance on the three metrics") {
  CHECK(distance(Metric::l1, {0, 0}, {3, 4}) == 7);
  CHECK(distance(Metric::sq_euclid, {0, 0}, {3, 4}) == 25);
  CHECK(distance(Metric::euclid, {0, 0}, {3, 4}) == 5);
  CHECK(distance(Metric::euclid, {2, 5}, {2, 5}) == 0);
  CHECK(exact_distance(Metric::l1, {-2, 7}, {3, 4}) == 8);
  CHECK(exact_distance(Metric::sq_euclid, {0, 0}, {3, 4}) == 25);
  CHECK_THROWS_AS((void)exact_distance(Metric::euclid, {0, 0}, {3, 4}), DomainError);
  CHECK_THROWS_AS((void)exact_distance(Metric::l1, {0.5, 0}, {3, 4}), DomainError);
}

TEST_CASE("metric names round trip") {
  for (const Metric m : planar_ot::testing::kMetrics) CHECK(parse_metric(to_string(m)) == m);
  CHECK_FALSE(parse_metric("manhattan").has_value());
  CHECK(is_true_metric(Metric::l1));
  CHECK_FALSE(is_true_metric(Metric::sq_euclid));
  CHECK_FALSE(has_integer_costs(Metric::euclid));
}

TEST_CASE("dominance directions are non-strict") {
  CHECK(is_direction(Direction::ne, {0, 0}, {1, 2}));
  CHECK_FALSE(is_direction(Direction::ne, {0, 0}, {-1, 2}));
  CHECK(is_direction(Direction::ne, {3, 3}, {3, 3}));
  CHECK(is_direction(Direction::ne, {0, 0}, {4, 0}));
  CHECK(is_direction(Direction::se, {0, 0}, {4, 0}));
  CHECK(is_direction(Direction::nw, {0, 0}, {-1, 2}));
  CHECK(is_direction(Direction::sw, {0, 0}, {-1, -2}));
}

TEST_CASE("reflection maps each quadrant onto NE") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 2000; ++k) {
    const Point a = random_lattice_point(rng, -9, 9);
    const Point p = random_lattice_point(rng, -9, 9);
    for (const Direction q : {Direction::ne, Direction::nw, Direction::se, Direction::sw}) {
      CHECK(reflect(q, reflect(q, p)) == p);
      CHECK(is_direction(q, a, p) == is_direction(Direction::ne, reflect(q, a), reflect(q, p)));
      for (const Metric m : planar_ot::testing::kMetrics) {
        CHECK(distance(m, reflect(q, a), reflect(q, p)) == distance(m, a, p));
      }
    }
  }
}

TEST_CASE("symmetry, identity and the triangle inequality") {
  std::mt19937_64 rng(5);
  bool sq_violates = false;
  for (int k = 0; k < 10000; ++k) {
    const Point a = random_point(rng, -20, 20);
    const Point b = random_point(rng, -20, 20);
    const Point c = random_point(rng, -20, 20);
    for (const Metric m : planar_ot::testing::kMetrics) {
      CHECK(distance(m, a, b) == distance(m, b, a));
      CHECK(distance(m, a, a) == 0);
      CHECK(distance(m, a, b) > 0);
      const bool holds = distance(m, a, c) <= distance(m, a, b) + distance(m, b, c) + 1e-9;
      if (is_true_metric(m)) {
        CHECK(holds);
      } else if (!holds) {
        sq_violates = true;
      }
    }
  }
  CHECK(sq_violates);
}

TEST_CASE("hyperbolic sets in the centered orientation") {
  // member iff d(p, (-a,0)) - d(p, (a,0)) > b
  CHECK(hyperbolic_contains(centered_hyperbola(1, -0.5), Metric::euclid, {0, 10}));
  CHECK(hyperbolic_contains(centered_hyperbola(1, 1.5), Metric::euclid, {5, 0}));
  CHECK_FALSE(hyperbolic_contains(centered_hyperbola(1, 0), Metric::euclid, {-5, 0}));
  CHECK_FALSE(hyperbolic_contains(centered_hyperbola(1, 0), Metric::euclid, {0, 3}));
  CHECK(hyperbolic_contains(centered_hyperbola(1, 0), Metric::euclid, {0.001, 3}));

  const HyperbolicSet h{{0, 0}, {4, 0}, 1.0};
  CHECK(hyperbolic_contains(h, Metric::euclid, {4, 1}));
  CHECK_FALSE(hyperbolic_contains(h, Metric::euclid, {0, 1}));
}

TEST_CASE("asymptote slope bound") {
  CHECK(asymptote_slope_bound(1, 1) == doctest::Approx(1.7320508075688772).epsilon(1e-15));
  CHECK(asymptote_slope_bound(2.5, 3) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)asymptote_slope_bound(1, 2), DomainError);
  CHECK_THROWS_AS((void)asymptote_slope_bound(1, 0), DomainError);
  CHECK_THROWS_AS((void)asymptote_slope_bound(0, 0.5), DomainError);
}

TEST_CASE("cone inside the centered set") {
  CHECK(cone_inside_hyp(1, -0.1, 100));
  CHECK(cone_inside_hyp(1, 1, 1.5));
  CHECK_FALSE(cone_inside_hyp(1, 1, 2.0));
  CHECK_THROWS_AS((void)cone_inside_hyp(1, 2.5, 1), DomainError);

  const Cone cone{{1, 1}, 0.5};
  CHECK(cone.contains({1, 1}));
  CHECK(cone.contains({3, 2}));
  CHECK_FALSE(cone.contains({3, 2.5}));
  CHECK_FALSE(cone.contains({1, 1.1}));
}

TEST_CASE("cone membership sampled from an apex inside the set") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  int checked = 0;
  for (int k = 0; k < 300; ++k) {
    const double a = 0.2 + 3 * u(rng);
    const double b = 2 * a * u(rng) * 0.98;
    const double c = asymptote_slope_bound(a, b);
    const HyperbolicSet h = centered_hyperbola(a, b);
    const Point apex{a + 5 * u(rng), (u(rng) - 0.5) * 4};
    if (!hyperbolic_contains(h, Metric::euclid, apex)) continue;
    for (int t = 0; t < 50; ++t) {
      const double dx = 20 * u(rng);
      const double dy = (2 * u(rng) - 1) * c * dx * 0.999;
      CHECK(hyperbolic_contains(h, Metric::euclid, {apex.x + dx, apex.y + dy}));
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("vertical cuts") {
  CHECK(vertical_cut_y2({0, 0}, {0, 2}) == 1);
  CHECK(vertical_cut_y2({0, 0}, {2, 2}) == 2);
  CHECK(vertical_cut_y2({0, 0}, {1, 4}) == 2.125);
  CHECK_THROWS_AS((void)vertical_cut_y2({0, 0}, {2, 0}), DomainError);
  CHECK(vertical_cut_y3({0, 0}, {1, 2}) == doctest::Approx(10.0 / 3.0).epsilon(1e-15));
  CHECK(vertical_cut_y3({0, 0}, {1, 3}) == 3.75);
  CHECK_THROWS_AS((void)vertical_cut_y3({0, 0}, {2, 2}), DomainError);
}

TEST_CASE("the y2 cut lies on the bisector") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 1000; ++k) {
    const Point p0 = random_point(rng, -5, 5);
    Point p1 = random_point(rng, -5, 5);
    if (p1.y <= p0.y + 0.01) p1.y = p0.y + 1;
    const Point cut{p0.x, vertical_cut_y2(p0, p1)};
    CHECK(distance(Metric::euclid, cut, p0) == doctest::Approx(distance(Metric::euclid, cut, p1)).epsilon(1e-9));
  }
}
