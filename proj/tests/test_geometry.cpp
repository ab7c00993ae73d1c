#include "support.hpp"

#include "steklame/boundary_io.hpp"
#include "steklame/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace steklame;
using namespace steklame::testing;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::internal;
}

}  // namespace

TEST_CASE("eval_curve on circles") {
  const Boundary s = support_curve(1.7, {0.0, 0.0}, {0.0, 0.0});
  for (double t : {0.0, 0.4, 2.0, 5.5}) {
    const CurvePoint c = eval_curve(s, t);
    CHECK(c.point.norm() == Approx(1.7).epsilon(1e-14));
    CHECK(c.curvature == Approx(1.0 / 1.7).epsilon(1e-14));
  }
  const CurvePoint c = eval_curve(make_circle(1.0), kPi / 2);
  CHECK(c.normal.x() == Approx(0.0).epsilon(1e-15));
  CHECK(c.normal.y() == Approx(1.0));
  CHECK(c.curvature == Approx(1.0));
}

TEST_CASE("eval_curve on omega1") {
  const CurvePoint c = eval_curve(omega1(), 0.0);
  CHECK(c.point.x() == Approx(1.0));
  CHECK(std::abs(c.point.y()) < 1e-15);
}

TEST_CASE("eval_curve derivatives match finite differences") {
  const double h = 1e-5;
  for (const Boundary& b : {omega1(), support_curve(1.0, {0.1, 0.05}, {0.0, -0.04})}) {
    for (double t : {0.1, 1.3, 2.9, 4.4}) {
      const CurvePoint c = eval_curve(b, t);
      const Vec2 fd = (eval_curve(b, t + h).point - eval_curve(b, t - h).point) / (2 * h);
      CHECK((fd - c.derivative).norm() <= 1e-6 * c.derivative.norm());
      const Vec2 fd2 =
          (eval_curve(b, t + h).derivative - eval_curve(b, t - h).derivative) / (2 * h);
      const double kappa = (c.derivative.x() * fd2.y() - c.derivative.y() * fd2.x()) /
                           std::pow(c.speed, 3);
      CHECK(kappa == Approx(c.curvature).epsilon(1e-6));
    }
  }
}

TEST_CASE("degenerate parametrization is rejected") {
  const auto k = kind_of([] {
    FourierBoundary::create(TrigSeries(0.0, {0.0}, {0.0}), TrigSeries(0.0, {0.0}, {0.0}));
  });
  CHECK(k == ErrorKind::singular_parametrization);
}

TEST_CASE("self-intersecting curve is rejected") {
  // figure eight
  const auto k = kind_of([] {
    FourierBoundary::create(TrigSeries(0.0, {0.0, 0.0}, {1.0, 0.0}),
                            TrigSeries(0.0, {0.0, 0.0}, {0.0, 1.0}));
  });
  CHECK(k == ErrorKind::self_intersection);
}

TEST_CASE("clockwise input is reoriented") {
  const Boundary b = FourierBoundary::create(TrigSeries(0.0, {1.0}, {0.0}),
                                             TrigSeries(0.0, {0.0}, {-1.0}));
  CHECK(area(b) == Approx(kPi));
  CHECK(eval_curve(b, 0.3).curvature == Approx(1.0));
}

TEST_CASE("area") {
  CHECK(area(make_circle(0.7)) == Approx(kPi * 0.49).epsilon(1e-14));
  CHECK(area(omega1()) == Approx(kPi).epsilon(1e-14));
  CHECK(area(support_curve(1.0, {0.1}, {0.0})) == Approx(kPi).epsilon(1e-14));
  CHECK(area(support_curve(1.0, {0.1}, {0.0}), 4096) ==
        Approx(area(make_support_circle(1.0))).epsilon(1e-14));
}

TEST_CASE("perimeter") {
  CHECK(perimeter(make_circle(0.7)) == Approx(2 * kPi * 0.7).epsilon(1e-14));
  const double p = perimeter(omega1());
  CHECK(std::abs(perimeter(omega1(), 1024) - p) < 1e-10 * p);

  // rounded square
  const Boundary sq = support_curve(1.0, {0.0, 0.0, 0.0, 0.06}, {0.0, 0.0, 0.0, 0.0});
  const auto poly = sample_polygon(sq, 20000);
  double chord = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    chord += (poly[(i + 1) % poly.size()] - poly[i]).norm();
  }
  CHECK(std::abs(perimeter(sq) - chord) < 1e-2 * chord);
}

TEST_CASE("convexity margin") {
  CHECK(convexity_margin(TrigSeries(1.0, {}, {})) == Approx(1.0));
  CHECK(convexity_margin(TrigSeries(1.0, {0.0, 0.3}, {0.0, 0.0})) == Approx(0.1));
  CHECK(convexity_margin(TrigSeries(1.0, {0.0, 0.5}, {0.0, 0.0})) == Approx(-0.5));
  CHECK(kind_of([] { SupportBoundary::create(TrigSeries(1.0, {0.0, 0.5}, {0.0, 0.0})); }) ==
        ErrorKind::invalid_argument);
}

TEST_CASE("discretize") {
  SUBCASE("unit circle") {
    const DiscreteBoundary db = discretize(make_circle(1.0), 8, 4, 0.1);
    REQUIRE(db.source_count() == 4);
    for (const Vec2& y : db.sources) CHECK(y.norm() == Approx(1.1));
    for (int j = 0; j < 4; ++j) {
      CHECK((db.sources[j] - 1.1 * db.collocation.points[2 * j]).norm() < 1e-14);
    }
  }
  SUBCASE("omega1 at the small offset") {
    const Boundary b = omega1();
    const DiscreteBoundary db = discretize(b, 200, 100, 0.015);
    const auto poly = sample_polygon(b, 4096);
    for (const Vec2& y : db.sources) CHECK_FALSE(point_in_polygon(poly, y));
    double total = 0.0;
    for (std::size_t i = 0; i < db.collocation.weights.size(); ++i) {
      total += db.collocation.weights[i];
      CHECK(db.collocation.normals[i].norm() == Approx(1.0).epsilon(1e-15));
    }
    CHECK(total == Approx(perimeter(b, 4096)).epsilon(1e-10));
  }
  SUBCASE("offset crossing the curve") {
    CHECK(kind_of([] { discretize(flower(5, 0.6), 200, 100, 1.0); }) ==
          ErrorKind::invalid_offset);
  }
  SUBCASE("bad sizes") {
    CHECK(kind_of([] { discretize(make_circle(1.0), 4, 8, 0.1); }) ==
          ErrorKind::invalid_argument);
    CHECK(kind_of([] { discretize(make_circle(1.0), 8, 4, 0.0); }) ==
          ErrorKind::invalid_argument);
  }
}

TEST_CASE("quadrature on the collocation grid reproduces the area") {
  for (const Boundary& b : {omega1(), support_curve(1.0, {0.0, 0.1, 0.02}, {0.0, 0.0, 0.03})}) {
    const BoundarySample s = sample_boundary(b, 512);
    double a = 0.0;
    for (int i = 0; i < s.size(); ++i) a += 0.5 * s.weights[i] * s.points[i].dot(s.normals[i]);
    CHECK(a == Approx(area(b)).epsilon(1e-8));
  }
}

TEST_CASE("translation invariance of area and perimeter") {
  auto check = [](const Boundary& b, std::vector<int> shift) {
    std::vector<double> c = coefficients(b);
    c[shift[0]] += 0.37;
    c[shift[1]] -= 0.21;
    const Boundary moved = with_coefficients(b, c);
    CHECK(std::abs(area(moved) - area(b)) < 1e-12);
    CHECK(std::abs(perimeter(moved) - perimeter(b)) < 1e-12);
  };
  const Boundary f = omega1();
  check(f, {0, 2 * std::get<FourierBoundary>(f).order() + 1});
  const Boundary s = support_curve(1.0, {0.0, 0.1}, {0.0, 0.05});
  check(s, {1, 1 + std::get<SupportBoundary>(s).order()});
}

TEST_CASE("convex support curves contain their chord midpoints") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.03, 0.03);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> a(4), b(4);
    for (int k = 1; k < 4; ++k) {
      a[k] = u(rng);
      b[k] = u(rng);
    }
    const Boundary s = support_curve(1.0, a, b);
    REQUIRE(convexity_margin(std::get<SupportBoundary>(s).support()) > 0.0);
    const auto poly = sample_polygon(s, 256);
    for (std::size_t i = 0; i < poly.size(); i += 7) {
      for (std::size_t j = i + 3; j < poly.size(); j += 11) {
        CHECK(point_in_polygon(poly, 0.5 * (poly[i] + poly[j])));
      }
    }
  }
}

TEST_CASE("coefficient velocity matches finite differences") {
  const double h = 1e-6;
  for (const Boundary& b : {omega1(), support_curve(1.0, {0.0, 0.1}, {0.0, 0.05})}) {
    const std::vector<double> c = coefficients(b);
    for (int k = 0; k < static_cast<int>(c.size()); ++k) {
      std::vector<double> plus = c, minus = c;
      plus[k] += h;
      minus[k] -= h;
      for (double t : {0.2, 2.5}) {
        const Vec2 fd = (eval_curve(with_coefficients(b, plus), t).point -
                         eval_curve(with_coefficients(b, minus), t).point) /
                        (2 * h);
        CHECK((fd - coefficient_velocity(b, k, t)).norm() < 1e-8);
      }
    }
  }
}

TEST_CASE("scaled and recentred") {
  const Boundary b = support_curve(1.0, {0.2, 0.1}, {-0.1, 0.0});
  CHECK(area(scaled(b, 2.0)) == Approx(4 * area(b)));
  const auto c = coefficients(recentred(b));
  CHECK(c[1] == 0.0);
  CHECK(c[3] == 0.0);
  CHECK(area(recentred(b)) == Approx(area(b)));
}

TEST_CASE("boundary JSON round trip is bit exact") {
  for (const Boundary& b :
       {omega1(), support_curve(1.0 / 3.0, {0.0, 0.1 / 7.0}, {0.0, std::sqrt(2.0) / 100})}) {
    const Boundary back = boundary_from_json(boundary_to_json(b));
    CHECK(coefficients(back) == coefficients(b));
    CHECK(back.index() == b.index());
  }
}

TEST_CASE("boundary JSON rejects unknown keys and malformed input") {
  CHECK(kind_of([] {
          boundary_from_json(
              R"({"type":"support","order":1,"coeffs":{"a0":1,"a":[0],"b":[0]},"extra":1})");
        }) == ErrorKind::config);
  CHECK(kind_of([] {
          boundary_from_json(R"({"type":"support","order":1,"coeffs":{"a0":1,"a":[0]}})");
        }) == ErrorKind::config);
  CHECK(kind_of([] { boundary_from_json("{not json"); }) == ErrorKind::config);
  CHECK(kind_of([] {
          boundary_from_json(R"({"type":"spline","order":1,"coeffs":{}})");
        }) == ErrorKind::config);
}
