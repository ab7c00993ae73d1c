#pragma once

#include "steklame/types.hpp"

#include <array>
#include <span>
#include <variant>
#include <vector>

namespace steklame {

inline constexpr int kDefaultQuadratureNodes = 512;
inline constexpr int kDefaultConvexityGrid = 256;

/// Truncated real Fourier series a0 + sum_k (a_k cos kt + b_k sin kt).
/// a[k-1] and b[k-1] hold the mode-k coefficients.
struct TrigSeries {
  double a0 = 0.0;
  std::vector<double> a;
  std::vector<double> b;

  TrigSeries() = default;
  TrigSeries(double constant, std::vector<double> cos_coeffs,
             std::vector<double> sin_coeffs);

  int order() const { return static_cast<int>(a.size()); }

  /// Value and the first three derivatives at t.
  std::array<double, 4> eval(double t) const;
  double operator()(double t) const { return eval(t)[0]; }
};

/// Closed curve t -> (x(t), y(t)) with both components truncated Fourier
/// series of the same order. Construction guarantees positive orientation,
/// nonvanishing speed and a simple sampled polygon.
class FourierBoundary {
 public:
  static FourierBoundary create(TrigSeries x, TrigSeries y);

  const TrigSeries& x() const { return x_; }
  const TrigSeries& y() const { return y_; }
  int order() const { return x_.order(); }

 private:
  FourierBoundary(TrigSeries x, TrigSeries y)
      : x_(std::move(x)), y_(std::move(y)) {}

  TrigSeries x_;
  TrigSeries y_;
};

/// Convex curve described by its support function p, parametrized by the
/// outward normal angle: h(t) = p(t) (cos t, sin t) + p'(t) (-sin t, cos t).
class SupportBoundary {
 public:
  /// Rejects p with a negative convexity margin or a nonpositive value on
  /// the constraint grid.
  static SupportBoundary create(TrigSeries p,
                                int grid = kDefaultConvexityGrid);

  const TrigSeries& support() const { return p_; }
  int order() const { return p_.order(); }

 private:
  explicit SupportBoundary(TrigSeries p) : p_(std::move(p)) {}

  TrigSeries p_;
};

using Boundary = std::variant<FourierBoundary, SupportBoundary>;

struct CurvePoint {
  Vec2 point;
  Vec2 derivative;  // gamma'(t)
  Vec2 tangent;     // unit
  Vec2 normal;      // unit, outward
  double speed = 0.0;
  double curvature = 0.0;  // positive on convex, counterclockwise arcs
};

CurvePoint eval_curve(const Boundary& boundary, double t);

/// Green's-theorem area by periodic trapezoidal quadrature.
double area(const Boundary& boundary, int nodes = kDefaultQuadratureNodes);
double perimeter(const Boundary& boundary,
                 int nodes = kDefaultQuadratureNodes);

/// min over an equispaced grid of p''(t) + p(t). Nonnegative means convex.
double convexity_margin(const TrigSeries& support,
                        int grid = kDefaultConvexityGrid);

/// Boundary nodes with trapezoidal weights w_i = (2 pi / M) |gamma'(t_i)|.
struct BoundarySample {
  std::vector<double> t;
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<double> speeds;
  std::vector<double> curvatures;
  std::vector<double> weights;

  int size() const { return static_cast<int>(t.size()); }
};

BoundarySample sample_boundary(const Boundary& boundary, int nodes,
                               double phase = 0.0);

/// Collocation nodes plus MFS source points y_j = x(s_j) + alpha n(s_j),
/// with s_j equispaced (a uniform sub-sample of the collocation parameters
/// whenever N divides M).
struct DiscreteBoundary {
  BoundarySample collocation;
  std::vector<Vec2> sources;
  double alpha = 0.0;

  int collocation_count() const { return collocation.size(); }
  int source_count() const { return static_cast<int>(sources.size()); }
};

DiscreteBoundary discretize(const Boundary& boundary, int collocation,
                            int sources, double alpha, double phase = 0.0);

// Polygon utilities on sampled curves.
bool point_in_polygon(std::span<const Vec2> polygon, const Vec2& p);
bool polygon_is_simple(std::span<const Vec2> polygon);
std::vector<Vec2> sample_polygon(const Boundary& boundary, int nodes);

// Coefficient-space views shared by the optimizer and the I/O layer.
//
// Fourier layout: [x.a0, x.a_1..P, x.b_1..P, y.a0, y.a_1..P, y.b_1..P].
// Support layout: [a0, a_1..P, b_1..P].
std::vector<double> coefficients(const Boundary& boundary);
Boundary with_coefficients(const Boundary& boundary,
                           std::span<const double> coeffs);

/// Boundary velocity at parameter t induced by a unit change of one
/// coefficient in the layout above.
Vec2 coefficient_velocity(const Boundary& boundary, int index, double t);

/// Homothety about the origin.
Boundary scaled(const Boundary& boundary, double factor);
/// Removes the translation modes (x.a0, y.a0 or a_1, b_1).
Boundary recentred(const Boundary& boundary);

FourierBoundary make_circle(double radius, const Vec2& center = Vec2::Zero());
SupportBoundary make_support_circle(double radius);

}  // namespace steklame
