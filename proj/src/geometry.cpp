#include "steklame/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace steklame {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinSpeed = 1e-12;
constexpr int kValidationNodes = 512;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

CurvePoint make_point(const Vec2& point, const Vec2& d1, const Vec2& d2) {
  const double speed = d1.norm();
  if (!(speed >= kMinSpeed)) {
    throw Error(ErrorKind::singular_parametrization,
                "boundary parametrization has vanishing speed");
  }
  CurvePoint c;
  c.point = point;
  c.derivative = d1;
  c.speed = speed;
  c.tangent = d1 / speed;
  c.normal = Vec2(c.tangent.y(), -c.tangent.x());
  c.curvature = cross(d1, d2) / (speed * speed * speed);
  return c;
}

CurvePoint eval_fourier(const FourierBoundary& b, double t) {
  const auto x = b.x().eval(t);
  const auto y = b.y().eval(t);
  return make_point(Vec2(x[0], y[0]), Vec2(x[1], y[1]), Vec2(x[2], y[2]));
}

CurvePoint eval_support(const SupportBoundary& b, double t) {
  const auto p = b.support().eval(t);
  const double c = std::cos(t);
  const double s = std::sin(t);
  const Vec2 n(c, s);
  const Vec2 tau(-s, c);
  const double radius = p[0] + p[2];  // radius of curvature
  if (!(radius >= kMinSpeed)) {
    throw Error(ErrorKind::singular_parametrization,
                "support function has p + p'' below the speed floor");
  }
  CurvePoint out;
  out.point = p[0] * n + p[1] * tau;
  out.derivative = radius * tau;
  out.speed = radius;
  out.tangent = tau;
  out.normal = n;
  out.curvature = 1.0 / radius;
  return out;
}

double signed_area(const TrigSeries& x, const TrigSeries& y, int nodes) {
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double t = kTwoPi * i / nodes;
    const auto xv = x.eval(t);
    const auto yv = y.eval(t);
    sum += xv[0] * yv[1] - yv[0] * xv[1];
  }
  return 0.5 * sum * kTwoPi / nodes;
}

bool segments_cross(const Vec2& p, const Vec2& q, const Vec2& r, const Vec2& s) {
  const double d1 = cross(q - p, r - p);
  const double d2 = cross(q - p, s - p);
  const double d3 = cross(s - r, p - r);
  const double d4 = cross(s - r, q - r);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::singular_parametrization: return "singular-parametrization";
    case ErrorKind::self_intersection: return "self-intersection";
    case ErrorKind::orientation: return "orientation";
    case ErrorKind::invalid_offset: return "invalid-offset";
    case ErrorKind::singular_kernel: return "singular-kernel";
    case ErrorKind::insufficient_resolution: return "insufficient-resolution";
    case ErrorKind::multiplicity: return "multiplicity";
    case ErrorKind::untrustworthy_pair: return "untrustworthy-pair";
    case ErrorKind::config: return "config";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

TrigSeries::TrigSeries(double constant, std::vector<double> cos_coeffs,
                       std::vector<double> sin_coeffs)
    : a0(constant), a(std::move(cos_coeffs)), b(std::move(sin_coeffs)) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::invalid_argument,
                "cosine and sine coefficient lists differ in length");
  }
}

std::array<double, 4> TrigSeries::eval(double t) const {
  std::array<double, 4> v{a0, 0.0, 0.0, 0.0};
  for (int k = 1; k <= order(); ++k) {
    const double c = std::cos(k * t);
    const double s = std::sin(k * t);
    const double ak = a[k - 1];
    const double bk = b[k - 1];
    const double kk = static_cast<double>(k);
    v[0] += ak * c + bk * s;
    v[1] += kk * (-ak * s + bk * c);
    v[2] += -kk * kk * (ak * c + bk * s);
    v[3] += kk * kk * kk * (ak * s - bk * c);
  }
  return v;
}

FourierBoundary FourierBoundary::create(TrigSeries x, TrigSeries y) {
  if (x.order() != y.order() || x.order() < 1) {
    throw Error(ErrorKind::invalid_argument,
                "Fourier boundary needs matching component orders >= 1");
  }
  // t -> -t reverses orientation and keeps the series form.
  if (signed_area(x, y, kValidationNodes) < 0.0) {
    for (auto& v : x.b) v = -v;
    for (auto& v : y.b) v = -v;
  }
  FourierBoundary fb(std::move(x), std::move(y));
  std::vector<Vec2> poly;
  poly.reserve(kValidationNodes);
  for (int i = 0; i < kValidationNodes; ++i) {
    poly.push_back(eval_fourier(fb, kTwoPi * i / kValidationNodes).point);
  }
  if (!polygon_is_simple(poly)) {
    throw Error(ErrorKind::self_intersection,
                "Fourier boundary self-intersects");
  }
  return fb;
}

SupportBoundary SupportBoundary::create(TrigSeries p, int grid) {
  if (p.order() < 1) {
    throw Error(ErrorKind::invalid_argument, "support function order must be >= 1");
  }
  if (convexity_margin(p, grid) < -1e-10) {
    throw Error(ErrorKind::invalid_argument,
                "support function violates p'' + p >= 0");
  }
  for (int i = 0; i < grid; ++i) {
    if (!(p(kTwoPi * i / grid) > 0.0)) {
      throw Error(ErrorKind::invalid_argument,
                  "support function must be positive (origin interior)");
    }
  }
  return SupportBoundary(std::move(p));
}

CurvePoint eval_curve(const Boundary& boundary, double t) {
  return std::visit(
      [t](const auto& b) -> CurvePoint {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, FourierBoundary>) {
          return eval_fourier(b, t);
        } else {
          return eval_support(b, t);
        }
      },
      boundary);
}

double area(const Boundary& boundary, int nodes) {
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const CurvePoint c = eval_curve(boundary, kTwoPi * i / nodes);
    sum += cross(c.point, c.derivative);
  }
  const double a = 0.5 * sum * kTwoPi / nodes;
  if (a <= 0.0) {
    throw Error(ErrorKind::orientation, "boundary is negatively oriented");
  }
  return a;
}

double perimeter(const Boundary& boundary, int nodes) {
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    sum += eval_curve(boundary, kTwoPi * i / nodes).speed;
  }
  return sum * kTwoPi / nodes;
}

double convexity_margin(const TrigSeries& support, int grid) {
  if (grid < 4 * std::max(1, support.order())) {
    throw Error(ErrorKind::invalid_argument,
                "convexity grid must have at least 4 points per mode");
  }
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const auto v = support.eval(kTwoPi * i / grid);
    margin = std::min(margin, v[0] + v[2]);
  }
  return margin;
}

BoundarySample sample_boundary(const Boundary& boundary, int nodes,
                               double phase) {
  if (nodes < 3) {
    throw Error(ErrorKind::invalid_argument, "need at least 3 boundary nodes");
  }
  BoundarySample s;
  s.t.reserve(nodes);
  s.points.reserve(nodes);
  s.normals.reserve(nodes);
  s.speeds.reserve(nodes);
  s.curvatures.reserve(nodes);
  s.weights.reserve(nodes);
  const double h = kTwoPi / nodes;
  for (int i = 0; i < nodes; ++i) {
    const double t = phase + h * i;
    const CurvePoint c = eval_curve(boundary, t);
    s.t.push_back(t);
    s.points.push_back(c.point);
    s.normals.push_back(c.normal);
    s.speeds.push_back(c.speed);
    s.curvatures.push_back(c.curvature);
    s.weights.push_back(h * c.speed);
  }
  return s;
}

std::vector<Vec2> sample_polygon(const Boundary& boundary, int nodes) {
  std::vector<Vec2> poly;
  poly.reserve(nodes);
  for (int i = 0; i < nodes; ++i) {
    poly.push_back(eval_curve(boundary, kTwoPi * i / nodes).point);
  }
  return poly;
}

DiscreteBoundary discretize(const Boundary& boundary, int collocation,
                            int sources, double alpha, double phase) {
  if (sources < 1 || collocation < sources) {
    throw Error(ErrorKind::invalid_argument,
                "discretize requires 1 <= N <= M");
  }
  if (!(alpha > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "source offset must be positive");
  }
  DiscreteBoundary db;
  db.alpha = alpha;
  db.collocation = sample_boundary(boundary, collocation, phase);

  const std::vector<Vec2> poly =
      sample_polygon(boundary, std::max(4 * collocation, 1024));
  db.sources.reserve(sources);
  for (int j = 0; j < sources; ++j) {
    const CurvePoint c = eval_curve(boundary, phase + kTwoPi * j / sources);
    const Vec2 y = c.point + alpha * c.normal;
    if (point_in_polygon(poly, y)) {
      throw Error(ErrorKind::invalid_offset,
                  "source point falls inside the domain; reduce alpha");
    }
    db.sources.push_back(y);
  }
  return db;
}

bool point_in_polygon(std::span<const Vec2> polygon, const Vec2& p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

bool polygon_is_simple(std::span<const Vec2> polygon) {
  // Sweep over segments ordered by their left end; only segments whose
  // x-ranges overlap are tested.
  const int n = static_cast<int>(polygon.size());
  if (n < 3) return false;
  struct Seg {
    int index;
    double xmin;
    double xmax;
  };
  std::vector<Seg> segs(n);
  for (int i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    segs[i] = {i, std::min(a.x(), b.x()), std::max(a.x(), b.x())};
  }
  std::sort(segs.begin(), segs.end(),
            [](const Seg& l, const Seg& r) { return l.xmin < r.xmin; });
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n && segs[v].xmin <= segs[u].xmax; ++v) {
      const int i = segs[u].index;
      const int j = segs[v].index;
      const int gap = std::abs(i - j);
      if (gap == 1 || gap == n - 1) continue;  // adjacent segments share a vertex
      if (segments_cross(polygon[i], polygon[(i + 1) % n], polygon[j],
                         polygon[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

std::vector<double> coefficients(const Boundary& boundary) {
  std::vector<double> out;
  auto append = [&out](const TrigSeries& s) {
    out.push_back(s.a0);
    out.insert(out.end(), s.a.begin(), s.a.end());
    out.insert(out.end(), s.b.begin(), s.b.end());
  };
  std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, FourierBoundary>) {
          append(b.x());
          append(b.y());
        } else {
          append(b.support());
        }
      },
      boundary);
  return out;
}

namespace {

TrigSeries series_from(std::span<const double> c, int order) {
  TrigSeries s;
  s.a0 = c[0];
  s.a.assign(c.begin() + 1, c.begin() + 1 + order);
  s.b.assign(c.begin() + 1 + order, c.begin() + 1 + 2 * order);
  return s;
}

}  // namespace

Boundary with_coefficients(const Boundary& boundary,
                           std::span<const double> coeffs) {
  return std::visit(
      [&](const auto& b) -> Boundary {
        using B = std::decay_t<decltype(b)>;
        const int order = b.order();
        const std::size_t block = 2 * order + 1;
        if constexpr (std::is_same_v<B, FourierBoundary>) {
          if (coeffs.size() != 2 * block) {
            throw Error(ErrorKind::invalid_argument, "coefficient count mismatch");
          }
          return FourierBoundary::create(series_from(coeffs.first(block), order),
                                         series_from(coeffs.subspan(block), order));
        } else {
          if (coeffs.size() != block) {
            throw Error(ErrorKind::invalid_argument, "coefficient count mismatch");
          }
          return SupportBoundary::create(series_from(coeffs, order));
        }
      },
      boundary);
}

Vec2 coefficient_velocity(const Boundary& boundary, int index, double t) {
  return std::visit(
      [&](const auto& b) -> Vec2 {
        using B = std::decay_t<decltype(b)>;
        const int order = b.order();
        const int block = 2 * order + 1;
        if constexpr (std::is_same_v<B, FourierBoundary>) {
          if (index < 0 || index >= 2 * block) {
            throw Error(ErrorKind::invalid_argument, "coefficient index out of range");
          }
          const int local = index % block;
          double v = 1.0;
          if (local >= 1 && local <= order) v = std::cos(local * t);
          if (local > order) v = std::sin((local - order) * t);
          return index < block ? Vec2(v, 0.0) : Vec2(0.0, v);
        } else {
          if (index < 0 || index >= block) {
            throw Error(ErrorKind::invalid_argument, "coefficient index out of range");
          }
          // delta p = basis function q; delta h = q n + q' tau.
          double q = 1.0;
          double dq = 0.0;
          if (index >= 1 && index <= order) {
            q = std::cos(index * t);
            dq = -index * std::sin(index * t);
          } else if (index > order) {
            const int k = index - order;
            q = std::sin(k * t);
            dq = k * std::cos(k * t);
          }
          const Vec2 n(std::cos(t), std::sin(t));
          const Vec2 tau(-std::sin(t), std::cos(t));
          return q * n + dq * tau;
        }
      },
      boundary);
}

Boundary scaled(const Boundary& boundary, double factor) {
  if (!(factor > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "homothety factor must be positive");
  }
  std::vector<double> c = coefficients(boundary);
  for (double& v : c) v *= factor;
  return with_coefficients(boundary, c);
}

Boundary recentred(const Boundary& boundary) {
  std::vector<double> c = coefficients(boundary);
  std::visit(
      [&](const auto& b) {
        using B = std::decay_t<decltype(b)>;
        const int order = b.order();
        if constexpr (std::is_same_v<B, FourierBoundary>) {
          c[0] = 0.0;
          c[2 * order + 1] = 0.0;
        } else {
          c[1] = 0.0;
          c[1 + order] = 0.0;
        }
      },
      boundary);
  return with_coefficients(boundary, c);
}

FourierBoundary make_circle(double radius, const Vec2& center) {
  return FourierBoundary::create(TrigSeries(center.x(), {radius}, {0.0}),
                                 TrigSeries(center.y(), {0.0}, {radius}));
}

SupportBoundary make_support_circle(double radius) {
  return SupportBoundary::create(TrigSeries(radius, {0.0}, {0.0}));
}

}  // namespace steklame
