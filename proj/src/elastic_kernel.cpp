#include "steklame/elastic_kernel.hpp"

#include <cmath>
#include <numbers>

namespace steklame {

namespace {

constexpr double kMinSeparation = 1e-12;

struct KelvinConstants {
  double c1;  // (lambda + 3 mu) / (4 pi mu (lambda + 2 mu))
  double c2;  // (lambda + mu) / (lambda + 3 mu)
};

KelvinConstants constants(const LameParameters& p) {
  return {(p.lambda + 3.0 * p.mu) /
              (4.0 * std::numbers::pi * p.mu * (p.lambda + 2.0 * p.mu)),
          (p.lambda + p.mu) / (p.lambda + 3.0 * p.mu)};
}

Vec2 separation(const Vec2& x, const Vec2& y) {
  Vec2 d = x - y;
  if (!(d.norm() >= kMinSeparation)) {
    throw Error(ErrorKind::singular_kernel,
                "Kelvin kernel evaluated at (nearly) coincident points");
  }
  return d;
}

}  // namespace

LameParameters LameParameters::create(double lambda, double mu) {
  LameParameters p{lambda, mu};
  if (!p.valid()) {
    throw Error(ErrorKind::invalid_argument,
                "Lame parameters need mu > 0 and lambda + mu > 0");
  }
  return p;
}

bool LameParameters::valid() const {
  return std::isfinite(lambda) && std::isfinite(mu) && mu > 0.0 &&
         lambda + mu > 0.0;
}

Mat2 hooke(const Mat2& xi, const LameParameters& params) {
  return 2.0 * params.mu * xi + params.lambda * xi.trace() * Mat2::Identity();
}

Mat2 strain(const Mat2& jacobian) {
  return 0.5 * (jacobian + jacobian.transpose());
}

Vec2 traction(const Mat2& jacobian, const Vec2& n, const LameParameters& params) {
  return hooke(strain(jacobian), params) * n;
}

Mat2 kelvin(const Vec2& x, const Vec2& y, const LameParameters& params) {
  const Vec2 d = separation(x, y);
  const auto [c1, c2] = constants(params);
  const double r2 = d.squaredNorm();
  const double s = c1 * c2 / r2;
  const double diag = -0.5 * c1 * std::log(r2);
  const double off = s * d.x() * d.y();
  Mat2 phi;
  phi << s * d.x() * d.x() + diag, off, off, s * d.y() * d.y() + diag;
  return phi;
}

std::array<Mat2, 2> kelvin_gradient(const Vec2& x, const Vec2& y,
                                    const LameParameters& params) {
  const Vec2 d = separation(x, y);
  const auto [c1, c2] = constants(params);
  const double r2 = d.squaredNorm();
  const double inv_r2 = 1.0 / r2;
  std::array<Mat2, 2> grad;
  for (int k = 0; k < 2; ++k) {
    Mat2& g = grad[k];
    for (int i = 0; i < 2; ++i) {
      for (int l = 0; l < 2; ++l) {
        double v = 0.0;
        if (i == k) v -= d[l];
        if (i == l) v += c2 * d[k];
        if (k == l) v += c2 * d[i];
        v -= 2.0 * c2 * d[i] * d[k] * d[l] * inv_r2;
        g(i, l) = c1 * v * inv_r2;
      }
    }
  }
  return grad;
}

Mat2 kelvin_traction(const Vec2& x, const Vec2& y, const Vec2& n,
                     const LameParameters& params) {
  const Vec2 d = separation(x, y);
  const auto [c1, c2] = constants(params);
  const double r2 = d.squaredNorm();
  const double dn = d.dot(n);
  const double mu = params.mu;
  const double lambda = params.lambda;
  // Strain of column k: c1/r^2 [ (c2-1)/2 (e_k d^T + d e_k^T) + c2 d_k Id ]
  //                     - 2 c1 c2 d_k d d^T / r^4.
  Mat2 t;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      const double shear = 0.5 * (c2 - 1.0) * ((i == k ? dn : 0.0) + n[k] * d[i]) +
                           c2 * n[i] * d[k];
      t(i, k) = 2.0 * mu * c1 * shear / r2 -
                4.0 * mu * c1 * c2 * d[i] * d[k] * dn / (r2 * r2) +
                lambda * c1 * (c2 - 1.0) * d[k] * n[i] / r2;
    }
  }
  return t;
}

}  // namespace steklame
