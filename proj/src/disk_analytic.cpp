#include "steklame/disk_analytic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace steklame {

namespace {

// Scalar field value with its gradient; enough algebra to write the disk
// eigenfunctions as polynomials in x1, x2.
struct Field {
  double v = 0.0;
  Vec2 g = Vec2::Zero();
};

Field operator+(const Field& a, const Field& b) { return {a.v + b.v, a.g + b.g}; }
Field operator-(const Field& a, const Field& b) { return {a.v - b.v, a.g - b.g}; }
Field operator*(double s, const Field& a) { return {s * a.v, s * a.g}; }
Field operator*(const Field& a, const Field& b) {
  return {a.v * b.v, a.v * b.g + b.v * a.g};
}

// Re z^m and Im z^m with z = x1 + i x2.
std::pair<Field, Field> power(const Vec2& x, int m) {
  const std::complex<double> z(x.x(), x.y());
  if (m == 0) return {Field{1.0, Vec2::Zero()}, Field{0.0, Vec2::Zero()}};
  const std::complex<double> zm = std::pow(z, m);
  const std::complex<double> dz = static_cast<double>(m) * std::pow(z, m - 1);
  // d/dx1 z^m = dz, d/dx2 z^m = i dz.
  Field re{zm.real(), Vec2(dz.real(), -dz.imag())};
  Field im{zm.imag(), Vec2(dz.imag(), dz.real())};
  return {re, im};
}

struct VectorField {
  Field u1;
  Field u2;
};

}  // namespace

const char* to_string(DiskBranch branch) {
  switch (branch) {
    case DiskBranch::zero: return "zero";
    case DiskBranch::radial: return "radial";
    case DiskBranch::n1: return "n1";
    case DiskBranch::low: return "low";
    case DiskBranch::high: return "high";
  }
  return "unknown";
}

const char* to_string(OrderingRegion region) {
  switch (region) {
    case OrderingRegion::lambda_below_minus_3mu: return "lambda<-3mu";
    case OrderingRegion::lambda_at_least_mu: return "lambda>=mu";
    case OrderingRegion::lambda_nonpositive: return "-3mu<lambda<=0";
    case OrderingRegion::lambda_between_0_and_mu: return "0<lambda<=mu";
  }
  return "unknown";
}

double disk_branch_value(DiskBranch branch, int mode, double radius,
                         const LameParameters& p) {
  const double l = p.lambda;
  const double m = p.mu;
  switch (branch) {
    case DiskBranch::zero: return 0.0;
    case DiskBranch::radial: return 2.0 * (l + m) / radius;
    case DiskBranch::n1: return 4.0 * m * (l + m) / ((l + 3.0 * m) * radius);
    case DiskBranch::low: return 2.0 * m * (mode - 1) / radius;
    case DiskBranch::high:
      return 2.0 * (mode + 1) * m * (l + m) / ((l + 3.0 * m) * radius);
  }
  return 0.0;
}

std::vector<DiskEigenvalue> disk_spectrum(double radius,
                                          const LameParameters& params,
                                          int count) {
  if (!(radius > 0.0) || count < 1 || !params.valid()) {
    throw Error(ErrorKind::invalid_argument,
                "disk_spectrum needs R > 0, count >= 1 and valid parameters");
  }
  std::vector<DiskEigenvalue> raw;
  auto push = [&](DiskBranch b, int mode, int times) {
    const double v = disk_branch_value(b, mode, radius, params);
    for (int i = 0; i < times; ++i) raw.push_back({v, b, mode, 1});
  };
  push(DiskBranch::radial, 0, 1);
  push(DiskBranch::n1, 1, 2);
  // Each of the two mode families contributes two values per n, so modes
  // up to count + 2 cover every value below the count-th one.
  const int n_max = count + 2;
  for (int n = 2; n <= n_max; ++n) {
    push(DiskBranch::low, n, 2);
    push(DiskBranch::high, n, 2);
  }
  std::stable_sort(raw.begin(), raw.end(),
                   [](const DiskEigenvalue& a, const DiskEigenvalue& b) {
                     return a.value < b.value;
                   });
  // Merge ties across branches.
  std::size_t start = 0;
  while (start < raw.size()) {
    std::size_t end = start + 1;
    while (end < raw.size() &&
           std::abs(raw[end].value - raw[start].value) <=
               1e-12 * std::abs(raw[start].value)) {
      ++end;
    }
    for (std::size_t i = start; i < end; ++i) {
      raw[i].multiplicity = static_cast<int>(end - start);
    }
    start = end;
  }
  raw.resize(count);
  return raw;
}

FirstEigenvalue first_positive(double radius, const LameParameters& params) {
  if (params.lambda > params.mu) {
    return {disk_branch_value(DiskBranch::low, 2, radius, params), DiskBranch::low};
  }
  return {disk_branch_value(DiskBranch::n1, 1, radius, params), DiskBranch::n1};
}

OrderingRegion ordering_region(const LameParameters& params) {
  const double l = params.lambda;
  const double m = params.mu;
  if (l < -3.0 * m) return OrderingRegion::lambda_below_minus_3mu;
  if (l >= m) return OrderingRegion::lambda_at_least_mu;
  if (l <= 0.0) return OrderingRegion::lambda_nonpositive;
  return OrderingRegion::lambda_between_0_and_mu;
}

DiskEigenfunction::DiskEigenfunction(DiskBranch branch, int mode, int which,
                                     double radius, const LameParameters& params)
    : branch_(branch),
      mode_(mode),
      which_(which),
      radius_(radius),
      params_(params),
      eigenvalue_(0.0) {
  bool ok = radius > 0.0 && params.valid();
  switch (branch) {
    case DiskBranch::zero: ok = ok && which >= 0 && which <= 2; break;
    case DiskBranch::radial: ok = ok && which == 0; break;
    case DiskBranch::n1: ok = ok && which >= 0 && which <= 1; mode_ = 1; break;
    case DiskBranch::low:
    case DiskBranch::high: ok = ok && mode >= 2 && which >= 0 && which <= 1; break;
  }
  if (!ok) {
    throw Error(ErrorKind::invalid_argument, "invalid disk eigenfunction selection");
  }
  eigenvalue_ = disk_branch_value(branch_, mode_, radius, params);
}

namespace {

VectorField evaluate(DiskBranch branch, int mode, int which, double radius,
                     const LameParameters& p, const Vec2& x) {
  const Field x1{x.x(), Vec2(1.0, 0.0)};
  const Field x2{x.y(), Vec2(0.0, 1.0)};
  const Field one{1.0, Vec2::Zero()};
  const Field zero{};
  switch (branch) {
    case DiskBranch::zero:
      if (which == 0) return {one, zero};
      if (which == 1) return {zero, one};
      return {-1.0 * x2, x1};
    case DiskBranch::radial:
      return {x1, x2};
    case DiskBranch::low: {
      const auto [re, im] = power(x, mode - 1);
      if (which == 0) return {re, -1.0 * im};
      return {im, re};
    }
    case DiskBranch::n1:
    case DiskBranch::high: {
      const int n = mode;
      const auto [pm, qm] = power(x, n - 1);
      const auto [sp, tp] = power(x, n + 1);
      const Field g = x1 * x1 + x2 * x2 - Field{radius * radius, Vec2::Zero()};
      const double kappa = 1.0 / ((p.lambda + p.mu) * n);
      const double a = (p.lambda + p.mu) * (n + 1);
      const double b = p.lambda + 3.0 * p.mu;
      if (which == 0) {
        return {kappa * ((-a) * (g * pm) + b * sp), kappa * (a * (g * qm) + b * tp)};
      }
      return {kappa * (a * (g * qm) - b * tp), kappa * (a * (g * pm) + b * sp)};
    }
  }
  return {zero, zero};
}

}  // namespace

Vec2 DiskEigenfunction::value(const Vec2& x) const {
  const VectorField f = evaluate(branch_, mode_, which_, radius_, params_, x);
  return {f.u1.v, f.u2.v};
}

Mat2 DiskEigenfunction::jacobian(const Vec2& x) const {
  const VectorField f = evaluate(branch_, mode_, which_, radius_, params_, x);
  Mat2 j;
  j.row(0) = f.u1.g.transpose();
  j.row(1) = f.u2.g.transpose();
  return j;
}

DiskEigenfunction disk_eigenfunction(DiskBranch branch, int mode, int which,
                                     double radius, const LameParameters& params) {
  return DiskEigenfunction(branch, mode, which, radius, params);
}

double scalar_steklov_disk(double radius, int index) {
  if (index < 0 || !(radius > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "scalar Steklov index must be >= 0");
  }
  return static_cast<double>((index + 1) / 2) / radius;
}

}  // namespace steklame
