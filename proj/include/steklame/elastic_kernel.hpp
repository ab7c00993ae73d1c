#pragma once

#include "steklame/types.hpp"

#include <array>

namespace steklame {

/// Lamé coefficients of an isotropic planar material.
/// Valid when mu > 0 and lambda + mu > 0.
struct LameParameters {
  double lambda = 1.0;
  double mu = 1.0;

  static LameParameters create(double lambda, double mu);
  bool valid() const;
  LameParameters scaled(double factor) const { return {factor * lambda, factor * mu}; }
};

/// Hooke's law: 2 mu xi + lambda tr(xi) Id.
Mat2 hooke(const Mat2& xi, const LameParameters& params);

/// Symmetrized gradient.
Mat2 strain(const Mat2& jacobian);

/// Stress of a displacement with the given Jacobian contracted with n.
Vec2 traction(const Mat2& jacobian, const Vec2& n, const LameParameters& params);

/// Kelvin tensor Phi(x - y); column k is the displacement produced by a unit
/// point force along e_k at y.
Mat2 kelvin(const Vec2& x, const Vec2& y, const LameParameters& params);

/// Jacobians of the two Kelvin columns: result[k](i, l) = d Phi_ik / d x_l.
std::array<Mat2, 2> kelvin_gradient(const Vec2& x, const Vec2& y,
                                    const LameParameters& params);

/// Traction Ae(Phi_k) n of each Kelvin column, as the columns of a 2x2 matrix.
/// Closed form; homogeneous of degree -1 in |x - y|.
Mat2 kelvin_traction(const Vec2& x, const Vec2& y, const Vec2& n,
                     const LameParameters& params);

}  // namespace steklame
