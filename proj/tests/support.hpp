#pragma once

#include "steklame/geometry.hpp"

#include <cmath>
#include <numbers>

namespace steklame::testing {

inline const double kUnitAreaRadius = 1.0 / std::sqrt(std::numbers::pi);

// (cos t, sin t + 0.3 sin 3t)
inline Boundary omega1() {
  return FourierBoundary::create(TrigSeries(0.0, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}),
                                 TrigSeries(0.0, {0.0, 0.0, 0.0}, {1.0, 0.0, 0.3}));
}

// r(t) = 1 + e cos(k t), k >= 2.
inline Boundary flower(int k, double e) {
  std::vector<double> xa(k + 1, 0.0), xb(k + 1, 0.0), ya(k + 1, 0.0), yb(k + 1, 0.0);
  xa[0] = 1.0;
  yb[0] = 1.0;
  xa[k] += e / 2;
  xa[k - 2] += e / 2;
  yb[k] += e / 2;
  yb[k - 2] -= e / 2;
  return FourierBoundary::create(TrigSeries(0.0, xa, xb), TrigSeries(0.0, ya, yb));
}

inline Boundary support_curve(double a0, std::vector<double> a, std::vector<double> b) {
  return SupportBoundary::create(TrigSeries(a0, std::move(a), std::move(b)));
}

}  // namespace steklame::testing
