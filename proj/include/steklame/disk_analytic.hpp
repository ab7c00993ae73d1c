#pragma once

#include "steklame/elastic_kernel.hpp"

#include <string>
#include <vector>

namespace steklame {

/// Families of the closed-form disk spectrum.
enum class DiskBranch {
  zero,    // rigid motions
  radial,  // 2 (lambda + mu) / R
  n1,      // 4 mu (lambda + mu) / ((lambda + 3 mu) R)
  low,     // 2 mu (n - 1) / R, n >= 2
  high,    // 2 (n + 1) mu (lambda + mu) / ((lambda + 3 mu) R), n >= 2
};

const char* to_string(DiskBranch branch);

struct DiskEigenvalue {
  double value = 0.0;
  DiskBranch branch = DiskBranch::zero;
  int mode = 0;          // n for low/high, 1 for n1, 0 otherwise
  int multiplicity = 1;  // size of the merged cluster this value belongs to
};

/// Value of one branch; `mode` is ignored for zero, radial and n1.
double disk_branch_value(DiskBranch branch, int mode, double radius,
                         const LameParameters& params);

/// The `count` smallest strictly positive eigenvalues, repeated according to
/// multiplicity and sorted ascending. Values from different branches that
/// agree to 1e-12 relative are merged into one cluster.
std::vector<DiskEigenvalue> disk_spectrum(double radius,
                                          const LameParameters& params,
                                          int count);

struct FirstEigenvalue {
  double value;
  DiskBranch branch;
};

FirstEigenvalue first_positive(double radius, const LameParameters& params);

enum class OrderingRegion {
  lambda_below_minus_3mu,  // c2 <= c4 <= c3 (not reachable for valid params)
  lambda_at_least_mu,      // c4 <= c3 <= c2
  lambda_nonpositive,      // -3 mu < lambda <= 0: c3 <= c2 <= c4
  lambda_between_0_and_mu, // 0 < lambda <= mu: c3 <= c4 <= c2
};

const char* to_string(OrderingRegion region);
OrderingRegion ordering_region(const LameParameters& params);

/// Closed-form eigenfunction of the disk centred at the origin, unnormalized.
/// `which` selects the member of the family (0..2 for zero, 0 for radial,
/// 0..1 otherwise).
class DiskEigenfunction {
 public:
  DiskEigenfunction(DiskBranch branch, int mode, int which, double radius,
                    const LameParameters& params);

  Vec2 value(const Vec2& x) const;
  Mat2 jacobian(const Vec2& x) const;

  DiskBranch branch() const { return branch_; }
  int mode() const { return mode_; }
  double eigenvalue() const { return eigenvalue_; }

 private:
  DiskBranch branch_;
  int mode_;
  int which_;
  double radius_;
  LameParameters params_;
  double eigenvalue_;
};

DiskEigenfunction disk_eigenfunction(DiskBranch branch, int mode, int which,
                                     double radius, const LameParameters& params);

/// Classical scalar Steklov eigenvalues of the disk: 0, 1/R, 1/R, 2/R, 2/R, ...
double scalar_steklov_disk(double radius, int index);

}  // namespace steklame
