#pragma once

#include "steklame/elastic_kernel.hpp"
#include "steklame/geometry.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <span>
#include <vector>

namespace steklame {

/// Method-of-fundamental-solutions settings. `collocation` and `check_nodes`
/// of 0 select 2N and max(4N, 2M) respectively.
struct MfsConfig {
  int sources = 100;
  int collocation = 0;
  double alpha = 0.2;
  double im_tol = 1e-6;
  double zero_tol = 1e-6;
  double residual_tol = 1e-6;
  int check_nodes = 0;
  double cluster_gap = 1e-4;
  double phase = 0.0;
  int threads = 1;

  int collocation_count() const { return collocation > 0 ? collocation : 2 * sources; }
  int check_count() const {
    return check_nodes > 0 ? check_nodes : std::max(4 * sources, 2 * collocation_count());
  }
  void validate() const;
};

/// Rows are ordered (collocation point, component), columns
/// (source, component).
struct Pencil {
  Eigen::MatrixXd A;  // traction blocks
  Eigen::MatrixXd B;  // displacement blocks
};

Pencil assemble(const DiscreteBoundary& db, const LameParameters& params,
                int threads = 1);

/// Traction and displacement matrices of the MFS basis at arbitrary boundary
/// nodes (the collocation pencil is the special case nodes = collocation).
Pencil assemble_at(const BoundarySample& nodes, std::span<const Vec2> sources,
                   const LameParameters& params, int threads = 1);

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd coefficients;  // a_j stacked as (a_j1, a_j2)
  double residual = 0.0;         // ||f|| on the check grid
  double bound = 0.0;            // ||f|| / ||u|| on the check grid
  double boundary_norm = 1.0;    // ||u|| on the collocation grid
  int cluster = 0;
};

struct Spectrum {
  std::vector<EigenPair> pairs;
  DiscreteBoundary discretization;
  int rigid_discarded = 0;
  int spurious_discarded = 0;
};

/// Solves (Q^T A) x = Lambda R x with B = QR via a QZ decomposition and
/// returns the `count` smallest eigenpairs surviving the imaginary-part,
/// rigid-motion and residual filters. Throws InsufficientResolution if fewer
/// survive.
Spectrum solve_spectrum(const Pencil& pencil, const DiscreteBoundary& db,
                        const Boundary& boundary, const LameParameters& params,
                        const MfsConfig& config, int count);

/// discretize + assemble + solve_spectrum.
Spectrum solve(const Boundary& boundary, const LameParameters& params,
               const MfsConfig& config, int count);

/// u_N(x) = sum_j Phi(x - y_j) a_j.
std::vector<Vec2> eval_eigenfunction(const EigenPair& pair,
                                     std::span<const Vec2> sources,
                                     const LameParameters& params,
                                     std::span<const Vec2> points);

/// Displacement and Jacobian of an MFS field at one point.
struct FieldValue {
  Vec2 u;
  Mat2 jacobian;
};
FieldValue eval_field(std::span<const double> coefficients,
                      std::span<const Vec2> sources,
                      const LameParameters& params, const Vec2& x);

using DisplacementField = std::function<FieldValue(const Vec2&)>;

struct Certificate {
  double residual;      // ||Ae(u)n - Lambda u||_{L2(boundary)}
  double trace_norm;    // ||u||_{L2(boundary)}
  double bound;         // residual / trace_norm, bounds min_n |Lambda_n - Lambda|
};

/// Residual certificate of an approximate eigenpair (value, field) measured
/// on `nodes` equispaced boundary nodes.
Certificate residual_certificate(const DisplacementField& field, double value,
                                 const Boundary& boundary,
                                 const LameParameters& params, int nodes);

Certificate residual_certificate(const EigenPair& pair,
                                 std::span<const Vec2> sources,
                                 const Boundary& boundary,
                                 const LameParameters& params, int nodes);

/// Integral over the boundary of u . v for two fields sampled at `nodes`.
double boundary_inner(const BoundarySample& nodes, std::span<const Vec2> u,
                      std::span<const Vec2> v);

/// Traces of an eigenpair at sampled boundary nodes.
std::vector<Vec2> trace(const EigenPair& pair, std::span<const Vec2> sources,
                        const LameParameters& params, const BoundarySample& nodes);

/// Rigid-motion basis (1,0), (0,1), (-x2, x1) evaluated at x.
std::array<Vec2, 3> rigid_motions(const Vec2& x);

/// 2-norm condition number (ratio of extreme singular values).
double condition_number(const Eigen::MatrixXd& matrix);

}  // namespace steklame
