#pragma once

#include "steklame/mfs_solver.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace steklame {

/// Boundary deformation field as a function of the curve parameter.
using PerturbationField = std::function<Vec2(double t)>;

/// Field induced by a unit change of one coefficient (see coefficient_velocity).
PerturbationField coefficient_field(const Boundary& boundary, int index);

/// Relative gap below which an eigenvalue is treated as multiple.
inline constexpr double kSimpleGap = 1e-3;

/// Pointwise shape-derivative density g with Lambda'(V) = int g (V . n) ds:
///   Ae(u):e(u) - 4 Ae(u)n . Pi e(u)n - Lambda u . (H u + 2 du/dn - 4 Pi e(u)n),
/// Pi = n n^T.
double shape_density(const FieldValue& field, double value, const Vec2& normal,
                     double curvature, const LameParameters& params);

/// Indices of the pairs whose values chain to `index` with relative gaps
/// at most kSimpleGap.
std::vector<int> eigen_cluster(const Spectrum& spectrum, int index);

enum class ClusterPolicy {
  strict,        // multiplicity error on clustered eigenvalues
  cluster_mean,  // mean of the diagonal derivatives over an orthonormal basis
};

/// Lambda'(V) for spectrum.pairs[index], integrated on `nodes` boundary
/// nodes. Under the strict policy a neighbour within kSimpleGap raises
/// ErrorKind::multiplicity. The spectrum must hold at least index + 2 pairs
/// so the gap above is known.
double shape_derivative(const Boundary& boundary, const Spectrum& spectrum,
                        int index, const PerturbationField& field,
                        const LameParameters& params, int nodes,
                        ClusterPolicy policy = ClusterPolicy::strict);

struct GradientResult {
  std::vector<double> gradient;  // d Lambda / d c_k
  std::vector<double> area_gradient;  // d |Omega| / d c_k
  double value = 0.0;
  double area = 0.0;
  int cluster_size = 1;

  /// Gradient of Lambda * sqrt(|Omega|), the scale-invariant objective.
  std::vector<double> normalized() const;
};

GradientResult coefficient_gradient(const Boundary& boundary,
                                    const Spectrum& spectrum, int index,
                                    const LameParameters& params, int nodes,
                                    ClusterPolicy policy = ClusterPolicy::strict);

/// Euclidean projection of support-function coefficients onto
/// {p(t_i) + p''(t_i) >= 0 on a G-point grid}, by the dual nonnegative least
/// squares problem.
std::vector<double> project_convex(std::span<const double> coeffs, int order,
                                   int grid = kDefaultConvexityGrid);

/// Nonnegative least squares min ||E x - d||, x >= 0 (Lawson-Hanson).
Eigen::VectorXd nnls(const Eigen::MatrixXd& E, const Eigen::VectorXd& d,
                     int max_iterations = 0);

enum class Constraint { area, area_convex };
enum class OptStatus { converged, max_iterations, stalled };

const char* to_string(Constraint c);
const char* to_string(OptStatus s);

struct OptConfig {
  int objective = 1;  // n in Lambda_n, 1-based
  LameParameters params;
  Constraint constraint = Constraint::area;
  int max_iterations = 200;
  double tolerance = 1e-7;
  double initial_step = 1e-2;
  double max_step = 1e-1;
  int max_backtracks = 20;
  double cluster_step_factor = 0.5;
  std::vector<int> sources_schedule = {64, 128, 256};
  std::vector<double> alpha_schedule = {0.3, 0.2, 0.1};  // one per source count
  MfsConfig mfs;  // sources and alpha are overridden by the schedules
  int convexity_grid = kDefaultConvexityGrid;

  void validate() const;
};

struct OptRecord {
  int iteration = 0;
  double objective = 0.0;  // Lambda_n at unit area
  double bound = 0.0;
  double area = 0.0;
  double margin = 0.0;  // convexity margin, NaN for Fourier runs
  double step = 0.0;
  int sources = 0;
  int cluster_size = 1;
  bool refined = false;  // first evaluation at a new source count
};

struct OptResult {
  Boundary boundary;
  Spectrum spectrum;
  std::vector<OptRecord> history;
  OptStatus status = OptStatus::max_iterations;
  double objective = 0.0;
};

using OptObserver = std::function<void(const OptRecord&)>;

OptResult optimize(const Boundary& initial, const OptConfig& config,
                   const OptObserver& observer = {});

/// Unit-area, recentred perturbation of the unit circle: every mode-k
/// coefficient receives a uniform draw in [-amplitude / k^2, amplitude / k^2]
/// (k >= 1 for Fourier curves, k >= 2 for support functions). Deterministic
/// in `seed`. Support starts are projected onto the convex set.
Boundary random_start(bool support, int order, std::uint64_t seed,
                      double amplitude = 0.15);

/// Homothety to unit area followed by removal of the translation modes.
Boundary normalize_shape(const Boundary& boundary);

struct CircleFit {
  Vec2 center;
  double radius;
  double hausdorff;  // max over sampled boundary of | |x - c| - r |
};

/// Algebraic least-squares circle through `nodes` boundary samples.
CircleFit best_fit_disk(const Boundary& boundary, int nodes = 1024);

}  // namespace steklame
