#include "steklame/mfs_solver.hpp"

#include "parallel.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

extern "C" void dggev_(const char* jobvl, const char* jobvr, const int* n,
                       double* a, const int* lda, double* b, const int* ldb,
                       double* alphar, double* alphai, double* beta, double* vl,
                       const int* ldvl, double* vr, const int* ldvr, double* work,
                       const int* lwork, int* info);

namespace steklame {

namespace {

constexpr double kDegenerateGap = 1e-10;
constexpr int kInverseIterations = 3;

// sqrt(w_i) scaling of the row pairs so Euclidean norms become boundary L2
// norms.
Eigen::VectorXd sqrt_weights(const BoundarySample& nodes) {
  Eigen::VectorXd s(2 * nodes.size());
  for (int i = 0; i < nodes.size(); ++i) {
    s(2 * i) = s(2 * i + 1) = std::sqrt(nodes.weights[i]);
  }
  return s;
}

// Weighted boundary norms of traces stacked as (u_1, u_2) per node.
double weighted_norm(const Eigen::VectorXd& stacked, const Eigen::VectorXd& sw) {
  return stacked.cwiseProduct(sw).norm();
}

// Real eigenvalues of the pencil, ascending. Non-real and infinite ones are
// counted in `rejected`.
std::vector<double> real_eigenvalues(Eigen::MatrixXd C, Eigen::MatrixXd R,
                                     double im_tol, int& rejected) {
  int n = static_cast<int>(C.rows());
  Eigen::VectorXd alphar(n), alphai(n), beta(n);
  char no = 'N';
  int one = 1;
  double dummy = 0.0;
  int info = 0;
  int lwork = -1;
  double query = 0.0;
  dggev_(&no, &no, &n, C.data(), &n, R.data(), &n, alphar.data(), alphai.data(),
         beta.data(), &dummy, &one, &dummy, &one, &query, &lwork, &info);
  lwork = static_cast<int>(query);
  std::vector<double> work(std::max(lwork, 8 * n));
  lwork = static_cast<int>(work.size());
  dggev_(&no, &no, &n, C.data(), &n, R.data(), &n, alphar.data(), alphai.data(),
         beta.data(), &dummy, &one, &dummy, &one, work.data(), &lwork, &info);
  if (info != 0) {
    throw Error(ErrorKind::internal,
                "QZ iteration failed (dggev info " + std::to_string(info) + ")");
  }
  std::vector<double> values;
  rejected = 0;
  for (int i = 0; i < n; ++i) {
    if (beta(i) == 0.0) {
      ++rejected;
      continue;
    }
    const double re = alphar(i) / beta(i);
    const double im = alphai(i) / beta(i);
    if (!std::isfinite(re) || !std::isfinite(im) ||
        std::abs(im) > im_tol * (1.0 + std::abs(re))) {
      ++rejected;
      continue;
    }
    values.push_back(re);
  }
  std::sort(values.begin(), values.end());
  return values;
}

// Fraction of the weighted trace u lying in the span of the rigid motions.
double rigid_fraction(const Eigen::VectorXd& u, const Eigen::MatrixXd& rigid_basis) {
  const double total = u.squaredNorm();
  if (total == 0.0) return 0.0;
  return (rigid_basis.transpose() * u).squaredNorm() / total;
}

// Block inverse iteration for a group of (numerically) equal eigenvalues.
Eigen::MatrixXd inverse_iteration(const Eigen::MatrixXd& C, const Eigen::MatrixXd& R,
                                  double shift, int block, std::mt19937_64& rng) {
  const Eigen::Index n = C.rows();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(C - shift * R);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd X(n, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = dist(rng);
  }
  for (int it = 0; it < kInverseIterations; ++it) {
    Eigen::MatrixXd Y = lu.solve(R * X);
    if (!Y.allFinite()) {
      Eigen::PartialPivLU<Eigen::MatrixXd> shifted(
          C - shift * (1.0 + 1e-13) * R);
      Y = shifted.solve(R * X);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    X = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
  }
  return X;
}

}  // namespace

void MfsConfig::validate() const {
  if (sources < 8) {
    throw Error(ErrorKind::invalid_argument, "need at least 8 MFS sources");
  }
  if (collocation_count() < sources) {
    throw Error(ErrorKind::invalid_argument,
                "collocation count must be at least the source count");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::invalid_argument, "alpha must be positive");
  }
  if (!(im_tol >= 0.0) || !(zero_tol > 0.0) || !(zero_tol < 1.0) ||
      !(residual_tol > 0.0) || !(cluster_gap >= 0.0)) {
    throw Error(ErrorKind::invalid_argument, "invalid MFS tolerances");
  }
  if (check_count() < 3 || threads < 1) {
    throw Error(ErrorKind::invalid_argument, "invalid check grid or thread count");
  }
}

Pencil assemble_at(const BoundarySample& nodes, std::span<const Vec2> sources,
                   const LameParameters& params, int threads) {
  const int m = nodes.size();
  const int n = static_cast<int>(sources.size());
  Pencil p{Eigen::MatrixXd(2 * m, 2 * n), Eigen::MatrixXd(2 * m, 2 * n)};
  detail::parallel_for(m, threads, [&](int i) {
    const Vec2& x = nodes.points[i];
    const Vec2& nrm = nodes.normals[i];
    for (int j = 0; j < n; ++j) {
      p.A.block<2, 2>(2 * i, 2 * j) = kelvin_traction(x, sources[j], nrm, params);
      p.B.block<2, 2>(2 * i, 2 * j) = kelvin(x, sources[j], params);
    }
  });
  return p;
}

Pencil assemble(const DiscreteBoundary& db, const LameParameters& params,
                int threads) {
  return assemble_at(db.collocation, db.sources, params, threads);
}

Spectrum solve_spectrum(const Pencil& pencil, const DiscreteBoundary& db,
                        const Boundary& boundary, const LameParameters& params,
                        const MfsConfig& config, int count) {
  config.validate();
  if (count < 1) {
    throw Error(ErrorKind::invalid_argument, "eigenvalue count must be >= 1");
  }
  const Eigen::Index rows = pencil.B.rows();
  const Eigen::Index cols = pencil.B.cols();
  if (rows < cols || pencil.A.rows() != rows || pencil.A.cols() != cols) {
    throw Error(ErrorKind::invalid_argument, "pencil must be 2M x 2N with M >= N");
  }

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(pencil.B);
  const Eigen::MatrixXd R =
      qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  // Q^T A without forming Q.
  Eigen::MatrixXd QtA = pencil.A;
  QtA.applyOnTheLeft(qr.householderQ().transpose());
  const Eigen::MatrixXd C = QtA.topRows(cols);

  Spectrum out;
  out.discretization = db;
  int rejected = 0;
  std::vector<double> values = real_eigenvalues(C, R, config.im_tol, rejected);
  out.spurious_discarded = rejected;

  // Values this small relative to the fourth smallest magnitude count as
  // rigid motions regardless of their eigenvector.
  double tiny = 0.0;
  {
    std::vector<double> mags;
    for (double v : values) mags.push_back(std::abs(v));
    std::sort(mags.begin(), mags.end());
    if (mags.size() > 3) tiny = config.zero_tol * mags[3];
  }

  // Fine check grid, offset by half a step from the collocation nodes.
  const int fine_nodes = config.check_count();
  const BoundarySample fine = sample_boundary(
      boundary, fine_nodes, config.phase + std::numbers::pi / fine_nodes);
  const Pencil check = assemble_at(fine, db.sources, params, config.threads);
  const Eigen::VectorXd sw_fine = sqrt_weights(fine);
  const Eigen::VectorXd sw_coll = sqrt_weights(db.collocation);

  Eigen::MatrixXd rigid(2 * db.collocation_count(), 3);
  for (int i = 0; i < db.collocation_count(); ++i) {
    const auto r = rigid_motions(db.collocation.points[i]);
    for (int c = 0; c < 3; ++c) rigid.block<2, 1>(2 * i, c) = sw_coll(2 * i) * r[c];
  }
  {
    Eigen::HouseholderQR<Eigen::MatrixXd> rq(rigid);
    rigid = rq.householderQ() * Eigen::MatrixXd::Identity(rigid.rows(), 3);
  }

  std::mt19937_64 rng(0x5eed);
  std::size_t next = 0;
  while (next < values.size() && static_cast<int>(out.pairs.size()) < count) {
    // Group of numerically equal values.
    std::size_t end = next + 1;
    while (end < values.size() &&
           values[end] - values[end - 1] <= kDegenerateGap * std::abs(values[next])) {
      ++end;
    }
    const int block = static_cast<int>(end - next);
    const double shift = values[next];
    Eigen::MatrixXd X = inverse_iteration(C, R, shift, block, rng);

    // Orthonormalize the traces on the collocation grid.
    Eigen::MatrixXd U = sw_coll.asDiagonal() * (pencil.B * X);
    Eigen::HouseholderQR<Eigen::MatrixXd> tq(U);
    const Eigen::MatrixXd Rt =
        tq.matrixQR().topRows(block).triangularView<Eigen::Upper>();
    X = Rt.transpose().triangularView<Eigen::Lower>().solve(X.transpose()).transpose();

    for (int c = 0; c < block; ++c) {
      const double value = values[next + c];
      Eigen::VectorXd x = X.col(c);
      Eigen::Index big = 0;
      x.cwiseAbs().maxCoeff(&big);
      if (x(big) < 0.0) x = -x;
      const Eigen::VectorXd coll = sw_coll.cwiseProduct(pencil.B * x);
      if (std::abs(value) <= tiny || rigid_fraction(coll, rigid) > 0.5) {
        ++out.rigid_discarded;
        continue;
      }
      if (value <= 0.0) {
        ++out.spurious_discarded;
        continue;
      }
      x /= coll.norm();
      const Eigen::VectorXd u = check.B * x;
      const Eigen::VectorXd f = check.A * x - value * u;
      const double residual = weighted_norm(f, sw_fine);
      const double trace_norm = weighted_norm(u, sw_fine);
      const double bound = residual / trace_norm;
      if (!(bound <= config.residual_tol)) {
        ++out.spurious_discarded;
        continue;
      }
      if (static_cast<int>(out.pairs.size()) < count) {
        out.pairs.push_back({value, std::move(x), residual, bound, 1.0, 0});
      }
    }
    next = end;
  }
  if (static_cast<int>(out.pairs.size()) < count) {
    throw InsufficientResolution(count, static_cast<int>(out.pairs.size()));
  }

  int cluster = 0;
  for (std::size_t i = 1; i < out.pairs.size(); ++i) {
    const double prev = out.pairs[i - 1].value;
    if (out.pairs[i].value - prev > config.cluster_gap * std::abs(prev)) ++cluster;
    out.pairs[i].cluster = cluster;
  }
  return out;
}

Spectrum solve(const Boundary& boundary, const LameParameters& params,
               const MfsConfig& config, int count) {
  config.validate();
  const DiscreteBoundary db = discretize(boundary, config.collocation_count(),
                                         config.sources, config.alpha, config.phase);
  const Pencil pencil = assemble(db, params, config.threads);
  return solve_spectrum(pencil, db, boundary, params, config, count);
}

FieldValue eval_field(std::span<const double> coefficients,
                      std::span<const Vec2> sources,
                      const LameParameters& params, const Vec2& x) {
  if (coefficients.size() != 2 * sources.size()) {
    throw Error(ErrorKind::invalid_argument, "coefficient/source size mismatch");
  }
  FieldValue out{Vec2::Zero(), Mat2::Zero()};
  for (std::size_t j = 0; j < sources.size(); ++j) {
    const Vec2 a(coefficients[2 * j], coefficients[2 * j + 1]);
    out.u += kelvin(x, sources[j], params) * a;
    const auto grad = kelvin_gradient(x, sources[j], params);
    out.jacobian += a.x() * grad[0] + a.y() * grad[1];
  }
  return out;
}

std::vector<Vec2> eval_eigenfunction(const EigenPair& pair,
                                     std::span<const Vec2> sources,
                                     const LameParameters& params,
                                     std::span<const Vec2> points) {
  if (pair.coefficients.size() != static_cast<Eigen::Index>(2 * sources.size())) {
    throw Error(ErrorKind::invalid_argument, "coefficient/source size mismatch");
  }
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const Vec2& x : points) {
    Vec2 u = Vec2::Zero();
    for (std::size_t j = 0; j < sources.size(); ++j) {
      u += kelvin(x, sources[j], params) * pair.coefficients.segment<2>(2 * j);
    }
    out.push_back(u);
  }
  return out;
}

std::vector<Vec2> trace(const EigenPair& pair, std::span<const Vec2> sources,
                        const LameParameters& params, const BoundarySample& nodes) {
  return eval_eigenfunction(pair, sources, params, nodes.points);
}

Certificate residual_certificate(const DisplacementField& field, double value,
                                 const Boundary& boundary,
                                 const LameParameters& params, int nodes) {
  const BoundarySample s = sample_boundary(boundary, nodes);
  double f2 = 0.0;
  double u2 = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    const FieldValue fv = field(s.points[i]);
    const Vec2 f = traction(fv.jacobian, s.normals[i], params) - value * fv.u;
    f2 += s.weights[i] * f.squaredNorm();
    u2 += s.weights[i] * fv.u.squaredNorm();
  }
  const double trace_norm = std::sqrt(u2);
  if (!(trace_norm >= 1e-8)) {
    throw Error(ErrorKind::untrustworthy_pair,
                "eigenfunction trace norm below 1e-8; certificate meaningless");
  }
  const double residual = std::sqrt(f2);
  return {residual, trace_norm, residual / trace_norm};
}

Certificate residual_certificate(const EigenPair& pair,
                                 std::span<const Vec2> sources,
                                 const Boundary& boundary,
                                 const LameParameters& params, int nodes) {
  const BoundarySample s = sample_boundary(boundary, nodes);
  const Pencil p = assemble_at(s, sources, params);
  const Eigen::VectorXd sw = sqrt_weights(s);
  const Eigen::VectorXd u = p.B * pair.coefficients;
  const double residual = weighted_norm(p.A * pair.coefficients - pair.value * u, sw);
  const double trace_norm = weighted_norm(u, sw);
  if (!(trace_norm >= 1e-8)) {
    throw Error(ErrorKind::untrustworthy_pair,
                "eigenfunction trace norm below 1e-8; certificate meaningless");
  }
  return {residual, trace_norm, residual / trace_norm};
}

double boundary_inner(const BoundarySample& nodes, std::span<const Vec2> u,
                      std::span<const Vec2> v) {
  if (u.size() != static_cast<std::size_t>(nodes.size()) || v.size() != u.size()) {
    throw Error(ErrorKind::invalid_argument, "trace sizes do not match the nodes");
  }
  double sum = 0.0;
  for (int i = 0; i < nodes.size(); ++i) sum += nodes.weights[i] * u[i].dot(v[i]);
  return sum;
}

std::array<Vec2, 3> rigid_motions(const Vec2& x) {
  return {Vec2(1.0, 0.0), Vec2(0.0, 1.0), Vec2(-x.y(), x.x())};
}

double condition_number(const Eigen::MatrixXd& matrix) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return s(0) / s(s.size() - 1);
}

}  // namespace steklame
