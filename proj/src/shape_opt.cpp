#include "steklame/shape_opt.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace steklame {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Density {
  BoundarySample nodes;
  std::vector<double> g;
  double value = 0.0;
  int cluster_size = 1;
};

Density density(const Boundary& boundary, const Spectrum& spectrum, int index,
                const LameParameters& params, int nodes, ClusterPolicy policy) {
  if (index < 0 || index + 1 >= static_cast<int>(spectrum.pairs.size())) {
    throw Error(ErrorKind::invalid_argument,
                "shape derivative needs the pair above the target in the spectrum");
  }
  std::vector<int> members = eigen_cluster(spectrum, index);
  if (members.size() > 1 && policy == ClusterPolicy::strict) {
    throw Error(ErrorKind::multiplicity,
                "eigenvalue " + std::to_string(index + 1) +
                    " is not simple; shape derivative undefined");
  }
  if (members.back() + 1 >= static_cast<int>(spectrum.pairs.size())) {
    throw Error(ErrorKind::invalid_argument,
                "cluster reaches the end of the computed spectrum");
  }
  Density d;
  d.nodes = sample_boundary(boundary, nodes);
  d.cluster_size = static_cast<int>(members.size());
  const auto& sources = spectrum.discretization.sources;
  const int m = static_cast<int>(members.size());
  const int n = d.nodes.size();

  // fields[k][i]: member k at node i.
  std::vector<std::vector<FieldValue>> fields(m, std::vector<FieldValue>(n));
  for (int k = 0; k < m; ++k) {
    const auto& c = spectrum.pairs[members[k]].coefficients;
    const std::span<const double> coeffs(c.data(), c.size());
    for (int i = 0; i < n; ++i) {
      fields[k][i] = eval_field(coeffs, sources, params, d.nodes.points[i]);
    }
  }
  // Orthonormalize the cluster in L2 of the boundary.
  Eigen::MatrixXd gram(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        s += d.nodes.weights[i] * fields[a][i].u.dot(fields[b][i].u);
      }
      gram(a, b) = s;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::untrustworthy_pair, "cluster eigenvectors are dependent");
  }
  // New basis: fields * L^{-T}.
  const Eigen::MatrixXd T =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(m, m)).transpose();

  d.g.assign(n, 0.0);
  double mean_value = 0.0;
  for (int k = 0; k < m; ++k) mean_value += spectrum.pairs[members[k]].value;
  mean_value /= m;
  d.value = spectrum.pairs[index].value;
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int k = 0; k < m; ++k) {
      FieldValue f{Vec2::Zero(), Mat2::Zero()};
      for (int j = 0; j < m; ++j) {
        f.u += T(j, k) * fields[j][i].u;
        f.jacobian += T(j, k) * fields[j][i].jacobian;
      }
      const double value = m == 1 ? spectrum.pairs[index].value : mean_value;
      sum += shape_density(f, value, d.nodes.normals[i], d.nodes.curvatures[i], params);
    }
    d.g[i] = sum / m;
  }
  return d;
}

double normal_flux(const Density& d, const PerturbationField& field) {
  double s = 0.0;
  for (int i = 0; i < d.nodes.size(); ++i) {
    s += d.nodes.weights[i] * d.g[i] * field(d.nodes.t[i]).dot(d.nodes.normals[i]);
  }
  return s;
}

}  // namespace

PerturbationField coefficient_field(const Boundary& boundary, int index) {
  coefficient_velocity(boundary, index, 0.0);  // range check
  return [boundary, index](double t) { return coefficient_velocity(boundary, index, t); };
}

double shape_density(const FieldValue& field, double value, const Vec2& normal,
                     double curvature, const LameParameters& params) {
  const Mat2 e = strain(field.jacobian);
  const Mat2 s = hooke(e, params);
  const Mat2 pi = normal * normal.transpose();
  const Vec2 pien = pi * (e * normal);
  const Vec2 dudn = field.jacobian * normal;
  return s.cwiseProduct(e).sum() - 4.0 * (s * normal).dot(pien) -
         value * field.u.dot(curvature * field.u + 2.0 * dudn - 4.0 * pien);
}

std::vector<int> eigen_cluster(const Spectrum& spectrum, int index) {
  const auto& p = spectrum.pairs;
  if (index < 0 || index >= static_cast<int>(p.size())) {
    throw Error(ErrorKind::invalid_argument, "eigenpair index out of range");
  }
  int lo = index;
  while (lo > 0 && p[lo].value - p[lo - 1].value <= kSimpleGap * p[lo - 1].value) --lo;
  int hi = index;
  while (hi + 1 < static_cast<int>(p.size()) &&
         p[hi + 1].value - p[hi].value <= kSimpleGap * p[hi].value) {
    ++hi;
  }
  std::vector<int> out;
  for (int i = lo; i <= hi; ++i) out.push_back(i);
  return out;
}

double shape_derivative(const Boundary& boundary, const Spectrum& spectrum,
                        int index, const PerturbationField& field,
                        const LameParameters& params, int nodes,
                        ClusterPolicy policy) {
  const Density d = density(boundary, spectrum, index, params, nodes, policy);
  return normal_flux(d, field);
}

std::vector<double> GradientResult::normalized() const {
  // d(L sqrt(A)) = sqrt(A) dL + L / (2 sqrt(A)) dA.
  const double sa = std::sqrt(area);
  std::vector<double> out(gradient.size());
  for (std::size_t k = 0; k < gradient.size(); ++k) {
    out[k] = sa * gradient[k] + value / (2.0 * sa) * area_gradient[k];
  }
  return out;
}

GradientResult coefficient_gradient(const Boundary& boundary,
                                    const Spectrum& spectrum, int index,
                                    const LameParameters& params, int nodes,
                                    ClusterPolicy policy) {
  const Density d = density(boundary, spectrum, index, params, nodes, policy);
  const int count = static_cast<int>(coefficients(boundary).size());
  GradientResult r;
  r.value = d.value;
  r.cluster_size = d.cluster_size;
  r.area = area(boundary);
  r.gradient.assign(count, 0.0);
  r.area_gradient.assign(count, 0.0);
  for (int i = 0; i < d.nodes.size(); ++i) {
    const double t = d.nodes.t[i];
    const Vec2& n = d.nodes.normals[i];
    const double w = d.nodes.weights[i];
    for (int k = 0; k < count; ++k) {
      const double vn = coefficient_velocity(boundary, k, t).dot(n);
      r.gradient[k] += w * d.g[i] * vn;
      r.area_gradient[k] += w * vn;
    }
  }
  return r;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& E, const Eigen::VectorXd& d,
                     int max_iterations) {
  const Eigen::Index n = E.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  const double tol = 1e-12 * std::max(1.0, E.norm() * std::max(1.0, d.norm()));

  auto solve_passive = [&](const std::vector<Eigen::Index>& idx) {
    Eigen::MatrixXd Ep(E.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) Ep.col(k) = E.col(idx[k]);
    const Eigen::VectorXd zp = Ep.colPivHouseholderQr().solve(d);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(k);
    return z;
  };

  for (int outer = 0; outer < max_iterations; ++outer) {
    const Eigen::VectorXd w = E.transpose() * (d - E * x);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) return x;
    passive[best] = true;

    for (int inner = 0; inner < 10 * n; ++inner) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j]) idx.push_back(j);
      }
      const Eigen::VectorXd z = solve_passive(idx);
      bool feasible = true;
      for (Eigen::Index j : idx) feasible = feasible && z(j) > 0.0;
      if (feasible) {
        x = z;
        break;
      }
      double step = 1.0;
      for (Eigen::Index j : idx) {
        if (z(j) <= 0.0) step = std::min(step, x(j) / (x(j) - z(j)));
      }
      x += step * (z - x);
      for (Eigen::Index j : idx) {
        if (x(j) <= tol) {
          x(j) = 0.0;
          passive[j] = false;
        }
      }
    }
  }
  throw Error(ErrorKind::internal, "nonnegative least squares did not converge");
}

std::vector<double> project_convex(std::span<const double> coeffs, int order,
                                   int grid) {
  const int size = 2 * order + 1;
  if (static_cast<int>(coeffs.size()) != size) {
    throw Error(ErrorKind::invalid_argument, "support coefficient count mismatch");
  }
  if (grid < 4 * order) {
    throw Error(ErrorKind::invalid_argument,
                "convexity grid must have at least 4 points per mode");
  }
  // Row i: p(t_i) + p''(t_i) as a linear form in the coefficients.
  Eigen::MatrixXd G(grid, size);
  for (int i = 0; i < grid; ++i) {
    const double t = kTwoPi * i / grid;
    G(i, 0) = 1.0;
    for (int k = 1; k <= order; ++k) {
      G(i, k) = (1.0 - k * k) * std::cos(k * t);
      G(i, order + k) = (1.0 - k * k) * std::sin(k * t);
    }
  }
  const Eigen::Map<const Eigen::VectorXd> c0(coeffs.data(), size);
  if ((G * c0).minCoeff() >= 0.0) {
    return {coeffs.begin(), coeffs.end()};
  }
  // min 1/2 |c - c0|^2 s.t. G c >= 0; dual: c = c0 + G^T nu, nu >= 0
  // minimizing |G^T nu + c0|.
  const Eigen::VectorXd nu = nnls(G.transpose(), -c0);
  Eigen::VectorXd c = c0 + G.transpose() * nu;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const double margin = (G * c).minCoeff();
    if (margin >= 0.0) break;
    c(0) += -margin + 1e-15 * (1.0 + std::abs(c(0)));
  }
  if ((G * c).minCoeff() < 0.0) {
    throw Error(ErrorKind::internal, "convex projection failed");
  }
  return {c.data(), c.data() + size};
}

const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::area: return "area";
    case Constraint::area_convex: return "area+convex";
  }
  return "unknown";
}

const char* to_string(OptStatus s) {
  switch (s) {
    case OptStatus::converged: return "converged";
    case OptStatus::max_iterations: return "max_iterations";
    case OptStatus::stalled: return "stalled";
  }
  return "unknown";
}

void OptConfig::validate() const {
  if (objective < 1) throw Error(ErrorKind::config, "objective index must be >= 1");
  if (!params.valid()) throw Error(ErrorKind::config, "invalid Lame parameters");
  if (max_iterations < 0 || !(tolerance >= 0.0) || !(initial_step > 0.0) ||
      !(max_step >= initial_step) || max_backtracks < 0 ||
      !(cluster_step_factor > 0.0 && cluster_step_factor <= 1.0)) {
    throw Error(ErrorKind::config, "invalid optimizer step settings");
  }
  if (sources_schedule.empty()) throw Error(ErrorKind::config, "empty source schedule");
  if (alpha_schedule.size() != sources_schedule.size()) {
    throw Error(ErrorKind::config, "alpha schedule must match the source schedule");
  }
  for (double a : alpha_schedule) {
    if (!(a > 0.0)) throw Error(ErrorKind::config, "alpha values must be positive");
  }
  for (int n : sources_schedule) {
    if (n < 8) throw Error(ErrorKind::config, "source counts must be >= 8");
  }
  if (convexity_grid < 4) throw Error(ErrorKind::config, "convexity grid too small");
}

Boundary normalize_shape(const Boundary& boundary) {
  const Boundary centred = recentred(boundary);
  return scaled(centred, 1.0 / std::sqrt(area(centred)));
}

namespace {

bool is_support(const Boundary& b) { return std::holds_alternative<SupportBoundary>(b); }

std::array<int, 2> translation_indices(const Boundary& b) {
  if (const auto* s = std::get_if<SupportBoundary>(&b)) {
    return {1, 1 + s->order()};
  }
  return {0, 2 * std::get<FourierBoundary>(b).order() + 1};
}

double margin_of(const Boundary& b, int grid) {
  if (const auto* s = std::get_if<SupportBoundary>(&b)) {
    return convexity_margin(s->support(), grid);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct Evaluation {
  Spectrum spectrum;
  double objective = 0.0;
  double bound = 0.0;
};

class Evaluator {
 public:
  explicit Evaluator(const OptConfig& config) : config_(config) {}

  Evaluation operator()(const Boundary& b, int level) {
    MfsConfig mfs = config_.mfs;
    mfs.sources = config_.sources_schedule[level];
    mfs.collocation = 0;
    mfs.check_nodes = 0;
    for (int attempt = 0;; ++attempt) {
      mfs.alpha = config_.alpha_schedule[level] * shrink_;
      try {
        Spectrum s = solve(b, config_.params, mfs, config_.objective + 4);
        const EigenPair& p = s.pairs[config_.objective - 1];
        const double sa = std::sqrt(area(b));
        return {std::move(s), p.value * sa, p.bound * sa};
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::invalid_offset || attempt >= 6) throw;
        shrink_ *= 0.5;
      }
    }
  }

 private:
  const OptConfig& config_;
  double shrink_ = 1.0;  // halved whenever a source lands inside the domain
};

}  // namespace

OptResult optimize(const Boundary& initial, const OptConfig& config,
                   const OptObserver& observer) {
  config.validate();
  if (config.constraint == Constraint::area_convex && !is_support(initial)) {
    throw Error(ErrorKind::config,
                "convex runs need a support-function parametrization");
  }
  const bool convex = config.constraint == Constraint::area_convex;
  const int last_level = static_cast<int>(config.sources_schedule.size()) - 1;
  const int nodes_factor = 4;
  Evaluator evaluate(config);

  OptResult result{normalize_shape(initial), {}, {}, OptStatus::max_iterations, 0.0};
  int level = 0;
  Evaluation current;
  for (;; ++level) {
    try {
      current = evaluate(result.boundary, level);
      break;
    } catch (const InsufficientResolution&) {
      if (level == last_level) throw;
    }
  }

  auto record = [&](int iteration, double step, int cluster, bool refined) {
    OptRecord r{iteration,
                current.objective,
                current.bound,
                area(result.boundary),
                margin_of(result.boundary, config.convexity_grid),
                step,
                config.sources_schedule[level],
                cluster,
                refined};
    result.history.push_back(r);
    if (observer) observer(r);
  };
  record(0, 0.0, 1, true);

  auto refine = [&](int iteration) {
    ++level;
    current = evaluate(result.boundary, level);
    record(iteration, 0.0, 1, true);
  };

  double base_step = config.initial_step;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const int nodes = nodes_factor * config.sources_schedule[level];
    const GradientResult grad =
        coefficient_gradient(result.boundary, current.spectrum, config.objective - 1,
                             config.params, nodes, ClusterPolicy::cluster_mean);
    std::vector<double> g = grad.normalized();
    // Translations do not change the objective; keep the shape centred.
    for (int k : translation_indices(result.boundary)) g[k] = 0.0;
    double gnorm = 0.0;
    for (double v : g) gnorm += v * v;
    gnorm = std::sqrt(gnorm);
    if (!(gnorm > 0.0)) {
      result.status = OptStatus::converged;
      break;
    }
    const double factor = grad.cluster_size > 1 ? config.cluster_step_factor : 1.0;
    const std::vector<double> c = coefficients(result.boundary);

    bool accepted = false;
    double step = base_step;
    for (int bt = 0; bt <= config.max_backtracks && !accepted; ++bt, step *= 0.5) {
      std::vector<double> trial = c;
      for (std::size_t k = 0; k < trial.size(); ++k) trial[k] += factor * step * g[k] / gnorm;
      try {
        if (convex) {
          const int order = std::get<SupportBoundary>(result.boundary).order();
          trial = project_convex(trial, order, config.convexity_grid);
        }
        Boundary candidate = normalize_shape(with_coefficients(result.boundary, trial));
        Evaluation e = evaluate(candidate, level);
        if (e.objective > current.objective) {
          const double change = (e.objective - current.objective) / current.objective;
          result.boundary = std::move(candidate);
          current = std::move(e);
          record(it, factor * step, grad.cluster_size, false);
          accepted = true;
          base_step = std::min(2.0 * step, config.max_step);
          if (change < config.tolerance) {
            if (level < last_level) {
              refine(it);
            } else {
              result.status = OptStatus::converged;
            }
          }
        }
      } catch (const Error&) {
        // Invalid or unresolvable trial shape: shrink the step.
      }
    }
    if (result.status == OptStatus::converged) break;
    if (!accepted) {
      if (level < last_level) {
        refine(it);
        base_step = config.initial_step;
      } else {
        result.status = OptStatus::stalled;
        break;
      }
    }
  }
  result.spectrum = current.spectrum;
  result.objective = current.objective;
  return result;
}

Boundary random_start(bool support, int order, std::uint64_t seed, double amplitude) {
  if (order < 1) throw Error(ErrorKind::invalid_argument, "order must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    try {
      if (support) {
        std::vector<double> c(2 * order + 1, 0.0);
        c[0] = 1.0;
        for (int k = 2; k <= order; ++k) {
          c[k] = amplitude / (k * k) * u(rng);
          c[order + k] = amplitude / (k * k) * u(rng);
        }
        c = project_convex(c, order);
        std::vector<double> a(c.begin() + 1, c.begin() + 1 + order);
        std::vector<double> b(c.begin() + 1 + order, c.end());
        return normalize_shape(SupportBoundary::create(TrigSeries(c[0], a, b)));
      }
      std::vector<double> xa(order, 0.0), xb(order, 0.0), ya(order, 0.0), yb(order, 0.0);
      xa[0] = 1.0;
      yb[0] = 1.0;
      for (int k = 1; k <= order; ++k) {
        const double s = amplitude / (k * k);
        xa[k - 1] += s * u(rng);
        xb[k - 1] += s * u(rng);
        ya[k - 1] += s * u(rng);
        yb[k - 1] += s * u(rng);
      }
      return normalize_shape(
          FourierBoundary::create(TrigSeries(0.0, xa, xb), TrigSeries(0.0, ya, yb)));
    } catch (const Error&) {
      // Draw again.
    }
  }
  throw Error(ErrorKind::internal, "could not draw a valid random start");
}

CircleFit best_fit_disk(const Boundary& boundary, int nodes) {
  const std::vector<Vec2> pts = sample_polygon(boundary, nodes);
  Eigen::MatrixXd M(nodes, 3);
  Eigen::VectorXd rhs(nodes);
  for (int i = 0; i < nodes; ++i) {
    M(i, 0) = 2.0 * pts[i].x();
    M(i, 1) = 2.0 * pts[i].y();
    M(i, 2) = 1.0;
    rhs(i) = pts[i].squaredNorm();
  }
  const Eigen::Vector3d s = M.colPivHouseholderQr().solve(rhs);
  const Vec2 c(s(0), s(1));
  const double r = std::sqrt(s(2) + c.squaredNorm());
  double h = 0.0;
  for (const Vec2& p : pts) h = std::max(h, std::abs((p - c).norm() - r));
  return {c, r, h};
}

}  // namespace steklame
