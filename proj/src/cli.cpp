#include "steklame/cli.hpp"

#include "steklame/boundary_io.hpp"
#include "steklame/disk_analytic.hpp"
#include "steklame/mfs_solver.hpp"
#include "steklame/shape_opt.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#ifndef STEKLAME_VERSION
#define STEKLAME_VERSION "0.0.0"
#endif

namespace steklame::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const double kUnitAreaRadius = 1.0 / std::sqrt(std::numbers::pi);

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16g", v);
  return buf;
}

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Options that may also come from a JSON config file; flags win.
class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON file with option values");
  }

  template <class T>
  CLI::Option* add(const std::string& flag, const std::string& key, T& target,
                   const std::string& help) {
    CLI::Option* opt = app_->add_option(flag, target, help)->capture_default_str();
    entries_[key] = {opt,
                     [&target](const json& j) { target = j.get<T>(); },
                     [&target]() { return json(target); }};
    return opt;
  }

  // Registers a value that only the config file may set.
  template <class T>
  void add_config_only(const std::string& key, T& target) {
    entries_[key] = {nullptr,
                     [&target](const json& j) { target = j.get<T>(); },
                     [&target]() { return json(target); }};
  }

  void resolve() {
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    if (!in) throw Error(ErrorKind::config, "cannot open config file " + config_path_);
    json cfg;
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      throw Error(ErrorKind::config, std::string("malformed config file: ") + e.what());
    }
    if (!cfg.is_object()) throw Error(ErrorKind::config, "config file must hold an object");
    for (const auto& [key, value] : cfg.items()) {
      const auto it = entries_.find(key);
      if (it == entries_.end()) {
        throw Error(ErrorKind::config, "unknown config key '" + key + "'");
      }
      if (it->second.option != nullptr && it->second.option->count() > 0) continue;
      try {
        it->second.assign(value);
      } catch (const json::exception&) {
        throw Error(ErrorKind::config, "config key '" + key + "' has the wrong type");
      }
    }
  }

  json effective() const {
    json j = json::object();
    for (const auto& [key, e] : entries_) j[key] = e.dump();
    return j;
  }

 private:
  struct Entry {
    CLI::Option* option;
    std::function<void(const json&)> assign;
    std::function<json()> dump;
  };
  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, Entry> entries_;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw Error(ErrorKind::config, "cannot write " + path);
      stream_ = &file_;
    } else {
      stream_ = &fallback;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void csv_preamble(std::ostream& os, const json& config, const std::string& header) {
  os << "# steklame " << STEKLAME_VERSION << " config-hash=" << hex(fnv1a(config.dump()))
     << "\n"
     << header << "\n";
}

LameParameters make_params(double lambda, double mu) {
  LameParameters p{lambda, mu};
  if (!p.valid()) {
    throw Error(ErrorKind::config, "Lame parameters need mu > 0 and lambda + mu > 0");
  }
  return p;
}

Boundary omega1() {
  return FourierBoundary::create(TrigSeries(0.0, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}),
                                 TrigSeries(0.0, {0.0, 0.0, 0.0}, {1.0, 0.0, 0.3}));
}

Boundary resolve_boundary(const std::string& path, const std::string& preset) {
  if (!path.empty() && !preset.empty()) {
    throw Error(ErrorKind::config, "give either --boundary or --preset, not both");
  }
  if (!path.empty()) return load_boundary(path);
  if (preset == "disk") return make_circle(kUnitAreaRadius);
  if (preset == "omega1") return omega1();
  if (preset.empty()) throw Error(ErrorKind::config, "a boundary is required");
  throw Error(ErrorKind::config, "unknown preset '" + preset + "' (disk, omega1)");
}

// Radius when the boundary is a circle, for analytic references.
std::optional<double> circle_radius(const Boundary& b) {
  const std::vector<double> c = coefficients(b);
  if (const auto* s = std::get_if<SupportBoundary>(&b)) {
    const int p = s->order();
    for (int k = 2; k <= p; ++k) {
      if (c[k] != 0.0 || c[p + k] != 0.0) return std::nullopt;
    }
    return c[0];
  }
  const auto& f = std::get<FourierBoundary>(b);
  const int p = f.order();
  const int block = 2 * p + 1;
  for (int i = 0; i < 2 * block; ++i) {
    if (i == 0 || i == block) continue;          // centre
    if (i == 1 || i == block + p + 1) continue;  // x.a1, y.b1
    if (c[i] != 0.0) return std::nullopt;
  }
  if (c[1] != c[block + p + 1] || !(c[1] > 0.0)) return std::nullopt;
  return c[1];
}

struct MfsFlags {
  int sources = 100;
  int collocation = 0;
  double alpha = 0.2;
  double im_tol = 1e-6;
  double zero_tol = 1e-6;
  double residual_tol = 1e-6;
  int check_nodes = 0;
  double cluster_gap = 1e-4;

  void add(Settings& s) {
    s.add("-N,--sources", "sources", sources, "number of MFS source points");
    s.add("-M,--collocation", "collocation", collocation,
          "collocation points (0 selects 2N)");
    s.add("--alpha", "alpha", alpha, "source offset along the outward normal");
    s.add("--im-tol", "im_tol", im_tol, "relative imaginary-part tolerance");
    s.add("--zero-tol", "zero_tol", zero_tol, "relative rigid-motion cutoff");
    s.add("--residual-tol", "residual_tol", residual_tol,
          "largest accepted residual bound");
    s.add("--check-nodes", "check_nodes", check_nodes,
          "residual check grid (0 selects max(4N, 2M))");
    s.add("--cluster-gap", "cluster_gap", cluster_gap, "relative gap for cluster ids");
  }

  MfsConfig config(int threads) const {
    MfsConfig c;
    c.sources = sources;
    c.collocation = collocation;
    c.alpha = alpha;
    c.im_tol = im_tol;
    c.zero_tol = zero_tol;
    c.residual_tol = residual_tol;
    c.check_nodes = check_nodes;
    c.cluster_gap = cluster_gap;
    c.threads = threads;
    try {
      c.validate();
    } catch (const Error& e) {
      throw Error(ErrorKind::config, e.what());
    }
    return c;
  }
};

void write_spectrum(std::ostream& os, const json& config, const Spectrum& s) {
  csv_preamble(os, config, "index,eigenvalue,residual,bound,cluster");
  for (std::size_t i = 0; i < s.pairs.size(); ++i) {
    const EigenPair& p = s.pairs[i];
    os << i + 1 << "," << fmt(p.value) << "," << fmt(p.residual) << "," << fmt(p.bound)
       << "," << p.cluster << "\n";
  }
}

void write_grid(const fs::path& path, const json& config, const Boundary& b,
                const Spectrum& s, std::size_t index, const LameParameters& params,
                int size) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::config, "cannot write " + path.string());
  const std::vector<Vec2> poly = sample_polygon(b, 1024);
  Vec2 lo = poly[0], hi = poly[0];
  for (const Vec2& p : poly) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  std::vector<Vec2> pts;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const Vec2 x(lo.x() + (hi.x() - lo.x()) * (i + 0.5) / size,
                   lo.y() + (hi.y() - lo.y()) * (j + 0.5) / size);
      if (point_in_polygon(poly, x)) pts.push_back(x);
    }
  }
  const auto u = eval_eigenfunction(s.pairs[index], s.discretization.sources, params, pts);
  json cfg = config;
  cfg["grid_index"] = index + 1;
  csv_preamble(os, cfg, "x,y,u1,u2");
  for (std::size_t k = 0; k < pts.size(); ++k) {
    os << fmt(pts[k].x()) << "," << fmt(pts[k].y()) << "," << fmt(u[k].x()) << ","
       << fmt(u[k].y()) << "\n";
  }
}

int threads_from_env() {
  if (const char* env = std::getenv("STEKLAME_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::config, "STEKLAME_THREADS must be a positive integer");
  }
  return 1;
}

}  // namespace

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steklov-Lame eigenvalues by the method of fundamental solutions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", STEKLAME_VERSION);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: STEKLAME_THREADS or 1)")
      ->check(CLI::PositiveNumber);

  // disk
  CLI::App* disk = app.add_subcommand("disk", "closed-form spectrum of a disk");
  Settings disk_settings(disk);
  double disk_radius = kUnitAreaRadius, disk_lambda = 1.0, disk_mu = 1.0;
  int disk_count = 10;
  std::string disk_output;
  disk_settings.add("--radius", "radius", disk_radius, "disk radius (default: unit area)");
  disk_settings.add("--lambda", "lambda", disk_lambda, "Lame lambda");
  disk_settings.add("--mu", "mu", disk_mu, "Lame mu");
  disk_settings.add("--count", "count", disk_count, "number of positive eigenvalues");
  disk->add_option("-o,--output", disk_output, "CSV file (default: stdout)");

  // solve
  CLI::App* solve_cmd = app.add_subcommand("solve", "MFS spectrum of a boundary");
  Settings solve_settings(solve_cmd);
  std::string solve_boundary, solve_preset, solve_output, grid_prefix;
  double solve_lambda = 1.0, solve_mu = 1.0;
  int solve_count = 10, grid_size = 64;
  MfsFlags solve_mfs;
  solve_settings.add("--boundary", "boundary", solve_boundary, "boundary JSON file");
  solve_settings.add("--preset", "preset", solve_preset, "built-in boundary: disk, omega1");
  solve_settings.add("--lambda", "lambda", solve_lambda, "Lame lambda");
  solve_settings.add("--mu", "mu", solve_mu, "Lame mu");
  solve_settings.add("-k,--count", "count", solve_count, "number of eigenvalues");
  solve_mfs.add(solve_settings);
  solve_settings.add("--grid-prefix", "grid_prefix", grid_prefix,
                     "write eigenfunction grids to <prefix>_<index>.csv");
  solve_settings.add("--grid-size", "grid_size", grid_size, "grid points per axis");
  solve_cmd->add_option("-o,--output", solve_output, "CSV file (default: stdout)");

  // converge
  CLI::App* converge = app.add_subcommand("converge", "error against N");
  Settings conv_settings(converge);
  std::string conv_boundary, conv_preset, conv_output;
  double conv_lambda = 1.0, conv_mu = 0.5;
  std::vector<int> conv_sources = {40, 60, 80, 100, 120};
  std::vector<int> conv_indices = {1, 4, 20};
  MfsFlags conv_mfs;
  conv_mfs.residual_tol = 1.0;
  conv_settings.add("--boundary", "boundary", conv_boundary, "boundary JSON file");
  conv_settings.add("--preset", "preset", conv_preset, "built-in boundary: disk, omega1");
  conv_settings.add("--lambda", "lambda", conv_lambda, "Lame lambda");
  conv_settings.add("--mu", "mu", conv_mu, "Lame mu");
  conv_settings.add("--sources-list", "sources_list", conv_sources, "source counts")
      ->delimiter(',');
  conv_settings.add("--indices", "indices", conv_indices, "1-based eigenvalue indices")
      ->delimiter(',');
  conv_mfs.add(conv_settings);
  converge->add_option("-o,--output", conv_output, "CSV file (default: stdout)");

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "spectrum against mu");
  Settings sweep_settings(sweep);
  std::string sweep_boundary, sweep_preset, sweep_output;
  double sweep_lambda = 1.0, sweep_radius = kUnitAreaRadius;
  std::vector<double> sweep_mu = {0.5, 1.0, 3.0};
  int sweep_count = 10;
  MfsFlags sweep_mfs;
  sweep_settings.add("--lambda", "lambda", sweep_lambda, "Lame lambda");
  sweep_settings.add("--mu", "mu", sweep_mu, "mu values")->delimiter(',');
  sweep_settings.add("--radius", "radius", sweep_radius, "disk radius (analytic mode)");
  sweep_settings.add("--count", "count", sweep_count, "eigenvalues per mu");
  sweep_settings.add("--boundary", "boundary", sweep_boundary,
                     "boundary JSON file (MFS mode)");
  sweep_settings.add("--preset", "preset", sweep_preset, "built-in boundary (MFS mode)");
  sweep_mfs.add(sweep_settings);
  sweep->add_option("-o,--output", sweep_output, "CSV file (default: stdout)");

  // optimize
  CLI::App* opt = app.add_subcommand("optimize", "maximize Lambda_n at unit area");
  Settings opt_settings(opt);
  int opt_objective = 1, opt_order = 6, opt_max_iter = 200, opt_backtracks = 20;
  double opt_lambda = 1.0, opt_mu = 0.5, opt_tol = 1e-7, opt_step = 1e-2,
         opt_max_step = 1e-1, opt_amplitude = 0.15, opt_residual_tol = 1e-6;
  std::uint64_t opt_seed = 1;
  std::string opt_param = "fourier", opt_constraint = "area", opt_initial, opt_dir = ".";
  std::vector<int> opt_sources = {64, 128, 256};
  std::vector<double> opt_alphas = {0.3, 0.2, 0.1};
  int opt_grid = kDefaultConvexityGrid;
  opt_settings.add("--objective", "objective", opt_objective, "n in Lambda_n");
  opt_settings.add("--lambda", "lambda", opt_lambda, "Lame lambda");
  opt_settings.add("--mu", "mu", opt_mu, "Lame mu");
  opt_settings.add("--parametrization", "parametrization", opt_param, "fourier or support");
  opt_settings.add("--order", "order", opt_order, "number of Fourier modes");
  opt_settings.add("--constraint", "constraint", opt_constraint, "area or area+convex");
  opt_settings.add("--max-iterations", "max_iterations", opt_max_iter, "iteration cap");
  opt_settings.add("--tolerance", "tolerance", opt_tol, "relative objective change");
  opt_settings.add("--seed", "seed", opt_seed, "random start seed");
  opt_settings.add("--amplitude", "amplitude", opt_amplitude, "random start amplitude");
  opt_settings.add("--initial-boundary", "initial_boundary", opt_initial,
                   "start from a boundary file instead of a random shape");
  opt_settings.add("--initial-step", "initial_step", opt_step, "first trial step");
  opt_settings.add("--max-step", "max_step", opt_max_step, "largest trial step");
  opt_settings.add("--max-backtracks", "max_backtracks", opt_backtracks,
                   "step halvings before giving up");
  opt_settings.add("--sources-schedule", "sources_schedule", opt_sources,
                   "MFS source counts by fidelity level")
      ->delimiter(',');
  opt_settings.add("--alpha-schedule", "alpha_schedule", opt_alphas,
                   "source offsets by fidelity level")
      ->delimiter(',');
  opt_settings.add("--residual-tol", "residual_tol", opt_residual_tol,
                   "largest accepted residual bound");
  opt_settings.add("--convexity-grid", "convexity_grid", opt_grid,
                   "constraint grid for convex runs");
  opt_settings.add("--output-dir", "output_dir", opt_dir, "directory for run artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? success : configuration_error;
  }

  try {
    if (threads == 0) threads = threads_from_env();

    if (disk->parsed()) {
      disk_settings.resolve();
      if (disk_count < 1) throw Error(ErrorKind::config, "--count must be >= 1");
      if (!(disk_radius > 0.0)) throw Error(ErrorKind::config, "--radius must be > 0");
      const LameParameters p = make_params(disk_lambda, disk_mu);
      const auto spectrum = disk_spectrum(disk_radius, p, disk_count);
      Output os(disk_output, out);
      csv_preamble(*os, disk_settings.effective(), "index,value,branch,multiplicity");
      for (std::size_t i = 0; i < spectrum.size(); ++i) {
        *os << i + 1 << "," << fmt(spectrum[i].value) << "," << to_string(spectrum[i].branch)
            << "," << spectrum[i].multiplicity << "\n";
      }
      return success;
    }

    if (solve_cmd->parsed()) {
      solve_settings.resolve();
      const LameParameters p = make_params(solve_lambda, solve_mu);
      const Boundary b = resolve_boundary(solve_boundary, solve_preset);
      const MfsConfig cfg = solve_mfs.config(threads);
      if (solve_count < 1) throw Error(ErrorKind::config, "--count must be >= 1");
      const Spectrum s = solve(b, p, cfg, solve_count);
      const json effective = solve_settings.effective();
      Output os(solve_output, out);
      write_spectrum(*os, effective, s);
      if (!grid_prefix.empty()) {
        for (std::size_t i = 0; i < s.pairs.size(); ++i) {
          write_grid(grid_prefix + "_" + std::to_string(i + 1) + ".csv", effective, b, s, i,
                     p, grid_size);
        }
      }
      return success;
    }

    if (converge->parsed()) {
      conv_settings.resolve();
      const LameParameters p = make_params(conv_lambda, conv_mu);
      const Boundary b = resolve_boundary(conv_boundary, conv_preset);
      if (conv_sources.empty() || conv_indices.empty()) {
        throw Error(ErrorKind::config, "need at least one source count and one index");
      }
      int max_index = 0;
      for (int i : conv_indices) {
        if (i < 1) throw Error(ErrorKind::config, "indices are 1-based");
        max_index = std::max(max_index, i);
      }
      std::vector<double> reference;
      std::string reference_kind;
      if (const auto r = circle_radius(b)) {
        for (const auto& e : disk_spectrum(*r, p, max_index)) reference.push_back(e.value);
        reference_kind = "analytic";
      } else {
        MfsFlags ref = conv_mfs;
        ref.sources = 2 * *std::max_element(conv_sources.begin(), conv_sources.end());
        ref.collocation = 0;
        const Spectrum s = solve(b, p, ref.config(threads), max_index);
        for (const auto& pair : s.pairs) reference.push_back(pair.value);
        reference_kind = "self N=" + std::to_string(ref.sources);
      }
      Output os(conv_output, out);
      json effective = conv_settings.effective();
      effective["reference"] = reference_kind;
      csv_preamble(*os, effective, "N,index,value,error");
      std::map<int, std::vector<double>> errors;
      for (int n : conv_sources) {
        MfsFlags f = conv_mfs;
        f.sources = n;
        const Spectrum s = solve(b, p, f.config(threads), max_index);
        for (int i : conv_indices) {
          const double v = s.pairs[i - 1].value;
          const double e = std::abs(v - reference[i - 1]);
          errors[i].push_back(e);
          *os << n << "," << i << "," << fmt(v) << "," << fmt(e) << "\n";
        }
      }
      for (const auto& [i, e] : errors) {
        *os << "# trend index=" << i << " reference=" << reference_kind
            << " first=" << fmt(e.front()) << " last=" << fmt(e.back())
            << " decreasing=" << (e.back() < e.front() ? "yes" : "no") << "\n";
      }
      return success;
    }

    if (sweep->parsed()) {
      sweep_settings.resolve();
      if (sweep_mu.empty()) throw Error(ErrorKind::config, "empty mu grid");
      for (double mu : sweep_mu) {
        if (!(mu > 0.0)) throw Error(ErrorKind::config, "mu values must be positive");
      }
      if (sweep_count < 1) throw Error(ErrorKind::config, "--count must be >= 1");
      Output os(sweep_output, out);
      const json effective = sweep_settings.effective();
      if (sweep_boundary.empty() && sweep_preset.empty()) {
        if (!(sweep_radius > 0.0)) throw Error(ErrorKind::config, "--radius must be > 0");
        csv_preamble(*os, effective, "mu,index,value,branch,multiplicity");
        std::optional<DiskBranch> previous;
        double previous_mu = 0.0;
        for (double mu : sweep_mu) {
          const LameParameters p = make_params(sweep_lambda, mu);
          const auto s = disk_spectrum(sweep_radius, p, sweep_count);
          for (std::size_t i = 0; i < s.size(); ++i) {
            *os << fmt(mu) << "," << i + 1 << "," << fmt(s[i].value) << ","
                << to_string(s[i].branch) << "," << s[i].multiplicity << "\n";
          }
          const DiskBranch first = first_positive(sweep_radius, p).branch;
          if (previous && *previous != first) {
            *os << "# first-eigenvalue branch changes from " << to_string(*previous)
                << " to " << to_string(first) << " between mu=" << fmt(previous_mu)
                << " and mu=" << fmt(mu) << "\n";
          }
          previous = first;
          previous_mu = mu;
        }
      } else {
        const Boundary b = resolve_boundary(sweep_boundary, sweep_preset);
        csv_preamble(*os, effective, "mu,index,value,bound");
        for (double mu : sweep_mu) {
          const LameParameters p = make_params(sweep_lambda, mu);
          const Spectrum s = solve(b, p, sweep_mfs.config(threads), sweep_count);
          for (std::size_t i = 0; i < s.pairs.size(); ++i) {
            *os << fmt(mu) << "," << i + 1 << "," << fmt(s.pairs[i].value) << ","
                << fmt(s.pairs[i].bound) << "\n";
          }
        }
      }
      return success;
    }

    if (opt->parsed()) {
      opt_settings.resolve();
      OptConfig cfg;
      cfg.objective = opt_objective;
      cfg.params = make_params(opt_lambda, opt_mu);
      if (opt_constraint == "area") {
        cfg.constraint = Constraint::area;
      } else if (opt_constraint == "area+convex") {
        cfg.constraint = Constraint::area_convex;
      } else {
        throw Error(ErrorKind::config, "constraint must be 'area' or 'area+convex'");
      }
      if (opt_param != "fourier" && opt_param != "support") {
        throw Error(ErrorKind::config, "parametrization must be 'fourier' or 'support'");
      }
      if (opt_order < 1) throw Error(ErrorKind::config, "order must be >= 1");
      cfg.max_iterations = opt_max_iter;
      cfg.tolerance = opt_tol;
      cfg.initial_step = opt_step;
      cfg.max_step = opt_max_step;
      cfg.max_backtracks = opt_backtracks;
      cfg.sources_schedule = opt_sources;
      cfg.alpha_schedule = opt_alphas;
      cfg.mfs.residual_tol = opt_residual_tol;
      cfg.mfs.threads = threads;
      cfg.convexity_grid = opt_grid;
      cfg.validate();

      const Boundary start = opt_initial.empty()
                                 ? random_start(opt_param == "support", opt_order, opt_seed,
                                                opt_amplitude)
                                 : load_boundary(opt_initial);
      fs::create_directories(opt_dir);
      json effective = opt_settings.effective();
      effective.erase("output_dir");
      std::ofstream hist(fs::path(opt_dir) / "history.csv");
      if (!hist) throw Error(ErrorKind::config, "cannot write to " + opt_dir);
      csv_preamble(hist, effective,
                   "iteration,objective,bound,area,margin,step,sources,cluster,refined");
      const OptResult r = optimize(start, cfg, [&](const OptRecord& h) {
        hist << h.iteration << "," << fmt(h.objective) << "," << fmt(h.bound) << ","
             << fmt(h.area) << "," << fmt(h.margin) << "," << fmt(h.step) << ","
             << h.sources << "," << h.cluster_size << "," << (h.refined ? 1 : 0) << "\n";
      });
      save_boundary(r.boundary, fs::path(opt_dir) / "boundary.json");
      std::ofstream spec(fs::path(opt_dir) / "spectrum.csv");
      write_spectrum(spec, effective, r.spectrum);
      json summary = {{"status", to_string(r.status)},
                      {"objective", r.objective},
                      {"iterations", r.history.back().iteration},
                      {"sources", r.history.back().sources},
                      {"config_hash", hex(fnv1a(effective.dump()))}};
      std::ofstream(fs::path(opt_dir) / "summary.json") << summary.dump(2) << "\n";
      out << "status=" << to_string(r.status) << " objective=" << fmt(r.objective)
          << " iterations=" << r.history.back().iteration << "\n";
      return success;
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    if (e.kind() == ErrorKind::insufficient_resolution) {
      err << "hint: raise --sources or loosen --residual-tol\n";
    }
    const bool config = e.kind() == ErrorKind::config ||
                        e.kind() == ErrorKind::invalid_argument ||
                        e.kind() == ErrorKind::orientation ||
                        e.kind() == ErrorKind::self_intersection ||
                        e.kind() == ErrorKind::singular_parametrization ||
                        e.kind() == ErrorKind::invalid_offset;
    return config ? configuration_error : numerical_failure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return configuration_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return numerical_failure;
  }
  return configuration_error;
}

}  // namespace steklame::cli
