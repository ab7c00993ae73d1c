#include "support.hpp"

#include "steklame/boundary_io.hpp"
#include "steklame/cli.hpp"
#include "steklame/disk_analytic.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace steklame;
using namespace steklame::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "steklame");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

// Data rows (no comments, no header).
std::vector<std::vector<std::string>> rows(const std::string& text) {
  std::vector<std::vector<std::string>> v;
  bool header = true;
  for (const auto& l : lines(text)) {
    if (l.empty() || l[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream in(l);
    for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
    v.push_back(cells);
  }
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("steklame_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = path / name;
    std::ofstream(p) << content;
    return p.string();
  }
};

}  // namespace

TEST_CASE("csv metadata line and header") {
  const Run r = run({"disk", "--count", "2"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 4);
  CHECK(l[0].rfind("# steklame ", 0) == 0);
  CHECK(l[0].find("config-hash=") != std::string::npos);
  CHECK(l[1] == "index,value,branch,multiplicity");
}

TEST_CASE("disk golden spectrum") {
  const Run r = run({"disk", "--radius", "1", "--lambda", "1", "--mu", "0.5", "--count", "8"});
  REQUIRE(r.code == 0);
  std::vector<std::string> v;
  for (const auto& row : rows(r.out)) v.push_back(row[1]);
  CHECK(v == std::vector<std::string>{"1", "1", "1.2", "1.2", "1.8", "1.8", "2", "2"});
}

TEST_CASE("disk at unit area") {
  const Run r =
      run({"disk", "--radius", "0.5641895835", "--lambda", "1", "--mu", "0.5", "--count", "1"});
  REQUIRE(r.code == 0);
  CHECK(std::stod(rows(r.out)[0][1]) == doctest::Approx(1.772454).epsilon(1e-6));
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"disk", "--count", "0"}).code == 2);
  CHECK(run({"disk", "--mu", "-1"}).code == 2);
  CHECK(run({"disk", "--bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"solve"}).code == 2);
  CHECK(run({"solve", "--preset", "square"}).code == 2);
  CHECK(run({"solve", "--boundary", "/nonexistent/b.json"}).code == 2);
  CHECK_FALSE(run({"disk", "--count", "0"}).err.empty());
}

TEST_CASE("config files") {
  TempDir dir;
  const std::string good = dir.file("good.json", R"({"lambda": 1, "mu": 3, "count": 3})");
  const Run r = run({"disk", "--radius", "1", "--config", good});
  REQUIRE(r.code == 0);
  CHECK(rows(r.out).size() == 3);
  CHECK(rows(r.out)[0][1] == "4.8");

  const Run flags = run({"disk", "--radius", "1", "--config", good, "--mu", "0.5"});
  REQUIRE(flags.code == 0);
  CHECK(rows(flags.out)[0][1] == "1");

  CHECK(run({"disk", "--config", dir.file("bad.json", R"({"lambda": 1, "colour": 2})")}).code ==
        2);
  CHECK(run({"disk", "--config", dir.file("broken.json", "{\"lambda\": ")}).code == 2);
  CHECK(run({"disk", "--config", dir.file("type.json", R"({"count": "many"})")}).code == 2);

  // the hash follows the effective configuration
  const Run same = run({"disk", "--radius", "1", "--lambda", "1", "--mu", "3", "--count", "3"});
  CHECK(lines(same.out)[0] == lines(r.out)[0]);
  CHECK(lines(flags.out)[0] != lines(r.out)[0]);
}

TEST_CASE("solve omega1") {
  TempDir dir;
  const fs::path file = dir.path / "omega1.json";
  save_boundary(omega1(), file);
  const Run r = run({"solve", "--boundary", file.string(), "--lambda", "1", "--mu", "3", "-N",
                     "128", "-k", "10", "--residual-tol", "1e-2"});
  REQUIRE(r.code == 0);
  const auto v = rows(r.out);
  REQUIRE(v.size() == 10);
  for (const auto& row : v) CHECK(std::stod(row[3]) <= 1e-2);
  CHECK(lines(r.out)[1] == "index,eigenvalue,residual,bound,cluster");
}

TEST_CASE("solve reports insufficient resolution") {
  const Run r = run({"solve", "--preset", "omega1", "--lambda", "1", "--mu", "3", "-N", "128",
                     "-k", "10"});
  CHECK(r.code == 1);
  CHECK(r.err.find("sources") != std::string::npos);
}

TEST_CASE("solve on a disk file agrees with the closed form") {
  TempDir dir;
  const fs::path file = dir.path / "disk.json";
  save_boundary(make_circle(kUnitAreaRadius), file);
  const Run r = run({"solve", "--boundary", file.string(), "--lambda", "1", "--mu", "0.5", "-k",
                     "1"});
  REQUIRE(r.code == 0);
  const auto row = rows(r.out).at(0);
  const double exact = disk_spectrum(kUnitAreaRadius, {1.0, 0.5}, 1)[0].value;
  CHECK(std::abs(std::stod(row[1]) - exact) <= std::stod(row[3]) + 1e-14);
}

TEST_CASE("solve writes eigenfunction grids") {
  TempDir dir;
  const std::string prefix = (dir.path / "mode").string();
  const Run r = run({"solve", "--preset", "disk", "--mu", "0.5", "-k", "2", "--grid-prefix",
                     prefix, "--grid-size", "20", "-o", (dir.path / "spec.csv").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(rows(slurp(dir.path / "spec.csv")).size() == 2);
  const std::string grid = slurp(prefix + "_1.csv");
  CHECK(lines(grid)[1] == "x,y,u1,u2");
  const auto g = rows(grid);
  CHECK(g.size() > 200);
  CHECK(g.size() < 400);
  for (const auto& row : g) {
    CHECK(std::hypot(std::stod(row[0]), std::stod(row[1])) < kUnitAreaRadius);
  }
}

TEST_CASE("converge on the disk") {
  const Run r = run({"converge", "--preset", "disk", "--lambda", "1", "--mu", "0.5",
                     "--sources-list", "40,60,80,100,120", "--indices", "1,4,20"});
  REQUIRE(r.code == 0);
  const auto v = rows(r.out);
  REQUIRE(v.size() == 15);
  CHECK(std::stod(v[12][3]) < std::stod(v[0][3]));
  CHECK(std::stod(v[14][3]) < std::stod(v[2][3]));
  int trends = 0;
  for (const auto& l : lines(r.out)) {
    if (l.rfind("# trend", 0) == 0) {
      ++trends;
      CHECK(l.find("reference=analytic") != std::string::npos);
      CHECK(l.find("decreasing=yes") != std::string::npos);
    }
  }
  CHECK(trends == 3);
}

TEST_CASE("converge with one source count") {
  const Run r = run({"converge", "--preset", "disk", "--sources-list", "60", "--indices", "1,2,3"});
  REQUIRE(r.code == 0);
  CHECK(rows(r.out).size() == 3);
}

TEST_CASE("converge on omega1 against a finer solve") {
  const Run r = run({"converge", "--preset", "omega1", "--lambda", "1", "--mu", "3",
                     "--sources-list", "60,80,100", "--indices", "1,10"});
  REQUIRE(r.code == 0);
  const auto v = rows(r.out);
  REQUIRE(v.size() == 6);
  CHECK(std::stod(v[4][3]) < std::stod(v[0][3]));
  CHECK(std::stod(v[5][3]) < std::stod(v[1][3]));
  CHECK(r.out.find("reference=self N=200") != std::string::npos);
}

TEST_CASE("sweep over mu") {
  const Run r = run({"sweep", "--lambda", "1", "--mu", "0.5,1,3", "--radius", "1", "--count",
                     "2"});
  REQUIRE(r.code == 0);
  const auto v = rows(r.out);
  REQUIRE(v.size() == 6);
  CHECK(v[0][2] == "1");
  CHECK(v[2][2] == "2");
  CHECK(v[4][2] == "4.8");
  CHECK(r.out.find("branch changes from low to n1 between mu=0.5 and mu=1") !=
        std::string::npos);

  const Run one = run({"sweep", "--mu", "2", "--count", "3"});
  REQUIRE(one.code == 0);
  CHECK(rows(one.out).size() == 3);

  CHECK(run({"sweep", "--mu", "1,0"}).code == 2);
  CHECK(run({"sweep", "--mu", "-1"}).code == 2);
}

TEST_CASE("sweep on a general boundary uses the solver") {
  const Run r = run({"sweep", "--preset", "omega1", "--mu", "1,3", "--count", "2", "-N", "150",
                     "--residual-tol", "1e-2"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out)[1] == "mu,index,value,bound");
  CHECK(rows(r.out).size() == 4);
}

TEST_CASE("optimize writes deterministic artifacts") {
  TempDir dir;
  const std::string cfg = dir.file("opt.json", R"({
    "objective": 1, "lambda": 1, "mu": 0.5, "parametrization": "fourier", "order": 3,
    "seed": 4, "max_iterations": 6, "sources_schedule": [64], "alpha_schedule": [0.3]
  })");
  const std::string a = (dir.path / "a").string();
  const std::string b = (dir.path / "b").string();
  const Run ra = run({"optimize", "--config", cfg, "--output-dir", a});
  const Run rb = run({"optimize", "--config", cfg, "--output-dir", b});
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  for (const char* f : {"history.csv", "boundary.json", "spectrum.csv", "summary.json"}) {
    CHECK(fs::exists(fs::path(a) / f));
    CHECK(slurp(fs::path(a) / f) == slurp(fs::path(b) / f));
  }
  CHECK(slurp(fs::path(a) / "summary.json").find("\"status\"") != std::string::npos);
  CHECK(ra.out.find("status=") != std::string::npos);
  const Boundary final_shape = load_boundary(fs::path(a) / "boundary.json");
  CHECK(area(final_shape) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(lines(slurp(fs::path(a) / "history.csv"))[1] ==
        "iteration,objective,bound,area,margin,step,sources,cluster,refined");
}

TEST_CASE("optimize convex run") {
  TempDir dir;
  const std::string cfg = dir.file("opt.json", R"({
    "objective": 3, "lambda": 1, "mu": 1, "parametrization": "support", "order": 4,
    "constraint": "area+convex", "seed": 2, "max_iterations": 4,
    "sources_schedule": [64], "alpha_schedule": [0.3]
  })");
  const Run r = run({"optimize", "--config", cfg, "--output-dir", dir.path.string()});
  REQUIRE(r.code == 0);
  for (const auto& row : rows(slurp(dir.path / "history.csv"))) {
    CHECK(std::stod(row[4]) >= -1e-10);
  }
}

TEST_CASE("optimize rejects bad configs") {
  TempDir dir;
  CHECK(run({"optimize", "--config", dir.file("a.json", R"({"constraint": "round"})"),
             "--output-dir", dir.path.string()})
            .code == 2);
  CHECK(run({"optimize", "--config", dir.file("b.json", R"({"objective": 0})"), "--output-dir",
             dir.path.string()})
            .code == 2);
  CHECK(run({"optimize", "--config", dir.file("c.json", R"({"seeds": 3})")}).code == 2);
  CHECK(run({"optimize", "--constraint", "area+convex", "--parametrization", "fourier",
             "--output-dir", dir.path.string()})
            .code == 2);
}

TEST_CASE("threads from the environment") {
  ::setenv("STEKLAME_THREADS", "2", 1);
  const Run env = run({"solve", "--preset", "disk", "-k", "4", "-N", "100"});
  ::setenv("STEKLAME_THREADS", "zero", 1);
  CHECK(run({"disk"}).code == 2);
  const Run flag = run({"--threads", "1", "solve", "--preset", "disk", "-k", "4", "-N", "100"});
  ::unsetenv("STEKLAME_THREADS");
  REQUIRE(env.code == 0);
  REQUIRE(flag.code == 0);
  CHECK(rows(env.out) == rows(flag.out));
}

TEST_CASE("fnv1a") {
  CHECK(cli::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
