#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "hoc/cli.hpp"

using namespace hoc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hoc_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hoc");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(int(argv.size()), argv.data());
}

RunContext quiet_ctx(const fs::path& dir) {
  RunContext ctx;
  ctx.out_dir = dir;
  ctx.quiet = true;
  ctx.timestamp = false;
  return ctx;
}

}  // namespace

TEST_CASE("config parsing") {
  const Config c = Config::parse("# comment\nproblem = problem2\n grids = 9, 17 \nsolver.tolerance=1e-9\n\n");
  CHECK(c.get_string("problem", "") == "problem2");
  CHECK(c.get_ints("grids", {}) == std::vector<int>{9, 17});
  CHECK(c.get_double("solver.tolerance", 0) == doctest::Approx(1e-9));
  CHECK(c.get_int("missing", 7) == 7);
  CHECK_THROWS_AS(Config::parse("no equals sign"), ConfigError);
  CHECK_THROWS_AS(c.get_int("problem", 0), ConfigError);
  CHECK_THROWS_AS(c.require_known({"problem"}), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/hoc.cfg"), IoError);
  Config d = c;
  d.apply_override("problem=problem1");
  CHECK(d.get_string("problem", "") == "problem1");
  CHECK_THROWS_AS(d.apply_override("novalue"), ConfigError);
  const SolverConfig s = solver_config_from(Config::parse("solver.inner = line-relax\nsolver.max_outer = 9"));
  CHECK(s.inner == InnerSolver::LineRelax);
  CHECK(s.max_outer_iterations == 9);
}

TEST_CASE("csv round trip") {
  CsvTable t;
  t.metadata = {{"problem", "problem1"}, {"grid", "11x11"}};
  t.columns = {"a", "b"};
  t.rows = {{1.0, std::nan("")}, {0.123456789012, -2e-9}, {3, 4}};
  t.blocks = {{0, "first"}, {2, "second"}};
  const std::string text = emit_csv(t);
  const CsvTable back = parse_csv(text);
  CHECK(same_table(t, back));
  CHECK(back.columns == t.columns);
  REQUIRE(back.meta("grid") != nullptr);
  CHECK(*back.meta("grid") == "11x11");
  CHECK(back.column("b") == 1);
  CHECK(emit_csv(back) == text);
}

TEST_CASE("dispersion output shape") {
  const fs::path dir = scratch("disp");
  const CsvTable t = run_dispersion(Config::parse("resolution = 11"), quiet_ctx(dir));
  CHECK(t.rows.size() == 44);
  CHECK(t.columns.size() == 5);
  CHECK(t.blocks.size() == 4);
  const std::string text = read_text(dir / "dispersion.csv");
  CHECK(text == emit_csv(t));
  CHECK(parse_csv(text).rows.size() == 44);
}

TEST_CASE("stability output reports the maximum amplification") {
  const fs::path dir = scratch("stab");
  const CsvTable t = run_stability(Config::parse("beta = 0.5\nc1 = 3\ndt = 0.5\nresolution = 16"),
                                   quiet_ctx(dir));
  CHECK(t.rows.size() == 256);
  double worst = 0;
  for (const auto& r : t.rows) worst = std::max(worst, r[4]);
  REQUIRE(t.meta("max_G") != nullptr);
  CHECK(std::stod(*t.meta("max_G")) == doctest::Approx(worst));
  CHECK(worst <= 1.0 + 1e-12);
  CHECK_THROWS_AS(run_stability(Config::parse("beta = 3"), quiet_ctx(dir)), Error);
}

TEST_CASE("field output has one row per node") {
  const fs::path dir = scratch("field");
  const CsvTable t = run_field(Config::parse("problem = problem1\ngrid.M = 8\nt_end = 0.05\ndt = 0.0125"),
                               quiet_ctx(dir));
  CHECK(t.rows.size() == 81);
  double worst = 0;
  for (const auto& r : t.rows) worst = std::max(worst, std::abs(r[4]));
  CHECK(worst < 1e-3);
}

TEST_CASE("small convergence run") {
  const fs::path dir = scratch("conv");
  const CsvTable t = run_convergence(
      Config::parse("problem = problem1\ngrids = 9, 17\ntimes = 0.0625\ndt_rule = fixed\ndt = 0.00390625"),
      quiet_ctx(dir));
  REQUIRE(t.rows.size() == 2);
  CHECK(std::isnan(t.rows[0][t.column("order_Linf")]));
  CHECK(t.rows[1][t.column("order_Linf")] > 3.0);
  CHECK(fs::exists(dir / "convergence_problem1.csv"));
}

TEST_CASE("exit codes and reproducible output") {
  const fs::path a = scratch("repro_a"), b = scratch("repro_b");
  CHECK(cli({"-q", "--no-timestamp", "-o", a.string(), "ns-vortex", "--grid", "8", "--dt", "0.01", "--t-end",
             "0.02"}) == 0);
  CHECK(cli({"-q", "--no-timestamp", "-o", b.string(), "ns-vortex", "--grid", "8", "--dt", "0.01", "--t-end",
             "0.02"}) == 0);
  CHECK(read_text(a / "ns_vortex_series.csv") == read_text(b / "ns_vortex_series.csv"));
  CHECK(read_text(a / "ns_vortex_field.csv") == read_text(b / "ns_vortex_field.csv"));

  CHECK(cli({"-q", "-o", a.string(), "convergence", "--problem", "problem7"}) == 2);
  CHECK(cli({"-q", "-o", a.string(), "dispersion", "-s", "colour=blue"}) == 2);
  CHECK(cli({"-q", "--bogus"}) == 2);
  CHECK(cli({"-q", "-o", a.string(), "ns-vortex", "--grid", "8", "--dt", "0.01", "--t-end", "0.02", "-s",
             "coupling.max_iterations=1", "-s", "coupling.tolerance=1e-15"}) == 3);
  const fs::path blocked = a / "ns_vortex_series.csv" / "sub";
  CHECK(cli({"-q", "-o", blocked.string(), "dispersion"}) == 4);
}
