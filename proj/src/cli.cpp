#include "hoc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "hoc/analysis.hpp"
#include "hoc/errors.hpp"
#include "hoc/navier_stokes.hpp"

namespace hoc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
}

int to_int(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used == text.size() && v >= std::numeric_limits<int>::min() &&
        v <= std::numeric_limits<int>::max())
      return int(v);
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "': expected an integer, got '" + text + "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::ostream& log_stream(const RunContext& ctx) { return ctx.log ? *ctx.log : std::cout; }

void finish(CsvTable& table, const RunContext& ctx, const std::string& file) {
  if (ctx.timestamp) table.metadata.emplace_back("generated", timestamp_now());
  std::error_code ec;
  std::filesystem::create_directories(ctx.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + ctx.out_dir.string() + ": " + ec.message());
  write_text(ctx.out_dir / file, emit_csv(table));
  if (!ctx.quiet) log_stream(ctx) << "wrote " << (ctx.out_dir / file).string() << "\n";
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

const std::set<std::string> kSolverKeys = {"solver.tolerance",  "solver.max_outer",
                                           "solver.inner",      "solver.relaxation",
                                           "solver.max_krylov", "solver.line_sweeps"};

std::set<std::string> with_solver_keys(std::set<std::string> keys) {
  keys.insert(kSolverKeys.begin(), kSolverKeys.end());
  return keys;
}

TestProblem problem_from(const Config& cfg) {
  return problem_by_name(cfg.get_string("problem", "problem1"), cfg.get_double("epsilon", 0.01),
                         cfg.get_double("lambda", 0.9), cfg.get_double("re", 10.0));
}

StudyOptions study_options_from(const Config& cfg) {
  StudyOptions opt;
  opt.iota = cfg.get_double("iota", 0.5);
  SolverConfig defaults;
  defaults.residual_tolerance = 1e-12;
  opt.solver = solver_config_from(cfg, defaults);
  opt.norms = norm_convention_from_name(cfg.get_string("norms", "mean"));
  const std::string normal = cfg.get_string("boundary.normal", "exact");
  if (normal != "exact" && normal != "one-sided")
    throw ConfigError("boundary.normal must be 'exact' or 'one-sided'");
  opt.exact_normals = normal == "exact";
  return opt;
}

Grid2D grid_for(const TestProblem& p, int M, int N) {
  if (M < 4 || N < 4) throw InvalidGridError("grid needs at least 4 intervals per direction");
  return build_uniform_grid(p.bounds, M, N);
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.set(key, trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str(), path.string());
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(key, it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : to_int(key, it->second);
}

std::vector<double> Config::get_doubles(const std::string& key,
                                        const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(it->second)) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError("'" + key + "': empty list");
  return out;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (const auto& item : split_list(it->second)) out.push_back(to_int(key, item));
  if (out.empty()) throw ConfigError("'" + key + "': empty list");
  return out;
}

void Config::require_known(const std::set<std::string>& known) const {
  for (const auto& [key, value] : values_)
    if (!known.count(key)) throw ConfigError("unknown configuration key '" + key + "'");
}

SolverConfig solver_config_from(const Config& cfg, const SolverConfig& defaults) {
  SolverConfig s = defaults;
  s.residual_tolerance = cfg.get_double("solver.tolerance", s.residual_tolerance);
  s.max_outer_iterations = cfg.get_int("solver.max_outer", s.max_outer_iterations);
  s.inner = inner_solver_from_name(cfg.get_string("solver.inner", to_string(s.inner)));
  s.relaxation = cfg.get_double("solver.relaxation", s.relaxation);
  s.max_krylov_iterations = cfg.get_int("solver.max_krylov", s.max_krylov_iterations);
  s.line_sweeps = cfg.get_int("solver.line_sweeps", s.line_sweeps);
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// CSV

const std::string* CsvTable::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata)
    if (k == key) return &v;
  return nullptr;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DomainError("no column '" + name + "'");
  return std::size_t(it - columns.begin());
}

std::string emit_csv(const CsvTable& t) {
  std::ostringstream os;
  for (const auto& [k, v] : t.metadata) os << "# " << k << ": " << v << "\n";
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << "\n";
  std::size_t next_block = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    while (next_block < t.blocks.size() && t.blocks[next_block].first == r) {
      if (r > 0) os << "\n";
      os << "# " << t.blocks[next_block].second << "\n";
      ++next_block;
    }
    const auto& row = t.rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << "\n";
  }
  return os.str();
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      if (!header_done) {
        const auto colon = body.find(": ");
        if (colon == std::string::npos)
          t.metadata.emplace_back(body, "");
        else
          t.metadata.emplace_back(body.substr(0, colon), body.substr(colon + 2));
      } else {
        t.blocks.emplace_back(t.rows.size(), body);
      }
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (!header_done) {
      t.columns = cells;
      header_done = true;
      continue;
    }
    if (cells.size() != t.columns.size())
      throw DomainError("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(t.columns.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells)
      row.push_back(trim(c).empty() ? std::nan("") : to_double("csv", trim(c)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

bool same_table(const CsvTable& a, const CsvTable& b) {
  if (a.metadata != b.metadata || a.columns != b.columns || a.blocks != b.blocks ||
      a.rows.size() != b.rows.size())
    return false;
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    if (a.rows[r].size() != b.rows[r].size()) return false;
    for (std::size_t c = 0; c < a.rows[r].size(); ++c) {
      const double x = a.rows[r][c], y = b.rows[r][c];
      if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
    }
  }
  return true;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// ---------------------------------------------------------------------------
// Experiments

std::vector<RealState> solve_problem(const TestProblem& p, const Grid2D& g, double dt,
                                     const std::vector<double>& times, const StudyOptions& opt,
                                     double* max_residual) {
  const double iota = opt.iota;
  const SolverConfig& solver = opt.solver;
  const bool mapped = p.mapping.name != "identity";
  const GridGeometry geo = mapped ? compute_geometry(p.mapping, g) : GridGeometry{};
  auto coeffs = [&](double t) { return mapped ? discretize(p, geo, g, t) : discretize(p, g, t); };
  const BoundarySpec bc = exact_boundary(p, opt.exact_normals);
  double worst = 0.0;

  std::vector<RealState> out;
  if (p.steady) {
    const BlockSystem sys = assemble_steady(coeffs(0.0), bc, g);
    SolveResult res = solve_block(sys, solver);
    worst = res.report.residual;
    out.push_back(std::move(res.state));
  } else {
    if (times.empty()) throw ConfigError("no output times requested");
    std::vector<double> sorted = times;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> targets;
    for (double t : sorted) targets.push_back(TimeIntegratorConfig{iota, dt, t}.steps());

    TimeIntegratorConfig cfg{iota, dt, sorted.back()};
    RealState state = make_state(g, exact_field(p, g, 0.0), bc, 0.0);
    CoefficientField c_n = coeffs(0.0);
    std::vector<RealState> by_sorted(sorted.size());
    std::size_t next = 0;
    while (next < targets.size() && targets[next] == 0) by_sorted[next++] = state;
    for (int n = 0; next < targets.size(); ++n) {
      CoefficientField c_np1 = coeffs((n + 1) * dt);
      SolveReport rep;
      state = step_theta(g, state, c_n, c_np1, bc, cfg, solver, &rep);
      worst = std::max(worst, rep.residual);
      c_n = std::move(c_np1);
      while (next < targets.size() && targets[next] == n + 1) by_sorted[next++] = state;
    }
    for (double t : times) {
      const auto idx = std::size_t(std::find(sorted.begin(), sorted.end(), t) - sorted.begin());
      out.push_back(by_sorted[idx]);
    }
  }
  if (max_residual) *max_residual = worst;
  return out;
}

std::vector<ConvergenceRow> convergence_study(const TestProblem& p,
                                              const std::vector<ConvergenceLevel>& levels,
                                              const std::vector<double>& times,
                                              const StudyOptions& opt, double* max_residual) {
  if (levels.empty()) throw ConfigError("convergence study needs at least one level");
  const std::vector<double> ts = p.steady ? std::vector<double>{0.0} : times;
  // errs[level][time]
  std::vector<std::vector<ErrorNorms>> errs;
  double worst = 0.0;
  for (const auto& lv : levels) {
    const Grid2D g = grid_for(p, lv.nodes - 1, lv.nodes - 1);
    double res = 0.0;
    const auto states = solve_problem(p, g, lv.dt, ts, opt, &res);
    worst = std::max(worst, res);
    std::vector<ErrorNorms> e;
    for (std::size_t k = 0; k < ts.size(); ++k)
      e.push_back(error_norms(states[k].phi, exact_field(p, g, ts[k]), g, opt.norms));
    errs.push_back(std::move(e));
  }
  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    for (std::size_t l = 0; l < levels.size(); ++l) {
      ConvergenceRow r;
      r.t = ts[k];
      r.nodes = levels[l].nodes;
      r.dt = p.steady ? 0.0 : levels[l].dt;
      r.err = errs[l][k];
      if (l > 0) {
        const ErrorNorms& c = errs[l - 1][k];
        auto order = [](double a, double b) {
          return a > 0.0 && b > 0.0 ? convergence_order(a, b) : std::nan("");
        };
        r.order = {order(c.L1, r.err.L1), order(c.L2, r.err.L2), order(c.Linf, r.err.Linf)};
      }
      rows.push_back(r);
    }
  }
  if (max_residual) *max_residual = worst;
  return rows;
}

CsvTable run_convergence(const Config& cfg, const RunContext& ctx) {
  cfg.require_known(with_solver_keys({"problem", "epsilon", "lambda", "re", "grids", "dt_rule", "dt",
                                      "dts", "times", "iota", "norms", "boundary.normal"}));
  const TestProblem p = problem_from(cfg);
  if (!p.has_exact()) throw ConfigError("convergence study needs a problem with an exact solution");
  std::vector<int> grids = cfg.get_ints("grids", p.recommended_grids);
  const std::vector<double> times =
      cfg.get_doubles("times", {p.recommended_t_end > 0.0 ? p.recommended_t_end : 0.25});
  const StudyOptions opt = study_options_from(cfg);

  std::vector<ConvergenceLevel> levels;
  std::string rule = cfg.get_string("dt_rule", "h2");
  if (cfg.has("dts")) {
    if (grids.size() != 1) throw ConfigError("'dts' requires exactly one entry in 'grids'");
    for (double dt : cfg.get_doubles("dts", {})) levels.push_back({grids[0], dt});
    rule = "list";
  } else {
    for (int n : grids) {
      if (n < 5) throw InvalidGridError("grid needs at least 5 nodes per side");
      const double h = (p.bounds.a2 - p.bounds.a1) / (n - 1);
      if (rule == "h2")
        levels.push_back({n, h * h});
      else if (rule == "fixed")
        levels.push_back({n, cfg.get_double("dt", 0.01)});
      else
        throw ConfigError("dt_rule must be 'h2' or 'fixed'");
    }
  }

  double residual = 0.0;
  const auto rows = convergence_study(p, levels, times, opt, &residual);

  CsvTable t;
  t.metadata = {{"problem", p.name},
                {"grids", join(grids)},
                {"dt_rule", rule},
                {"times", p.steady ? "steady" : join(times)},
                {"iota", format_number(opt.iota)},
                {"norms", to_string(opt.norms)},
                {"boundary_normal", opt.exact_normals ? "exact" : "one-sided"},
                {"solver", to_string(opt.solver.inner)},
                {"solver_tolerance", format_number(opt.solver.residual_tolerance)},
                {"solver_residual", format_number(residual)}};
  if (p.name == "problem2") {
    t.metadata.emplace_back("epsilon", format_number(p.epsilon));
    t.metadata.emplace_back("lambda", format_number(p.lambda));
  }
  t.columns = {"t", "grid", "dt", "L1", "order_L1", "L2", "order_L2", "Linf", "order_Linf"};
  for (const auto& r : rows)
    t.rows.push_back({r.t, double(r.nodes), r.dt, r.err.L1, r.order.L1, r.err.L2, r.order.L2,
                      r.err.Linf, r.order.Linf});
  finish(t, ctx, "convergence_" + p.name + ".csv");
  if (!ctx.quiet) {
    auto& os = log_stream(ctx);
    CsvTable plain = t;
    plain.metadata.clear();
    os << emit_csv(plain);
  }
  return t;
}

CsvTable run_field(const Config& cfg, const RunContext& ctx) {
  cfg.require_known(with_solver_keys({"problem", "epsilon", "lambda", "re", "grid.M", "grid.N",
                                      "dt", "t_end", "iota", "boundary.normal"}));
  const TestProblem p = problem_from(cfg);
  const int M = cfg.get_int("grid.M", p.name == "problem2" ? 256 : 20);
  const int N = cfg.get_int("grid.N", M);
  const Grid2D g = grid_for(p, M, N);
  const double t_end = p.steady ? 0.0 : cfg.get_double("t_end", p.recommended_t_end);
  const double dt = cfg.get_double("dt", g.h * g.h);
  const StudyOptions opt = study_options_from(cfg);

  double residual = 0.0;
  const RealState s = solve_problem(p, g, dt, {t_end}, opt, &residual).front();
  const RealField exact = p.has_exact() ? exact_field(p, g, t_end) : RealField{};

  CsvTable t;
  t.metadata = {{"problem", p.name},
                {"grid", std::to_string(M + 1) + "x" + std::to_string(N + 1)},
                {"t", format_number(t_end)},
                {"dt", p.steady ? "steady" : format_number(dt)},
                {"iota", format_number(opt.iota)},
                {"boundary_normal", opt.exact_normals ? "exact" : "one-sided"},
                {"solver_residual", format_number(residual)}};
  if (p.has_exact())
    t.metadata.emplace_back("max_error", format_number((s.phi - exact).abs().maxCoeff()));
  t.columns = {"x", "y", "value", "exact", "error"};
  for (int j = 0; j <= g.N; ++j) {
    for (int i = 0; i <= g.M; ++i) {
      const Eigen::Vector2d X = p.mapping(g.x(i), g.y(j));
      const double ex = p.has_exact() ? exact(i, j) : std::nan("");
      t.rows.push_back({X(0), X(1), s.phi(i, j), ex, s.phi(i, j) - ex});
    }
  }
  finish(t, ctx, "field_" + p.name + ".csv");
  if (!ctx.quiet && p.has_exact())
    log_stream(ctx) << "max error " << *t.meta("max_error") << "\n";
  return t;
}

CsvTable run_dispersion(const Config& cfg, const RunContext& ctx) {
  cfg.require_known({"resolution", "k2k"});
  const int res = cfg.get_int("resolution", 101);
  const std::vector<double> k2k = cfg.get_doubles("k2k", {0.5, 1.0, 1.5, 2.0});
  const auto samples = dispersion_table(k2k, res);
  CsvTable t;
  t.metadata = {{"table", "mixed-derivative characteristics, h = k = 1"},
                {"resolution", std::to_string(res)}};
  t.columns = {"kappa1_h", "exact", "4oc_m", "2oc", "4ow"};
  for (std::size_t b = 0; b < k2k.size(); ++b)
    t.blocks.emplace_back(b * std::size_t(res), "kappa2_k = " + format_number(k2k[b]));
  for (const auto& s : samples)
    t.rows.push_back({s.kappa1_h, s.lambda_exact, s.lambda_4oc_m, s.lambda_2oc, s.lambda_4ow});
  finish(t, ctx, "dispersion.csv");
  return t;
}

CsvTable run_stability(const Config& cfg, const RunContext& ctx) {
  cfg.require_known({"alpha1", "alpha2", "beta", "c1", "c2", "d", "h", "k", "dt", "iota",
                     "resolution"});
  ConstantCoefficients c;
  c.alpha1 = cfg.get_double("alpha1", 1.0);
  c.alpha2 = cfg.get_double("alpha2", 1.0);
  c.beta = cfg.get_double("beta", 0.0);
  c.c1 = cfg.get_double("c1", 0.0);
  c.c2 = cfg.get_double("c2", 0.0);
  c.d = cfg.get_double("d", 0.0);
  if (!c.positive_definite()) throw ConfigError("diffusion coefficients not positive definite");
  const double h = cfg.get_double("h", 0.1), k = cfg.get_double("k", h);
  const double dt = cfg.get_double("dt", 0.01), iota = cfg.get_double("iota", 0.5);
  const int res = cfg.get_int("resolution", 64);
  if (!(h > 0.0 && k > 0.0 && dt > 0.0)) throw ConfigError("h, k and dt must be positive");
  if (!(iota >= 0.0 && iota <= 1.0)) throw ConfigError("iota must lie in [0, 1]");

  const StabilityScan scan = stability_scan(c, h, k, dt, iota, res);
  CsvTable t;
  t.metadata = {{"alpha1", format_number(c.alpha1)}, {"alpha2", format_number(c.alpha2)},
                {"beta", format_number(c.beta)},     {"c1", format_number(c.c1)},
                {"c2", format_number(c.c2)},         {"d", format_number(c.d)},
                {"h", format_number(h)},             {"k", format_number(k)},
                {"dt", format_number(dt)},           {"iota", format_number(iota)},
                {"max_G", format_number(scan.worst.G_magnitude)},
                {"theta_x_max", format_number(scan.worst.theta_x)},
                {"theta_y_max", format_number(scan.worst.theta_y)},
                {"growth_rate", format_number(scan.growth_rate)}};
  t.columns = {"theta_x", "theta_y", "F_R", "F_I", "G"};
  const double step = 2.0 * std::numbers::pi / res;
  for (int b = 0; b < res; ++b) {
    for (int a = 0; a < res; ++a) {
      const double tx = a * step, ty = b * step;
      const Symbol f = symbol_F(c, h, k, tx, ty);
      t.rows.push_back({tx, ty, f.F_R, f.F_I, amplification(c, h, k, dt, iota, tx, ty)});
    }
  }
  finish(t, ctx, "stability.csv");
  if (!ctx.quiet)
    log_stream(ctx) << "max|G| = " << format_number(scan.worst.G_magnitude) << " at (theta_x, theta_y) = ("
                    << format_number(scan.worst.theta_x) << ", "
                    << format_number(scan.worst.theta_y) << ")\n";
  return t;
}

CsvTable run_ns_vortex(const Config& cfg, const RunContext& ctx) {
  cfg.require_known(with_solver_keys({"re", "dt", "t_end", "grid.M", "grid.N", "mapping", "lambda",
                                      "iota", "coupling.tolerance", "coupling.max_iterations",
                                      "snapshot", "boundary.normal"}));
  NSConfig ns;
  ns.reynolds = cfg.get_double("re", 10.0);
  ns.dt = cfg.get_double("dt", 0.005);
  ns.t_end = cfg.get_double("t_end", 0.1);
  ns.iota = cfg.get_double("iota", 0.5);
  ns.coupling_tolerance = cfg.get_double("coupling.tolerance", 1e-8);
  ns.max_coupling_iterations = cfg.get_int("coupling.max_iterations", 50);
  SolverConfig defaults;
  defaults.residual_tolerance = 1e-12;
  ns.solver = solver_config_from(cfg, defaults);
  ns.validate();

  const std::string map_name = cfg.get_string("mapping", "identity");
  const TestProblem p = ns_vortex(ns.reynolds, mapping_by_name(map_name, cfg.get_double("lambda", 0.9)));
  const int M = cfg.get_int("grid.M", 32);
  const int N = cfg.get_int("grid.N", M);
  const Grid2D g = grid_for(p, M, N);
  const GridGeometry geo = compute_geometry(p.mapping, g);

  TestProblem vort = p;
  vort.exact = p.exact_vorticity;
  vort.exact_gradient = p.exact_vorticity_gradient;
  const std::string normal = cfg.get_string("boundary.normal", "exact");
  if (normal != "exact" && normal != "one-sided")
    throw ConfigError("boundary.normal must be 'exact' or 'one-sided'");
  const bool exact_normals = normal == "exact";
  const FlowBoundary bcs{exact_boundary(p, exact_normals), exact_boundary(vort, exact_normals)};
  FlowState flow = initial_flow(exact_field(p, g, 0.0), exact_field(vort, g, 0.0), geo, g, bcs, 0.0);

  CsvTable t;
  t.metadata = {{"problem", "ns-vortex"},
                {"mapping", map_name},
                {"grid", std::to_string(M + 1) + "x" + std::to_string(N + 1)},
                {"re", format_number(ns.reynolds)},
                {"dt", format_number(ns.dt)},
                {"iota", format_number(ns.iota)},
                {"coupling_tolerance", format_number(ns.coupling_tolerance)},
                {"boundary_normal", normal}};
  t.columns = {"step", "t", "kinetic_energy", "max_abs_omega", "coupling_iterations", "psi_error",
               "omega_error"};
  auto record = [&](int n, const FlowState& f, int iters) {
    const double ep = (f.psi.phi - exact_field(p, g, f.time)).abs().maxCoeff();
    const double eo = (f.omega.phi - exact_field(vort, g, f.time)).abs().maxCoeff();
    t.rows.push_back({double(n), f.time, kinetic_energy(f, geo, g), f.omega.phi.abs().maxCoeff(),
                      double(iters), ep, eo});
  };
  record(0, flow, 0);
  flow = ns_march(flow, geo, g, bcs, ns,
                  [&](int n, const FlowState& f, const CouplingReport& rep) {
                    record(n, f, rep.iterations);
                  });
  finish(t, ctx, "ns_vortex_series.csv");

  if (cfg.get_int("snapshot", 1) != 0) {
    CsvTable snap;
    snap.metadata = {{"problem", "ns-vortex"},
                     {"mapping", map_name},
                     {"t", format_number(flow.time)}};
    snap.columns = {"x", "y", "psi", "omega", "u", "v"};
    for (int j = 0; j <= g.N; ++j)
      for (int i = 0; i <= g.M; ++i)
        snap.rows.push_back({geo.x(i, j), geo.y(i, j), flow.psi.phi(i, j), flow.omega.phi(i, j),
                             flow.u(i, j), flow.v(i, j)});
    finish(snap, ctx, "ns_vortex_field.csv");
  }
  if (!ctx.quiet) {
    const auto& last = t.rows.back();
    log_stream(ctx) << "t = " << format_number(last[1]) << "  psi error " << format_number(last[5])
                    << "  omega error " << format_number(last[6]) << "\n";
  }
  return t;
}

// ---------------------------------------------------------------------------
// Command line

int run_cli(int argc, char** argv) {
  CLI::App app{"Fourth-order compact solver for mixed-derivative convection-diffusion problems"};
  app.require_subcommand(1);

  bool quiet = false, no_timestamp = false;
  std::string out_dir = ".", config_file;
  std::vector<std::string> overrides;
  app.add_flag("-q,--quiet", quiet, "Suppress progress output");
  app.add_flag("--no-timestamp", no_timestamp, "Omit the generation time from CSV headers");
  app.add_option("-o,--out", out_dir, "Output directory");
  app.add_option("-c,--config", config_file, "Config file of key = value lines");
  app.add_option("-s,--set", overrides, "Override a config key (key=value), repeatable")
      ->allow_extra_args(false);
  app.fallthrough();

  // Flags given on a subcommand become config overrides, applied last.
  std::vector<std::pair<std::string, std::string>> flag_values;
  auto bind = [&](CLI::App* sub, const std::string& flag, const std::string& key,
                  const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&flag_values, key](const std::string& v) { flag_values.emplace_back(key, v); }, help);
  };

  auto* conv = app.add_subcommand("convergence", "Error norms and orders under refinement");
  bind(conv, "--problem", "problem", "problem1, problem2 or ns-vortex");
  bind(conv, "--grids", "grids", "Nodes per side, comma separated");
  bind(conv, "--times", "times", "Output times, comma separated");
  bind(conv, "--dts", "dts", "Time steps for a temporal study on one grid");
  bind(conv, "--dt-rule", "dt_rule", "h2 or fixed");

  auto* field = app.add_subcommand("field", "Solution snapshot on one grid");
  bind(field, "--problem", "problem", "problem1, problem2 or ns-vortex");
  bind(field, "--grid", "grid.M", "Intervals per side");
  bind(field, "--t-end", "t_end", "Final time");

  auto* disp = app.add_subcommand("dispersion", "Mixed-derivative characteristic curves");
  bind(disp, "--resolution", "resolution", "Samples per curve");

  auto* stab = app.add_subcommand("stability", "Amplification factor scan");
  bind(stab, "--iota", "iota", "Time weight");
  bind(stab, "--dt", "dt", "Time step");
  bind(stab, "--resolution", "resolution", "Phase samples per direction");

  auto* ns = app.add_subcommand("ns-vortex", "Decaying vortex Navier-Stokes run");
  bind(ns, "--re", "re", "Reynolds number");
  bind(ns, "--dt", "dt", "Time step");
  bind(ns, "--t-end", "t_end", "Final time");
  bind(ns, "--grid", "grid.M", "Intervals per side");
  bind(ns, "--mapping", "mapping", "identity, problem2-stretch or log-polar");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    Config cfg = config_file.empty() ? Config{} : Config::load(config_file);
    for (const auto& o : overrides) cfg.apply_override(o);
    for (const auto& [k, v] : flag_values) cfg.set(k, v);

    RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.quiet = quiet;
    ctx.timestamp = !no_timestamp;

    if (conv->parsed()) run_convergence(cfg, ctx);
    else if (field->parsed()) run_field(cfg, ctx);
    else if (disp->parsed()) run_dispersion(cfg, ctx);
    else if (stab->parsed()) run_stability(cfg, ctx);
    else if (ns->parsed()) run_ns_vortex(cfg, ctx);
    return 0;
  } catch (const NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    // Invalid grids, ill-posed coefficients and bad mappings all come from the configuration.
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace hoc
