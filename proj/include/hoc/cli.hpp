#pragma once

#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hoc/problems.hpp"
#include "hoc/solver.hpp"

namespace hoc {

// ---------------------------------------------------------------------------
// Configuration: flat `key = value` lines, dotted keys, `#` comments.

class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  /// Applies a `key=value` override.
  void apply_override(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;

  /// Throws ConfigError naming the first key not in `known`.
  void require_known(const std::set<std::string>& known) const;

 private:
  std::map<std::string, std::string> values_;
};

SolverConfig solver_config_from(const Config& cfg, const SolverConfig& defaults = {});

// ---------------------------------------------------------------------------
// CSV tables with a `#` metadata header. Missing values are NaN and print empty.

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Optional blocks: (first row, label); emitted as a `# label` line before the block.
  std::vector<std::pair<std::size_t, std::string>> blocks;

  const std::string* meta(const std::string& key) const;
  std::size_t column(const std::string& name) const;
};

std::string emit_csv(const CsvTable& t);
CsvTable parse_csv(const std::string& text);
/// Row-wise equality with NaN == NaN.
bool same_table(const CsvTable& a, const CsvTable& b);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Experiments

/// One (grid, time step) level of a convergence study and its errors at time t.
struct ConvergenceRow {
  double t = 0.0;
  int nodes = 0;  // nodes per side
  double dt = 0.0;
  ErrorNorms err;
  /// log2 ratios against the previous level at the same t (NaN on the first level).
  ErrorNorms order{std::nan(""), std::nan(""), std::nan("")};
};

struct ConvergenceLevel {
  int nodes = 0;
  double dt = 0.0;
};

/// Settings shared by problem runs.
struct StudyOptions {
  double iota = 0.5;
  SolverConfig solver;
  NormConvention norms = NormConvention::Mean;
  /// Edge-normal derivatives from the exact gradient instead of one-sided differences.
  bool exact_normals = true;
};

/// Numerical solution of `p` on grid g at each requested time (a single steady
/// solve when p.steady). `max_residual` receives the largest final solver residual.
std::vector<RealState> solve_problem(const TestProblem& p, const Grid2D& g, double dt,
                                     const std::vector<double>& times, const StudyOptions& opt,
                                     double* max_residual = nullptr);

/// Errors of the scheme on problem `p` at each level and requested time.
/// Steady problems ignore dt and `times` and report t = 0.
std::vector<ConvergenceRow> convergence_study(const TestProblem& p,
                                              const std::vector<ConvergenceLevel>& levels,
                                              const std::vector<double>& times,
                                              const StudyOptions& opt,
                                              double* max_residual = nullptr);

struct RunContext {
  std::filesystem::path out_dir = ".";
  bool quiet = false;
  bool timestamp = true;
  std::ostream* log = nullptr;  // progress/summary stream, std::cout when null
};

CsvTable run_convergence(const Config& cfg, const RunContext& ctx);
CsvTable run_field(const Config& cfg, const RunContext& ctx);
CsvTable run_dispersion(const Config& cfg, const RunContext& ctx);
CsvTable run_stability(const Config& cfg, const RunContext& ctx);
CsvTable run_ns_vortex(const Config& cfg, const RunContext& ctx);

/// Command-line entry point; returns the process exit code
/// (0 ok, 2 configuration error, 3 non-convergence, 4 I/O error).
int run_cli(int argc, char** argv);

}  // namespace hoc
