#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "planar_ot/duals.hpp"
#include "planar_ot/instance.hpp"
#include "planar_ot/solver.hpp"

namespace planar_ot {

enum ExitCode : int { kExitOk = 0, kExitMismatch = 1, kExitValidation = 2, kExitParse = 3 };

struct CliConfig {
  // Only the test build exposes --inject-bad-prune.
  bool allow_fault_injection = false;
};

/// Runs one command line (without the program name). Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliConfig& config = {});

/// Machine-readable result of one solve. In exact mode `value` and the Θ
/// history are written as decimal strings.
struct RunReport {
  std::string value;
  std::string metric;
  bool exact = false;
  bool pruning = true;
  std::string theta_mode;
  double tolerance = 0.0;
  std::size_t sources = 0;
  std::size_t sinks = 0;

  std::uint64_t arc_checks = 0;
  std::uint64_t dual_updates = 0;
  std::uint64_t augmentations = 0;
  std::uint64_t pruned_regions = 0;
  std::uint64_t enumerations = 0;
  std::uint64_t candidates_examined = 0;
  std::uint64_t candidates_skipped = 0;
  std::uint64_t line_stops = 0;
  std::uint64_t vertical_stops = 0;
  std::uint64_t region_exclusions = 0;
  std::uint64_t partner_checks = 0;
  std::uint64_t theta_checks = 0;
  std::uint64_t theta_skipped = 0;
  std::vector<double> theta_history;

  bool primal_feasible = false;
  bool dual_feasible = false;
  bool values_match = false;
  bool complementary_slackness = false;

  double wall_time_ms = 0.0;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

RunReport make_report(const ProblemInstance& instance, const SolveOptions& options, const SolveResult& result,
                      const CertificateReport& certificate, double wall_time_ms);
std::string serialize_report(const RunReport& report);
/// Throws std::invalid_argument on a malformed or incomplete document.
RunReport parse_report(const std::string& text);

struct BenchSpec {
  std::vector<std::size_t> grid_sizes{8, 16, 32};
  Metric metric = Metric::sq_euclid;
  std::uint64_t seed = 1;
  std::size_t reps = 1;
  ThetaMode theta_mode = ThetaMode::full_scan;
};

/// One row per grid size, averaged over the repetitions.
struct BenchRow {
  std::size_t n = 0;
  std::size_t pixels = 0;
  std::size_t arcs = 0;  // N·M
  double phases = 0.0;  // dual updates + 1
  double enumerations = 0.0;
  double candidates_examined = 0.0;
  double full_scan = 0.0;  // candidates an exhaustive scan of the same enumerations would examine
  double ratio = 0.0;
  double examined_per_phase = 0.0;
  double dual_updates = 0.0;
  double augmentations = 0.0;
  double wall_time_ms = 0.0;
};

std::vector<BenchRow> run_bench(const BenchSpec& spec);

/// The instance as {"metric", "source", "sink"} with point lists in .pts text.
std::string instance_to_json(const ProblemInstance& instance);

}  // namespace planar_ot
