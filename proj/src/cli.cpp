#include "planar_ot/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "planar_ot/oracle.hpp"

namespace planar_ot {
namespace {

using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Thrown for bad flag values found after CLI11 has accepted the syntax.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Metric metric_flag(const std::string& text) {
  const auto m = parse_metric(text);
  if (!m) throw UsageError("unknown metric '" + text + "' (expected l1, sqeuclid or euclid)");
  return *m;
}

ThetaMode theta_flag(const std::string& text) {
  const auto t = parse_theta_mode(text);
  if (!t) throw UsageError("unknown theta mode '" + text + "' (expected unit, scan or thm7)");
  return *t;
}

bool on_off_flag(const std::string& text) {
  if (text == "on") return true;
  if (text == "off") return false;
  throw UsageError("expected on or off, got '" + text + "'");
}

ProblemInstance load_instance(Metric metric, const std::string& source, const std::string& sink) {
  return ProblemInstance{load_measure(source), load_measure(sink), metric};
}

void require_valid(const ProblemInstance& instance) {
  const auto report = validate(instance);
  if (report.ok()) return;
  std::string msg = "invalid instance:";
  for (const auto& v : report.violations) msg += "\n  " + v.message;
  throw std::invalid_argument(msg);
}

bool values_agree(bool exact, const std::string& a_text, double a, const std::string& b_text, double b) {
  if (exact) return a_text == b_text;
  return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b));
}

struct Timed {
  SolveResult result;
  double wall_ms = 0.0;
};

Timed timed_solve(const ProblemInstance& instance, const SolveOptions& options) {
  const auto start = Clock::now();
  Timed t{solve(instance, options), 0.0};
  t.wall_ms = elapsed_ms(start);
  return t;
}

std::string value_json_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return format_number(v.get<double>());
  throw std::invalid_argument("value must be a string or a number");
}

// ---- solve

struct SolveArgs {
  std::string metric;
  std::string source;
  std::string sink;
  std::string pruning = "on";
  std::string theta = "scan";
  double tol = 1e-9;
  std::string format = "json";
  std::string plan_out;
  std::uint64_t max_iter = 0;
};

SolveOptions solve_options(const SolveArgs& a) {
  SolveOptions o;
  o.pruning = on_off_flag(a.pruning);
  o.theta_mode = theta_flag(a.theta);
  o.epsilon_adm = a.tol;
  if (a.max_iter > 0) o.max_iterations = a.max_iter;
  if (!(a.tol > 0.0)) throw UsageError("--tol must be positive");
  return o;
}

void write_plan(const std::string& path, const TransportPlan& plan) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  for (const auto& arc : plan.arcs()) out << arc.source << ' ' << arc.sink << ' ' << format_number(arc.flow) << '\n';
  if (!out) throw ParseError("write failed: " + path);
}

void print_text(std::ostream& out, const RunReport& r) {
  out << "value: " << r.value << (r.exact ? " (exact)" : "") << '\n'
      << "metric: " << r.metric << ", pruning " << (r.pruning ? "on" : "off") << ", theta " << r.theta_mode << '\n'
      << "sources: " << r.sources << ", sinks: " << r.sinks << '\n'
      << "dual updates: " << r.dual_updates << ", augmentations: " << r.augmentations << '\n'
      << "candidates examined: " << r.candidates_examined << ", skipped: " << r.candidates_skipped << '\n'
      << "arc checks: " << r.arc_checks << '\n'
      << "certificate: "
      << (r.primal_feasible && r.dual_feasible && r.values_match && r.complementary_slackness ? "ok" : "FAILED")
      << '\n'
      << "wall time: " << r.wall_time_ms << " ms\n";
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const SolveOptions options = solve_options(a);
  if (a.format != "json" && a.format != "text") throw UsageError("--format must be json or text");
  const auto instance = load_instance(metric_flag(a.metric), a.source, a.sink);
  require_valid(instance);
  const auto t = timed_solve(instance, options);
  const auto cert = verify_optimality(instance, t.result.plan, t.result.duals, t.result.tolerance);
  const auto report = make_report(instance, options, t.result, cert, t.wall_ms);
  if (!a.plan_out.empty()) write_plan(a.plan_out, t.result.plan);
  if (a.format == "json") {
    out << serialize_report(report) << '\n';
  } else {
    print_text(out, report);
  }
  return cert.ok() ? kExitOk : kExitMismatch;
}

// ---- compare

struct CompareArgs {
  std::string metric;
  std::string source;
  std::string sink;
  std::string theta = "scan";
  double tol = 1e-9;
  bool inject_bad_prune = false;
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  SolveOptions off;
  off.pruning = false;
  off.theta_mode = theta_flag(a.theta);
  off.epsilon_adm = a.tol;
  SolveOptions on = off;
  on.pruning = true;
  on.inject_bad_prune = a.inject_bad_prune;

  const auto instance = load_instance(metric_flag(a.metric), a.source, a.sink);
  require_valid(instance);
  const auto reference = timed_solve(instance, off);

  ordered_json j;
  j["metric"] = to_string(instance.metric);
  j["value_unpruned"] = reference.result.value_text;
  try {
    const auto pruned = timed_solve(instance, on);
    const bool equal = values_agree(reference.result.exact, pruned.result.value_text, pruned.result.value,
                                    reference.result.value_text, reference.result.value);
    const auto ex_on = pruned.result.stats.prune.candidates_examined;
    const auto ex_off = reference.result.stats.prune.candidates_examined;
    j["value_pruned"] = pruned.result.value_text;
    j["equal"] = equal;
    j["candidates_examined_pruned"] = ex_on;
    j["candidates_examined_unpruned"] = ex_off;
    j["arc_checks_pruned"] = pruned.result.stats.arc_checks;
    j["arc_checks_unpruned"] = reference.result.stats.arc_checks;
    j["savings_ratio"] = ex_off == 0 ? 1.0 : static_cast<double>(ex_on) / static_cast<double>(ex_off);
    j["wall_time_ms_pruned"] = pruned.wall_ms;
    j["wall_time_ms_unpruned"] = reference.wall_ms;
    out << j.dump(2) << '\n';
    if (!equal) {
      err << "mismatch: pruned " << pruned.result.value_text << " vs unpruned " << reference.result.value_text << '\n';
      return kExitMismatch;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    // The reference solve succeeded, so any failure here is the pruned path's fault.
    j["value_pruned"] = nullptr;
    j["equal"] = false;
    j["error"] = e.what();
    out << j.dump(2) << '\n';
    err << "pruned solve failed: " << e.what() << '\n';
    return kExitMismatch;
  }
}

// ---- bench

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || item.empty() || v == 0) throw UsageError("bad --grid entry '" + item + "'");
    sizes.push_back(v);
  }
  if (sizes.empty()) throw UsageError("--grid needs at least one size");
  return sizes;
}

void print_bench(std::ostream& out, const std::vector<BenchRow>& rows, const std::string& format) {
  if (format == "csv") {
    out << "n,pixels,arcs,phases,enumerations,candidates_examined,full_scan,ratio,examined_per_phase,"
           "dual_updates,augmentations,wall_ms\n";
    for (const auto& r : rows) {
      out << r.n << ',' << r.pixels << ',' << r.arcs << ',' << r.phases << ',' << r.enumerations << ','
          << r.candidates_examined << ',' << r.full_scan << ',' << r.ratio << ',' << r.examined_per_phase << ','
          << r.dual_updates << ',' << r.augmentations << ',' << r.wall_time_ms << '\n';
    }
    return;
  }
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"n", r.n},
                   {"pixels", r.pixels},
                   {"arcs", r.arcs},
                   {"phases", r.phases},
                   {"enumerations", r.enumerations},
                   {"candidates_examined", r.candidates_examined},
                   {"full_scan", r.full_scan},
                   {"ratio", r.ratio},
                   {"examined_per_phase", r.examined_per_phase},
                   {"dual_updates", r.dual_updates},
                   {"augmentations", r.augmentations},
                   {"wall_ms", r.wall_time_ms}});
  }
  out << arr.dump(2) << '\n';
}

// ---- oracle

struct OracleArgs {
  std::size_t count = 100;
  std::size_t max_points = 4;
  std::string metric;
  std::uint64_t seed = 1;
  double tol = 1e-9;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out, std::ostream& err) {
  const Metric metric = metric_flag(a.metric);
  if (a.max_points == 0) throw UsageError("--max-points must be positive");
  std::mt19937_64 rng(a.seed);
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };

  for (std::size_t k = 0; k < a.count; ++k) {
    InstanceGenSpec spec;
    spec.metric = metric;
    spec.n_sources = pick(1, std::min<std::size_t>(a.max_points, kOracleCellCap));
    spec.n_sinks = pick(1, std::min<std::size_t>(a.max_points, kOracleCellCap / spec.n_sources));
    spec.coord_hi = 7;
    spec.mass_hi = std::max<std::int64_t>(1, std::min<std::int64_t>(9, 12 / static_cast<std::int64_t>(spec.n_sources)));
    spec.seed = rng();
    const auto instance = random_instance(spec);

    std::string failure;
    try {
      const auto truth = brute_force_optimal(instance);
      for (const bool pruning : {false, true}) {
        SolveOptions o;
        o.pruning = pruning;
        o.epsilon_adm = a.tol;
        const auto r = solve(instance, o);
        const bool ok = r.exact ? r.value_text == truth.value_text
                                : std::abs(r.value - truth.value) <= a.tol * (1.0 + std::abs(truth.value));
        if (!ok) {
          failure = std::string("pruning ") + (pruning ? "on" : "off") + ": solver " + r.value_text + " vs oracle " +
                    truth.value_text;
          break;
        }
      }
    } catch (const std::exception& e) {
      failure = e.what();
    }
    if (!failure.empty()) {
      err << "instance " << k << " failed: " << failure << '\n';
      out << instance_to_json(instance) << '\n';
      return kExitMismatch;
    }
  }
  out << "oracle: " << a.count << " " << to_string(metric) << " instances agree\n";
  return kExitOk;
}

int dispatch(CLI::App& app, std::vector<std::string> args, std::ostream& out, std::ostream& err,
             const std::function<int()>& run) {
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  }
  return run();
}

}  // namespace

RunReport make_report(const ProblemInstance& instance, const SolveOptions& options, const SolveResult& result,
                      const CertificateReport& certificate, double wall_time_ms) {
  RunReport r;
  r.value = result.value_text;
  r.metric = std::string(to_string(instance.metric));
  r.exact = result.exact;
  r.pruning = options.pruning;
  r.theta_mode = std::string(to_string(options.theta_mode));
  r.tolerance = result.tolerance.eps;
  r.sources = instance.source.size();
  r.sinks = instance.sink.size();
  const auto& s = result.stats;
  r.arc_checks = s.arc_checks;
  r.dual_updates = s.dual_updates;
  r.augmentations = s.augmentations;
  r.pruned_regions = s.pruned_regions;
  r.enumerations = s.enumerations;
  r.candidates_examined = s.prune.candidates_examined;
  r.candidates_skipped = s.prune.candidates_skipped;
  r.line_stops = s.prune.line_stops;
  r.vertical_stops = s.prune.vertical_stops;
  r.region_exclusions = s.prune.region_exclusions;
  r.partner_checks = s.partner_checks;
  r.theta_checks = s.theta_checks;
  r.theta_skipped = s.theta_skipped;
  r.theta_history = s.theta_history;
  r.primal_feasible = certificate.primal_feasible;
  r.dual_feasible = certificate.dual_feasible;
  r.values_match = certificate.values_match;
  r.complementary_slackness = certificate.complementary_slackness;
  r.wall_time_ms = wall_time_ms;
  return r;
}

std::string serialize_report(const RunReport& r) {
  ordered_json j;
  if (r.exact) {
    j["value"] = r.value;
  } else {
    j["value"] = std::stod(r.value);
  }
  j["metric"] = r.metric;
  j["exact"] = r.exact;
  j["pruning"] = r.pruning;
  j["theta_mode"] = r.theta_mode;
  j["tolerance"] = r.tolerance;
  j["sources"] = r.sources;
  j["sinks"] = r.sinks;

  ordered_json thetas = ordered_json::array();
  for (const double t : r.theta_history) {
    if (r.exact) {
      thetas.push_back(format_number(t));
    } else {
      thetas.push_back(t);
    }
  }
  j["stats"] = {{"arc_checks", r.arc_checks},
                {"dual_updates", r.dual_updates},
                {"augmentations", r.augmentations},
                {"pruned_regions", r.pruned_regions},
                {"enumerations", r.enumerations},
                {"candidates_examined", r.candidates_examined},
                {"candidates_skipped", r.candidates_skipped},
                {"line_stops", r.line_stops},
                {"vertical_stops", r.vertical_stops},
                {"region_exclusions", r.region_exclusions},
                {"partner_checks", r.partner_checks},
                {"theta_checks", r.theta_checks},
                {"theta_skipped", r.theta_skipped},
                {"theta_history", thetas}};
  j["certificate"] = {{"primal_feasible", r.primal_feasible},
                      {"dual_feasible", r.dual_feasible},
                      {"values_match", r.values_match},
                      {"complementary_slackness", r.complementary_slackness}};
  j["wall_time_ms"] = r.wall_time_ms;
  return j.dump(2);
}

RunReport parse_report(const std::string& text) {
  try {
    const auto j = ordered_json::parse(text);
    RunReport r;
    r.value = value_json_text(j.at("value"));
    r.metric = j.at("metric").get<std::string>();
    r.exact = j.at("exact").get<bool>();
    r.pruning = j.at("pruning").get<bool>();
    r.theta_mode = j.at("theta_mode").get<std::string>();
    r.tolerance = j.at("tolerance").get<double>();
    r.sources = j.at("sources").get<std::size_t>();
    r.sinks = j.at("sinks").get<std::size_t>();
    const auto& s = j.at("stats");
    r.arc_checks = s.at("arc_checks").get<std::uint64_t>();
    r.dual_updates = s.at("dual_updates").get<std::uint64_t>();
    r.augmentations = s.at("augmentations").get<std::uint64_t>();
    r.pruned_regions = s.at("pruned_regions").get<std::uint64_t>();
    r.enumerations = s.at("enumerations").get<std::uint64_t>();
    r.candidates_examined = s.at("candidates_examined").get<std::uint64_t>();
    r.candidates_skipped = s.at("candidates_skipped").get<std::uint64_t>();
    r.line_stops = s.at("line_stops").get<std::uint64_t>();
    r.vertical_stops = s.at("vertical_stops").get<std::uint64_t>();
    r.region_exclusions = s.at("region_exclusions").get<std::uint64_t>();
    r.partner_checks = s.at("partner_checks").get<std::uint64_t>();
    r.theta_checks = s.at("theta_checks").get<std::uint64_t>();
    r.theta_skipped = s.at("theta_skipped").get<std::uint64_t>();
    for (const auto& t : s.at("theta_history")) r.theta_history.push_back(std::stod(value_json_text(t)));
    const auto& c = j.at("certificate");
    r.primal_feasible = c.at("primal_feasible").get<bool>();
    r.dual_feasible = c.at("dual_feasible").get<bool>();
    r.values_match = c.at("values_match").get<bool>();
    r.complementary_slackness = c.at("complementary_slackness").get<bool>();
    r.wall_time_ms = j.at("wall_time_ms").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad report: ") + e.what());
  }
}

std::vector<BenchRow> run_bench(const BenchSpec& spec) {
  std::vector<BenchRow> rows;
  const std::size_t reps = std::max<std::size_t>(1, spec.reps);
  for (const std::size_t n : spec.grid_sizes) {
    BenchRow row;
    row.n = n;
    row.pixels = n * n;
    row.arcs = row.pixels * row.pixels;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      InstanceGenSpec gen;
      gen.seed = spec.seed * 1000003u + n * 101u + rep;
      gen.layout = InstanceGenSpec::Layout::grid;
      gen.coord_lo = 0;
      gen.coord_hi = static_cast<double>(n - 1);
      gen.metric = spec.metric;
      const auto instance = random_instance(gen);
      SolveOptions o;
      o.theta_mode = spec.theta_mode;
      const auto t = timed_solve(instance, o);
      const auto& s = t.result.stats;
      row.phases += static_cast<double>(s.dual_updates + 1);
      row.enumerations += static_cast<double>(s.enumerations);
      row.candidates_examined += static_cast<double>(s.prune.candidates_examined);
      row.full_scan += static_cast<double>(s.enumerations * instance.sink.size());
      row.dual_updates += static_cast<double>(s.dual_updates);
      row.augmentations += static_cast<double>(s.augmentations);
      row.wall_time_ms += t.wall_ms;
    }
    const double r = static_cast<double>(reps);
    row.phases /= r;
    row.enumerations /= r;
    row.candidates_examined /= r;
    row.full_scan /= r;
    row.dual_updates /= r;
    row.augmentations /= r;
    row.wall_time_ms /= r;
    row.ratio = row.full_scan > 0 ? row.candidates_examined / row.full_scan : 1.0;
    row.examined_per_phase = row.candidates_examined / row.phases;
    rows.push_back(row);
  }
  return rows;
}

std::string instance_to_json(const ProblemInstance& instance) {
  ordered_json j;
  j["metric"] = to_string(instance.metric);
  j["source"] = serialize_points(instance.source);
  j["sink"] = serialize_points(instance.sink);
  return j.dump(2);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliConfig& config) {
  CLI::App app{"Planar optimal transport with pruned admissible-arc search", "planar_ot"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance and print a report");
  solve_cmd->add_option("--metric", sa.metric, "l1, sqeuclid or euclid")->required();
  solve_cmd->add_option("--source", sa.source, "source measure (.pts or .pgm)")->required();
  solve_cmd->add_option("--sink", sa.sink, "sink measure (.pts or .pgm)")->required();
  solve_cmd->add_option("--pruning", sa.pruning, "on or off")->capture_default_str();
  solve_cmd->add_option("--theta", sa.theta, "unit, scan or thm7")->capture_default_str();
  solve_cmd->add_option("--tol", sa.tol, "admissibility tolerance for non-integer costs")->capture_default_str();
  solve_cmd->add_option("--format", sa.format, "json or text")->capture_default_str();
  solve_cmd->add_option("--plan-out", sa.plan_out, "write 'src sink flow' lines here");
  solve_cmd->add_option("--max-iter", sa.max_iter, "iteration cap (0 = none)");

  CompareArgs ca;
  auto* compare_cmd = app.add_subcommand("compare", "Solve with pruning on and off and compare");
  compare_cmd->add_option("--metric", ca.metric, "l1, sqeuclid or euclid")->required();
  compare_cmd->add_option("--source", ca.source, "source measure")->required();
  compare_cmd->add_option("--sink", ca.sink, "sink measure")->required();
  compare_cmd->add_option("--theta", ca.theta, "unit, scan or thm7")->capture_default_str();
  compare_cmd->add_option("--tol", ca.tol, "admissibility tolerance")->capture_default_str();
  if (config.allow_fault_injection) {
    compare_cmd->add_flag("--inject-bad-prune", ca.inject_bad_prune, "drop one admissible arc per enumeration");
  }

  BenchSpec bs;
  std::string grid = "8,16,32";
  std::string bench_metric = "sqeuclid";
  std::string bench_theta = "scan";
  std::string bench_format = "csv";
  auto* bench_cmd = app.add_subcommand("bench", "Pruning savings on random grid images");
  bench_cmd->add_option("--grid", grid, "comma-separated side lengths")->capture_default_str();
  bench_cmd->add_option("--metric", bench_metric, "l1, sqeuclid or euclid")->capture_default_str();
  bench_cmd->add_option("--seed", bs.seed)->capture_default_str();
  bench_cmd->add_option("--reps", bs.reps)->capture_default_str();
  bench_cmd->add_option("--theta", bench_theta, "unit, scan or thm7")->capture_default_str();
  bench_cmd->add_option("--format", bench_format, "csv or json")->capture_default_str();

  OracleArgs oa;
  auto* oracle_cmd = app.add_subcommand("oracle", "Check random small instances against brute force");
  oracle_cmd->add_option("--random", oa.count, "number of instances")->capture_default_str();
  oracle_cmd->add_option("--max-points", oa.max_points, "points per measure")->capture_default_str();
  oracle_cmd->add_option("--metric", oa.metric, "l1, sqeuclid or euclid")->required();
  oracle_cmd->add_option("--seed", oa.seed)->capture_default_str();
  oracle_cmd->add_option("--tol", oa.tol, "relative tolerance for non-integer costs")->capture_default_str();

  auto run = [&]() -> int {
    try {
      if (*solve_cmd) return cmd_solve(sa, out);
      if (*compare_cmd) return cmd_compare(ca, out, err);
      if (*bench_cmd) {
        bs.grid_sizes = parse_grid(grid);
        bs.metric = metric_flag(bench_metric);
        bs.theta_mode = theta_flag(bench_theta);
        if (bench_format != "csv" && bench_format != "json") throw UsageError("--format must be csv or json");
        print_bench(out, run_bench(bs), bench_format);
        return kExitOk;
      }
      if (*oracle_cmd) return cmd_oracle(oa, out, err);
      return kExitParse;
    } catch (const UsageError& e) {
      err << "error: " << e.what() << '\n';
      return kExitParse;
    } catch (const ParseError& e) {
      err << "error: " << e.what() << '\n';
      return kExitParse;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return kExitValidation;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitMismatch;
    }
  };
  return dispatch(app, args, out, err, run);
}

}  // namespace planar_ot
