#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "planar_ot/duals.hpp"
#include "planar_ot/instance.hpp"
#include "planar_ot/pruning.hpp"

namespace planar_ot {

enum class ThetaMode { unit_integer, full_scan, theorem7 };

std::string_view to_string(ThetaMode mode);
/// Accepts "unit", "scan" and "thm7".
std::optional<ThetaMode> parse_theta_mode(std::string_view text);

struct SolveOptions {
  bool pruning = true;
  ThetaMode theta_mode = ThetaMode::full_scan;
  double epsilon_adm = 1e-9;
  std::optional<std::uint64_t> max_iterations;
  bool inject_bad_prune = false;
};

struct SolveStats {
  std::uint64_t arc_checks = 0;
  std::uint64_t dual_updates = 0;
  std::uint64_t augmentations = 0;
  std::vector<double> theta_history;
  std::uint64_t pruned_regions = 0;
  PruneCounters prune;
  std::uint64_t enumerations = 0;
  std::uint64_t partner_checks = 0;
  std::uint64_t theta_checks = 0;   // slacks evaluated while computing Θ
  std::uint64_t theta_skipped = 0;  // sinks passed over by the Θ exclusions

  friend bool operator==(const SolveStats&, const SolveStats&) = default;
};

/// L1/U1 and L2/U2 of one labeling round, with back-pointers for the path.
struct LabelState {
  static constexpr std::ptrdiff_t kRootLabel = -1;

  std::vector<char> source_labeled;
  std::vector<char> sink_labeled;
  std::vector<std::ptrdiff_t> source_pred;  // sink that labeled the source, kRootLabel for deficient ones
  std::vector<std::ptrdiff_t> sink_pred;    // source that labeled the sink
  std::vector<std::size_t> labeled_sources;  // in labeling order
  std::vector<std::size_t> labeled_sinks;
  std::vector<std::size_t> deficient_sources;
  std::optional<std::size_t> breakthrough_sink;
  std::size_t next_source = 0;  // position in labeled_sources still to be scanned

  LabelState() = default;
  LabelState(std::size_t num_sources, std::size_t num_sinks);

  bool breakthrough() const { return breakthrough_sink.has_value(); }
};

/// Everything a labeling or Θ step needs, bundled for the observer hooks.
class SolverState {
 public:
  SolverState(const ProblemInstance& instance, const SolveOptions& options);
  SolverState(const SolverState&) = delete;
  SolverState& operator=(const SolverState&) = delete;

  const ProblemInstance& instance() const { return *instance_; }
  const SolveOptions& options() const { return options_; }
  Arithmetic arithmetic() const { return arithmetic_; }
  Tolerance tolerance() const { return tolerance_; }
  double mass_eps() const { return mass_eps_; }

  DualState& duals() { return duals_; }
  const DualState& duals() const { return duals_; }
  TransportPlan& plan() { return plan_; }
  const TransportPlan& plan() const { return plan_; }
  const DualContext& context() const { return context_; }
  const SinkIndex& sink_index() const { return sink_index_; }
  PartnerIndex& partner_index() { return partners_; }
  ArcSearch& search() { return search_; }
  SolveStats& stats() { return stats_; }
  const SolveStats& stats() const { return stats_; }

  double deficiency(std::size_t i) const;
  double spare(std::size_t x) const;
  bool complete() const;

  /// Admissible sinks of `anchor` through the configured scan (pruned or not).
  Enumeration enumerate(std::size_t anchor, std::vector<ExclusionRegion>* log = nullptr);

 private:
  const ProblemInstance* instance_;
  SolveOptions options_;
  Arithmetic arithmetic_;
  Tolerance tolerance_;
  double mass_eps_ = 0.0;
  DualState duals_;
  TransportPlan plan_;
  DualContext context_;
  SinkIndex sink_index_;
  PartnerIndex partners_;
  ArcSearch search_;
  SolveStats stats_;
};

/// Fresh labels: every deficient source is a root.
LabelState start_labels(const SolverState& state);

/// Runs the two labeling rules to a fixed point or until a labeled sink has
/// spare capacity. Labels already present are kept, so after a dual update
/// the pass continues from the previous state once every labeled source is
/// queued again (see requeue_labeled_sources).
void label_pass(SolverState& state, LabelState& labels);

/// After a dual update only arcs from labeled sources to unlabeled sinks can
/// become admissible; rescanning the labeled sources is enough.
void requeue_labeled_sources(LabelState& labels);

/// Pushes the bottleneck amount along the predecessor path of the
/// breakthrough sink. Returns the amount shipped.
double augment_flow(SolverState& state, const LabelState& labels);

/// Minimum slack over labeled sources × unlabeled sinks (Θ).
double compute_theta(SolverState& state, const LabelState& labels, ThetaMode mode);

/// alpha += Θ on labeled sources, beta -= Θ on labeled sinks.
void update_duals(DualState& duals, const LabelState& labels, double theta);

class SolveObserver {
 public:
  virtual ~SolveObserver() = default;
  virtual void on_init(SolverState&) {}
  virtual void on_theta(SolverState&, const LabelState&, double /*theta*/) {}
  virtual void on_dual_update(SolverState&, const LabelState&, double /*theta*/) {}
  virtual void on_augment(SolverState&, double /*amount*/) {}
};

struct SolveResult {
  double value = 0.0;
  std::string value_text;  // exact integer text in exact mode
  bool exact = false;
  TransportPlan plan;
  DualState duals;
  SolveStats stats;
  Tolerance tolerance;
};

/// Throws std::invalid_argument on a validation failure, IterationLimitError
/// when the iteration cap or the unit-Θ watchdog trips.
SolveResult solve(const ProblemInstance& instance, const SolveOptions& options = {},
                  SolveObserver* observer = nullptr);

}  // namespace planar_ot
