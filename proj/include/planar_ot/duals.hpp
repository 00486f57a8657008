#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "planar_ot/geometry.hpp"
#include "planar_ot/instance.hpp"

namespace planar_ot {

/// A slack below -eps: the dual variables are no longer feasible.
class FeasibilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A caller broke a documented precondition (wrong metric, non-low sink, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Internal inconsistency of the algorithm, e.g. a zero bottleneck.
class SolverError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IterationLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How slacks are compared. In exact mode every cost, dual and Θ is an
/// integer held exactly in a double, so eps and margin are zero. In float
/// mode |slack| <= eps is admissible and a pruning rule only fires when its
/// inequalities hold with `margin` to spare.
struct Tolerance {
  double eps = 0.0;
  double margin = 0.0;
  bool exact = true;

  static Tolerance exact_mode() { return {}; }
  static Tolerance float_mode(double eps) { return {eps, 10.0 * eps, false}; }
};

/// Largest coordinate magnitude for which integer costs are computed exactly.
inline constexpr double kExactCoordinateLimit = 16777216.0;  // 2^24
/// Largest total mass handled in integer mass mode.
inline constexpr double kExactMassLimit = 1099511627776.0;  // 2^40

struct Arithmetic {
  bool exact_costs = false;
  bool exact_masses = false;
};

/// Exact costs need an integer-valued metric and small integral coordinates;
/// exact masses need integral masses with a bounded total.
Arithmetic choose_arithmetic(const ProblemInstance& instance);

struct DualState {
  std::vector<double> alpha;  // per source
  std::vector<double> beta;   // per sink

  friend bool operator==(const DualState&, const DualState&) = default;
};

/// Read view used to evaluate costs and slacks against one dual state.
class DualContext {
 public:
  DualContext(const ProblemInstance& instance, const DualState& duals, Tolerance tolerance);

  const ProblemInstance& instance() const { return *instance_; }
  const DualState& duals() const { return *duals_; }
  Tolerance tolerance() const { return tol_; }
  Metric metric() const { return instance_->metric; }
  std::size_t num_sources() const { return instance_->source.size(); }
  std::size_t num_sinks() const { return instance_->sink.size(); }
  Point source_point(std::size_t i) const { return instance_->source[i].position; }
  Point sink_point(std::size_t x) const { return instance_->sink[x].position; }

  double cost(std::size_t i, std::size_t x) const;
  double slack(std::size_t i, std::size_t x) const;
  /// Throws FeasibilityError when the slack is below -eps.
  bool is_admissible(std::size_t i, std::size_t x) const;
  bool is_low(std::size_t i, std::size_t x) const;
  /// Whether sink b is lower than sink a with respect to source i, i.e.
  /// slack(i,b) >= slack(i,a). Both sinks must be low.
  bool is_lower(std::size_t i, std::size_t a, std::size_t b) const;
  bool is_strictly_lower(std::size_t i, std::size_t a, std::size_t b) const;

  std::uint64_t arc_checks() const { return arc_checks_; }

 private:
  const ProblemInstance* instance_;
  const DualState* duals_;
  Tolerance tol_;
  mutable std::uint64_t arc_checks_ = 0;
};

// Point-level forms of the same predicates.
double slack(const DualState& duals, Metric metric, const ProblemInstance& instance, std::size_t source,
             std::size_t sink);
bool is_admissible_slack(double slack, Tolerance tolerance);
bool is_low_slack(double slack, Tolerance tolerance);

/// Sparse nonnegative flows with cached row and column sums.
class TransportPlan {
 public:
  TransportPlan() = default;
  TransportPlan(std::size_t num_sources, std::size_t num_sinks);

  std::size_t num_sources() const { return out_.size(); }
  std::size_t num_sinks() const { return in_.size(); }

  double flow(std::size_t i, std::size_t x) const;
  /// Adds `delta` to h(i,x). A result at or below `zero_tol` is erased.
  void add(std::size_t i, std::size_t x, double delta, double zero_tol = 0.0);

  const std::map<std::size_t, double>& out_flows(std::size_t i) const { return out_[i]; }
  const std::map<std::size_t, double>& in_flows(std::size_t x) const { return in_[x]; }
  double shipped(std::size_t i) const { return out_sum_[i]; }
  double received(std::size_t x) const { return in_sum_[x]; }
  double total_shipped() const;

  struct Arc {
    std::size_t source;
    std::size_t sink;
    double flow;
    friend bool operator==(const Arc&, const Arc&) = default;
  };
  /// Positive flows ordered by (source, sink).
  std::vector<Arc> arcs() const;

 private:
  std::vector<std::map<std::size_t, double>> out_;
  std::vector<std::map<std::size_t, double>> in_;
  std::vector<double> out_sum_;
  std::vector<double> in_sum_;
};

/// Greedy start: alpha(i) = min over sinks of cost, beta(x) = min over
/// sources of cost - alpha.
DualState init_duals(const ProblemInstance& instance);

/// Sum of alpha*p + beta*q, in long double.
long double dual_objective(const ProblemInstance& instance, const DualState& duals);

struct CertificateReport {
  bool primal_feasible = false;
  bool dual_feasible = false;
  bool values_match = false;
  bool complementary_slackness = false;
  std::string primal_value;
  std::string dual_value;
  std::vector<std::string> messages;

  bool ok() const { return primal_feasible && dual_feasible && values_match && complementary_slackness; }
};

/// Checks the four optimality conditions independently by full scans.
/// Exact arithmetic is used when `tolerance.exact` and the masses are integral.
CertificateReport verify_optimality(const ProblemInstance& instance, const TransportPlan& plan,
                                    const DualState& duals, Tolerance tolerance);

/// Decimal text of an exact integer value.
std::string to_decimal(__int128 value);

}  // namespace planar_ot
