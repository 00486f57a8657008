#include "planar_ot/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace planar_ot {
namespace {

constexpr double kExactDualLimit = 4503599627370496.0;  // 2^52

Tolerance tolerance_for(const Arithmetic& a, const SolveOptions& options) {
  return a.exact_costs ? Tolerance::exact_mode() : Tolerance::float_mode(options.epsilon_adm);
}

// Sinks marked in the Θ scan of one source: visited (slack evaluated or
// labeled) and excluded (inside a region proven to exceed the running Θ).
struct ThetaScratch {
  std::vector<std::uint32_t> visited;
  std::vector<std::uint32_t> excluded;
  std::uint32_t stamp = 0;

  explicit ThetaScratch(std::size_t m) : visited(m, 0), excluded(m, 0) {}
};

}  // namespace

std::string_view to_string(ThetaMode mode) {
  switch (mode) {
    case ThetaMode::unit_integer: return "unit";
    case ThetaMode::full_scan: return "scan";
    case ThetaMode::theorem7: return "thm7";
  }
  return "?";
}

std::optional<ThetaMode> parse_theta_mode(std::string_view text) {
  if (text == "unit") return ThetaMode::unit_integer;
  if (text == "scan") return ThetaMode::full_scan;
  if (text == "thm7") return ThetaMode::theorem7;
  return std::nullopt;
}

LabelState::LabelState(std::size_t num_sources, std::size_t num_sinks)
    : source_labeled(num_sources, 0),
      sink_labeled(num_sinks, 0),
      source_pred(num_sources, kRootLabel),
      sink_pred(num_sinks, kRootLabel) {}

SolverState::SolverState(const ProblemInstance& instance, const SolveOptions& options)
    : instance_(&instance),
      options_(options),
      arithmetic_(choose_arithmetic(instance)),
      tolerance_(tolerance_for(arithmetic_, options)),
      mass_eps_(arithmetic_.exact_masses ? 0.0 : 1e-12 * instance.source.total_mass()),
      duals_(init_duals(instance)),
      plan_(instance.source.size(), instance.sink.size()),
      context_(instance, duals_, tolerance_),
      sink_index_(instance.sink.positions()),
      partners_(instance.sink.size()),
      search_(context_, sink_index_, partners_) {
  // The minimizers behind the initial beta are admissible partners.
  for (std::size_t x = 0; x < instance.sink.size(); ++x) {
    for (std::size_t i = 0; i < instance.source.size(); ++i) {
      if (std::abs(slack(duals_, instance.metric, instance, i, x)) <= tolerance_.eps) partners_.note(x, i);
    }
  }
}

double SolverState::deficiency(std::size_t i) const { return instance_->source[i].mass - plan_.shipped(i); }

double SolverState::spare(std::size_t x) const { return instance_->sink[x].mass - plan_.received(x); }

bool SolverState::complete() const {
  for (std::size_t i = 0; i < instance_->source.size(); ++i) {
    if (deficiency(i) > mass_eps_) return false;
  }
  return true;
}

Enumeration SolverState::enumerate(std::size_t anchor, std::vector<ExclusionRegion>* log) {
  EnumerateOptions opts;
  opts.pruning = options_.pruning;
  opts.inject_bad_prune = options_.inject_bad_prune;
  opts.log = log;
  Enumeration e = enumerate_admissible(search_, anchor, opts);
  stats_.prune += e.counters;
  ++stats_.enumerations;
  return e;
}

LabelState start_labels(const SolverState& state) {
  const auto& inst = state.instance();
  LabelState labels(inst.source.size(), inst.sink.size());
  for (std::size_t i = 0; i < inst.source.size(); ++i) {
    if (state.deficiency(i) > state.mass_eps()) {
      labels.source_labeled[i] = 1;
      labels.labeled_sources.push_back(i);
      labels.deficient_sources.push_back(i);
    }
  }
  return labels;
}

void label_pass(SolverState& state, LabelState& labels) {
  const TransportPlan& plan = state.plan();
  while (!labels.breakthrough() && labels.next_source < labels.labeled_sources.size()) {
    const std::size_t i = labels.labeled_sources[labels.next_source++];
    for (const std::size_t x : state.enumerate(i).sinks) {
      if (labels.sink_labeled[x]) continue;
      labels.sink_labeled[x] = 1;
      labels.sink_pred[x] = static_cast<std::ptrdiff_t>(i);
      labels.labeled_sinks.push_back(x);
      if (state.spare(x) > state.mass_eps()) {
        labels.breakthrough_sink = x;
        return;
      }
      for (const auto& [source, h] : plan.in_flows(x)) {
        if (labels.source_labeled[source]) continue;
        labels.source_labeled[source] = 1;
        labels.source_pred[source] = static_cast<std::ptrdiff_t>(x);
        labels.labeled_sources.push_back(source);
      }
    }
  }
}

void requeue_labeled_sources(LabelState& labels) { labels.next_source = 0; }

double augment_flow(SolverState& state, const LabelState& labels) {
  if (!labels.breakthrough()) throw SolverError("augment_flow: no breakthrough");
  TransportPlan& plan = state.plan();
  struct Step {
    std::size_t source;
    std::size_t sink;
    bool forward;
  };
  std::vector<Step> path;
  std::size_t x = *labels.breakthrough_sink;
  double amount = state.spare(x);
  for (;;) {
    const std::ptrdiff_t pred = labels.sink_pred[x];
    if (pred < 0) throw SolverError("augment_flow: broken predecessor chain");
    const auto i = static_cast<std::size_t>(pred);
    path.push_back({i, x, true});
    if (labels.source_pred[i] == LabelState::kRootLabel) {
      amount = std::min(amount, state.deficiency(i));
      break;
    }
    const auto back = static_cast<std::size_t>(labels.source_pred[i]);
    amount = std::min(amount, plan.flow(i, back));
    path.push_back({i, back, false});
    x = back;
    if (path.size() > 2 * (plan.num_sources() + plan.num_sinks())) {
      throw SolverError("augment_flow: predecessor cycle");
    }
  }
  if (!(amount > state.mass_eps())) throw SolverError("augment_flow: bottleneck is not positive");
  for (const Step& s : path) {
    plan.add(s.source, s.sink, s.forward ? amount : -amount, state.mass_eps());
    if (s.forward) state.partner_index().note(s.sink, s.source);
  }
  return amount;
}

double compute_theta(SolverState& state, const LabelState& labels, ThetaMode mode) {
  if (labels.labeled_sources.empty()) throw SolverError("compute_theta: no labeled source");
  const std::size_t m = state.instance().sink.size();
  if (labels.labeled_sinks.size() >= m) throw SolverError("compute_theta: every sink is labeled");
  const Tolerance tol = state.tolerance();
  if (mode == ThetaMode::unit_integer) {
    if (!state.arithmetic().exact_costs || !state.arithmetic().exact_masses) {
      throw PreconditionError("unit theta needs integer costs and masses");
    }
    return 1.0;
  }
  const DualContext& ctx = state.context();
  SolveStats& stats = state.stats();
  double theta = std::numeric_limits<double>::infinity();

  if (mode == ThetaMode::full_scan || state.instance().metric != Metric::euclid) {
    std::vector<std::size_t> unlabeled;
    for (std::size_t x = 0; x < m; ++x) {
      if (!labels.sink_labeled[x]) unlabeled.push_back(x);
    }
    for (const std::size_t i : labels.labeled_sources) {
      for (const std::size_t x : unlabeled) theta = std::min(theta, ctx.slack(i, x));
      stats.theta_checks += unlabeled.size();
    }
  } else {
    ThetaScratch scratch(m);
    for (const std::size_t i : labels.labeled_sources) {
      ++scratch.stamp;
      for (const Direction q : kQuadrants) {
        const ScanContext sc{ctx, i, q};
        const Point a = sc.anchor_point();
        const DagIndex& dag = state.sink_index().dag(q);
        const auto nodes = dag.ordered();
        auto it = std::ranges::lower_bound(nodes, a.x + a.y, {},
                                           [](const DagNode& n) { return n.point.x + n.point.y; });
        for (; it != nodes.end(); ++it) {
          const std::size_t x = it->ordinal;
          if (scratch.visited[x] == scratch.stamp || scratch.excluded[x] == scratch.stamp) continue;
          if (!is_direction(Direction::ne, a, it->point)) continue;
          scratch.visited[x] = scratch.stamp;
          if (labels.sink_labeled[x]) continue;
          const double r = ctx.slack(i, x);
          ++stats.theta_checks;
          if (r > theta + tol.margin) {
            for (const std::size_t partner : state.search().partners_ne(sc, x)) {
              if (!thm7_theta_exclude(sc, x, partner, theta, r)) continue;
              // Every descendant in the NE-SW graph lies NE of x.
              std::vector<std::size_t> stack{dag.id_of(x)};
              while (!stack.empty()) {
                const std::size_t id = stack.back();
                stack.pop_back();
                for (const std::size_t child : dag.node(id).children) {
                  const std::size_t y = dag.node(child).ordinal;
                  if (scratch.excluded[y] == scratch.stamp) continue;
                  scratch.excluded[y] = scratch.stamp;
                  if (scratch.visited[y] != scratch.stamp && !labels.sink_labeled[y]) ++stats.theta_skipped;
                  stack.push_back(child);
                }
              }
              break;
            }
          }
          theta = std::min(theta, r);
        }
      }
    }
  }
  if (!std::isfinite(theta)) throw SolverError("compute_theta: no arc from labeled sources to unlabeled sinks");
  if (!(theta > tol.eps)) {
    throw SolverError("compute_theta: minimum slack " + format_number(theta) +
                      " is not positive; an admissible arc was missed by the labeling");
  }
  return theta;
}

void update_duals(DualState& duals, const LabelState& labels, double theta) {
  if (!(theta > 0.0)) throw PreconditionError("update_duals: theta must be positive");
  for (const std::size_t i : labels.labeled_sources) duals.alpha[i] += theta;
  for (const std::size_t x : labels.labeled_sinks) duals.beta[x] -= theta;
}

SolveResult solve(const ProblemInstance& instance, const SolveOptions& options, SolveObserver* observer) {
  const ValidationReport report = validate(instance);
  if (!report.ok()) {
    std::string message;
    for (const auto& v : report.violations) message += (message.empty() ? "" : "; ") + v.message;
    throw std::invalid_argument(message);
  }
  SolverState state(instance, options);
  const Arithmetic arith = state.arithmetic();
  if (options.theta_mode == ThetaMode::unit_integer && !(arith.exact_costs && arith.exact_masses)) {
    throw std::invalid_argument("unit theta needs integer costs and integer masses");
  }

  // Coarse bound on unit-Θ dual updates, used only as a watchdog.
  std::optional<long double> watchdog;
  if (options.theta_mode == ThetaMode::unit_integer) {
    double max_cost = 0.0;
    for (std::size_t i = 0; i < instance.source.size(); ++i) {
      for (std::size_t x = 0; x < instance.sink.size(); ++x) {
        max_cost = std::max(max_cost, distance(instance.metric, instance.source[i].position,
                                               instance.sink[x].position));
      }
    }
    watchdog = static_cast<long double>(instance.source.total_mass()) * max_cost + 1.0L;
  }

  if (observer) observer->on_init(state);
  SolveStats& stats = state.stats();
  LabelState labels = start_labels(state);
  std::uint64_t iterations = 0;
  while (!state.complete()) {
    if (options.max_iterations && ++iterations > *options.max_iterations) {
      throw IterationLimitError("iteration cap of " + std::to_string(*options.max_iterations) + " exceeded");
    }
    label_pass(state, labels);
    if (labels.breakthrough()) {
      const double amount = augment_flow(state, labels);
      ++stats.augmentations;
      if (observer) observer->on_augment(state, amount);
      labels = start_labels(state);
      continue;
    }
    const double theta = compute_theta(state, labels, options.theta_mode);
    stats.theta_history.push_back(theta);
    if (observer) observer->on_theta(state, labels, theta);
    update_duals(state.duals(), labels, theta);
    ++stats.dual_updates;
    if (arith.exact_costs) {
      for (const std::size_t i : labels.labeled_sources) {
        if (std::abs(state.duals().alpha[i]) > kExactDualLimit) throw std::overflow_error("dual value overflow");
      }
      for (const std::size_t x : labels.labeled_sinks) {
        if (std::abs(state.duals().beta[x]) > kExactDualLimit) throw std::overflow_error("dual value overflow");
      }
    }
    if (observer) observer->on_dual_update(state, labels, theta);
    if (watchdog && static_cast<long double>(stats.dual_updates) > *watchdog) {
      throw IterationLimitError("unit theta watchdog tripped");
    }
    requeue_labeled_sources(labels);
  }

  SolveResult result;
  result.exact = arith.exact_costs && arith.exact_masses;
  result.tolerance = state.tolerance();
  const DualContext& ctx = state.context();
  if (result.exact) {
    __int128 total = 0;
    for (const auto& arc : state.plan().arcs()) {
      total += static_cast<__int128>(static_cast<std::int64_t>(arc.flow)) *
               static_cast<std::int64_t>(ctx.cost(arc.source, arc.sink));
    }
    result.value = static_cast<double>(total);
    result.value_text = to_decimal(total);
  } else {
    long double total = 0.0L;
    for (const auto& arc : state.plan().arcs()) {
      total += static_cast<long double>(arc.flow) * ctx.cost(arc.source, arc.sink);
    }
    result.value = static_cast<double>(total);
    result.value_text = format_number(result.value);
  }
  stats.arc_checks = ctx.arc_checks();
  stats.partner_checks = state.partner_index().checks();
  stats.pruned_regions = stats.prune.line_stops + stats.prune.vertical_stops + stats.prune.region_exclusions;
  result.plan = state.plan();
  result.duals = state.duals();
  result.stats = stats;
  return result;
}

}  // namespace planar_ot
