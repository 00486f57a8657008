#include "planar_ot/duals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace planar_ot {

Arithmetic choose_arithmetic(const ProblemInstance& instance) {
  Arithmetic a;
  auto small_integral = [](const Measure& m) {
    for (const auto& p : m.points()) {
      if (!is_integral(p.position)) return false;
      if (std::abs(p.position.x) > kExactCoordinateLimit || std::abs(p.position.y) > kExactCoordinateLimit) {
        return false;
      }
    }
    return true;
  };
  a.exact_costs = has_integer_costs(instance.metric) && small_integral(instance.source) &&
                  small_integral(instance.sink);
  a.exact_masses = instance.source.integral_masses() && instance.sink.integral_masses() &&
                   instance.source.total_mass() <= kExactMassLimit && instance.sink.total_mass() <= kExactMassLimit;
  return a;
}

DualContext::DualContext(const ProblemInstance& instance, const DualState& duals, Tolerance tolerance)
    : instance_(&instance), duals_(&duals), tol_(tolerance) {}

double DualContext::cost(std::size_t i, std::size_t x) const {
  return distance(instance_->metric, source_point(i), sink_point(x));
}

double DualContext::slack(std::size_t i, std::size_t x) const {
  ++arc_checks_;
  return cost(i, x) - duals_->alpha[i] - duals_->beta[x];
}

bool is_admissible_slack(double slack, Tolerance tolerance) {
  if (slack < -tolerance.eps) {
    throw FeasibilityError("dual feasibility violated: slack " + std::to_string(slack));
  }
  return slack <= tolerance.eps;
}

bool is_low_slack(double slack, Tolerance tolerance) { return slack > tolerance.eps; }

bool DualContext::is_admissible(std::size_t i, std::size_t x) const { return is_admissible_slack(slack(i, x), tol_); }

bool DualContext::is_low(std::size_t i, std::size_t x) const { return is_low_slack(slack(i, x), tol_); }

bool DualContext::is_lower(std::size_t i, std::size_t a, std::size_t b) const {
  const double sa = slack(i, a);
  const double sb = slack(i, b);
  if (!is_low_slack(sa, tol_) || !is_low_slack(sb, tol_)) throw PreconditionError("is_lower: both sinks must be low");
  return sb >= sa;
}

bool DualContext::is_strictly_lower(std::size_t i, std::size_t a, std::size_t b) const {
  const double sa = slack(i, a);
  const double sb = slack(i, b);
  if (!is_low_slack(sa, tol_) || !is_low_slack(sb, tol_)) {
    throw PreconditionError("is_strictly_lower: both sinks must be low");
  }
  return sb > sa;
}

double slack(const DualState& duals, Metric metric, const ProblemInstance& instance, std::size_t source,
             std::size_t sink) {
  return distance(metric, instance.source[source].position, instance.sink[sink].position) - duals.alpha[source] -
         duals.beta[sink];
}

TransportPlan::TransportPlan(std::size_t num_sources, std::size_t num_sinks)
    : out_(num_sources), in_(num_sinks), out_sum_(num_sources, 0.0), in_sum_(num_sinks, 0.0) {}

double TransportPlan::flow(std::size_t i, std::size_t x) const {
  const auto it = out_[i].find(x);
  return it == out_[i].end() ? 0.0 : it->second;
}

void TransportPlan::add(std::size_t i, std::size_t x, double delta, double zero_tol) {
  double& h = out_[i][x];
  const double before = h;
  h += delta;
  if (h <= zero_tol) {
    out_[i].erase(x);
    in_[x].erase(i);
    out_sum_[i] -= before;
    in_sum_[x] -= before;
    return;
  }
  in_[x][i] = h;
  out_sum_[i] += h - before;
  in_sum_[x] += h - before;
}

double TransportPlan::total_shipped() const {
  double total = 0.0;
  for (const double s : out_sum_) total += s;
  return total;
}

std::vector<TransportPlan::Arc> TransportPlan::arcs() const {
  std::vector<Arc> out;
  for (std::size_t i = 0; i < out_.size(); ++i) {
    for (const auto& [x, h] : out_[i]) out.push_back({i, x, h});
  }
  return out;
}

DualState init_duals(const ProblemInstance& instance) {
  const std::size_t n = instance.source.size();
  const std::size_t m = instance.sink.size();
  const Metric metric = instance.metric;
  DualState d;
  d.alpha.assign(n, std::numeric_limits<double>::infinity());
  d.beta.assign(m, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t x = 0; x < m; ++x) {
      d.alpha[i] = std::min(d.alpha[i], distance(metric, instance.source[i].position, instance.sink[x].position));
    }
  }
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t i = 0; i < n; ++i) {
      const double c = distance(metric, instance.source[i].position, instance.sink[x].position);
      d.beta[x] = std::min(d.beta[x], c - d.alpha[i]);
    }
  }
  return d;
}

long double dual_objective(const ProblemInstance& instance, const DualState& duals) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < instance.source.size(); ++i) {
    total += static_cast<long double>(duals.alpha[i]) * instance.source[i].mass;
  }
  for (std::size_t x = 0; x < instance.sink.size(); ++x) {
    total += static_cast<long double>(duals.beta[x]) * instance.sink[x].mass;
  }
  return total;
}

std::string to_decimal(__int128 value) {
  if (value == 0) return "0";
  const bool negative = value < 0;
  unsigned __int128 u = negative ? -static_cast<unsigned __int128>(value) : static_cast<unsigned __int128>(value);
  std::string digits;
  while (u > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (negative) digits.push_back('-');
  return {digits.rbegin(), digits.rend()};
}

namespace {

std::string format_long_double(long double v) { return format_number(static_cast<double>(v)); }

bool integral_vector(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double d) {
    return std::isfinite(d) && std::trunc(d) == d && std::abs(d) < 9.0e15;
  });
}

}  // namespace

CertificateReport verify_optimality(const ProblemInstance& instance, const TransportPlan& plan,
                                    const DualState& duals, Tolerance tolerance) {
  CertificateReport report;
  const std::size_t n = instance.source.size();
  const std::size_t m = instance.sink.size();
  const DualContext ctx(instance, duals, tolerance);

  const bool integral_masses = instance.source.integral_masses() && instance.sink.integral_masses();
  const double mass_tol = integral_masses ? 0.0 : 1e-9 * std::max(1.0, instance.source.total_mass());

  // (a) primal feasibility and completeness
  report.primal_feasible = plan.num_sources() == n && plan.num_sinks() == m;
  if (!report.primal_feasible) {
    report.messages.push_back("plan dimensions do not match the instance");
  } else {
    std::vector<long double> row(n, 0.0L);
    std::vector<long double> col(m, 0.0L);
    for (const auto& arc : plan.arcs()) {
      if (!(arc.flow >= 0.0)) {
        report.primal_feasible = false;
        report.messages.push_back("negative flow on arc " + std::to_string(arc.source) + "->" +
                                  std::to_string(arc.sink));
      }
      row[arc.source] += arc.flow;
      col[arc.sink] += arc.flow;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(row[i] - instance.source[i].mass) > mass_tol) {
        report.primal_feasible = false;
        report.messages.push_back("source " + std::to_string(i) + " ships " + format_long_double(row[i]) +
                                  " of " + format_number(instance.source[i].mass));
      }
    }
    for (std::size_t x = 0; x < m; ++x) {
      if (std::abs(col[x] - instance.sink[x].mass) > mass_tol) {
        report.primal_feasible = false;
        report.messages.push_back("sink " + std::to_string(x) + " receives " + format_long_double(col[x]) +
                                  " of " + format_number(instance.sink[x].mass));
      }
    }
  }

  // (b) dual feasibility
  report.dual_feasible = duals.alpha.size() == n && duals.beta.size() == m;
  if (report.dual_feasible) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t x = 0; x < m; ++x) worst = std::min(worst, ctx.slack(i, x));
    }
    if (worst < -tolerance.eps) {
      report.dual_feasible = false;
      report.messages.push_back("minimum slack " + format_number(worst) + " is negative");
    }
  } else {
    report.messages.push_back("dual dimensions do not match the instance");
  }

  // (c) primal value equals dual value
  const bool exact = tolerance.exact && integral_masses && integral_vector(duals.alpha) &&
                     integral_vector(duals.beta) && report.dual_feasible && plan.num_sources() == n;
  if (exact) {
    __int128 primal = 0;
    __int128 dual = 0;
    for (const auto& arc : plan.arcs()) {
      primal += static_cast<__int128>(static_cast<std::int64_t>(arc.flow)) *
                static_cast<std::int64_t>(ctx.cost(arc.source, arc.sink));
    }
    for (std::size_t i = 0; i < n; ++i) {
      dual += static_cast<__int128>(static_cast<std::int64_t>(duals.alpha[i])) *
              static_cast<std::int64_t>(instance.source[i].mass);
    }
    for (std::size_t x = 0; x < m; ++x) {
      dual += static_cast<__int128>(static_cast<std::int64_t>(duals.beta[x])) *
              static_cast<std::int64_t>(instance.sink[x].mass);
    }
    report.primal_value = to_decimal(primal);
    report.dual_value = to_decimal(dual);
    report.values_match = primal == dual;
  } else if (report.dual_feasible && plan.num_sources() == n) {
    long double primal = 0.0L;
    for (const auto& arc : plan.arcs()) primal += static_cast<long double>(arc.flow) * ctx.cost(arc.source, arc.sink);
    const long double dual = dual_objective(instance, duals);
    report.primal_value = format_long_double(primal);
    report.dual_value = format_long_double(dual);
    report.values_match = std::abs(primal - dual) <= 1e-9L * (1.0L + std::abs(primal));
  }
  if (!report.values_match) {
    report.messages.push_back("primal value " + report.primal_value + " differs from dual value " +
                              report.dual_value);
  }

  // (d) complementary slackness
  report.complementary_slackness = plan.num_sources() == n && duals.alpha.size() == n;
  if (report.complementary_slackness) {
    for (const auto& arc : plan.arcs()) {
      const double s = ctx.slack(arc.source, arc.sink);
      if (s > tolerance.eps) {
        report.complementary_slackness = false;
        report.messages.push_back("flow on arc " + std::to_string(arc.source) + "->" + std::to_string(arc.sink) +
                                  " with slack " + format_number(s));
      }
    }
  }
  return report;
}

}  // namespace planar_ot
