#include "planar_ot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "planar_ot/duals.hpp"

namespace planar_ot {
namespace {

struct Enumerator {
  std::size_t n = 0;
  std::size_t m = 0;
  bool exact = false;
  std::vector<std::int64_t> exact_cost;  // row-major n x m
  std::vector<double> float_cost;
  std::vector<std::int64_t> row_rem;
  std::vector<std::int64_t> col_rem;
  std::vector<std::int64_t> current;
  std::vector<std::int64_t> best;
  std::int64_t best_exact = std::numeric_limits<std::int64_t>::max();
  double best_float = std::numeric_limits<double>::infinity();
  std::uint64_t count = 0;

  void finish() {
    for (const auto c : col_rem) {
      if (c != 0) return;
    }
    ++count;
    if (exact) {
      std::int64_t total = 0;
      for (std::size_t k = 0; k < current.size(); ++k) total += current[k] * exact_cost[k];
      if (total < best_exact) {
        best_exact = total;
        best = current;
      }
    } else {
      double total = 0.0;
      for (std::size_t k = 0; k < current.size(); ++k) total += static_cast<double>(current[k]) * float_cost[k];
      if (total < best_float) {
        best_float = total;
        best = current;
      }
    }
  }

  void visit(std::size_t cell) {
    if (cell == n * m) {
      finish();
      return;
    }
    const std::size_t i = cell / m;
    const std::size_t j = cell % m;
    const std::int64_t lo = j + 1 == m ? row_rem[i] : 0;
    const std::int64_t hi = std::min(row_rem[i], col_rem[j]);
    for (std::int64_t a = lo; a <= hi; ++a) {
      current[cell] = a;
      row_rem[i] -= a;
      col_rem[j] -= a;
      visit(cell + 1);
      row_rem[i] += a;
      col_rem[j] += a;
    }
    current[cell] = 0;
  }
};

std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

}  // namespace

OracleResult brute_force_optimal(const ProblemInstance& instance) {
  const Measure& p = instance.source;
  const Measure& q = instance.sink;
  if (!p.integral_masses() || !q.integral_masses()) throw std::invalid_argument("oracle needs integer masses");
  if (p.total_mass() > kOracleMassCap) throw std::invalid_argument("oracle cap exceeded: total mass above 12");
  if (p.size() * q.size() > kOracleCellCap) throw std::invalid_argument("oracle cap exceeded: more than 16 pairs");
  if (p.empty() || q.empty() || p.total_mass() != q.total_mass()) {
    throw std::invalid_argument("oracle needs a balanced, nonempty instance");
  }

  Enumerator e;
  e.n = p.size();
  e.m = q.size();
  const Arithmetic arith = choose_arithmetic(instance);
  e.exact = arith.exact_costs;
  for (std::size_t i = 0; i < e.n; ++i) {
    for (std::size_t j = 0; j < e.m; ++j) {
      if (e.exact) {
        e.exact_cost.push_back(exact_distance(instance.metric, p[i].position, q[j].position));
      } else {
        e.float_cost.push_back(distance(instance.metric, p[i].position, q[j].position));
      }
    }
  }
  for (const auto& mp : p.points()) e.row_rem.push_back(static_cast<std::int64_t>(mp.mass));
  for (const auto& mp : q.points()) e.col_rem.push_back(static_cast<std::int64_t>(mp.mass));
  e.current.assign(e.n * e.m, 0);
  e.visit(0);

  OracleResult result;
  result.plans_enumerated = e.count;
  if (e.exact) {
    result.value = static_cast<double>(e.best_exact);
    result.value_text = std::to_string(e.best_exact);
  } else {
    result.value = e.best_float;
    result.value_text = format_number(e.best_float);
  }
  result.plan.assign(e.n, std::vector<std::int64_t>(e.m, 0));
  for (std::size_t k = 0; k < e.best.size(); ++k) result.plan[k / e.m][k % e.m] = e.best[k];
  return result;
}

std::vector<std::vector<std::size_t>> definitional_parents(const std::vector<Point>& points) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> parents(n);
  auto sw = [](Point a, Point b) { return is_direction(Direction::sw, b, a); };  // a SW of b
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::size_t> below;
    for (std::size_t q = 0; q < n; ++q) {
      if (q != k && sw(points[q], points[k])) below.push_back(q);
    }
    for (const std::size_t q : below) {
      const bool dominated = std::any_of(below.begin(), below.end(), [&](std::size_t other) {
        return other != q && sw(points[q], points[other]);
      });
      if (!dominated) parents[k].push_back(q);
    }
    if (parents[k].empty()) parents[k].push_back(DagIndex::kNoOrdinal);
    std::sort(parents[k].begin(), parents[k].end());
  }
  return parents;
}

ProblemInstance random_instance(const InstanceGenSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  using Layout = InstanceGenSpec::Layout;

  auto positions = [&](std::size_t count) {
    std::vector<Point> out;
    if (spec.layout == Layout::grid) {
      const auto lo = static_cast<std::int64_t>(std::ceil(spec.coord_lo));
      const auto hi = static_cast<std::int64_t>(std::floor(spec.coord_hi));
      for (std::int64_t y = lo; y <= hi; ++y) {
        for (std::int64_t x = lo; x <= hi; ++x) out.push_back({static_cast<double>(x), static_cast<double>(y)});
      }
      return out;
    }
    std::set<std::pair<double, double>> seen;
    if (spec.layout == Layout::scattered) {
      const auto lo = static_cast<std::int64_t>(std::ceil(spec.coord_lo));
      const auto hi = static_cast<std::int64_t>(std::floor(spec.coord_hi));
      const auto side = static_cast<std::size_t>(hi - lo + 1);
      count = std::min(count, side * side);
      while (out.size() < count) {
        const Point p{static_cast<double>(uniform_int(rng, lo, hi)), static_cast<double>(uniform_int(rng, lo, hi))};
        if (seen.insert({p.x, p.y}).second) out.push_back(p);
      }
    } else {
      std::uniform_real_distribution<double> coord(spec.coord_lo, spec.coord_hi);
      while (out.size() < count) {
        const Point p{coord(rng), coord(rng)};
        if (seen.insert({p.x, p.y}).second) out.push_back(p);
      }
    }
    return out;
  };

  const auto src_pos = positions(spec.n_sources);
  const auto snk_pos = positions(spec.n_sinks);
  std::vector<std::int64_t> p_mass;
  std::vector<std::int64_t> q_mass;
  for (std::size_t k = 0; k < src_pos.size(); ++k) p_mass.push_back(uniform_int(rng, spec.mass_lo, spec.mass_hi));
  for (std::size_t k = 0; k < snk_pos.size(); ++k) q_mass.push_back(uniform_int(rng, spec.mass_lo, spec.mass_hi));

  std::int64_t p_total = 0;
  std::int64_t q_total = 0;
  for (const auto v : p_mass) p_total += v;
  for (const auto v : q_mass) q_total += v;
  while (q_total < p_total) {
    ++q_mass[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(q_mass.size()) - 1))];
    ++q_total;
  }
  while (q_total > p_total) {
    std::vector<std::size_t> reducible;
    for (std::size_t k = 0; k < q_mass.size(); ++k) {
      if (q_mass[k] > 1) reducible.push_back(k);
    }
    if (reducible.empty()) {
      q_total -= q_mass.back();
      q_mass.pop_back();
      continue;
    }
    --q_mass[reducible[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(reducible.size()) - 1))]];
    --q_total;
  }

  std::vector<MassPoint> src;
  std::vector<MassPoint> snk;
  for (std::size_t k = 0; k < src_pos.size(); ++k) src.push_back({src_pos[k], static_cast<double>(p_mass[k])});
  for (std::size_t k = 0; k < q_mass.size(); ++k) snk.push_back({snk_pos[k], static_cast<double>(q_mass[k])});
  return ProblemInstance{Measure::canonical(std::move(src)), Measure::canonical(std::move(snk)), spec.metric};
}

}  // namespace planar_ot
