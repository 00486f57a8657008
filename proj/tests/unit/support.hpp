#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "planar_ot/instance.hpp"
#include "planar_ot/oracle.hpp"
#include "planar_ot/solver.hpp"

namespace planar_ot::testing {

inline Measure measure(std::initializer_list<MassPoint> pts) { return Measure::canonical(std::vector<MassPoint>(pts)); }

inline ProblemInstance instance(Metric metric, std::initializer_list<MassPoint> p, std::initializer_list<MassPoint> q) {
  return ProblemInstance{measure(p), measure(q), metric};
}

inline Point random_point(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return {d(rng), d(rng)};
}

inline Point random_lattice_point(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return {static_cast<double>(d(rng)), static_cast<double>(d(rng))};
}

/// Distinct lattice points.
inline std::vector<Point> random_point_set(std::mt19937_64& rng, std::size_t count, int lo, int hi) {
  std::set<std::pair<double, double>> seen;
  std::vector<Point> out;
  const auto side = static_cast<std::size_t>(hi - lo + 1);
  count = std::min(count, side * side);
  while (out.size() < count) {
    const Point p = random_lattice_point(rng, lo, hi);
    if (seen.insert({p.x, p.y}).second) out.push_back(p);
  }
  return out;
}

inline ProblemInstance random_small(std::mt19937_64& rng, Metric metric, std::size_t max_n = 12,
                                    InstanceGenSpec::Layout layout = InstanceGenSpec::Layout::scattered) {
  InstanceGenSpec spec;
  spec.seed = rng();
  spec.metric = metric;
  spec.n_sources = std::uniform_int_distribution<std::size_t>(1, max_n)(rng);
  spec.n_sinks = std::uniform_int_distribution<std::size_t>(1, max_n)(rng);
  spec.coord_hi = 9;
  spec.layout = layout;
  return random_instance(spec);
}

/// Copies of the duals at init and after every dual update.
struct DualRecorder : SolveObserver {
  std::vector<DualState> states;
  void on_init(SolverState& s) override { states.push_back(s.duals()); }
  void on_dual_update(SolverState& s, const LabelState&, double) override { states.push_back(s.duals()); }
};

inline constexpr Metric kMetrics[] = {Metric::l1, Metric::sq_euclid, Metric::euclid};

}  // namespace planar_ot::testing
