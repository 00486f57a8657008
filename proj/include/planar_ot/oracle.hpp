#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "planar_ot/instance.hpp"
#include "planar_ot/neighbor_index.hpp"

namespace planar_ot {

inline constexpr double kOracleMassCap = 12.0;
inline constexpr std::size_t kOracleCellCap = 16;

struct OracleResult {
  double value = 0.0;
  std::string value_text;  // exact integer text when the costs are integral
  std::vector<std::vector<std::int64_t>> plan;  // plan[source][sink]
  std::uint64_t plans_enumerated = 0;
};

/// Exhaustive minimum over all complete integer plans. Needs integer masses,
/// total mass at most 12 and at most 16 source-sink pairs; throws
/// std::invalid_argument otherwise.
OracleResult brute_force_optimal(const ProblemInstance& instance);

/// Parents of every point by the definition: q is a parent of p when q is
/// SW of p and not SW of another point SW of p. Index kNoOrdinal stands for
/// the virtual root. O(N^3); for cross-checking build_index.
std::vector<std::vector<std::size_t>> definitional_parents(const std::vector<Point>& points);

struct InstanceGenSpec {
  enum class Layout { scattered, grid, continuous };

  std::uint64_t seed = 1;
  std::size_t n_sources = 4;
  std::size_t n_sinks = 4;
  double coord_lo = 0.0;
  double coord_hi = 31.0;
  std::int64_t mass_lo = 1;
  std::int64_t mass_hi = 9;
  Metric metric = Metric::sq_euclid;
  Layout layout = Layout::scattered;
};

/// Deterministic for a fixed spec. Scattered: distinct integer points in the
/// coordinate box. Grid: every integer point of the box (n_* ignored).
/// Continuous: distinct real points. Sink masses are nudged by ±1 until the
/// totals balance.
ProblemInstance random_instance(const InstanceGenSpec& spec);

}  // namespace planar_ot
