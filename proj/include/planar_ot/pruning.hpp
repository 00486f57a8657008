#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "planar_ot/duals.hpp"
#include "planar_ot/geometry.hpp"
#include "planar_ot/neighbor_index.hpp"

namespace planar_ot {

inline constexpr std::array<Direction, 4> kQuadrants{Direction::ne, Direction::nw, Direction::se, Direction::sw};

/// Sinks prepared for quadrant scans: for each quadrant the reflected
/// positions grouped into rows of equal y (ascending), each row sorted by x,
/// plus the NE-SW index of the reflected positions.
class SinkIndex {
 public:
  struct Cell {
    double x;
    std::size_t sink;
  };
  struct Row {
    double y;
    std::vector<Cell> cells;
  };

  SinkIndex() = default;
  explicit SinkIndex(std::span<const Point> sinks);

  std::size_t size() const { return size_; }
  std::span<const Row> rows(Direction quadrant) const { return rows_[slot(quadrant)]; }
  const DagIndex& dag(Direction quadrant) const { return dags_[slot(quadrant)]; }

  static std::size_t slot(Direction quadrant) { return static_cast<std::size_t>(quadrant); }

 private:
  std::size_t size_ = 0;
  std::array<std::vector<Row>, 4> rows_;
  std::array<DagIndex, 4> dags_;
};

/// Per sink, a short list of sources believed to be admissible for it.
/// Entries are validated on access; when none survive, all sources are
/// scanned (dual feasibility guarantees at least one admissible source).
class PartnerIndex {
 public:
  PartnerIndex() = default;
  PartnerIndex(std::size_t num_sinks, std::size_t capacity = 16);

  void note(std::size_t sink, std::size_t source);
  std::span<const std::size_t> partners(const DualContext& duals, std::size_t sink);

  std::uint64_t checks() const { return checks_; }
  std::uint64_t full_scans() const { return full_scans_; }

 private:
  std::size_t capacity_ = 16;
  std::vector<std::vector<std::size_t>> lists_;
  std::vector<std::size_t> next_slot_;
  std::uint64_t checks_ = 0;
  std::uint64_t full_scans_ = 0;
};

struct PruneCounters {
  std::uint64_t candidates_examined = 0;
  std::uint64_t candidates_skipped = 0;
  std::uint64_t line_stops = 0;
  std::uint64_t vertical_stops = 0;
  std::uint64_t region_exclusions = 0;

  PruneCounters& operator+=(const PruneCounters& other);
  friend bool operator==(const PruneCounters&, const PruneCounters&) = default;
};

/// A region of the plane whose sinks all have slack above `level` with
/// respect to the anchor that produced it. Geometry other than `hyperbolic`
/// is stored in the reflected frame of `frame`.
struct ExclusionRegion {
  enum class Kind { ne_of_point, le_ray, column_above_y, hyperbolic };

  Kind kind = Kind::ne_of_point;
  Direction frame = Direction::ne;
  Point apex;           // corner of NE[apex], start of the ray, or (i0, cut) for a column
  bool strict = false;  // column: y > cut instead of y >= cut
  HyperbolicSet hyperbola;
  Metric metric = Metric::euclid;
  double level = 0.0;

  bool contains(Point p) const;
};

/// The anchor source and quadrant a rule is evaluated in. Points handed to
/// the rules are ordinals; their positions are reflected into the NE frame.
struct ScanContext {
  const DualContext& duals;
  std::size_t anchor;
  Direction quadrant = Direction::ne;

  Point anchor_point() const { return reflect(quadrant, duals.source_point(anchor)); }
  Point sink_point(std::size_t x) const { return reflect(quadrant, duals.sink_point(x)); }
  Point source_point(std::size_t i) const { return reflect(quadrant, duals.source_point(i)); }
};

ExclusionRegion thm1_l1_ne_exclude(const ScanContext& ctx, std::size_t low_sink);

/// Row tracker for the squared Euclidean line rules. Feed the sinks of one
/// row east of the anchor in increasing x; `observe` returns true once the
/// rest of the row holds only low sinks.
class SqLineTracker {
 public:
  bool observe(double slack, Tolerance tolerance);
  void reset();

 private:
  bool seen_admissible_ = false;
  std::optional<double> min_low_;
};

/// Index of the sink after which the row may be abandoned, if any.
std::optional<std::size_t> thm2_sq_line_stop(const ScanContext& ctx, std::span<const double> row_slacks);

ExclusionRegion thm3_sq_vertical_stop(const ScanContext& ctx, std::size_t sink, std::size_t partner);

/// Hyperbolic region of sinks with slack > s; `metric_only` gives the
/// smaller set built from the sink itself instead of its partner.
ExclusionRegion thm4_region(const ScanContext& ctx, std::size_t sink, std::size_t partner, double s,
                            bool metric_only = false);

ExclusionRegion prop4_euclid_line_stop(const ScanContext& ctx, std::size_t sink);

std::optional<ExclusionRegion> thm5_euclid_le_stop(const ScanContext& ctx, std::size_t sink, std::size_t partner,
                                                   double s);

std::vector<ExclusionRegion> thm6_euclid_ne_stop(const ScanContext& ctx, std::size_t sink, std::size_t partner,
                                                 double s);

/// NE[sink] holds only sinks with slack above `theta`, when one of the three
/// cases applies. Returns nothing (never throws) when the test fails.
std::optional<ExclusionRegion> thm7_theta_exclude(const ScanContext& ctx, std::size_t sink, std::size_t partner,
                                                  double theta, std::optional<double> known_slack = std::nullopt);

struct Enumeration {
  std::vector<std::size_t> sinks;  // ascending ordinals
  PruneCounters counters;
};

struct EnumerateOptions {
  bool pruning = true;
  // Test hook: silently drops one admissible sink per scan.
  bool inject_bad_prune = false;
  std::vector<ExclusionRegion>* log = nullptr;
};

/// Everything a scan reads, plus reusable scratch space.
class ArcSearch {
 public:
  ArcSearch(const DualContext& duals, const SinkIndex& sinks, PartnerIndex& partners);

  const DualContext& duals() const { return *duals_; }
  const SinkIndex& sinks() const { return *sinks_; }
  PartnerIndex& partners() { return *partners_; }

  /// Admissible partners of `sink` lying NE of the anchor in the quadrant frame.
  std::vector<std::size_t> partners_ne(const ScanContext& ctx, std::size_t sink);

  /// Starts a new per-anchor visit; returns the stamp to compare against.
  std::uint32_t next_stamp();
  std::vector<std::uint32_t>& stamps() { return stamps_; }
  std::vector<double>& slack_cache() { return slack_cache_; }

 private:
  const DualContext* duals_;
  const SinkIndex* sinks_;
  PartnerIndex* partners_;
  std::vector<std::uint32_t> stamps_;
  std::vector<double> slack_cache_;
  std::uint32_t stamp_ = 0;
};

Enumeration enumerate_admissible(ArcSearch& search, std::size_t anchor, const EnumerateOptions& options = {});

std::vector<std::size_t> full_scan_admissible(const DualContext& duals, std::size_t anchor);

}  // namespace planar_ot
