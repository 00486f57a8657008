#include "planar_ot/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace planar_ot {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A rule may only treat a sink as low when its slack clears the margin, so
// that rounding in the slack cannot turn an admissible sink into a low one.
bool robust_low(double r, Tolerance tol) { return r > std::max(tol.eps, tol.margin); }

// Nudges a float-mode cut ordinate upward so rounding never widens the region.
double widen_cut(double y, Tolerance tol) { return tol.exact ? y : y + 1e-12 * (1.0 + std::abs(y)); }

ExclusionRegion ne_region(Direction frame, Point apex, Metric metric, double level) {
  ExclusionRegion r;
  r.kind = ExclusionRegion::Kind::ne_of_point;
  r.frame = frame;
  r.apex = apex;
  r.metric = metric;
  r.level = level;
  return r;
}

ExclusionRegion ray_region(Direction frame, Point apex, Metric metric, double level) {
  ExclusionRegion r = ne_region(frame, apex, metric, level);
  r.kind = ExclusionRegion::Kind::le_ray;
  return r;
}

ExclusionRegion column_region(Direction frame, double x, double cut, bool strict, Metric metric, double level) {
  ExclusionRegion r = ne_region(frame, {x, cut}, metric, level);
  r.kind = ExclusionRegion::Kind::column_above_y;
  r.strict = strict;
  return r;
}

// Quantities shared by the Euclidean hyperbola rules, all in the NE frame:
// a0 the anchor, x1 the blocking sink, i1 its admissible partner.
struct PartnerGeometry {
  Point a0;
  Point x1;
  Point i1;
  double r = 0.0;
  double half = 0.0;  // a
  double b = 0.0;
  double b_guard = 0.0;
  double s = 0.0;
};

PartnerGeometry partner_geometry(const ScanContext& ctx, std::size_t sink, std::size_t partner, double s, double r) {
  PartnerGeometry g;
  g.a0 = ctx.anchor_point();
  g.x1 = ctx.sink_point(sink);
  g.i1 = ctx.source_point(partner);
  g.r = r;
  g.s = s;
  const double delta = distance(Metric::euclid, g.a0, g.x1) - distance(Metric::euclid, g.i1, g.x1);
  g.half = distance(Metric::euclid, g.a0, g.i1) / 2.0;
  g.b = delta - r + s;
  const Tolerance tol = ctx.duals.tolerance();
  g.b_guard = tol.exact ? g.b : g.b + tol.margin;
  return g;
}

std::optional<double> slope_bound(const PartnerGeometry& g) {
  if (!(g.half > 0.0) || !(g.b_guard > 0.0) || !(g.b_guard < 2.0 * g.half)) return std::nullopt;
  return asymptote_slope_bound(g.half, g.b_guard);
}

bool slope_passes(const std::optional<double>& bound, double needed, Tolerance tol) {
  return bound && *bound >= needed + tol.margin;
}

std::optional<ExclusionRegion> rule_thm5(const PartnerGeometry& g, Direction frame, Tolerance tol) {
  const double di = g.i1.x - g.a0.x;
  const double dj = g.i1.y - g.a0.y;
  if (!(g.b_guard > 0.0) || !(di > 0.0)) return std::nullopt;
  if (!slope_passes(slope_bound(g), dj / di, tol)) return std::nullopt;
  return ray_region(frame, g.x1, Metric::euclid, g.s);
}

std::vector<ExclusionRegion> rule_thm6(const PartnerGeometry& g, Direction frame, Tolerance tol) {
  const double di = g.i1.x - g.a0.x;
  const double dj = g.i1.y - g.a0.y;
  std::vector<ExclusionRegion> out;
  if (g.b_guard <= 0.0) {
    if (dj > 0.0) {
      out.push_back(ne_region(frame, g.x1, Metric::euclid, g.s));
      out.push_back(column_region(frame, g.a0.x, widen_cut(vertical_cut_y2(g.a0, g.i1), tol), true, Metric::euclid,
                                  g.s));
    }
    return out;
  }
  if (!(dj > 0.0) || !(di > 0.0)) return out;
  const auto bound = slope_bound(g);
  if (dj <= di) {
    if (slope_passes(bound, di / dj, tol)) out.push_back(ne_region(frame, g.x1, Metric::euclid, g.s));
  } else if (slope_passes(bound, dj / di, tol)) {
    out.push_back(ne_region(frame, g.x1, Metric::euclid, g.s));
    out.push_back(column_region(frame, g.a0.x, widen_cut(vertical_cut_y3(g.a0, g.i1), tol), false, Metric::euclid,
                                g.s));
  }
  return out;
}

std::optional<ExclusionRegion> rule_thm7(const PartnerGeometry& g, Direction frame, Tolerance tol) {
  const double di = g.i1.x - g.a0.x;
  const double dj = g.i1.y - g.a0.y;
  if (g.b_guard <= 0.0) {
    if (g.x1.y >= (g.a0.y + g.i1.y) / 2.0) return ne_region(frame, g.x1, Metric::euclid, g.s);
    return std::nullopt;
  }
  if (!(dj > 0.0) || !(di > 0.0)) return std::nullopt;
  const auto bound = slope_bound(g);
  const double needed = dj <= di ? di / dj : dj / di;
  if (slope_passes(bound, needed, tol)) return ne_region(frame, g.x1, Metric::euclid, g.s);
  return std::nullopt;
}

void require(bool condition, const char* message) {
  if (!condition) throw PreconditionError(message);
}

// Checks shared by every rule that takes a partner source.
void require_partner(const ScanContext& ctx, std::size_t sink, std::size_t partner) {
  require(partner != ctx.anchor, "partner must differ from the anchor");
  require(ctx.duals.is_admissible(partner, sink), "partner must be admissible for the sink");
  require(is_direction(Direction::ne, ctx.anchor_point(), ctx.source_point(partner)),
          "partner must lie NE of the anchor");
}

}  // namespace

SinkIndex::SinkIndex(std::span<const Point> sinks) : size_(sinks.size()) {
  for (const Direction q : kQuadrants) {
    std::vector<Point> reflected;
    reflected.reserve(sinks.size());
    for (const Point p : sinks) reflected.push_back(reflect(q, p));

    std::vector<std::size_t> order(sinks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (reflected[a].y != reflected[b].y) return reflected[a].y < reflected[b].y;
      return reflected[a].x < reflected[b].x;
    });
    auto& rows = rows_[slot(q)];
    for (const std::size_t s : order) {
      if (rows.empty() || rows.back().y != reflected[s].y) rows.push_back({reflected[s].y, {}});
      rows.back().cells.push_back({reflected[s].x, s});
    }
    dags_[slot(q)] = build_index(reflected);
  }
}

PartnerIndex::PartnerIndex(std::size_t num_sinks, std::size_t capacity)
    : capacity_(capacity), lists_(num_sinks), next_slot_(num_sinks, 0) {}

void PartnerIndex::note(std::size_t sink, std::size_t source) {
  auto& list = lists_[sink];
  if (std::find(list.begin(), list.end(), source) != list.end()) return;
  if (list.size() < capacity_) {
    list.push_back(source);
  } else {
    list[next_slot_[sink]++ % capacity_] = source;
  }
}

std::span<const std::size_t> PartnerIndex::partners(const DualContext& duals, std::size_t sink) {
  auto& list = lists_[sink];
  std::erase_if(list, [&](std::size_t i) {
    ++checks_;
    return !duals.is_admissible(i, sink);
  });
  if (list.empty()) {
    ++full_scans_;
    for (std::size_t i = 0; i < duals.num_sources() && list.size() < capacity_; ++i) {
      ++checks_;
      if (duals.is_admissible(i, sink)) list.push_back(i);
    }
  }
  return list;
}

PruneCounters& PruneCounters::operator+=(const PruneCounters& other) {
  candidates_examined += other.candidates_examined;
  candidates_skipped += other.candidates_skipped;
  line_stops += other.line_stops;
  vertical_stops += other.vertical_stops;
  region_exclusions += other.region_exclusions;
  return *this;
}

bool ExclusionRegion::contains(Point p) const {
  if (kind == Kind::hyperbolic) return hyperbolic_contains(hyperbola, metric, p);
  const Point q = reflect(frame, p);
  switch (kind) {
    case Kind::ne_of_point: return q.x >= apex.x && q.y >= apex.y;
    case Kind::le_ray: return q.y == apex.y && q.x >= apex.x;
    case Kind::column_above_y: return q.x >= apex.x && (strict ? q.y > apex.y : q.y >= apex.y);
    case Kind::hyperbolic: break;
  }
  return false;
}

ExclusionRegion thm1_l1_ne_exclude(const ScanContext& ctx, std::size_t low_sink) {
  require(ctx.duals.metric() == Metric::l1, "L1 quadrant exclusion needs the L1 metric");
  require(is_direction(Direction::ne, ctx.anchor_point(), ctx.sink_point(low_sink)), "sink must lie NE of the anchor");
  require(robust_low(ctx.duals.slack(ctx.anchor, low_sink), ctx.duals.tolerance()), "sink must be low");
  return ne_region(ctx.quadrant, ctx.sink_point(low_sink), Metric::l1, ctx.duals.tolerance().eps);
}

bool SqLineTracker::observe(double slack, Tolerance tolerance) {
  if (!is_low_slack(slack, tolerance)) {
    seen_admissible_ = true;
    return false;
  }
  if (seen_admissible_) return true;
  if (min_low_ && slack >= *min_low_) return true;
  min_low_ = min_low_ ? std::min(*min_low_, slack) : slack;
  return false;
}

void SqLineTracker::reset() {
  seen_admissible_ = false;
  min_low_.reset();
}

std::optional<std::size_t> thm2_sq_line_stop(const ScanContext& ctx, std::span<const double> row_slacks) {
  require(ctx.duals.metric() == Metric::sq_euclid, "row stop needs the squared Euclidean cost");
  require(ctx.duals.tolerance().exact, "row stop needs exact slacks");
  SqLineTracker tracker;
  for (std::size_t k = 0; k < row_slacks.size(); ++k) {
    if (tracker.observe(row_slacks[k], ctx.duals.tolerance())) return k;
  }
  return std::nullopt;
}

ExclusionRegion thm3_sq_vertical_stop(const ScanContext& ctx, std::size_t sink, std::size_t partner) {
  require(ctx.duals.metric() == Metric::sq_euclid, "vertical stop needs the squared Euclidean cost");
  require(is_direction(Direction::ne, ctx.anchor_point(), ctx.sink_point(sink)), "sink must lie NE of the anchor");
  require(robust_low(ctx.duals.slack(ctx.anchor, sink), ctx.duals.tolerance()), "sink must not be admissible");
  require_partner(ctx, sink, partner);
  return ne_region(ctx.quadrant, ctx.sink_point(sink), Metric::sq_euclid, ctx.duals.tolerance().eps);
}

ExclusionRegion thm4_region(const ScanContext& ctx, std::size_t sink, std::size_t partner, double s,
                            bool metric_only) {
  const Tolerance tol = ctx.duals.tolerance();
  const double r = ctx.duals.slack(ctx.anchor, sink);
  require(s >= 0.0, "level must be nonnegative");
  require(r > s + tol.margin, "sink slack must exceed the level");
  require(partner != ctx.anchor, "partner must differ from the anchor");
  require(ctx.duals.is_admissible(partner, sink), "partner must be admissible for the sink");
  const Metric metric = ctx.duals.metric();
  const Point i0 = ctx.duals.source_point(ctx.anchor);
  const Point x1 = ctx.duals.sink_point(sink);
  ExclusionRegion region;
  region.kind = ExclusionRegion::Kind::hyperbolic;
  region.metric = metric;
  region.level = s;
  if (metric_only) {
    require(is_true_metric(metric), "the reduced set needs a true metric");
    region.hyperbola = {i0, x1, r - distance(metric, i0, x1) - s - tol.margin};
  } else {
    const Point i1 = ctx.duals.source_point(partner);
    const double delta = distance(metric, i0, x1) - distance(metric, i1, x1);
    region.hyperbola = {i0, i1, r - delta - s - tol.margin};
  }
  return region;
}

ExclusionRegion prop4_euclid_line_stop(const ScanContext& ctx, std::size_t sink) {
  require(ctx.duals.metric() == Metric::euclid, "the ray rule needs the Euclidean metric");
  const Point a = ctx.anchor_point();
  const Point p = ctx.sink_point(sink);
  require(p.y == a.y && p.x >= a.x, "sink must lie on the anchor's row, east of it");
  require(robust_low(ctx.duals.slack(ctx.anchor, sink), ctx.duals.tolerance()), "sink must not be admissible");
  return ray_region(ctx.quadrant, p, Metric::euclid, ctx.duals.tolerance().eps);
}

std::optional<ExclusionRegion> thm5_euclid_le_stop(const ScanContext& ctx, std::size_t sink, std::size_t partner,
                                                   double s) {
  require(ctx.duals.metric() == Metric::euclid, "ray stop needs the Euclidean metric");
  const Tolerance tol = ctx.duals.tolerance();
  require(is_direction(Direction::ne, ctx.anchor_point(), ctx.sink_point(sink)), "sink must lie NE of the anchor");
  require(ctx.sink_point(sink) != ctx.anchor_point(), "sink must differ from the anchor");
  require(s >= 0.0, "level must be nonnegative");
  const double r = ctx.duals.slack(ctx.anchor, sink);
  require(r > s + tol.margin, "sink slack must exceed the level");
  require_partner(ctx, sink, partner);
  require(ctx.source_point(partner).x > ctx.anchor_point().x, "ray stop needs i1 > i0");
  const PartnerGeometry g = partner_geometry(ctx, sink, partner, s, r);
  require(g.b_guard > 0.0, "ray stop needs b > 0");
  return rule_thm5(g, ctx.quadrant, tol);
}

std::vector<ExclusionRegion> thm6_euclid_ne_stop(const ScanContext& ctx, std::size_t sink, std::size_t partner,
                                                 double s) {
  require(ctx.duals.metric() == Metric::euclid, "column stop needs the Euclidean metric");
  const Tolerance tol = ctx.duals.tolerance();
  require(is_direction(Direction::ne, ctx.anchor_point(), ctx.sink_point(sink)), "sink must lie NE of the anchor");
  require(ctx.sink_point(sink) != ctx.anchor_point(), "sink must differ from the anchor");
  require(s >= 0.0, "level must be nonnegative");
  const double r = ctx.duals.slack(ctx.anchor, sink);
  require(r > s + tol.margin, "sink slack must exceed the level");
  require_partner(ctx, sink, partner);
  return rule_thm6(partner_geometry(ctx, sink, partner, s, r), ctx.quadrant, tol);
}

std::optional<ExclusionRegion> thm7_theta_exclude(const ScanContext& ctx, std::size_t sink, std::size_t partner,
                                                  double theta, std::optional<double> known_slack) {
  if (ctx.duals.metric() != Metric::euclid || partner == ctx.anchor || !(theta >= 0.0)) return std::nullopt;
  const Point a = ctx.anchor_point();
  const Point p = ctx.sink_point(sink);
  if (p == a || !is_direction(Direction::ne, a, p)) return std::nullopt;
  if (!is_direction(Direction::ne, a, ctx.source_point(partner))) return std::nullopt;
  const Tolerance tol = ctx.duals.tolerance();
  const double r = known_slack ? *known_slack : ctx.duals.slack(ctx.anchor, sink);
  if (!(r > theta + tol.margin)) return std::nullopt;
  if (!ctx.duals.is_admissible(partner, sink)) return std::nullopt;
  return rule_thm7(partner_geometry(ctx, sink, partner, theta, r), ctx.quadrant, tol);
}

ArcSearch::ArcSearch(const DualContext& duals, const SinkIndex& sinks, PartnerIndex& partners)
    : duals_(&duals),
      sinks_(&sinks),
      partners_(&partners),
      stamps_(duals.num_sinks(), 0),
      slack_cache_(duals.num_sinks(), 0.0) {}

std::vector<std::size_t> ArcSearch::partners_ne(const ScanContext& ctx, std::size_t sink) {
  std::vector<std::size_t> out;
  const Point a = ctx.anchor_point();
  for (const std::size_t i : partners_->partners(*duals_, sink)) {
    if (i != ctx.anchor && is_direction(Direction::ne, a, ctx.source_point(i))) out.push_back(i);
  }
  return out;
}

std::uint32_t ArcSearch::next_stamp() {
  if (++stamp_ == 0) {
    std::fill(stamps_.begin(), stamps_.end(), 0);
    stamp_ = 1;
  }
  return stamp_;
}

namespace {

// Scan state of one quadrant: sinks with x >= x_cut, or above the column
// cut, are already known to be non-admissible.
struct QuadrantCuts {
  double x_cut = kInf;
  double y_cut = kInf;
  bool y_strict = false;

  bool row_excluded(double y) const { return y > y_cut || (y == y_cut && !y_strict); }
};

class QuadrantScan {
 public:
  QuadrantScan(ArcSearch& search, std::size_t anchor, Direction quadrant, std::uint32_t stamp,
               const EnumerateOptions& options, Enumeration& out, std::vector<std::size_t>& found)
      : search_(search),
        ctx_{search.duals(), anchor, quadrant},
        stamp_(stamp),
        options_(options),
        out_(out),
        found_(found),
        tol_(search.duals().tolerance()),
        metric_(search.duals().metric()) {}

  void run() {
    const Point a = ctx_.anchor_point();
    const auto rows = search_.sinks().rows(ctx_.quadrant);
    auto row = std::ranges::lower_bound(rows, a.y, {}, &SinkIndex::Row::y);
    for (; row != rows.end(); ++row) {
      if (cuts_.row_excluded(row->y) || cuts_.x_cut <= a.x) break;
      scan_row(*row, a);
    }
  }

 private:
  double slack_of(std::size_t x) {
    auto& stamps = search_.stamps();
    auto& cache = search_.slack_cache();
    if (stamps[x] == stamp_) return cache[x];
    const double r = search_.duals().slack(ctx_.anchor, x);
    stamps[x] = stamp_;
    cache[x] = r;
    ++out_.counters.candidates_examined;
    if (is_admissible_slack(r, tol_)) {
      found_.push_back(x);
      search_.partners().note(x, ctx_.anchor);
    }
    return r;
  }

  void emit(const ExclusionRegion& region) {
    if (options_.log) options_.log->push_back(region);
    switch (region.kind) {
      case ExclusionRegion::Kind::ne_of_point:
        cuts_.x_cut = std::min(cuts_.x_cut, region.apex.x);
        stop_row_ = true;
        ++out_.counters.region_exclusions;
        break;
      case ExclusionRegion::Kind::le_ray:
        stop_row_ = true;
        ++out_.counters.line_stops;
        break;
      case ExclusionRegion::Kind::column_above_y:
        if (region.apex.y < cuts_.y_cut || (region.apex.y == cuts_.y_cut && !region.strict)) {
          cuts_.y_cut = region.apex.y;
          cuts_.y_strict = region.strict;
        }
        if (cuts_.row_excluded(row_y_)) stop_row_ = true;
        ++out_.counters.vertical_stops;
        break;
      case ExclusionRegion::Kind::hyperbolic: break;
    }
  }

  void scan_row(const SinkIndex::Row& row, Point a) {
    tracker_.reset();
    stop_row_ = false;
    row_y_ = row.y;
    auto cell = std::ranges::lower_bound(row.cells, a.x, {}, &SinkIndex::Cell::x);
    for (; cell != row.cells.end() && cell->x < cuts_.x_cut; ++cell) {
      const double r = slack_of(cell->sink);
      const bool admissible = is_admissible_slack(r, tol_);
      const bool line_rule = metric_ == Metric::sq_euclid && tol_.exact && tracker_.observe(r, tol_);
      if (!admissible) apply_rules(cell->sink, r, {cell->x, row.y}, a);
      if (line_rule && !stop_row_) emit(ray_region(ctx_.quadrant, {cell->x, row.y}, metric_, tol_.eps));
      if (stop_row_) break;
    }
  }

  void apply_rules(std::size_t sink, double r, Point p, Point a) {
    if (!robust_low(r, tol_)) return;
    const bool at_anchor = p == a;
    switch (metric_) {
      case Metric::l1:
        if (!at_anchor) emit(ne_region(ctx_.quadrant, p, metric_, tol_.eps));
        break;
      case Metric::sq_euclid:
        if (!at_anchor && !search_.partners_ne(ctx_, sink).empty()) {
          emit(ne_region(ctx_.quadrant, p, metric_, tol_.eps));
        }
        break;
      case Metric::euclid: {
        if (p.y == a.y) emit(ray_region(ctx_.quadrant, p, metric_, tol_.eps));
        const double s = tol_.eps;
        if (at_anchor || !(r > s + tol_.margin)) break;
        bool ne_done = false;
        for (const std::size_t partner : search_.partners_ne(ctx_, sink)) {
          const PartnerGeometry g = partner_geometry(ctx_, sink, partner, s, r);
          if (!stop_row_) {
            if (auto ray = rule_thm5(g, ctx_.quadrant, tol_)) emit(*ray);
          }
          for (const auto& region : rule_thm6(g, ctx_.quadrant, tol_)) {
            if (region.kind == ExclusionRegion::Kind::ne_of_point) {
              if (ne_done) continue;
              ne_done = true;
            }
            emit(region);
          }
        }
        break;
      }
    }
  }

  ArcSearch& search_;
  ScanContext ctx_;
  std::uint32_t stamp_;
  const EnumerateOptions& options_;
  Enumeration& out_;
  std::vector<std::size_t>& found_;
  Tolerance tol_;
  Metric metric_;
  QuadrantCuts cuts_;
  SqLineTracker tracker_;
  bool stop_row_ = false;
  double row_y_ = 0.0;
};

}  // namespace

Enumeration enumerate_admissible(ArcSearch& search, std::size_t anchor, const EnumerateOptions& options) {
  Enumeration out;
  const DualContext& duals = search.duals();
  if (!options.pruning) {
    out.sinks = full_scan_admissible(duals, anchor);
    out.counters.candidates_examined = duals.num_sinks();
    for (const std::size_t x : out.sinks) search.partners().note(x, anchor);
  } else {
    const std::uint32_t stamp = search.next_stamp();
    for (const Direction q : kQuadrants) {
      QuadrantScan(search, anchor, q, stamp, options, out, out.sinks).run();
    }
    std::sort(out.sinks.begin(), out.sinks.end());
    if (options.inject_bad_prune && out.sinks.size() >= 2) out.sinks.pop_back();
  }
  out.counters.candidates_skipped = duals.num_sinks() - out.counters.candidates_examined;
  return out;
}

std::vector<std::size_t> full_scan_admissible(const DualContext& duals, std::size_t anchor) {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < duals.num_sinks(); ++x) {
    if (duals.is_admissible(anchor, x)) out.push_back(x);
  }
  return out;
}

}  // namespace planar_ot
