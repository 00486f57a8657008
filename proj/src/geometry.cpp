#include "planar_ot/geometry.hpp"

#include <cmath>

namespace planar_ot {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::l1: return "l1";
    case Metric::sq_euclid: return "sqeuclid";
    case Metric::euclid: return "euclid";
  }
  return "unknown";
}

std::optional<Metric> parse_metric(std::string_view text) {
  if (text == "l1") return Metric::l1;
  if (text == "sqeuclid") return Metric::sq_euclid;
  if (text == "euclid") return Metric::euclid;
  return std::nullopt;
}

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::ne: return "NE";
    case Direction::nw: return "NW";
    case Direction::se: return "SE";
    case Direction::sw: return "SW";
  }
  return "?";
}

double distance(Metric metric, Point p, Point q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  switch (metric) {
    case Metric::l1: return std::abs(dx) + std::abs(dy);
    case Metric::sq_euclid: return dx * dx + dy * dy;
    case Metric::euclid: return std::hypot(dx, dy);
  }
  return 0.0;
}

bool is_integral(Point p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::trunc(p.x) == p.x &&
         std::trunc(p.y) == p.y;
}

std::int64_t exact_distance(Metric metric, Point p, Point q) {
  if (metric == Metric::euclid) throw DomainError("exact_distance: euclid costs are irrational");
  if (!is_integral(p) || !is_integral(q)) throw DomainError("exact_distance: non-integral coordinates");
  const std::int64_t dx = static_cast<std::int64_t>(p.x) - static_cast<std::int64_t>(q.x);
  const std::int64_t dy = static_cast<std::int64_t>(p.y) - static_cast<std::int64_t>(q.y);
  if (metric == Metric::l1) return (dx < 0 ? -dx : dx) + (dy < 0 ? -dy : dy);
  return dx * dx + dy * dy;
}

bool is_direction(Direction direction, Point anchor, Point candidate) {
  switch (direction) {
    case Direction::ne: return anchor.x <= candidate.x && anchor.y <= candidate.y;
    case Direction::nw: return anchor.x >= candidate.x && anchor.y <= candidate.y;
    case Direction::se: return anchor.x <= candidate.x && anchor.y >= candidate.y;
    case Direction::sw: return anchor.x >= candidate.x && anchor.y >= candidate.y;
  }
  return false;
}

bool hyperbolic_contains(const HyperbolicSet& h, Metric metric, Point p) {
  return distance(metric, p, h.focus_b) - distance(metric, p, h.focus_a) < h.threshold;
}

HyperbolicSet centered_hyperbola(double a, double b) {
  return HyperbolicSet{.focus_a = {-a, 0.0}, .focus_b = {a, 0.0}, .threshold = -b};
}

bool Cone::contains(Point p) const {
  if (p == apex) return true;
  if (!(p.x > apex.x)) return false;
  return std::abs(p.y - apex.y) <= slope * (p.x - apex.x);
}

double asymptote_slope_bound(double a, double b) {
  if (!(a > 0.0)) throw DomainError("asymptote_slope_bound: a must be positive");
  if (!(b > 0.0) || !(b < 2.0 * a)) throw DomainError("asymptote_slope_bound: requires 0 < b < 2a");
  return std::sqrt((4.0 * a * a - b * b) / (b * b));
}

bool cone_inside_hyp(double a, double b, double c) {
  if (!(a > 0.0)) throw DomainError("cone_inside_hyp: a must be positive");
  if (!(b < 2.0 * a)) throw DomainError("cone_inside_hyp: requires b < 2a");
  if (!(c > 0.0)) throw DomainError("cone_inside_hyp: c must be positive");
  if (b <= 0.0) return true;
  return c <= asymptote_slope_bound(a, b);
}

double vertical_cut_y2(Point p0, Point p1) {
  const double dj = p1.y - p0.y;
  if (!(dj > 0.0)) throw DomainError("vertical_cut_y2: requires j1 > j0");
  const double di = p1.x - p0.x;
  return (p0.y + p1.y) / 2.0 + di * di / (2.0 * dj);
}

double vertical_cut_y3(Point p0, Point p1) {
  const double di = p1.x - p0.x;
  const double dj = p1.y - p0.y;
  if (!(di > 0.0) || !(dj > di)) throw DomainError("vertical_cut_y3: requires j1 - j0 > i1 - i0 > 0");
  return p1.y + 2.0 * di * di * dj / (dj * dj - di * di);
}

}  // namespace planar_ot
