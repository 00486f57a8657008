#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace planar_ot {

/// Thrown when a geometric helper is called outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Ground metric between a source point and a sink point. `sq_euclid` is a
/// cost function but not a metric: rules that rely on the triangle
/// inequality must not be applied to it.
enum class Metric { l1, sq_euclid, euclid };

std::string_view to_string(Metric metric);
std::optional<Metric> parse_metric(std::string_view text);

/// True for metrics that satisfy the triangle inequality.
constexpr bool is_true_metric(Metric metric) { return metric != Metric::sq_euclid; }

/// Integer-valued on integral inputs.
constexpr bool has_integer_costs(Metric metric) { return metric != Metric::euclid; }

enum class Direction { ne, nw, se, sw };

std::string_view to_string(Direction direction);

double distance(Metric metric, Point p, Point q);

/// Exact distance for `l1` and `sq_euclid` on integral coordinates.
/// Throws DomainError for `euclid` or non-integral input.
std::int64_t exact_distance(Metric metric, Point p, Point q);

bool is_integral(Point p);

/// Non-strict dominance relations: a point equal to the anchor satisfies all
/// four, and a point due east of the anchor is both NE and SE of it.
bool is_direction(Direction direction, Point anchor, Point candidate);

/// Maps a quadrant onto the NE frame by negating coordinates. All three
/// metrics are invariant under the map, and the map is its own inverse.
constexpr Point reflect(Direction quadrant, Point p) {
  switch (quadrant) {
    case Direction::ne: return p;
    case Direction::nw: return {-p.x, p.y};
    case Direction::se: return {p.x, -p.y};
    case Direction::sw: return {-p.x, -p.y};
  }
  return p;
}

/// H[focus_a, focus_b, r] = { p : d(p, focus_b) - d(p, focus_a) < r }, an open
/// set. For the Euclidean metric its boundary is one branch of a hyperbola.
struct HyperbolicSet {
  Point focus_a;
  Point focus_b;
  double threshold = 0.0;
};

bool hyperbolic_contains(const HyperbolicSet& h, Metric metric, Point p);

/// The set { p : d(p, (-a,0)) - d(p, (a,0)) > b } expressed in the canonical
/// "<" form, i.e. H[(-a,0), (a,0), -b].
HyperbolicSet centered_hyperbola(double a, double b);

/// { (x,y) : x > apex.x, |y - apex.y| <= slope * (x - apex.x) } plus the apex.
struct Cone {
  Point apex;
  double slope = 0.0;

  bool contains(Point p) const;
};

/// sqrt((4a^2 - b^2) / b^2): the asymptote slope of the centered hyperbola.
/// Requires a > 0 and 0 < b < 2a.
double asymptote_slope_bound(double a, double b);

/// Whether a cone of slope c whose apex lies in the centered hyperbolic set
/// (a, b) stays inside it. For b < 0 the caller must place the apex in the
/// closed right half-plane; for b == 0 in the open right half-plane.
bool cone_inside_hyp(double a, double b, double c);

/// Ordinate of the point where the bisector of p0,p1 meets the vertical line
/// x = p0.x. Requires p1.y > p0.y.
double vertical_cut_y2(Point p0, Point p1);

/// Ordinate where the reflection of the p0->p1 axis about itself, started at
/// p1, meets x = p0.x. Requires p1.y - p0.y > p1.x - p0.x > 0.
double vertical_cut_y3(Point p0, Point p1);

}  // namespace planar_ot
