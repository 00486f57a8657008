#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "planar_ot/geometry.hpp"

namespace planar_ot {

/// Malformed input file. `line()` is 1-based, or 0 when no line applies.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line = 0);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct MassPoint {
  Point position;
  double mass = 0.0;

  friend bool operator==(const MassPoint&, const MassPoint&) = default;
};

/// A discrete measure (an image) on the plane. The constructor keeps points in
/// the order given; `canonical` merges duplicate positions by summing mass and
/// sorts by z = x + y, then x.
class Measure {
 public:
  Measure() = default;
  explicit Measure(std::vector<MassPoint> points);

  static Measure canonical(std::vector<MassPoint> points);

  std::span<const MassPoint> points() const { return points_; }
  const MassPoint& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  std::vector<Point> positions() const;
  std::vector<double> masses() const;

  double total_mass() const;
  bool integral_masses() const;
  bool integral_positions() const;

  /// Ordinal of the first point at `position`.
  std::optional<std::size_t> find(Point position) const;

  friend bool operator==(const Measure& a, const Measure& b) { return a.points_ == b.points_; }

 private:
  std::vector<MassPoint> points_;
  std::map<std::pair<double, double>, std::size_t> support_index_;
};

struct ProblemInstance {
  Measure source;
  Measure sink;
  Metric metric = Metric::sq_euclid;
};

/// Parses the .pts format: one "x y mass" triple per line, '#' starts a comment.
Measure parse_points(std::string_view text);
Measure load_points(const std::filesystem::path& path);

/// Writes the .pts format, one line per point in measure order.
std::string serialize_points(const Measure& measure);

/// Parses an ASCII ("P2") PGM image. Pixel (col, row) with grey value g > 0
/// becomes a point at (col, height - 1 - row) with mass g.
Measure parse_pgm(std::string_view text);
Measure load_pgm(const std::filesystem::path& path);

/// Chooses the parser from the file extension (".pgm" or anything else).
Measure load_measure(const std::filesystem::path& path);

struct Violation {
  enum class Kind { empty_measure, nonpositive_mass, non_finite, duplicate_support, unbalanced };
  Kind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind kind) const;
};

/// Relative tolerance on the mass balance for non-integral masses.
inline constexpr double kBalanceRelTol = 1e-12;

ValidationReport validate(const ProblemInstance& instance);

/// Formats a mass or coordinate: integers without a fractional part,
/// otherwise the shortest round-tripping decimal.
std::string format_number(double value);

}  // namespace planar_ot
