#include "planar_ot/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace planar_ot {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::optional<double> to_double(std::string_view token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool z_order_less(const MassPoint& a, const MassPoint& b) {
  const double za = a.position.x + a.position.y;
  const double zb = b.position.x + b.position.y;
  if (za != zb) return za < zb;
  return a.position.x < b.position.x;
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line)
    : std::runtime_error(line == 0 ? message : message + " at line " + std::to_string(line)),
      line_(line) {}

Measure::Measure(std::vector<MassPoint> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    support_index_.try_emplace({points_[i].position.x, points_[i].position.y}, i);
  }
}

Measure Measure::canonical(std::vector<MassPoint> points) {
  std::map<std::pair<double, double>, double> merged;
  for (const auto& p : points) merged[{p.position.x, p.position.y}] += p.mass;
  std::vector<MassPoint> out;
  out.reserve(merged.size());
  for (const auto& [pos, mass] : merged) out.push_back({{pos.first, pos.second}, mass});
  std::sort(out.begin(), out.end(), z_order_less);
  return Measure(std::move(out));
}

std::vector<Point> Measure::positions() const {
  std::vector<Point> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.position);
  return out;
}

std::vector<double> Measure::masses() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.mass);
  return out;
}

double Measure::total_mass() const {
  double total = 0.0;
  for (const auto& p : points_) total += p.mass;
  return total;
}

bool Measure::integral_masses() const {
  return std::all_of(points_.begin(), points_.end(),
                     [](const MassPoint& p) { return std::trunc(p.mass) == p.mass; });
}

bool Measure::integral_positions() const {
  return std::all_of(points_.begin(), points_.end(),
                     [](const MassPoint& p) { return is_integral(p.position); });
}

std::optional<std::size_t> Measure::find(Point position) const {
  const auto it = support_index_.find({position.x, position.y});
  if (it == support_index_.end()) return std::nullopt;
  return it->second;
}

Measure parse_points(std::string_view text) {
  std::vector<MassPoint> points;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = split_ws(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (tokens.size() != 3) throw ParseError("expected 'x y mass'", line_no);
    const auto x = to_double(tokens[0]);
    const auto y = to_double(tokens[1]);
    const auto mass = to_double(tokens[2]);
    if (!x || !y || !mass) throw ParseError("malformed number", line_no);
    if (!std::isfinite(*x) || !std::isfinite(*y) || !std::isfinite(*mass)) {
      throw ParseError("non-finite value", line_no);
    }
    if (*mass <= 0.0) throw ParseError("nonpositive mass", line_no);
    points.push_back({{*x, *y}, *mass});
    if (end == text.size()) break;
  }
  if (points.empty()) throw ParseError("empty measure");
  return Measure::canonical(std::move(points));
}

Measure load_points(const std::filesystem::path& path) { return parse_points(read_file(path)); }

std::string format_number(double value) {
  if (std::trunc(value) == value && std::abs(value) < 9.007199254740992e15) {
    return std::to_string(static_cast<long long>(value));
  }
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string serialize_points(const Measure& measure) {
  std::string out;
  for (const auto& p : measure.points()) {
    out += format_number(p.position.x);
    out += ' ';
    out += format_number(p.position.y);
    out += ' ';
    out += format_number(p.mass);
    out += '\n';
  }
  return out;
}

Measure parse_pgm(std::string_view text) {
  // Tokens may be separated by any whitespace; '#' comments run to end of line.
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    for (auto t : split_ws(line)) tokens.push_back(t);
    pos = end + 1;
  }
  if (tokens.empty() || tokens[0] != "P2") {
    throw ParseError("unsupported PGM magic number (only ASCII P2 is supported)");
  }
  if (tokens.size() < 4) throw ParseError("malformed PGM header");
  const auto width = to_double(tokens[1]);
  const auto height = to_double(tokens[2]);
  const auto maxval = to_double(tokens[3]);
  auto positive_int = [](const std::optional<double>& v) {
    return v && *v >= 1.0 && std::trunc(*v) == *v;
  };
  if (!positive_int(width) || !positive_int(height) || !positive_int(maxval)) {
    throw ParseError("malformed PGM header");
  }
  const auto w = static_cast<std::size_t>(*width);
  const auto h = static_cast<std::size_t>(*height);
  if (tokens.size() - 4 != w * h) throw ParseError("PGM pixel count does not match header");

  std::vector<MassPoint> points;
  for (std::size_t row = 0; row < h; ++row) {
    for (std::size_t col = 0; col < w; ++col) {
      const auto g = to_double(tokens[4 + row * w + col]);
      if (!g || *g < 0.0 || *g > *maxval || std::trunc(*g) != *g) {
        throw ParseError("invalid PGM grey value");
      }
      if (*g > 0.0) {
        points.push_back({{static_cast<double>(col), static_cast<double>(h - 1 - row)}, *g});
      }
    }
  }
  return Measure::canonical(std::move(points));
}

Measure load_pgm(const std::filesystem::path& path) { return parse_pgm(read_file(path)); }

Measure load_measure(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" ? load_pgm(path) : load_points(path);
}

bool ValidationReport::has(Violation::Kind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

ValidationReport validate(const ProblemInstance& instance) {
  ValidationReport report;
  auto check_measure = [&](const Measure& m, std::string_view name) {
    if (m.empty()) {
      report.violations.push_back({Violation::Kind::empty_measure, std::string(name) + " measure is empty"});
      return;
    }
    std::map<std::pair<double, double>, int> seen;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto& p = m[i];
      if (!std::isfinite(p.position.x) || !std::isfinite(p.position.y) || !std::isfinite(p.mass)) {
        report.violations.push_back(
            {Violation::Kind::non_finite, std::string(name) + " point " + std::to_string(i) + " is not finite"});
      }
      if (!(p.mass > 0.0)) {
        report.violations.push_back({Violation::Kind::nonpositive_mass,
                                     std::string(name) + " point " + std::to_string(i) + " has nonpositive mass"});
      }
      if (++seen[{p.position.x, p.position.y}] == 2) {
        report.violations.push_back({Violation::Kind::duplicate_support,
                                     std::string(name) + " support repeats (" + format_number(p.position.x) + ", " +
                                         format_number(p.position.y) + ")"});
      }
    }
  };
  check_measure(instance.source, "source");
  check_measure(instance.sink, "sink");
  if (!instance.source.empty() && !instance.sink.empty()) {
    const double p = instance.source.total_mass();
    const double q = instance.sink.total_mass();
    const bool exact = instance.source.integral_masses() && instance.sink.integral_masses();
    const bool balanced = exact ? p == q : std::abs(p - q) <= kBalanceRelTol * std::max(std::abs(p), std::abs(q));
    if (!balanced) {
      report.violations.push_back(
          {Violation::Kind::unbalanced, "unbalanced: " + format_number(p) + " ≠ " + format_number(q)});
    }
  }
  return report;
}

}  // namespace planar_ot
