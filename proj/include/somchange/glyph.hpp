#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "somchange/association.hpp"
#include "somchange/change.hpp"
#include "somchange/som.hpp"

namespace somchange {

// HSV color, hue in degrees [0, 360), saturation and value in [0, 1]. Grays
// are s = 0 with the level in v.
struct Color {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;

  std::array<std::uint8_t, 3> rgb8() const;
  std::string hex() const;

  friend bool operator==(const Color&, const Color&) = default;
};

inline Color hsv(double h, double s, double v) { return {h, s, v}; }
inline Color gray(double level) { return {0.0, 0.0, level}; }

namespace palette {
inline const Color kWhite = gray(1.0);
inline const Color kRed = hsv(0.0, 1.0, 1.0);
inline const Color kBlue = hsv(240.0, 1.0, 1.0);
inline const Color kYellow = hsv(60.0, 1.0, 1.0);
inline const Color kCyan = hsv(180.0, 1.0, 1.0);
inline const Color kInk = gray(0.2);
inline const Color kNeutral = gray(0.45);
}  // namespace palette

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Every element carries a role tag ("frame", "property", "stub", ...) and,
// where it belongs to one branch or one neuron, that index.
struct ScenePolygon {
  std::vector<Point> points;
  std::optional<Color> fill;
  std::optional<Color> stroke;
  double stroke_width = 1.0;
  std::string role;
  int index = -1;
  friend bool operator==(const ScenePolygon&, const ScenePolygon&) = default;
};

struct SceneCircle {
  Point center;
  double radius = 1.0;
  bool filled = false;
  Color color;
  std::string role;
  int index = -1;
  friend bool operator==(const SceneCircle&, const SceneCircle&) = default;
};

struct SceneSegment {
  Point a;
  Point b;
  Color color;
  double width = 1.0;
  std::string role;
  int index = -1;
  friend bool operator==(const SceneSegment&, const SceneSegment&) = default;
};

struct SceneLabel {
  Point at;
  std::string text;
  double size = 10.0;
  std::string role;
  int index = -1;
  friend bool operator==(const SceneLabel&, const SceneLabel&) = default;
};

// Resolution-independent display list. Drawing order is polygons, segments,
// circles, labels; each list keeps its insertion order.
struct GlyphScene {
  std::string kind;
  double width = 0.0;
  double height = 0.0;
  std::vector<ScenePolygon> polygons;
  std::vector<SceneSegment> segments;
  std::vector<SceneCircle> circles;
  std::vector<SceneLabel> labels;

  friend bool operator==(const GlyphScene&, const GlyphScene&) = default;
};

struct WeightColor {
  Color color;
  bool warning = false;  // w_max was zero
};

// Hue runs linearly from 240 (blue, w = 0) to 0 (red, w = w_max).
WeightColor weight_color(double w, double w_max);

struct StarGlyph {
  std::vector<double> angles;  // radians clockwise from vertical, 2*pi*k/m
  std::vector<double> radii;   // in [0, 1]
  std::vector<Point> polygon;  // unit-scale vertices around the origin, y pointing down
};

std::vector<ValueRange> prototype_ranges(const Som& som);

// Unit vector of branch k of m, in screen coordinates.
Point branch_direction(std::size_t k, std::size_t m);

StarGlyph neuron_star(std::span<const double> prototype, std::span<const ValueRange> ranges);

// 0.1 + 0.8 * min(|pemd| / range, 1); a zero range maps to 0.1.
double scale_pemd_for_display(double pemd, double range);

// Saturation of the property fill: |mean_pemd| over the mean feature range.
double property_saturation(const ChangeSummary& summary);

// Geometry constants of the change glyph, in canvas units.
struct ChangeGlyphLayout {
  static constexpr double kCanvas = 260.0;
  static constexpr double kCenter = 130.0;
  static constexpr double kUnit = 100.0;      // branch radius 1
  static constexpr double kStubRadius = 0.1;  // direction stub length
  static constexpr double kDotOffset = 5.0;   // perpendicular offset of value dots
};

Color stub_color(Direction direction, bool significant);
Color property_fill(const ChangeSummary& summary);

GlyphScene change_glyph(const ChangeSummary& summary);

// Hex (or square) cells at the grid positions, each filled by weight_color
// and overlaid with the neuron's star glyph.
GlyphScene pattern_scene(const Som& som, const WeightedPattern& pattern);

std::string render_svg(const GlyphScene& scene);
std::string render_pattern_svg(const Som& som, const WeightedPattern& pattern);
std::string render_change_svg(const GlyphScene& scene);

nlohmann::ordered_json to_json(const GlyphScene& scene);

}  // namespace somchange
