#include "somchange/glyph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "somchange/error.hpp"

namespace somchange {

namespace {

using Layout = ChangeGlyphLayout;

std::uint8_t quantize(double c) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

Point add(Point p, Point d, double scale) { return {p.x + d.x * scale, p.y + d.y * scale}; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string role_attr(const std::string& role, int index) {
  std::string s = " data-role=\"" + escape_xml(role) + "\"";
  if (index >= 0) s += " data-index=\"" + std::to_string(index) + "\"";
  return s;
}

double branch_radius_of(double t_value, const ValueRange& display) {
  const double span = display.max - display.min;
  if (!(span > 0.0)) return 0.5;
  return std::clamp((t_value - display.min) / span, 0.0, 1.0);
}

Color value_change_color(double ref, double chg) {
  switch (direction_of(chg - ref)) {
    case Direction::Increase: return palette::kRed;
    case Direction::Decrease: return palette::kBlue;
    case Direction::None: break;
  }
  return palette::kNeutral;
}

nlohmann::ordered_json color_json(const Color& c) {
  return {{"h", c.h}, {"s", c.s}, {"v", c.v}, {"hex", c.hex()}};
}

nlohmann::ordered_json point_json(const Point& p) { return {p.x, p.y}; }

}  // namespace

std::array<std::uint8_t, 3> Color::rgb8() const {
  const double hh = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0) / 60.0;
  const double c = v * s;
  const double x = c * (1.0 - std::abs(std::fmod(hh, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hh)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  return {quantize(r + m), quantize(g + m), quantize(b + m)};
}

std::string Color::hex() const {
  const auto rgb = rgb8();
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

WeightColor weight_color(double w, double w_max) {
  if (!(w_max > 0.0)) return {hsv(240.0, 0.5, 1.0), true};
  const double t = std::clamp(w / w_max, 0.0, 1.0);
  return {hsv(240.0 * (1.0 - t), 1.0, 1.0), false};
}

std::vector<ValueRange> prototype_ranges(const Som& som) {
  std::vector<ValueRange> out(som.feature_count());
  for (std::size_t k = 0; k < som.feature_count(); ++k) {
    out[k] = {som.prototypes(0, k), som.prototypes(0, k)};
    for (std::size_t i = 1; i < som.neuron_count(); ++i) {
      out[k].min = std::min(out[k].min, som.prototypes(i, k));
      out[k].max = std::max(out[k].max, som.prototypes(i, k));
    }
  }
  return out;
}

Point branch_direction(std::size_t k, std::size_t m) {
  const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
  return {std::sin(a), -std::cos(a)};
}

StarGlyph neuron_star(std::span<const double> prototype, std::span<const ValueRange> ranges) {
  if (prototype.size() != ranges.size()) fail(ErrorKind::DimensionMismatch, "prototype and ranges differ in length");
  StarGlyph g;
  const std::size_t m = prototype.size();
  for (std::size_t k = 0; k < m; ++k) {
    const double span = ranges[k].max - ranges[k].min;
    const double r = span > 0.0 ? std::clamp((prototype[k] - ranges[k].min) / span, 0.0, 1.0) : 0.5;
    g.angles.push_back(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
    g.radii.push_back(r);
    g.polygon.push_back(add({0.0, 0.0}, branch_direction(k, m), r));
  }
  return g;
}

double scale_pemd_for_display(double pemd, double range) {
  if (!(range > 0.0)) return 0.1;
  return 0.1 + 0.8 * std::min(std::abs(pemd) / range, 1.0);
}

double property_saturation(const ChangeSummary& summary) {
  if (!(summary.mean_feature_range > 0.0)) return 0.0;
  return std::min(std::abs(summary.mean_pemd) / summary.mean_feature_range, 1.0);
}

Color stub_color(Direction direction, bool significant) {
  if (direction == Direction::Increase) return significant ? palette::kRed : palette::kYellow;
  if (direction == Direction::Decrease) return significant ? palette::kBlue : palette::kCyan;
  return palette::kWhite;
}

Color property_fill(const ChangeSummary& summary) {
  const double s = property_saturation(summary);
  switch (summary.overall_direction) {
    case Direction::Increase: return hsv(0.0, s, 1.0);
    case Direction::Decrease: return hsv(240.0, s, 1.0);
    case Direction::None: break;
  }
  return palette::kWhite;
}

GlyphScene change_glyph(const ChangeSummary& summary) {
  GlyphScene scene;
  scene.kind = "change";
  scene.width = Layout::kCanvas;
  scene.height = Layout::kCanvas;
  const std::size_t m = summary.details.size();
  if (m == 0) return scene;
  const Point center{Layout::kCenter, Layout::kCenter};

  ScenePolygon frame;
  frame.role = "frame";
  frame.fill = gray(1.0 - std::clamp(summary.scaled_emd, 0.0, 1.0));
  frame.stroke = palette::kInk;
  for (std::size_t k = 0; k < m; ++k) frame.points.push_back(add(center, branch_direction(k, m), Layout::kUnit));
  scene.polygons.push_back(std::move(frame));

  ScenePolygon property;
  property.role = "property";
  property.fill = property_fill(summary);
  property.stroke = palette::kInk;
  for (std::size_t k = 0; k < m; ++k) {
    const double r = std::clamp(summary.details[k].scaled_pemd, 0.1, 0.9);
    property.points.push_back(add(center, branch_direction(k, m), r * Layout::kUnit));
  }
  scene.polygons.push_back(std::move(property));

  for (std::size_t k = 0; k < m; ++k) {
    const auto& f = summary.details[k];
    const Point dir = branch_direction(k, m);
    const Point perp{-dir.y, dir.x};
    const int idx = static_cast<int>(k);

    scene.segments.push_back({center, add(center, dir, Layout::kUnit), palette::kNeutral, 0.5, "axis", idx});
    if (f.direction != Direction::None) {
      scene.segments.push_back({center, add(center, dir, Layout::kStubRadius * Layout::kUnit),
                                stub_color(f.direction, f.significant), 3.0, "stub", idx});
    }

    const Color dot_color = value_change_color(f.ref_value, f.chg_value);
    const auto place = [&](double t_value, double side) {
      const Point on_branch = add(center, dir, branch_radius_of(t_value, f.display_range) * Layout::kUnit);
      return add(on_branch, perp, side * Layout::kDotOffset);
    };
    scene.segments.push_back({place(f.ref_range.min, -1.0), place(f.ref_range.max, -1.0), dot_color, 1.0,
                              "whisker-ref", idx});
    scene.segments.push_back({place(f.chg_range.min, 1.0), place(f.chg_range.max, 1.0), dot_color, 1.0,
                              "whisker-chg", idx});
    scene.circles.push_back({place(f.ref_value, -1.0), 3.0, false, dot_color, "dot-ref", idx});
    scene.circles.push_back({place(f.chg_value, 1.0), 3.0, true, dot_color, "dot-chg", idx});
    scene.labels.push_back({add(center, dir, 1.15 * Layout::kUnit), f.name, 10.0, "feature", idx});
  }
  return scene;
}

GlyphScene pattern_scene(const Som& som, const WeightedPattern& pattern) {
  som.validate();
  if (pattern.size() != som.neuron_count()) fail(ErrorKind::DimensionMismatch, "pattern does not belong to this map");
  constexpr double spacing = 40.0;
  constexpr double margin = 30.0;
  const bool hex = som.grid.topology() == Topology::Hexagonal;
  const double cell_radius = hex ? spacing / std::sqrt(3.0) : spacing / 2.0;

  double max_x = 0.0, max_y = 0.0;
  for (const auto& p : som.grid.positions()) {
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  GlyphScene scene;
  scene.kind = "pattern";
  scene.width = 2.0 * margin + max_x * spacing;
  scene.height = 2.0 * margin + max_y * spacing;

  const double w_max = *std::max_element(pattern.weights.begin(), pattern.weights.end());
  const auto ranges = prototype_ranges(som);
  const std::size_t m = som.feature_count();
  const double star_scale = 0.85 * spacing / 2.0;

  for (std::size_t i = 0; i < som.neuron_count(); ++i) {
    const auto& lp = som.grid.position(i);
    const Point c{margin + lp.x * spacing, margin + lp.y * spacing};
    ScenePolygon cell;
    cell.role = "cell";
    cell.index = static_cast<int>(i);
    cell.fill = weight_color(pattern.weights[i], w_max).color;
    cell.stroke = gray(1.0);
    for (int v = 0; v < (hex ? 6 : 4); ++v) {
      const double a = hex ? std::numbers::pi / 6.0 + v * std::numbers::pi / 3.0
                           : std::numbers::pi / 4.0 + v * std::numbers::pi / 2.0;
      const double r = hex ? cell_radius : cell_radius * std::sqrt(2.0);
      cell.points.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    scene.polygons.push_back(std::move(cell));
  }
  for (std::size_t i = 0; i < som.neuron_count(); ++i) {
    const auto& lp = som.grid.position(i);
    const Point c{margin + lp.x * spacing, margin + lp.y * spacing};
    const auto star = neuron_star(som.prototypes.row(i), ranges);
    ScenePolygon poly;
    poly.role = "star";
    poly.index = static_cast<int>(i);
    poly.stroke = palette::kInk;
    for (const auto& v : star.polygon) poly.points.push_back(add(c, v, star_scale));
    scene.polygons.push_back(std::move(poly));
    for (std::size_t k = 0; k < m; ++k) {
      scene.segments.push_back({c, add(c, branch_direction(k, m), star.radii[k] * star_scale), palette::kInk, 0.5,
                                "star-branch", static_cast<int>(i)});
    }
  }
  return scene;
}

std::string render_svg(const GlyphScene& scene) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(scene.width) +
         "\" height=\"" + num(scene.height) + "\" viewBox=\"0 0 " + num(scene.width) + " " +
         num(scene.height) + "\" data-kind=\"" + escape_xml(scene.kind) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(scene.width) + "\" height=\"" + num(scene.height) +
         "\" fill=\"#ffffff\"/>\n";
  for (const auto& p : scene.polygons) {
    out += "<polygon points=\"";
    for (std::size_t i = 0; i < p.points.size(); ++i) {
      if (i) out += ' ';
      out += num(p.points[i].x) + "," + num(p.points[i].y);
    }
    out += "\" fill=\"" + (p.fill ? p.fill->hex() : std::string("none")) + "\"";
    out += " stroke=\"" + (p.stroke ? p.stroke->hex() : std::string("none")) + "\"";
    out += " stroke-width=\"" + num(p.stroke_width) + "\"" + role_attr(p.role, p.index) + "/>\n";
  }
  for (const auto& s : scene.segments) {
    out += "<line x1=\"" + num(s.a.x) + "\" y1=\"" + num(s.a.y) + "\" x2=\"" + num(s.b.x) + "\" y2=\"" +
           num(s.b.y) + "\" stroke=\"" + s.color.hex() + "\" stroke-width=\"" + num(s.width) +
           "\" stroke-linecap=\"round\"" + role_attr(s.role, s.index) + "/>\n";
  }
  for (const auto& c : scene.circles) {
    out += "<circle cx=\"" + num(c.center.x) + "\" cy=\"" + num(c.center.y) + "\" r=\"" + num(c.radius) +
           "\" fill=\"" + (c.filled ? c.color.hex() : std::string("#ffffff")) + "\" stroke=\"" + c.color.hex() +
           "\" stroke-width=\"1.000\"" + role_attr(c.role, c.index) + "/>\n";
  }
  for (const auto& l : scene.labels) {
    out += "<text x=\"" + num(l.at.x) + "\" y=\"" + num(l.at.y) + "\" font-size=\"" + num(l.size) +
           "\" font-family=\"sans-serif\" text-anchor=\"middle\" dominant-baseline=\"middle\"" +
           role_attr(l.role, l.index) + ">" + escape_xml(l.text) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string render_pattern_svg(const Som& som, const WeightedPattern& pattern) {
  return render_svg(pattern_scene(som, pattern));
}

std::string render_change_svg(const GlyphScene& scene) { return render_svg(scene); }

nlohmann::ordered_json to_json(const GlyphScene& scene) {
  nlohmann::ordered_json j;
  j["schema"] = "somchange.glyph_scene/1";
  j["kind"] = scene.kind;
  j["width"] = scene.width;
  j["height"] = scene.height;
  auto& polys = j["polygons"] = nlohmann::ordered_json::array();
  for (const auto& p : scene.polygons) {
    nlohmann::ordered_json pj;
    pj["role"] = p.role;
    pj["index"] = p.index;
    auto& pts = pj["points"] = nlohmann::ordered_json::array();
    for (const auto& pt : p.points) pts.push_back(point_json(pt));
    pj["fill"] = p.fill ? color_json(*p.fill) : nlohmann::ordered_json(nullptr);
    pj["stroke"] = p.stroke ? color_json(*p.stroke) : nlohmann::ordered_json(nullptr);
    pj["stroke_width"] = p.stroke_width;
    polys.push_back(std::move(pj));
  }
  auto& segs = j["segments"] = nlohmann::ordered_json::array();
  for (const auto& s : scene.segments) {
    segs.push_back({{"role", s.role}, {"index", s.index}, {"a", point_json(s.a)}, {"b", point_json(s.b)},
                    {"color", color_json(s.color)}, {"width", s.width}});
  }
  auto& circles = j["circles"] = nlohmann::ordered_json::array();
  for (const auto& c : scene.circles) {
    circles.push_back({{"role", c.role}, {"index", c.index}, {"center", point_json(c.center)},
                       {"radius", c.radius}, {"filled", c.filled}, {"color", color_json(c.color)}});
  }
  auto& labels = j["labels"] = nlohmann::ordered_json::array();
  for (const auto& l : scene.labels) {
    labels.push_back({{"role", l.role}, {"index", l.index}, {"at", point_json(l.at)}, {"text", l.text},
                      {"size", l.size}});
  }
  return j;
}

}  // namespace somchange
