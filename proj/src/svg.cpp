#include "lgplan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace lgplan {

namespace {

constexpr double kCanvas = 600.0;  // px along the longer workspace side
constexpr double kMargin = 20.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Plain lowercase names pass through as SVG colour keywords.
std::string fill_color(const std::string& color) {
  if (color.empty() || color.size() > 20) return "#999999";
  for (char c : color)
    if (c < 'a' || c > 'z') return "#999999";
  return color;
}

struct Frame {
  const Workspace& ws;
  double scale;
  double px(double x) const { return kMargin + (x - ws.x_min()) * scale; }
  double py(double y) const { return kMargin + (ws.y_max() - y) * scale; }
  std::string points(const Polygon& poly) const {
    std::string s;
    for (const Vec2& v : poly) {
      if (!s.empty()) s += ' ';
      s += fmt(px(v.x)) + ',' + fmt(py(v.y));
    }
    return s;
  }
};

}  // namespace

std::string render_svg(const Scene& scene, const SvgLayers& layers) {
  const Workspace& ws = scene.workspace();
  const Frame f{ws, kCanvas / std::max(ws.width(), ws.height())};
  const double w = ws.width() * f.scale + 2 * kMargin;
  const double h = ws.height() * f.scale + 2 * kMargin;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w) + "\" height=\"" +
         fmt(h) + "\" viewBox=\"0 0 " + fmt(w) + ' ' + fmt(h) + "\">\n";
  out += "<defs><marker id=\"head\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" "
         "orient=\"auto\"><path d=\"M0,0 L8,4 L0,8 z\" fill=\"#d62728\"/></marker></defs>\n";
  if (!layers.title.empty()) out += "<title>" + escape(layers.title) + "</title>\n";
  out += "<rect x=\"" + fmt(kMargin) + "\" y=\"" + fmt(kMargin) + "\" width=\"" +
         fmt(ws.width() * f.scale) + "\" height=\"" + fmt(ws.height() * f.scale) +
         "\" fill=\"#f4f1ea\" stroke=\"#333333\"/>\n";

  if (const Grid* g = layers.density) {
    const double peak = g->max();
    const double cw = ws.width() * f.scale / g->nx;
    const double ch = ws.height() * f.scale / g->ny;
    out += "<g shape-rendering=\"crispEdges\">\n";
    for (int iy = 0; iy < g->ny; ++iy)
      for (int ix = 0; ix < g->nx; ++ix) {
        const double v = peak > 0.0 ? g->at(ix, iy) / peak : 0.0;
        const int level = static_cast<int>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
        char color[8];
        std::snprintf(color, sizeof color, "#%02x%02x%02x", level, level, level);
        out += "<rect x=\"" + fmt(kMargin + ix * cw) + "\" y=\"" +
               fmt(kMargin + (g->ny - 1 - iy) * ch) + "\" width=\"" + fmt(cw) + "\" height=\"" +
               fmt(ch) + "\" fill=\"" + color + "\"/>\n";
      }
    out += "</g>\n";
  }

  std::vector<std::size_t> order(scene.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scene.poses()[a].level() < scene.poses()[b].level();
  });
  for (std::size_t i : order) {
    const SceneObject& o = scene.objects()[i];
    const Pose& p = scene.poses()[i];
    out += "<polygon points=\"" + f.points(scene.placed(o.id)) + "\" fill=\"" +
           fill_color(o.color) + "\" fill-opacity=\"0.85\" stroke=\"#222222\"/>\n";
    out += "<text x=\"" + fmt(f.px(p.x())) + "\" y=\"" + fmt(f.py(p.y()) + 4) +
           "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">o" +
           std::to_string(o.id) + "</text>\n";
  }

  for (const auto& [id, pose] : layers.ghosts)
    out += "<polygon points=\"" + f.points(transform_footprint(scene.object(id).footprint, pose)) +
           "\" fill=\"none\" stroke=\"#555555\" stroke-dasharray=\"4 3\"/>\n";

  for (const SvgArrow& a : layers.arrows) {
    out += "<line x1=\"" + fmt(f.px(a.from.x)) + "\" y1=\"" + fmt(f.py(a.from.y)) + "\" x2=\"" +
           fmt(f.px(a.to.x)) + "\" y2=\"" + fmt(f.py(a.to.y)) +
           "\" stroke=\"#d62728\" stroke-width=\"2\" marker-end=\"url(#head)\"/>\n";
    const Vec2 mid = 0.5 * (a.from + a.to);
    out += "<text x=\"" + fmt(f.px(mid.x)) + "\" y=\"" + fmt(f.py(mid.y) - 4) +
           "\" font-size=\"13\" font-weight=\"bold\" fill=\"#d62728\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">" +
           std::to_string(a.number) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::vector<SvgArrow> plan_arrows(const Scene& start, const Plan& plan) {
  std::vector<SvgArrow> out;
  Scene scene = start;
  for (const Action& a : plan.actions) {
    if (!scene.contains(a.object_id) || scene.check_action(a.object_id, a.target)) break;
    out.push_back({scene.pose(a.object_id).position(), a.target.position(),
                   static_cast<int>(out.size()) + 1});
    scene = scene.apply_action(a.object_id, a.target);
  }
  return out;
}

}  // namespace lgplan
