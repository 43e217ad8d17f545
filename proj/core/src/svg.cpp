#include "faceval/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "faceval/error.hpp"

namespace faceval {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

struct View {
  double x = 0.0, y = 0.0, w = 1.0, h = 1.0;
};

View view_for(const LandmarkSet& pred, const std::optional<LandmarkSet>& gt) {
  if (pred.image_size) return {0.0, 0.0, double(pred.image_size->width), double(pred.image_size->height)};
  if (gt && gt->image_size) return {0.0, 0.0, double(gt->image_size->width), double(gt->image_size->height)};

  double lo_x = pred.points.front().x, hi_x = lo_x, lo_y = pred.points.front().y, hi_y = lo_y;
  auto extend = [&](const LandmarkSet& s) {
    for (const auto& p : s.points) {
      lo_x = std::min(lo_x, p.x);
      hi_x = std::max(hi_x, p.x);
      lo_y = std::min(lo_y, p.y);
      hi_y = std::max(hi_y, p.y);
    }
  };
  extend(pred);
  if (gt) extend(*gt);
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1.0});
  const double margin = 0.05 * span;
  return {lo_x - margin, lo_y - margin, span + 2 * margin, span + 2 * margin};
}

void emit_layer(std::string& out, const std::string& id, const LandmarkSet& set, const IndexList& indices,
                double radius) {
  out += "    <g id=\"" + escape(id) + "\">\n";
  for (std::size_t idx : indices) {
    const auto& p = set.points[idx];
    out += "      <circle cx=\"" + num(p.x) + "\" cy=\"" + num(p.y) + "\" r=\"" + num(radius) +
           "\" data-index=\"" + std::to_string(idx) + "\"/>\n";
  }
  out += "    </g>\n";
}

void emit_set(std::string& out, const std::string& cls, const LandmarkSet& set, double radius) {
  out += "  <g id=\"" + cls + "\" class=\"" + cls + "\">\n";
  std::set<std::size_t> covered;
  for (const auto& [name, indices] : set.groups) {
    emit_layer(out, cls + "-" + name, set, indices, radius);
    covered.insert(indices.begin(), indices.end());
  }
  IndexList rest;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (!covered.count(i)) rest.push_back(i);
  }
  if (!rest.empty()) emit_layer(out, cls + (set.groups.empty() ? "-all" : "-ungrouped"), set, rest, radius);
  out += "  </g>\n";
}

}  // namespace

std::string render_landmarks_svg(const LandmarkSet& pred, const std::optional<LandmarkSet>& gt, int size) {
  if (size < 1) throw Error(ErrorCode::NonPositiveParam, "render size must be positive");
  validate(pred);
  if (gt) validate(*gt);

  const View v = view_for(pred, gt);
  const double px_per_unit = size / std::max(v.w, v.h);
  const double radius = 2.0 / px_per_unit;
  const double stroke = 1.0 / px_per_unit;
  const int width = std::max(1, static_cast<int>(std::lround(v.w * px_per_unit)));
  const int height = std::max(1, static_cast<int>(std::lround(v.h * px_per_unit)));

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"" + num(v.x) + " " + num(v.y) + " " + num(v.w) +
         " " + num(v.h) + "\">\n";
  out += "  <style>.pred circle{fill:none;stroke:#d62728;stroke-width:" + num(stroke) +
         "}.gt circle{fill:none;stroke:#2ca02c;stroke-width:" + num(stroke) + "}</style>\n";
  if (gt) emit_set(out, "gt", *gt, radius);
  emit_set(out, "pred", pred, radius);
  out += "</svg>\n";
  return out;
}

}  // namespace faceval
