#include "skf/render.hpp"

#include "skf/csv.hpp"
#include "skf/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace skf {

namespace {

using nlohmann::json;

constexpr const char* kMissingColor = "#000000";
constexpr const char* kHitColor = "#FF8C00";     // predicted and actual
constexpr const char* kMissedColor = "#000000";  // actual but not predicted
constexpr const char* kPredictionColor = "#67000D";
constexpr const char* kUnpaintedColor = "#FFFFFF";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Fixed inset placement for the two detached states. Alaska is shrunk to 35%
// about (-150, 64) and moved below the southwest; Hawaii slides northeast to
// sit beside it. Longitudes west of the date line are unwrapped first so the
// Aleutians stay attached.
void inset_point(const std::string& fips, double& lon, double& lat) {
  if (fips.rfind("02", 0) == 0) {
    if (lon > 0.0) lon -= 360.0;
    lon = (lon + 150.0) * 0.35 - 112.0;
    lat = (lat - 64.0) * 0.35 + 27.0;
  } else if (fips.rfind("15", 0) == 0) {
    lon += 50.0;
    lat += 6.0;
  }
}

struct PaintedCounty {
  std::string fips;
  std::string color;
  json properties;
};

struct LegendEntry {
  std::string color;
  std::string label;
};

struct Frame {
  double min_lon = 0, max_lat = 0, scale = 1;
  double x0 = 0, y0 = 0;
  double x(double lon) const { return (lon - min_lon) * scale + x0; }
  double y(double lat) const { return (max_lat - lat) * scale + y0; }
};

void write_geojson(const std::vector<PaintedCounty>& painted, const GeometryTable& geometry,
                   const std::filesystem::path& file) {
  json features = json::array();
  for (const auto& p : painted) {
    const CountyGeometry* county = geometry.find(p.fips);
    json geom;
    if (county->polygons.size() == 1) {
      geom["type"] = "Polygon";
      json rings = json::array();
      for (const auto& ring : county->polygons.front()) {
        json pts = json::array();
        for (const auto& pos : ring) pts.push_back(json::array({pos[0], pos[1]}));
        rings.push_back(std::move(pts));
      }
      geom["coordinates"] = std::move(rings);
    } else {
      geom["type"] = "MultiPolygon";
      json polys = json::array();
      for (const auto& poly : county->polygons) {
        json rings = json::array();
        for (const auto& ring : poly) {
          json pts = json::array();
          for (const auto& pos : ring) pts.push_back(json::array({pos[0], pos[1]}));
          rings.push_back(std::move(pts));
        }
        polys.push_back(std::move(rings));
      }
      geom["coordinates"] = std::move(polys);
    }
    json feature;
    feature["type"] = "Feature";
    feature["properties"] = p.properties;
    feature["geometry"] = std::move(geom);
    features.push_back(std::move(feature));
  }
  json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = std::move(features);
  csv::write_lines(file, {doc.dump()});
}

void write_map_svg(const std::vector<PaintedCounty>& painted, const GeometryTable& geometry,
                   const std::string& title, const std::vector<LegendEntry>& legend,
                   bool gradient_legend, const std::filesystem::path& file,
                   const RenderOptions& opts) {
  const double title_h = 26.0;
  const double legend_h = legend.empty() ? 8.0 : 44.0;
  const double pad = 8.0;

  double min_lon = 1e300, max_lon = -1e300, min_lat = 1e300, max_lat = -1e300;
  for (const auto& p : painted) {
    const CountyGeometry* county = geometry.find(p.fips);
    for (const auto& poly : county->polygons)
      for (const auto& ring : poly)
        for (const auto& pos : ring) {
          double lon = pos[0], lat = pos[1];
          if (opts.inset_alaska_hawaii) inset_point(p.fips, lon, lat);
          min_lon = std::min(min_lon, lon);
          max_lon = std::max(max_lon, lon);
          min_lat = std::min(min_lat, lat);
          max_lat = std::max(max_lat, lat);
        }
  }
  double lon_span = max_lon - min_lon;
  double lat_span = max_lat - min_lat;
  if (lon_span <= 0) lon_span = 1.0;
  if (lat_span <= 0) lat_span = 1.0;

  Frame frame;
  frame.min_lon = min_lon;
  frame.max_lat = max_lat;
  frame.scale = (opts.svg_width - 2 * pad) / lon_span;
  frame.x0 = pad;
  frame.y0 = pad + title_h;
  const double map_h = lat_span * frame.scale;
  const double width = opts.svg_width;
  const double height = title_h + map_h + legend_h + 2 * pad;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << fmt_px(height) << "\" viewBox=\"0 0 " << width << ' ' << fmt_px(height) << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << fmt_px(height)
      << "\" fill=\"#FFFFFF\"/>\n";
  svg << "<text x=\"" << fmt_px(width / 2) << "\" y=\"18\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  svg << "<g stroke=\"#555555\" stroke-width=\"0.3\" stroke-linejoin=\"round\">\n";
  for (const auto& p : painted) {
    const CountyGeometry* county = geometry.find(p.fips);
    std::ostringstream d;
    for (const auto& poly : county->polygons)
      for (const auto& ring : poly) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
          double lon = ring[i][0], lat = ring[i][1];
          if (opts.inset_alaska_hawaii) inset_point(p.fips, lon, lat);
          d << (i == 0 ? 'M' : 'L') << fmt_px(frame.x(lon)) << ',' << fmt_px(frame.y(lat));
        }
        d << 'Z';
      }
    svg << "<path d=\"" << d.str() << "\" fill=\"" << p.color << "\"><title>" << p.fips
        << "</title></path>\n";
  }
  svg << "</g>\n";

  if (!legend.empty()) {
    const double ly = title_h + map_h + pad + 10.0;
    if (gradient_legend) {
      const double sw = std::min(20.0, (width - 2 * pad - 70.0) / legend.size());
      const double lx = (width - sw * legend.size()) / 2;
      for (std::size_t i = 0; i < legend.size(); ++i)
        svg << "<rect x=\"" << fmt_px(lx + sw * i) << "\" y=\"" << fmt_px(ly) << "\" width=\""
            << fmt_px(sw) << "\" height=\"12\" fill=\"" << legend[i].color
            << "\" stroke=\"#555555\" stroke-width=\"0.3\"/>\n";
      svg << "<text x=\"" << fmt_px(lx - 6) << "\" y=\"" << fmt_px(ly + 10)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
          << legend.front().label << "</text>\n";
      svg << "<text x=\"" << fmt_px(lx + sw * legend.size() + 6) << "\" y=\"" << fmt_px(ly + 10)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << legend.back().label
          << "</text>\n";
    } else {
      double lx = pad + 10.0;
      for (const auto& entry : legend) {
        svg << "<rect x=\"" << fmt_px(lx) << "\" y=\"" << fmt_px(ly)
            << "\" width=\"14\" height=\"12\" fill=\"" << entry.color
            << "\" stroke=\"#555555\" stroke-width=\"0.3\"/>\n";
        svg << "<text x=\"" << fmt_px(lx + 18) << "\" y=\"" << fmt_px(ly + 10)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << entry.label << "</text>\n";
        lx += 24.0 + 7.0 * entry.label.size() + 14.0;
      }
    }
  }
  svg << "</svg>\n";
  csv::write_lines(file, {svg.str()});
}

void check_inputs(const YearlyAssessment& a, const GeometryTable& geometry,
                  const std::vector<bool>& missing) {
  geometry.require_all(a.fips_order);
  if (!missing.empty() && missing.size() != a.fips_order.size())
    throw std::invalid_argument("missing mask length does not match county count");
}

bool is_missing(const std::vector<bool>& missing, std::size_t i) {
  return !missing.empty() && missing[i];
}

}  // namespace

ColorScale::ColorScale(std::vector<ColorClass> classes) : classes_(std::move(classes)) {
  if (classes_.empty()) throw std::invalid_argument("color scale needs at least one class");
  for (std::size_t i = 1; i < classes_.size(); ++i)
    if (!(classes_[i - 1].lower < classes_[i].lower))
      throw std::invalid_argument("color scale lower bounds must increase");
}

int ColorScale::class_for(double value) const {
  const double v = std::clamp(value, 0.0, 1.0);
  int idx = 0;
  for (const auto& c : classes_)
    if (c.lower <= v) ++idx;
  return std::max(idx, 1);
}

const std::string& ColorScale::color_for(double value) const {
  return classes_[static_cast<std::size_t>(class_for(value)) - 1].color;
}

const ColorScale& accuracy_scale() {
  static const ColorScale scale = [] {
    const char* hex[20] = {"#67000D", "#771B20", "#873632", "#975145", "#A76B58",
                           "#B7866B", "#C7A17D", "#D7BC90", "#E7D7A3", "#F7F2B6",
                           "#F2F5B6", "#D7E1A5", "#BCCE94", "#A1BA83", "#86A671",
                           "#6B9360", "#517F4F", "#366B3E", "#1B582C", "#00441B"};
    std::vector<ColorClass> classes;
    for (int i = 0; i < 20; ++i) classes.push_back({i * 0.05, hex[i]});
    return ColorScale(std::move(classes));
  }();
  return scale;
}

const ColorScale& vulnerability_scale() {
  static const ColorScale scale = [] {
    const char* hex[20] = {"#08306B", "#21457A", "#3A5A88", "#536F97", "#6D84A6",
                           "#8699B5", "#9FAEC3", "#B8C3D2", "#D1D8E1", "#EAEDF0",
                           "#EFEAEB", "#E0D0D2", "#D1B6B9", "#C29CA1", "#B38288",
                           "#A46870", "#944E57", "#85343E", "#761A26", "#67000D"};
    std::vector<ColorClass> classes;
    for (int i = 0; i < 20; ++i) classes.push_back({i * 0.05, hex[i]});
    return ColorScale(std::move(classes));
  }();
  return scale;
}

void emit_heat_map(const YearlyAssessment& a, const GeometryTable& geometry,
                   const std::vector<bool>& missing, const std::filesystem::path& out_base,
                   const RenderOptions& opts) {
  check_inputs(a, geometry, missing);
  const auto& scale = vulnerability_scale();
  std::vector<PaintedCounty> painted;
  painted.reserve(a.fips_order.size());
  for (std::size_t i = 0; i < a.fips_order.size(); ++i) {
    PaintedCounty p;
    p.fips = a.fips_order[i];
    const bool gone = is_missing(missing, i) || a.levels[i] == 0;
    p.color = gone ? kMissingColor : scale.classes()[a.levels[i] - 1].color;
    p.properties["fips"] = p.fips;
    p.properties["level"] = a.levels[static_cast<Eigen::Index>(i)];
    p.properties["cdf"] = a.cdf[static_cast<Eigen::Index>(i)];
    p.properties["color"] = p.color;
    painted.push_back(std::move(p));
  }
  std::vector<LegendEntry> legend;
  for (const auto& c : scale.classes()) legend.push_back({c.color, ""});
  legend.front().label = "level 1";
  legend.back().label = "level 20";
  write_geojson(painted, geometry, out_base.string() + ".geojson");
  write_map_svg(painted, geometry, "predicted vulnerability, " + std::to_string(a.year), legend,
                true, out_base.string() + ".svg", opts);
}

void emit_accuracy_map(const YearlyAssessment& a, const GeometryTable& geometry,
                       const std::vector<bool>& missing, const std::filesystem::path& out_base,
                       const RenderOptions& opts) {
  check_inputs(a, geometry, missing);
  const auto& scale = accuracy_scale();
  std::vector<PaintedCounty> painted;
  painted.reserve(a.fips_order.size());
  for (std::size_t i = 0; i < a.fips_order.size(); ++i) {
    PaintedCounty p;
    p.fips = a.fips_order[i];
    const bool gone = is_missing(missing, i) || !a.included[i];
    const double acc = a.general_acc[static_cast<Eigen::Index>(i)];
    p.color = gone ? kMissingColor : scale.color_for(acc);
    p.properties["fips"] = p.fips;
    p.properties["general_accuracy"] = acc;
    p.properties["color"] = p.color;
    painted.push_back(std::move(p));
  }
  std::vector<LegendEntry> legend;
  for (const auto& c : scale.classes()) legend.push_back({c.color, ""});
  legend.front().label = "0";
  legend.back().label = "1";
  write_geojson(painted, geometry, out_base.string() + ".geojson");
  write_map_svg(painted, geometry, "general accuracy, " + std::to_string(a.year), legend, true,
                out_base.string() + ".svg", opts);
}

void emit_hotspot_map(const YearlyAssessment& a, const GeometryTable& geometry,
                      const std::vector<bool>& missing, HotspotMapMode mode,
                      const std::filesystem::path& out_base, const RenderOptions& opts) {
  check_inputs(a, geometry, missing);
  std::vector<PaintedCounty> painted;
  painted.reserve(a.fips_order.size());
  for (std::size_t i = 0; i < a.fips_order.size(); ++i) {
    PaintedCounty p;
    p.fips = a.fips_order[i];
    const bool actual = a.actual_hotspots.count(p.fips) != 0;
    const bool predicted = a.predicted_hotspots.count(p.fips) != 0;
    if (is_missing(missing, i)) {
      p.color = kMissingColor;
    } else if (mode == HotspotMapMode::accuracy) {
      if (actual && predicted)
        p.color = kHitColor;
      else if (actual)
        p.color = kMissedColor;
      else
        p.color = kUnpaintedColor;
    } else {
      p.color = predicted ? kPredictionColor : kUnpaintedColor;
    }
    p.properties["fips"] = p.fips;
    p.properties["is_actual_hotspot"] = actual;
    p.properties["is_predicted_hotspot"] = predicted;
    p.properties["color"] = p.color;
    painted.push_back(std::move(p));
  }
  std::vector<LegendEntry> legend;
  std::string title;
  if (mode == HotspotMapMode::accuracy) {
    legend = {{kHitColor, "predicted and actual"}, {kMissedColor, "actual only"}};
    title = "hotspot prediction accuracy, " + std::to_string(a.year);
  } else {
    legend = {{kPredictionColor, "predicted hotspot"}};
    title = "predicted hotspots, " + std::to_string(a.year);
  }
  write_geojson(painted, geometry, out_base.string() + ".geojson");
  write_map_svg(painted, geometry, title, legend, false, out_base.string() + ".svg", opts);
}

Histogram bin_errors(const Eigen::VectorXd& abs_errors, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  if (abs_errors.size() == 0) throw std::invalid_argument("empty error vector");
  const double max = abs_errors.maxCoeff();
  const double range = max > 0.0 ? max : 1.0;
  const double width = range / bins;

  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.edges[i] = i * width;
  h.edges.back() = range;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (Eigen::Index i = 0; i < abs_errors.size(); ++i) {
    auto idx = static_cast<long>(std::floor(abs_errors[i] / width));
    idx = std::clamp(idx, 0L, static_cast<long>(bins) - 1);
    ++h.counts[static_cast<std::size_t>(idx)];
  }
  return h;
}

namespace {

struct ChartFrame {
  double left = 56, right = 16, top = 30, bottom = 46;
  double width = 640, height = 400;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

void draw_max_arrow(std::ostringstream& svg, const ChartFrame& f, double x, double max_value,
                    const std::string& units, const std::string& color, double label_dy) {
  const double y_tip = f.top + 26.0;
  svg << "<line x1=\"" << fmt_px(x) << "\" y1=\"" << fmt_px(f.top + 2) << "\" x2=\"" << fmt_px(x)
      << "\" y2=\"" << fmt_px(y_tip) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
  svg << "<polygon points=\"" << fmt_px(x - 4) << ',' << fmt_px(y_tip) << ' ' << fmt_px(x + 4)
      << ',' << fmt_px(y_tip) << ' ' << fmt_px(x) << ',' << fmt_px(y_tip + 7) << "\" fill=\""
      << color << "\"/>\n";
  svg << "<text x=\"" << fmt_px(x - 6) << "\" y=\"" << fmt_px(f.top + 12 + label_dy)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
      << "\">max " << fmt(max_value) << (units.empty() ? "" : " ") << units << "</text>\n";
}

void open_chart(std::ostringstream& svg, const ChartFrame& f, const std::string& title,
                const std::string& x_label, long max_count, double max_edge) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\""
      << f.height << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\">\n";
  svg << "<rect width=\"" << f.width << "\" height=\"" << f.height << "\" fill=\"#FFFFFF\"/>\n";
  svg << "<text x=\"" << fmt_px(f.width / 2) << "\" y=\"18\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  // axes
  svg << "<line x1=\"" << fmt_px(f.left) << "\" y1=\"" << fmt_px(f.top) << "\" x2=\""
      << fmt_px(f.left) << "\" y2=\"" << fmt_px(f.top + f.plot_h())
      << "\" stroke=\"#333333\"/>\n";
  svg << "<line x1=\"" << fmt_px(f.left) << "\" y1=\"" << fmt_px(f.top + f.plot_h())
      << "\" x2=\"" << fmt_px(f.left + f.plot_w()) << "\" y2=\"" << fmt_px(f.top + f.plot_h())
      << "\" stroke=\"#333333\"/>\n";
  // axis labels
  svg << "<text x=\"" << fmt_px(f.left + f.plot_w() / 2) << "\" y=\"" << fmt_px(f.height - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
      << "</text>\n";
  svg << "<text x=\"" << fmt_px(f.left - 8) << "\" y=\"" << fmt_px(f.top + f.plot_h() + 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">0</text>\n";
  svg << "<text x=\"" << fmt_px(f.left + f.plot_w()) << "\" y=\""
      << fmt_px(f.top + f.plot_h() + 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << fmt(max_edge) << "</text>\n";
  svg << "<text x=\"" << fmt_px(f.left - 6) << "\" y=\"" << fmt_px(f.top + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << max_count
      << "</text>\n";
}

}  // namespace

void emit_error_histogram(const Eigen::VectorXd& abs_errors, int bins, const std::string& units,
                          const std::filesystem::path& out_base) {
  const Histogram h = bin_errors(abs_errors, bins);

  std::vector<std::string> lines;
  lines.emplace_back("bin_lower,bin_upper,count");
  for (int i = 0; i < bins; ++i)
    lines.push_back(csv::format_double(h.edges[i]) + "," + csv::format_double(h.edges[i + 1]) +
                    "," + std::to_string(h.counts[i]));
  csv::write_lines(out_base.string() + ".csv", lines);

  const long max_count = std::max(1L, *std::max_element(h.counts.begin(), h.counts.end()));
  const double max_error = abs_errors.maxCoeff();
  ChartFrame f;
  std::ostringstream svg;
  open_chart(svg, f, "absolute error distribution", units.empty() ? "absolute error" : units,
             max_count, h.edges.back());
  const double bw = f.plot_w() / bins;
  for (int i = 0; i < bins; ++i) {
    const double bar_h = f.plot_h() * static_cast<double>(h.counts[i]) / max_count;
    if (h.counts[i] == 0) continue;
    svg << "<rect x=\"" << fmt_px(f.left + bw * i) << "\" y=\""
        << fmt_px(f.top + f.plot_h() - bar_h) << "\" width=\"" << fmt_px(bw) << "\" height=\""
        << fmt_px(bar_h) << "\" fill=\"#4682B4\" stroke=\"#FFFFFF\" stroke-width=\"0.5\"/>\n";
  }
  const double x_max = f.left + f.plot_w() * (max_error > 0 ? max_error / h.edges.back() : 0.0);
  draw_max_arrow(svg, f, x_max, max_error, units, "#C00000", 0.0);
  svg << "</svg>\n";
  csv::write_lines(out_base.string() + ".svg", {svg.str()});
}

void emit_error_histogram_comparison(const Eigen::VectorXd& full_errors,
                                     const Eigen::VectorXd& reduced_errors, int bins,
                                     const std::string& units,
                                     const std::filesystem::path& out_base) {
  if (full_errors.size() == 0 || reduced_errors.size() == 0)
    throw std::invalid_argument("empty error vector");
  const double max_full = full_errors.maxCoeff();
  const double max_reduced = reduced_errors.maxCoeff();
  const double top = std::max(max_full, max_reduced);

  // shared edges so the two runs are binned identically
  Eigen::VectorXd anchor(1);
  anchor[0] = top;
  const Histogram shape = bin_errors(anchor, bins);
  const auto count_into = [&](const Eigen::VectorXd& errors) {
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    const double width = shape.edges[1] - shape.edges[0];
    for (Eigen::Index i = 0; i < errors.size(); ++i) {
      auto idx = static_cast<long>(std::floor(errors[i] / width));
      idx = std::clamp(idx, 0L, static_cast<long>(bins) - 1);
      ++counts[static_cast<std::size_t>(idx)];
    }
    return counts;
  };
  const std::vector<long> full = count_into(full_errors);
  const std::vector<long> reduced = count_into(reduced_errors);

  std::vector<std::string> lines;
  lines.emplace_back("bin_lower,bin_upper,count_full,count_reduced,max_full,max_reduced");
  for (int i = 0; i < bins; ++i)
    lines.push_back(csv::format_double(shape.edges[i]) + "," +
                    csv::format_double(shape.edges[i + 1]) + "," + std::to_string(full[i]) +
                    "," + std::to_string(reduced[i]) + "," + csv::format_double(max_full) + "," +
                    csv::format_double(max_reduced));
  csv::write_lines(out_base.string() + ".csv", lines);

  long max_count = 1;
  for (int i = 0; i < bins; ++i) max_count = std::max({max_count, full[i], reduced[i]});
  ChartFrame f;
  std::ostringstream svg;
  open_chart(svg, f, "absolute error distribution, full vs reduced training",
             units.empty() ? "absolute error" : units, max_count, shape.edges.back());
  const double bw = f.plot_w() / bins;
  const auto draw = [&](const std::vector<long>& counts, const char* color) {
    for (int i = 0; i < bins; ++i) {
      if (counts[i] == 0) continue;
      const double bar_h = f.plot_h() * static_cast<double>(counts[i]) / max_count;
      svg << "<rect x=\"" << fmt_px(f.left + bw * i) << "\" y=\""
          << fmt_px(f.top + f.plot_h() - bar_h) << "\" width=\"" << fmt_px(bw) << "\" height=\""
          << fmt_px(bar_h) << "\" fill=\"" << color << "\" fill-opacity=\"0.55\"/>\n";
    }
  };
  draw(full, "#4682B4");
  draw(reduced, "#C0392B");
  const double denom = shape.edges.back();
  draw_max_arrow(svg, f, f.left + f.plot_w() * (denom > 0 ? max_full / denom : 0.0), max_full,
                 units, "#4682B4", 0.0);
  draw_max_arrow(svg, f, f.left + f.plot_w() * (denom > 0 ? max_reduced / denom : 0.0),
                 max_reduced, units, "#C00000", 14.0);
  // legend
  svg << "<rect x=\"" << fmt_px(f.left + 8) << "\" y=\"" << fmt_px(f.top + 2)
      << "\" width=\"12\" height=\"10\" fill=\"#4682B4\" fill-opacity=\"0.55\"/>\n";
  svg << "<text x=\"" << fmt_px(f.left + 24) << "\" y=\"" << fmt_px(f.top + 11)
      << "\" font-family=\"sans-serif\" font-size=\"11\">full training</text>\n";
  svg << "<rect x=\"" << fmt_px(f.left + 8) << "\" y=\"" << fmt_px(f.top + 16)
      << "\" width=\"12\" height=\"10\" fill=\"#C0392B\" fill-opacity=\"0.55\"/>\n";
  svg << "<text x=\"" << fmt_px(f.left + 24) << "\" y=\"" << fmt_px(f.top + 25)
      << "\" font-family=\"sans-serif\" font-size=\"11\">reduced training</text>\n";
  svg << "</svg>\n";
  csv::write_lines(out_base.string() + ".svg", {svg.str()});
}

}  // namespace skf
