#pragma once

#include "skf/analysis.hpp"
#include "skf/geometry.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace skf {

// One class of a 20-step scale: values in [lower, next.lower) take `color`.
struct ColorClass {
  double lower;
  std::string color;
};

class ColorScale {
 public:
  explicit ColorScale(std::vector<ColorClass> classes);

  // 1-based class index; a value sitting exactly on a boundary belongs to the
  // upper class. Values are clamped to [0, 1].
  int class_for(double value) const;
  const std::string& color_for(double value) const;
  const std::vector<ColorClass>& classes() const { return classes_; }

 private:
  std::vector<ColorClass> classes_;
};

// Dark red through pale yellow to dark green, 20 classes over [0, 1].
const ColorScale& accuracy_scale();

// Dark blue through near-white to dark red, 20 classes over [0, 1].
const ColorScale& vulnerability_scale();

struct RenderOptions {
  // Rescale Alaska and translate Hawaii into the lower-left of the frame.
  bool inset_alaska_hawaii = false;
  int svg_width = 960;
};

enum class HotspotMapMode {
  accuracy,    // orange = predicted and actual, black = actual only
  prediction,  // predicted hotspots only, in dark red
};

// Each emitter writes <out_base>.geojson and <out_base>.svg. GeoJSON features
// carry the painted color plus the mapped value; coordinates are never
// transformed, insetting applies to the SVG only.
void emit_heat_map(const YearlyAssessment& a, const GeometryTable& geometry,
                   const std::vector<bool>& missing, const std::filesystem::path& out_base,
                   const RenderOptions& opts = {});

void emit_accuracy_map(const YearlyAssessment& a, const GeometryTable& geometry,
                       const std::vector<bool>& missing, const std::filesystem::path& out_base,
                       const RenderOptions& opts = {});

void emit_hotspot_map(const YearlyAssessment& a, const GeometryTable& geometry,
                      const std::vector<bool>& missing, HotspotMapMode mode,
                      const std::filesystem::path& out_base, const RenderOptions& opts = {});

struct Histogram {
  std::vector<double> edges;  // bins + 1 ascending edges
  std::vector<long> counts;   // counts sum to the input length
};

// Equal-width bins over [0, max]; the final bin includes its upper edge.
// An all-zero input bins over [0, 1] instead so widths stay positive.
Histogram bin_errors(const Eigen::VectorXd& abs_errors, int bins);

// Writes <out_base>.csv (bin_lower,bin_upper,count) and <out_base>.svg with
// the largest error called out by a red arrow.
void emit_error_histogram(const Eigen::VectorXd& abs_errors, int bins,
                          const std::string& units, const std::filesystem::path& out_base);

// Overlays a reduced-training run on the fully trained one. The CSV columns
// are bin_lower,bin_upper,count_full,count_reduced,max_full,max_reduced with
// the two maxima repeated on every row.
void emit_error_histogram_comparison(const Eigen::VectorXd& full_errors,
                                     const Eigen::VectorXd& reduced_errors, int bins,
                                     const std::string& units,
                                     const std::filesystem::path& out_base);

}  // namespace skf
