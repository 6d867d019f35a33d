#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace skf {

// One linear ring of [longitude, latitude] pairs; closed, so front() == back().
using Ring = std::vector<std::array<double, 2>>;

// First ring is the outer boundary, the rest are holes.
using Polygon = std::vector<Ring>;

struct CountyGeometry {
  std::string fips;
  std::vector<Polygon> polygons;
};

// County boundaries keyed by FIPS code.
class GeometryTable {
 public:
  // Reads a GeoJSON FeatureCollection of Polygon / MultiPolygon features.
  // Every feature must carry a `fips` property (string or number); numeric
  // codes are zero-padded to five digits. Throws DataError on malformed
  // input, open rings, or duplicate FIPS codes.
  static GeometryTable load_geojson(const std::filesystem::path& file);

  // Throws DataError naming every FIPS code in `fips_order` without geometry.
  void require_all(const std::vector<std::string>& fips_order) const;

  bool contains(const std::string& fips) const { return by_fips_.count(fips) != 0; }
  const CountyGeometry* find(const std::string& fips) const;
  std::size_t size() const { return by_fips_.size(); }
  const std::map<std::string, CountyGeometry>& all() const { return by_fips_; }

 private:
  std::map<std::string, CountyGeometry> by_fips_;
};

}  // namespace skf
