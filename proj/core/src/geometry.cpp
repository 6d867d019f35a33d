#include "skf/geometry.hpp"

#include "skf/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace skf {

namespace {

using nlohmann::json;

std::string normalize_fips(const json& value, const std::filesystem::path& file) {
  std::string fips;
  if (value.is_string()) {
    fips = value.get<std::string>();
  } else if (value.is_number_integer()) {
    fips = std::to_string(value.get<long long>());
  } else {
    throw DataError(file.string() + ": fips property must be a string or integer");
  }
  if (fips.empty() || fips.size() > 5)
    throw DataError(file.string() + ": malformed fips code '" + fips + "'");
  for (char c : fips)
    if (c < '0' || c > '9')
      throw DataError(file.string() + ": malformed fips code '" + fips + "'");
  while (fips.size() < 5) fips.insert(fips.begin(), '0');
  return fips;
}

Ring parse_ring(const json& coords, const std::string& fips,
                const std::filesystem::path& file) {
  if (!coords.is_array() || coords.size() < 4)
    throw DataError(file.string() + ": ring for " + fips + " needs at least four positions");
  Ring ring;
  ring.reserve(coords.size());
  for (const auto& pos : coords) {
    if (!pos.is_array() || pos.size() < 2)
      throw DataError(file.string() + ": position for " + fips + " is not a [lon, lat] pair");
    const double lon = pos[0].get<double>();
    const double lat = pos[1].get<double>();
    if (!std::isfinite(lon) || !std::isfinite(lat))
      throw DataError(file.string() + ": non-finite coordinate for " + fips);
    ring.push_back({lon, lat});
  }
  if (ring.front() != ring.back())
    throw DataError(file.string() + ": open ring for " + fips);
  return ring;
}

Polygon parse_polygon(const json& coords, const std::string& fips,
                      const std::filesystem::path& file) {
  if (!coords.is_array() || coords.empty())
    throw DataError(file.string() + ": polygon for " + fips + " has no rings");
  Polygon poly;
  poly.reserve(coords.size());
  for (const auto& ring : coords) poly.push_back(parse_ring(ring, fips, file));
  return poly;
}

}  // namespace

GeometryTable GeometryTable::load_geojson(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());

  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw DataError(file.string() + ": " + e.what());
  }

  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array())
    throw DataError(file.string() + ": expected a GeoJSON FeatureCollection");

  GeometryTable table;
  for (const auto& feature : doc["features"]) {
    if (!feature.is_object() || feature.value("type", "") != "Feature")
      throw DataError(file.string() + ": feature list contains a non-Feature entry");
    if (!feature.contains("properties") || !feature["properties"].is_object() ||
        !feature["properties"].contains("fips"))
      throw DataError(file.string() + ": feature without a fips property");
    const std::string fips = normalize_fips(feature["properties"]["fips"], file);

    if (!feature.contains("geometry") || !feature["geometry"].is_object())
      throw DataError(file.string() + ": feature " + fips + " has no geometry");
    const json& geom = feature["geometry"];
    const std::string type = geom.value("type", "");
    const json& coords = geom.contains("coordinates") ? geom["coordinates"] : json::array();

    CountyGeometry county;
    county.fips = fips;
    if (type == "Polygon") {
      county.polygons.push_back(parse_polygon(coords, fips, file));
    } else if (type == "MultiPolygon") {
      if (!coords.is_array() || coords.empty())
        throw DataError(file.string() + ": empty MultiPolygon for " + fips);
      for (const auto& poly : coords) county.polygons.push_back(parse_polygon(poly, fips, file));
    } else {
      throw DataError(file.string() + ": unsupported geometry type '" + type + "' for " + fips);
    }

    if (!table.by_fips_.emplace(fips, std::move(county)).second)
      throw DataError(file.string() + ": duplicate fips code " + fips);
  }
  return table;
}

void GeometryTable::require_all(const std::vector<std::string>& fips_order) const {
  std::vector<std::string> missing;
  for (const auto& f : fips_order)
    if (!contains(f)) missing.push_back(f);
  if (missing.empty()) return;
  std::sort(missing.begin(), missing.end());
  std::ostringstream msg;
  msg << "no geometry for " << missing.size() << " counties:";
  for (const auto& f : missing) msg << ' ' << f;
  throw DataError(msg.str());
}

const CountyGeometry* GeometryTable::find(const std::string& fips) const {
  const auto it = by_fips_.find(fips);
  return it == by_fips_.end() ? nullptr : &it->second;
}

}  // namespace skf
