#include "skf/geo.hpp"

#include "skf/csv.hpp"
#include "skf/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace skf {

namespace {
constexpr double kDegToRad = M_PI / 180.0;
}

void validate(const GeoPoint& p) {
  if (!std::isfinite(p.latitude_deg) || !std::isfinite(p.longitude_deg))
    throw std::invalid_argument("non-finite coordinate");
  if (p.latitude_deg < -90.0 || p.latitude_deg > 90.0)
    throw std::invalid_argument("latitude out of [-90, 90]: " + std::to_string(p.latitude_deg));
  if (p.longitude_deg < -180.0 || p.longitude_deg > 180.0)
    throw std::invalid_argument("longitude out of [-180, 180]: " + std::to_string(p.longitude_deg));
}

double haversine_km(const GeoPoint& a, const GeoPoint& b, double radius_km) {
  validate(a);
  validate(b);
  if (!(radius_km > 0.0) || !std::isfinite(radius_km))
    throw std::invalid_argument("radius must be positive and finite");

  const double lat1 = a.latitude_deg * kDegToRad;
  const double lat2 = b.latitude_deg * kDegToRad;
  const double dlat = (b.latitude_deg - a.latitude_deg) * kDegToRad;
  const double dlon = (b.longitude_deg - a.longitude_deg) * kDegToRad;

  const double sin_dlat = std::sin(dlat / 2.0);
  const double sin_dlon = std::sin(dlon / 2.0);
  double h = sin_dlat * sin_dlat + std::cos(lat1) * std::cos(lat2) * sin_dlon * sin_dlon;
  // rounding can push h a hair past 1 for antipodal points
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * radius_km * std::asin(std::sqrt(h));
}

double calibrate_decay(double threshold_km) {
  if (!std::isfinite(threshold_km) || threshold_km <= 0.0)
    throw std::invalid_argument("distance threshold must be positive and finite");
  return M_LN2 / threshold_km;
}

CentroidTable CentroidTable::from_rows(std::vector<std::pair<std::string, GeoPoint>> rows) {
  CentroidTable t;
  t.fips_.reserve(rows.size());
  t.points_.reserve(rows.size());
  for (auto& [fips, point] : rows) {
    try {
      validate(point);
    } catch (const std::invalid_argument& e) {
      throw DataError("centroid for county " + fips + ": " + e.what());
    }
    if (!t.index_.emplace(fips, t.fips_.size()).second)
      throw DataError("duplicate FIPS code in centroid table: " + fips);
    t.fips_.push_back(std::move(fips));
    t.points_.push_back(point);
  }
  return t;
}

CentroidTable CentroidTable::load_csv(const std::filesystem::path& file) {
  std::vector<std::pair<std::string, GeoPoint>> rows;
  for (const auto& row : csv::read(file, "fips,lat,lon")) {
    GeoPoint p{csv::parse_double(row, 1, file), csv::parse_double(row, 2, file)};
    std::string fips = csv::parse_fips(row, 0, file);
    try {
      validate(p);
    } catch (const std::invalid_argument& e) {
      throw DataError(file.string() + ":" + std::to_string(row.line_no) + ": " + e.what());
    }
    rows.emplace_back(std::move(fips), p);
  }
  return from_rows(std::move(rows));
}

std::ptrdiff_t CentroidTable::index_of(const std::string& fips) const {
  const auto it = index_.find(fips);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

SpatialCovariance build_process_covariance(const CentroidTable& centroids, double decay_rate,
                                           double radius_km) {
  if (centroids.size() == 0) throw DataError("centroid table is empty");
  if (!(decay_rate > 0.0) || !std::isfinite(decay_rate))
    throw std::invalid_argument("decay rate must be positive and finite");

  const auto d = static_cast<Eigen::Index>(centroids.size());
  SpatialCovariance q;
  q.decay_rate = decay_rate;
  q.matrix.resize(d, d);

  // Each entry depends only on (i, j), so the row partitioning cannot
  // change any value: parallel and sequential builds are bit-identical.
  const auto fill_rows = [&](Eigen::Index row_begin, Eigen::Index row_end) {
    for (Eigen::Index i = row_begin; i < row_end; ++i) {
      q.matrix(i, i) = 1.0;
      for (Eigen::Index j = i + 1; j < d; ++j) {
        const double dist = haversine_km(centroids.point_at(i), centroids.point_at(j), radius_km);
        q.matrix(i, j) = std::exp(-decay_rate * dist);
      }
    }
  };

  const unsigned hw = std::thread::hardware_concurrency();
  if (d >= 512 && hw > 1) {
    const Eigen::Index n_threads = std::min<Eigen::Index>(hw, 8);
    std::vector<std::thread> workers;
    const Eigen::Index chunk = (d + n_threads - 1) / n_threads;
    for (Eigen::Index t = 0; t < n_threads; ++t) {
      const Eigen::Index begin = t * chunk;
      const Eigen::Index end = std::min(d, begin + chunk);
      if (begin < end) workers.emplace_back(fill_rows, begin, end);
    }
    for (auto& w : workers) w.join();
  } else {
    fill_rows(0, d);
  }

  // mirror the upper triangle
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) q.matrix(j, i) = q.matrix(i, j);

  return q;
}

}  // namespace skf
