#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace skf {

/// Mean Earth radius in kilometers. Overridable through the run config.
inline constexpr double kEarthRadiusKm = 6371.0;

struct GeoPoint {
  double latitude_deg = 0.0;   // [-90, 90]
  double longitude_deg = 0.0;  // [-180, 180]
};

/// Throws std::invalid_argument on non-finite or out-of-range coordinates.
void validate(const GeoPoint& p);

/// Great-circle distance between two points, in kilometers.
/// Symmetric, zero iff the points coincide, bounded by pi * radius.
double haversine_km(const GeoPoint& a, const GeoPoint& b, double radius_km = kEarthRadiusKm);

/// The unique decay rate b with exp(-b * threshold_km) == 0.5,
/// i.e. b = ln(2) / threshold_km. Throws on threshold_km <= 0 or non-finite.
double calibrate_decay(double threshold_km);

/// Per-county population-center coordinates. The row order is the canonical
/// county ordering shared by every vector and matrix in the system.
class CentroidTable {
public:
  /// Validates coordinates and FIPS uniqueness; throws DataError on violation.
  static CentroidTable from_rows(std::vector<std::pair<std::string, GeoPoint>> rows);

  /// Reads a CSV with header `fips,lat,lon` (FIPS 5-digit zero-padded).
  static CentroidTable load_csv(const std::filesystem::path& file);

  std::size_t size() const { return fips_.size(); }
  const std::vector<std::string>& fips() const { return fips_; }
  const std::vector<GeoPoint>& points() const { return points_; }
  const std::string& fips_at(std::size_t i) const { return fips_[i]; }
  const GeoPoint& point_at(std::size_t i) const { return points_[i]; }

  /// Index in canonical order, or -1 when the code is unknown.
  std::ptrdiff_t index_of(const std::string& fips) const;

private:
  std::vector<std::string> fips_;
  std::vector<GeoPoint> points_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Dense spatially correlated process covariance: q_ij = exp(-b * d(x_i, x_j)).
/// Symmetric with unit diagonal; entries in (0, 1]; positive semi-definite.
struct SpatialCovariance {
  Eigen::MatrixXd matrix;
  double decay_rate = 0.0;  // b, in 1/km

  Eigen::Index dim() const { return matrix.rows(); }
};

/// Builds Q from pairwise haversine distances. The upper triangle is computed
/// (in parallel row blocks for large tables) and mirrored, so symmetry is
/// bit-exact; the diagonal is exactly 1. Throws DataError on an empty table.
SpatialCovariance build_process_covariance(const CentroidTable& centroids, double decay_rate,
                                           double radius_km = kEarthRadiusKm);

}  // namespace skf
