#pragma once

#include "skf/geo.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace skf {

enum class DatasetKind { mortality, dispensing, disability };

struct DatasetTraits {
  std::string_view name;
  std::string_view units;
  // Placeholder calibration distances; replace with the values used for a
  // specific reproduction. See the config reference in the README.
  double default_threshold_km;
  // Biennial source data: odd years are synthesized by interpolation.
  bool biennial;
};

const DatasetTraits& traits(DatasetKind kind);
DatasetKind dataset_from_name(std::string_view name);  // throws ConfigError

/// Aligned multi-year rate panel. Rows follow the centroid-table ordering,
/// columns are contiguous ascending calendar years. Cells with no usable
/// observation hold 0.0 and are flagged in `missing`.
struct CountyPanel {
  std::vector<std::string> fips_order;
  std::vector<int> years;
  Eigen::MatrixXd values;                              // d x T
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> missing;  // d x T

  Eigen::Index county_count() const { return values.rows(); }
  Eigen::Index year_count() const { return values.cols(); }

  std::ptrdiff_t year_index(int year) const;
  /// Throws DataError when the year is not in the panel.
  Eigen::VectorXd column(int year) const;
  /// Missing flags for one year, as a mask over counties.
  std::vector<bool> missing_in(int year) const;
};

/// Reads a rate CSV (`fips,year,rate`) and aligns it to the landscape:
/// output rows are exactly the landscape order; any county or (county, year)
/// cell absent from the file holds 0.0 and is marked missing. The year span
/// is the contiguous range [min year, max year] found in the file.
/// A FIPS present in the file but not in the landscape is an error (the
/// landscape is authoritative); malformed rows report their line number.
CountyPanel load_panel(const std::filesystem::path& file, DatasetKind kind,
                       const CentroidTable& landscape);

/// Fills every odd-year column with the midpoint of its even-year neighbors:
/// value(y) = value(y-1) + (value(y+1) - value(y-1)) / 2. Even-year columns
/// are untouched. An odd cell becomes non-missing iff both neighbors are
/// non-missing. Throws DataError when an odd year lacks a bracketing even
/// year inside the panel span.
CountyPanel interpolate_biennial(const CountyPanel& panel);

/// Replaces 2017-2019 for one county with the quarter-step progression from
/// its 2016 value to its 2020 value: with q = (v2020 - v2016) / 4,
/// v2017 = v2016 + q, v2018 = v2016 + 2q, v2019 = v2016 + 3q.
/// Every other county is untouched. Throws DataError on an unknown FIPS or
/// when the panel does not span 2016-2020.
CountyPanel apply_rio_arriba_fix(const CountyPanel& panel, const std::string& fips = "35039");

/// Cleaned-panel export, header `fips,<year1>,...,<yearT>`.
void write_panel_csv(const CountyPanel& panel, const std::filesystem::path& file);
/// Missing-cell mask with the same shape, cells 0/1.
void write_missing_csv(const CountyPanel& panel, const std::filesystem::path& file);

}  // namespace skf
