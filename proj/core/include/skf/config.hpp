#pragma once

#include "skf/filter.hpp"
#include "skf/panel.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace skf {

// Everything a pipeline run needs, loadable from a flat key = value file.
// Optional fields resolve against the dataset defaults at use time.
struct RunConfig {
  DatasetKind dataset = DatasetKind::mortality;
  std::filesystem::path rates_path;
  std::filesystem::path centroids_path;
  std::filesystem::path geometry_path;  // empty skips map rendering
  std::filesystem::path output_dir = "out";

  std::optional<double> threshold_km;  // default: dataset threshold
  double observation_scale = 0.01;
  std::optional<double> initial_covariance_scale;  // default: observation_scale
  double earth_radius_km = 6371.0;

  YearRange train_years{2015, 2019};
  YearRange predict_years{2020, 2020};

  double hotspot_quantile = 0.05;
  bool hotspot_count_ceil = false;
  bool exclude_missing = false;
  bool joseph_update = false;
  bool metrics_use_updated = false;
  std::string rio_arriba_fips = "35039";  // empty disables the correction

  bool inset_alaska_hawaii = false;
  int histogram_bins = 30;

  double resolved_threshold_km() const;
  double resolved_p0() const;
};

// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
// Unknown keys and malformed values raise ConfigError with file:line context.
RunConfig parse_config_file(const std::filesystem::path& file);

// Applies one `key=value` override, same key set as the file format.
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

// Renders the effective config with every default resolved, in a fixed key
// order. serialize(parse(serialize(c))) == serialize(c).
std::string serialize(const RunConfig& config);

// Checks paths exist, scales are positive, ranges are well formed.
// Throws ConfigError naming the first offending field.
void validate(const RunConfig& config);

}  // namespace skf
