#include "skf/config.hpp"

#include "skf/csv.hpp"
#include "skf/errors.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace skf {

namespace {

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

double parse_positive(const std::string& value, const std::string& key,
                      const std::string& where) {
  double v = 0;
  try {
    v = csv::parse_double(value);
  } catch (const DataError&) {
    throw ConfigError(where + "invalid number for " + key + ": '" + value + "'");
  }
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(where + key + " must be positive and finite, got '" + value + "'");
  return v;
}

bool parse_bool(const std::string& value, const std::string& key, const std::string& where) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(where + key + " must be true or false, got '" + value + "'");
}

YearRange parse_years(const std::string& value, const std::string& key,
                      const std::string& where) {
  if (value == "none") return YearRange{0, -1};
  const auto dash = value.find('-');
  try {
    if (dash == std::string::npos) {
      const int y = csv::parse_int(value);
      return YearRange{y, y};
    }
    const int a = csv::parse_int(trim(value.substr(0, dash)));
    const int b = csv::parse_int(trim(value.substr(dash + 1)));
    return YearRange{a, b};
  } catch (const DataError&) {
    throw ConfigError(where + key + " must be a year, first-last, or none, got '" + value +
                      "'");
  }
}

std::string years_to_string(const YearRange& r) {
  if (r.empty()) return "none";
  if (r.first == r.last) return std::to_string(r.first);
  return std::to_string(r.first) + "-" + std::to_string(r.last);
}

void set_key(RunConfig& c, const std::string& key, const std::string& value,
             const std::string& where) {
  if (key == "dataset") {
    try {
      c.dataset = dataset_from_name(value);
    } catch (const ConfigError&) {
      throw ConfigError(where + "unknown dataset '" + value + "'");
    }
  } else if (key == "rates") {
    c.rates_path = value;
  } else if (key == "centroids") {
    c.centroids_path = value;
  } else if (key == "geometry") {
    c.geometry_path = value;
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "threshold_km") {
    c.threshold_km = parse_positive(value, key, where);
  } else if (key == "observation_scale") {
    c.observation_scale = parse_positive(value, key, where);
  } else if (key == "initial_covariance_scale") {
    c.initial_covariance_scale = parse_positive(value, key, where);
  } else if (key == "earth_radius_km") {
    c.earth_radius_km = parse_positive(value, key, where);
  } else if (key == "train_years") {
    c.train_years = parse_years(value, key, where);
  } else if (key == "predict_years") {
    c.predict_years = parse_years(value, key, where);
  } else if (key == "hotspot_quantile") {
    c.hotspot_quantile = parse_positive(value, key, where);
  } else if (key == "hotspot_count_ceil") {
    c.hotspot_count_ceil = parse_bool(value, key, where);
  } else if (key == "exclude_missing") {
    c.exclude_missing = parse_bool(value, key, where);
  } else if (key == "joseph_update") {
    c.joseph_update = parse_bool(value, key, where);
  } else if (key == "metrics_use_updated") {
    c.metrics_use_updated = parse_bool(value, key, where);
  } else if (key == "rio_arriba_fips") {
    c.rio_arriba_fips = value == "none" ? "" : value;
  } else if (key == "inset_alaska_hawaii") {
    c.inset_alaska_hawaii = parse_bool(value, key, where);
  } else if (key == "histogram_bins") {
    try {
      c.histogram_bins = csv::parse_int(value);
    } catch (const DataError&) {
      throw ConfigError(where + "invalid number for " + key + ": '" + value + "'");
    }
    if (c.histogram_bins < 1) throw ConfigError(where + "histogram_bins must be at least 1");
  } else {
    throw ConfigError(where + "unknown key '" + key + "'");
  }
}

}  // namespace

double RunConfig::resolved_threshold_km() const {
  return threshold_km.value_or(traits(dataset).default_threshold_km);
}

double RunConfig::resolved_p0() const {
  return initial_covariance_scale.value_or(observation_scale);
}

RunConfig parse_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());

  RunConfig c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = file.string() + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    set_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
  }
  return c;
}

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
  set_key(config, trim(key), trim(value), "");
}

std::string serialize(const RunConfig& config) {
  std::ostringstream out;
  out << "dataset = " << traits(config.dataset).name << '\n';
  out << "rates = " << config.rates_path.string() << '\n';
  out << "centroids = " << config.centroids_path.string() << '\n';
  out << "geometry = " << config.geometry_path.string() << '\n';
  out << "output_dir = " << config.output_dir.string() << '\n';
  out << "threshold_km = " << csv::format_double(config.resolved_threshold_km()) << '\n';
  out << "observation_scale = " << csv::format_double(config.observation_scale) << '\n';
  out << "initial_covariance_scale = " << csv::format_double(config.resolved_p0()) << '\n';
  out << "earth_radius_km = " << csv::format_double(config.earth_radius_km) << '\n';
  out << "train_years = " << years_to_string(config.train_years) << '\n';
  out << "predict_years = " << years_to_string(config.predict_years) << '\n';
  out << "hotspot_quantile = " << csv::format_double(config.hotspot_quantile) << '\n';
  out << "hotspot_count_ceil = " << (config.hotspot_count_ceil ? "true" : "false") << '\n';
  out << "exclude_missing = " << (config.exclude_missing ? "true" : "false") << '\n';
  out << "joseph_update = " << (config.joseph_update ? "true" : "false") << '\n';
  out << "metrics_use_updated = " << (config.metrics_use_updated ? "true" : "false") << '\n';
  out << "rio_arriba_fips = "
      << (config.rio_arriba_fips.empty() ? "none" : config.rio_arriba_fips) << '\n';
  out << "inset_alaska_hawaii = " << (config.inset_alaska_hawaii ? "true" : "false") << '\n';
  out << "histogram_bins = " << config.histogram_bins << '\n';
  return out.str();
}

void validate(const RunConfig& config) {
  const auto require_file = [](const std::filesystem::path& p, const std::string& key) {
    if (p.empty()) throw ConfigError(key + " is required");
    if (!std::filesystem::exists(p))
      throw ConfigError("missing file for " + key + ": " + p.string());
  };
  require_file(config.rates_path, "rates");
  require_file(config.centroids_path, "centroids");
  if (!config.geometry_path.empty() && !std::filesystem::exists(config.geometry_path))
    throw ConfigError("missing file for geometry: " + config.geometry_path.string());

  if (!(config.hotspot_quantile > 0.0 && config.hotspot_quantile < 1.0))
    throw ConfigError("hotspot_quantile must lie in (0, 1)");
  if (config.train_years.empty()) throw ConfigError("train_years must not be empty");
  // empty predict_years runs training only
  if (!config.predict_years.empty() &&
      config.predict_years.first != config.train_years.last + 1)
    throw ConfigError("predict_years must start the year after train_years ends");
  if (!config.rio_arriba_fips.empty()) {
    if (config.rio_arriba_fips.size() != 5)
      throw ConfigError("rio_arriba_fips must be a five-digit code or none");
    for (char ch : config.rio_arriba_fips)
      if (ch < '0' || ch > '9')
        throw ConfigError("rio_arriba_fips must be a five-digit code or none");
  }
}

}  // namespace skf
