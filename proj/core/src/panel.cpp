#include "skf/panel.hpp"

#include "skf/csv.hpp"
#include "skf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace skf {

const DatasetTraits& traits(DatasetKind kind) {
  static const DatasetTraits mortality{"mortality", "deaths per 100k", 500.0, false};
  static const DatasetTraits dispensing{"dispensing", "prescriptions per 100", 300.0, false};
  static const DatasetTraits disability{"disability", "percentile rank", 500.0, true};
  switch (kind) {
    case DatasetKind::mortality: return mortality;
    case DatasetKind::dispensing: return dispensing;
    case DatasetKind::disability: return disability;
  }
  throw std::logic_error("unreachable dataset kind");
}

DatasetKind dataset_from_name(std::string_view name) {
  if (name == "mortality") return DatasetKind::mortality;
  if (name == "dispensing") return DatasetKind::dispensing;
  if (name == "disability") return DatasetKind::disability;
  throw ConfigError("unknown dataset '" + std::string(name) +
                    "' (expected mortality, dispensing or disability)");
}

std::ptrdiff_t CountyPanel::year_index(int year) const {
  const auto it = std::find(years.begin(), years.end(), year);
  return it == years.end() ? -1 : it - years.begin();
}

Eigen::VectorXd CountyPanel::column(int year) const {
  const auto idx = year_index(year);
  if (idx < 0) throw DataError("panel has no year " + std::to_string(year));
  return values.col(idx);
}

std::vector<bool> CountyPanel::missing_in(int year) const {
  const auto idx = year_index(year);
  if (idx < 0) throw DataError("panel has no year " + std::to_string(year));
  std::vector<bool> mask(static_cast<std::size_t>(county_count()));
  for (Eigen::Index i = 0; i < county_count(); ++i) mask[i] = missing(i, idx);
  return mask;
}

CountyPanel load_panel(const std::filesystem::path& file, DatasetKind /*kind*/,
                       const CentroidTable& landscape) {
  if (landscape.size() == 0) throw DataError("landscape is empty");

  struct Obs {
    Eigen::Index county;
    int year;
    double rate;
  };
  std::vector<Obs> observations;
  std::set<std::string> unknown;
  int min_year = 0, max_year = 0;
  bool any = false;

  for (const auto& row : csv::read(file, "fips,year,rate")) {
    const std::string fips = csv::parse_fips(row, 0, file);
    const int year = csv::parse_int(row, 1, file);
    const double rate = csv::parse_double(row, 2, file);
    if (!std::isfinite(rate))
      throw DataError(file.string() + ":" + std::to_string(row.line_no) + ": non-finite rate");
    const auto idx = landscape.index_of(fips);
    if (idx < 0) {
      unknown.insert(fips);
      continue;
    }
    observations.push_back(Obs{idx, year, rate});
    min_year = any ? std::min(min_year, year) : year;
    max_year = any ? std::max(max_year, year) : year;
    any = true;
  }

  if (!unknown.empty()) {
    std::string offenders;
    for (const auto& f : unknown) {
      if (!offenders.empty()) offenders += ", ";
      offenders += f;
    }
    throw DataError(file.string() + ": FIPS not in the county landscape: " + offenders);
  }
  if (!any) throw DataError(file.string() + ": no data rows");

  CountyPanel panel;
  panel.fips_order = landscape.fips();
  for (int y = min_year; y <= max_year; ++y) panel.years.push_back(y);
  const auto d = static_cast<Eigen::Index>(landscape.size());
  const auto t = static_cast<Eigen::Index>(panel.years.size());
  panel.values = Eigen::MatrixXd::Zero(d, t);
  panel.missing.setConstant(d, t, true);

  for (const auto& obs : observations) {
    const Eigen::Index col = obs.year - min_year;
    panel.values(obs.county, col) = obs.rate;
    panel.missing(obs.county, col) = false;
  }
  return panel;
}

CountyPanel interpolate_biennial(const CountyPanel& panel) {
  CountyPanel out = panel;
  for (std::size_t k = 0; k < out.years.size(); ++k) {
    const int year = out.years[k];
    if (year % 2 == 0) continue;
    if (k == 0 || k + 1 >= out.years.size())
      throw DataError("odd year " + std::to_string(year) +
                      " lacks bracketing even years in the panel span");
    const auto prev = static_cast<Eigen::Index>(k - 1);
    const auto next = static_cast<Eigen::Index>(k + 1);
    const auto col = static_cast<Eigen::Index>(k);
    out.values.col(col) =
        out.values.col(prev) + (out.values.col(next) - out.values.col(prev)) / 2.0;
    out.missing.col(col) = out.missing.col(prev) || out.missing.col(next);
  }
  return out;
}

CountyPanel apply_rio_arriba_fix(const CountyPanel& panel, const std::string& fips) {
  const auto it = std::find(panel.fips_order.begin(), panel.fips_order.end(), fips);
  if (it == panel.fips_order.end())
    throw DataError("county " + fips + " not in the panel");
  const Eigen::Index row = it - panel.fips_order.begin();

  const auto y2016 = panel.year_index(2016);
  const auto y2020 = panel.year_index(2020);
  if (y2016 < 0 || y2020 < 0)
    throw DataError("panel must span 2016-2020 to apply the correction");

  CountyPanel out = panel;
  const double v2016 = out.values(row, y2016);
  const double quarter = (out.values(row, y2020) - v2016) / 4.0;
  for (int step = 1; step <= 3; ++step) {
    const auto col = out.year_index(2016 + step);
    out.values(row, col) = v2016 + quarter * step;
    out.missing(row, col) = out.missing(row, y2016) || out.missing(row, y2020);
  }
  return out;
}

void write_panel_csv(const CountyPanel& panel, const std::filesystem::path& file) {
  std::vector<std::string> lines;
  lines.reserve(panel.fips_order.size() + 1);
  std::string header = "fips";
  for (int y : panel.years) header += "," + std::to_string(y);
  lines.push_back(std::move(header));
  for (Eigen::Index i = 0; i < panel.county_count(); ++i) {
    std::string line = panel.fips_order[i];
    for (Eigen::Index k = 0; k < panel.year_count(); ++k)
      line += "," + csv::format_double(panel.values(i, k));
    lines.push_back(std::move(line));
  }
  csv::write_lines(file, lines);
}

void write_missing_csv(const CountyPanel& panel, const std::filesystem::path& file) {
  std::vector<std::string> lines;
  lines.reserve(panel.fips_order.size() + 1);
  std::string header = "fips";
  for (int y : panel.years) header += "," + std::to_string(y);
  lines.push_back(std::move(header));
  for (Eigen::Index i = 0; i < panel.county_count(); ++i) {
    std::string line = panel.fips_order[i];
    for (Eigen::Index k = 0; k < panel.year_count(); ++k)
      line += panel.missing(i, k) ? ",1" : ",0";
    lines.push_back(std::move(line));
  }
  csv::write_lines(file, lines);
}

}  // namespace skf
