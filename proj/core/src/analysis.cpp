#include "skf/analysis.hpp"

#include "skf/csv.hpp"
#include "skf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

namespace skf {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

std::size_t hotspot_count(std::size_t n, const HotspotOptions& opts) {
  const double raw = opts.quantile * static_cast<double>(n);
  return static_cast<std::size_t>(opts.count_ceil ? std::ceil(raw) : std::floor(raw));
}

}  // namespace

Eigen::VectorXd absolute_errors(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
  if (predicted.size() != actual.size())
    throw std::invalid_argument("predicted and actual vectors differ in length");
  return (predicted - actual).cwiseAbs();
}

GeneralAccuracy general_accuracy(const Eigen::VectorXd& abs_errors) {
  if (abs_errors.size() == 0) throw std::invalid_argument("empty error vector");
  GeneralAccuracy out;
  out.max_error = abs_errors.maxCoeff();
  out.avg_error = abs_errors.mean();
  if (out.max_error == 0.0) {
    // perfect prediction: every county scores 1
    out.per_county = Eigen::VectorXd::Ones(abs_errors.size());
    out.average = 1.0;
    return out;
  }
  out.per_county = 1.0 - (abs_errors.array() / out.max_error);
  out.average = out.per_county.mean();
  return out;
}

std::set<std::string> actual_hotspots(const Eigen::VectorXd& rates,
                                      const std::vector<std::string>& fips_order,
                                      const HotspotOptions& opts) {
  const auto n = static_cast<std::size_t>(rates.size());
  if (fips_order.size() != n)
    throw std::invalid_argument("rates and fips order differ in length");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rates[a] != rates[b]) return rates[a] > rates[b];
    return fips_order[a] < fips_order[b];
  });

  std::set<std::string> out;
  const std::size_t count = std::min(hotspot_count(n, opts), n);
  for (std::size_t k = 0; k < count; ++k) out.insert(fips_order[order[k]]);
  return out;
}

VulnerabilityResult vulnerability_levels(const Eigen::VectorXd& predicted_mean,
                                         const std::vector<std::string>& fips_order,
                                         double hotspot_quantile) {
  const auto n = predicted_mean.size();
  if (n < 2) throw std::invalid_argument("need at least two counties to fit a distribution");
  if (fips_order.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("predicted means and fips order differ in length");
  if (!(hotspot_quantile > 0.0 && hotspot_quantile < 1.0))
    throw std::invalid_argument("hotspot quantile must lie in (0, 1)");

  VulnerabilityResult out;
  out.mu = predicted_mean.mean();
  // population standard deviation (divide by n)
  out.sigma = std::sqrt((predicted_mean.array() - out.mu).square().sum() / static_cast<double>(n));
  if (out.sigma == 0.0)
    throw NumericalError("constant cross-section: cannot fit a vulnerability distribution");

  out.cdf.resize(n);
  out.levels.resize(n);
  const double cut = 1.0 - hotspot_quantile;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double c = normal_cdf((predicted_mean[i] - out.mu) / out.sigma);
    out.cdf[i] = c;
    out.levels[i] = std::min(20, static_cast<int>(std::floor(c * 20.0)) + 1);
    if (c > cut) out.predicted_hotspots.insert(fips_order[i]);
  }
  return out;
}

double hotspot_accuracy(const std::set<std::string>& predicted,
                        const std::set<std::string>& actual) {
  if (actual.empty()) throw std::invalid_argument("actual hotspot set is empty");
  std::size_t hits = 0;
  for (const auto& f : predicted) hits += actual.count(f);
  return static_cast<double>(hits) / static_cast<double>(actual.size());
}

YearlyAssessment assess_year(int year, const Eigen::VectorXd& predicted_mean,
                             const Eigen::VectorXd& actual,
                             const std::vector<std::string>& fips_order,
                             const std::vector<bool>& missing, const AssessOptions& opts) {
  const auto n = predicted_mean.size();
  if (actual.size() != n || static_cast<Eigen::Index>(fips_order.size()) != n)
    throw std::invalid_argument("assessment inputs differ in length");
  if (!missing.empty() && static_cast<Eigen::Index>(missing.size()) != n)
    throw std::invalid_argument("missing mask length does not match county count");

  YearlyAssessment a;
  a.year = year;
  a.fips_order = fips_order;
  a.abs_errors = absolute_errors(predicted_mean, actual);
  a.included.assign(static_cast<std::size_t>(n), true);
  if (opts.exclude_missing && !missing.empty())
    for (Eigen::Index i = 0; i < n; ++i) a.included[i] = !missing[i];

  std::vector<Eigen::Index> idx;
  idx.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    if (a.included[i]) idx.push_back(i);
  if (idx.empty()) throw DataError("every county is excluded for year " + std::to_string(year));

  Eigen::VectorXd pred_s(idx.size()), act_s(idx.size()), err_s(idx.size());
  std::vector<std::string> fips_s(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    pred_s[k] = predicted_mean[idx[k]];
    act_s[k] = actual[idx[k]];
    err_s[k] = a.abs_errors[idx[k]];
    fips_s[k] = fips_order[idx[k]];
  }

  const GeneralAccuracy acc = general_accuracy(err_s);
  a.max_error = acc.max_error;
  a.avg_error = acc.avg_error;
  a.avg_general_accuracy = acc.average;
  a.general_acc = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < idx.size(); ++k) a.general_acc[idx[k]] = acc.per_county[k];

  a.actual_hotspots = actual_hotspots(act_s, fips_s, opts.hotspot);
  const VulnerabilityResult vul = vulnerability_levels(pred_s, fips_s, opts.hotspot.quantile);
  a.predicted_hotspots = vul.predicted_hotspots;
  a.hotspot_acc = hotspot_accuracy(a.predicted_hotspots, a.actual_hotspots);

  a.cdf = Eigen::VectorXd::Zero(n);
  a.levels = Eigen::VectorXi::Zero(n);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    a.cdf[idx[k]] = vul.cdf[k];
    a.levels[idx[k]] = vul.levels[k];
  }
  return a;
}

void write_assessment_csv(const YearlyAssessment& a, const std::filesystem::path& file) {
  std::vector<std::string> lines;
  lines.reserve(a.fips_order.size() + 1);
  lines.emplace_back(
      "fips,abs_error,general_accuracy,level,cdf,is_actual_hotspot,is_predicted_hotspot");
  for (std::size_t i = 0; i < a.fips_order.size(); ++i) {
    const std::string& f = a.fips_order[i];
    lines.push_back(f + "," + csv::format_double(a.abs_errors[i]) + "," +
                    csv::format_double(a.general_acc[i]) + "," + std::to_string(a.levels[i]) +
                    "," + csv::format_double(a.cdf[i]) + "," +
                    (a.actual_hotspots.count(f) ? "1" : "0") + "," +
                    (a.predicted_hotspots.count(f) ? "1" : "0"));
  }
  csv::write_lines(file, lines);
}

std::vector<SensitivityRow> sensitivity_analysis(const CountyPanel& panel,
                                                 const NoiseConfig& base,
                                                 const Schedule& schedule,
                                                 std::vector<double> scales,
                                                 std::optional<double> p0,
                                                 const AssessOptions& opts) {
  if (scales.empty()) throw std::invalid_argument("no uncertainty scales given");
  for (double r : scales)
    if (!(r > 0.0) || !std::isfinite(r))
      throw std::invalid_argument("uncertainty scales must be positive and finite");
  std::sort(scales.begin(), scales.end());

  const auto run_one = [&](double r) {
    NoiseConfig noise = base;
    noise.observation_scale = r;
    const double p0_eff = p0.value_or(r);
    const FilterRun fr = run(panel, noise, schedule.train, schedule.predict, p0_eff);

    std::vector<SensitivityRow> rows;
    for (int year = schedule.predict.first; year <= schedule.predict.last; ++year) {
      const StateRecord* rec = fr.find(year, Phase::predicted);
      const YearlyAssessment a = assess_year(year, rec->mean, panel.column(year),
                                             panel.fips_order, panel.missing_in(year), opts);
      rows.push_back(SensitivityRow{r, year, a.avg_general_accuracy, a.hotspot_acc, a.avg_error,
                                    a.max_error});
    }
    return rows;
  };

  // independent pipelines, no shared mutable state
  std::vector<std::future<std::vector<SensitivityRow>>> futures;
  futures.reserve(scales.size());
  for (double r : scales)
    futures.push_back(std::async(std::launch::async, run_one, r));

  std::vector<SensitivityRow> out;
  for (auto& f : futures) {
    auto rows = f.get();
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

std::vector<TrainingVariant> multi_year_study(const CountyPanel& panel, const NoiseConfig& noise,
                                              std::optional<double> p0, int min_train_years) {
  const auto n_years = static_cast<int>(panel.years.size());
  if (n_years < 3) throw DataError("panel too short for a multi-year study");
  const int full = n_years - 2;  // training years in the fully trained run
  if (min_train_years < 1 || min_train_years > full - 1)
    throw std::invalid_argument("min_train_years must lie in [1, " + std::to_string(full - 1) +
                                "]");

  const int init_year = panel.years.front();
  const int last_year = panel.years.back();

  const auto run_variant = [&](int k) {
    const YearRange train{init_year + 1, init_year + k};
    const YearRange predict{init_year + k + 1, last_year};
    const double p0_eff = p0.value_or(noise.observation_scale);
    const FilterRun fr = run(panel, noise, train, predict, p0_eff);

    TrainingVariant v;
    v.train_year_count = k;
    for (int year = predict.first; year <= predict.last; ++year) {
      const StateRecord* rec = fr.find(year, Phase::predicted);
      HorizonErrors h;
      h.year = year;
      h.abs_errors = absolute_errors(rec->mean, panel.column(year));
      h.max_error = h.abs_errors.maxCoeff();
      v.years.push_back(std::move(h));
    }
    return v;
  };

  std::vector<int> ks;
  ks.push_back(full);
  for (int k = full - 1; k >= min_train_years; --k) ks.push_back(k);

  std::vector<std::future<TrainingVariant>> futures;
  futures.reserve(ks.size());
  for (int k : ks) futures.push_back(std::async(std::launch::async, run_variant, k));

  std::vector<TrainingVariant> out;
  out.reserve(ks.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& file) {
  std::vector<std::string> lines;
  lines.reserve(rows.size() + 1);
  lines.emplace_back("variable,year,avg_general_acc,hotspot_acc,avg_error,max_error");
  for (const auto& r : rows) {
    lines.push_back(r.variable + "," + std::to_string(r.year) + "," +
                    csv::format_double(r.avg_general_acc) + "," +
                    csv::format_double(r.hotspot_acc) + "," + csv::format_double(r.avg_error) +
                    "," + csv::format_double(r.max_error));
  }
  csv::write_lines(file, lines);
}

}  // namespace skf
