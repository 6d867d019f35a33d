#pragma once

#include "skf/filter.hpp"
#include "skf/panel.hpp"

#include <Eigen/Dense>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace skf {

/// Elementwise |predicted - actual|.
Eigen::VectorXd absolute_errors(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

struct GeneralAccuracy {
  Eigen::VectorXd per_county;  // 1 - err_i / max_err, in [0, 1]
  double average = 0.0;
  double avg_error = 0.0;
  double max_error = 0.0;
};

/// Normalizes each error by the largest error, so the average satisfies
/// average == 1 - mean(err) / max(err). All-zero errors are the degenerate
/// perfect-prediction case: every accuracy is 1.
GeneralAccuracy general_accuracy(const Eigen::VectorXd& abs_errors);

struct HotspotOptions {
  double quantile = 0.05;   // top share of counties
  bool count_ceil = false;  // count = floor(quantile * d) unless set
};

/// The floor(quantile * d) highest-rate counties. Ties at the cutoff break
/// by ascending FIPS, so the set is deterministic under input permutation.
std::set<std::string> actual_hotspots(const Eigen::VectorXd& rates,
                                      const std::vector<std::string>& fips_order,
                                      const HotspotOptions& opts = {});

struct VulnerabilityResult {
  Eigen::VectorXd cdf;     // Phi((x_i - mu) / sigma)
  Eigen::VectorXi levels;  // 1..20, five-percentile bins of the cdf
  std::set<std::string> predicted_hotspots;  // cdf above 1 - quantile
  double mu = 0.0;
  double sigma = 0.0;  // population standard deviation of the cross-section
};

/// Fits one normal to the cross-section of predicted county means and bins
/// each county by its cdf value: level = min(20, floor(cdf * 20) + 1).
/// Throws NumericalError when the cross-section is constant (sigma == 0).
VulnerabilityResult vulnerability_levels(const Eigen::VectorXd& predicted_mean,
                                         const std::vector<std::string>& fips_order,
                                         double hotspot_quantile = 0.05);

/// |predicted intersect actual| / |actual|. Throws on an empty actual set.
double hotspot_accuracy(const std::set<std::string>& predicted,
                        const std::set<std::string>& actual);

struct AssessOptions {
  HotspotOptions hotspot{};
  // Drop counties whose observation for the assessed year was missing from
  // every aggregate, hotspot set and the normal fit. Excluded counties keep
  // their raw absolute error but report zero accuracy/cdf/level.
  bool exclude_missing = false;
};

/// Per-year derived products: errors, accuracy, hotspot sets, vulnerability.
struct YearlyAssessment {
  int year = 0;
  std::vector<std::string> fips_order;
  Eigen::VectorXd abs_errors;
  double max_error = 0.0;
  double avg_error = 0.0;
  Eigen::VectorXd general_acc;
  double avg_general_accuracy = 0.0;
  std::set<std::string> actual_hotspots;
  std::set<std::string> predicted_hotspots;
  double hotspot_acc = 0.0;
  Eigen::VectorXi levels;  // 0 marks an excluded county
  Eigen::VectorXd cdf;
  std::vector<bool> included;
};

YearlyAssessment assess_year(int year, const Eigen::VectorXd& predicted_mean,
                             const Eigen::VectorXd& actual,
                             const std::vector<std::string>& fips_order,
                             const std::vector<bool>& missing = {},
                             const AssessOptions& opts = {});

/// Assessment export, header
/// `fips,abs_error,general_accuracy,level,cdf,is_actual_hotspot,is_predicted_hotspot`.
void write_assessment_csv(const YearlyAssessment& a, const std::filesystem::path& file);

/// Train/predict split for a panel run; the initialization year is the
/// panel's first year.
struct Schedule {
  YearRange train;
  YearRange predict;
};

struct SensitivityRow {
  double r = 0.0;
  int year = 0;
  double avg_general_accuracy = 0.0;
  double hotspot_accuracy = 0.0;
  double avg_error = 0.0;
  double max_error = 0.0;
};

/// Reruns the full train/predict pipeline once per observation-noise scale,
/// holding everything else fixed, and assesses each prediction year against
/// the held-out observations. Rows come back sorted ascending by (r, year).
/// When p0 is not given, the initial covariance scale follows r.
std::vector<SensitivityRow> sensitivity_analysis(const CountyPanel& panel,
                                                 const NoiseConfig& base,
                                                 const Schedule& schedule,
                                                 std::vector<double> scales,
                                                 std::optional<double> p0 = std::nullopt,
                                                 const AssessOptions& opts = {});

struct HorizonErrors {
  int year = 0;
  Eigen::VectorXd abs_errors;
  double max_error = 0.0;
};

struct TrainingVariant {
  int train_year_count = 0;
  std::vector<HorizonErrors> years;  // one entry per predicted year
};

/// Degradation study: train on progressively fewer years (k = 4 down to
/// min_train_years) and forecast every remaining year through the end of
/// the panel. The fully trained variant (all years but the last) leads the
/// result as the comparison baseline.
std::vector<TrainingVariant> multi_year_study(const CountyPanel& panel, const NoiseConfig& noise,
                                              std::optional<double> p0, int min_train_years);

/// Summary table row (`variable,year,avg_general_acc,hotspot_acc,avg_error,max_error`).
struct SummaryRow {
  std::string variable;
  int year = 0;
  double avg_general_acc = 0.0;
  double hotspot_acc = 0.0;
  double avg_error = 0.0;
  double max_error = 0.0;
};

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& file);

}  // namespace skf
