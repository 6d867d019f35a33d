#include "skf/filter.hpp"

#include "skf/csv.hpp"
#include "skf/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace skf {

namespace {

void check_noise(const NoiseConfig& noise) {
  if (!noise.process) throw std::invalid_argument("noise config has no process covariance");
  if (!(noise.observation_scale > 0.0) || !std::isfinite(noise.observation_scale))
    throw std::invalid_argument("observation scale must be positive and finite");
}

void check_dim(const FilterState& state, const NoiseConfig& noise) {
  const auto d = noise.process->dim();
  if (state.mean.size() != d || state.covariance.rows() != d || state.covariance.cols() != d)
    throw std::invalid_argument("state dimension does not match process covariance");
}

}  // namespace

FilterState init_state(const Eigen::VectorXd& initial_observation, const NoiseConfig& noise,
                       double initial_covariance_scale, int year) {
  check_noise(noise);
  if (initial_observation.size() != noise.process->dim())
    throw std::invalid_argument("initial observation length does not match process covariance");
  if (!(initial_covariance_scale >= 0.0) || !std::isfinite(initial_covariance_scale))
    throw std::invalid_argument("initial covariance scale must be non-negative and finite");

  FilterState s;
  s.mean = initial_observation;
  s.covariance = Eigen::MatrixXd::Zero(initial_observation.size(), initial_observation.size());
  s.covariance.diagonal().setConstant(initial_covariance_scale);
  s.year = year;
  s.phase = Phase::updated;
  return s;
}

FilterState predict(const FilterState& state, const NoiseConfig& noise) {
  check_noise(noise);
  check_dim(state, noise);
  if (state.phase != Phase::updated)
    throw std::logic_error("predict called on an already predicted state; chained forecasts go through run()");

  FilterState s;
  s.mean = state.mean;
  s.covariance = state.covariance + noise.process->matrix;
  s.year = state.year + 1;
  s.phase = Phase::predicted;
  return s;
}

FilterState update(const FilterState& state, const Eigen::VectorXd& observation,
                   const NoiseConfig& noise) {
  check_noise(noise);
  check_dim(state, noise);
  if (state.phase != Phase::predicted)
    throw std::logic_error("update requires a predicted state");
  if (observation.size() != state.mean.size())
    throw std::invalid_argument("observation length does not match state dimension");

  const double r = noise.observation_scale;
  const Eigen::MatrixXd& p = state.covariance;

  // S = P + r I, factorized in place; never inverted explicitly.
  Eigen::MatrixXd s_mat = p;
  s_mat.diagonal().array() += r;
  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(s_mat);
  if (llt.info() != Eigen::Success)
    throw NumericalError("innovation covariance not positive definite at year " +
                         std::to_string(state.year));

  FilterState out;
  out.year = state.year;
  out.phase = Phase::updated;

  const Eigen::VectorXd innovation = observation - state.mean;
  // K v = P S^-1 v
  out.mean = state.mean + p * llt.solve(innovation);

  // X = S^-1 P, so K = X' and (I - K) P = P - P X.
  const Eigen::MatrixXd x = llt.solve(p);
  if (noise.joseph_update) {
    Eigen::MatrixXd a = -x.transpose();
    a.diagonal().array() += 1.0;  // A = I - K
    out.covariance = a * p * a.transpose() + r * (x.transpose() * x);
  } else {
    out.covariance = p - p * x;
  }
  out.covariance = ((out.covariance + out.covariance.transpose()) / 2.0).eval();
  return out;
}

Eigen::VectorXd marginal_std(const FilterState& state) {
  Eigen::VectorXd out(state.covariance.rows());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    double v = state.covariance(i, i);
    if (v < -1e-9)
      throw NumericalError("negative covariance diagonal at index " + std::to_string(i) +
                           " (" + std::to_string(v) + ")");
    if (v < 0.0) v = 0.0;
    out[i] = std::sqrt(v);
  }
  return out;
}

const StateRecord* FilterRun::find(int year, Phase phase) const {
  for (const auto& r : records)
    if (r.year == year && r.phase == phase) return &r;
  return nullptr;
}

FilterRun run(const CountyPanel& panel, const NoiseConfig& noise, const YearRange& train_years,
              const YearRange& predict_years, double initial_covariance_scale,
              const StateObserver& observer) {
  check_noise(noise);
  if (panel.year_count() < 1) throw DataError("panel has no years");
  if (panel.county_count() != noise.process->dim())
    throw std::invalid_argument("panel county count does not match process covariance");

  // The two ranges must partition the panel years after the init year,
  // training first.
  const int init_year = panel.years.front();
  const int last_year = panel.years.back();
  int cursor = init_year + 1;
  if (!train_years.empty()) {
    if (train_years.first != cursor)
      throw DataError("training years must start at " + std::to_string(cursor));
    cursor = train_years.last + 1;
  }
  if (!predict_years.empty()) {
    if (predict_years.first != cursor)
      throw DataError("prediction years must start at " + std::to_string(cursor));
    cursor = predict_years.last + 1;
  }
  if (cursor != last_year + 1)
    throw DataError("train/predict ranges must cover the panel years through " +
                    std::to_string(last_year));

  FilterRun result;
  const auto record = [&](const FilterState& s) {
    StateRecord r;
    r.year = s.year;
    r.phase = s.phase;
    r.mean = s.mean;
    r.std = marginal_std(s);
    result.records.push_back(std::move(r));
    if (observer) observer(s);
  };

  FilterState state = init_state(panel.column(init_year), noise, initial_covariance_scale, init_year);
  record(state);

  for (int year = train_years.first; !train_years.empty() && year <= train_years.last; ++year) {
    state = predict(state, noise);
    record(state);
    state = update(state, panel.column(year), noise);
    record(state);
  }

  // Forecast years: no refinement. Covariance is anchored on the last
  // updated state so k consecutive forecasts carry exactly P + k * Q.
  const Eigen::MatrixXd anchor_cov = state.covariance;
  const Eigen::VectorXd anchor_mean = state.mean;
  int steps = 0;
  for (int year = predict_years.first; !predict_years.empty() && year <= predict_years.last; ++year) {
    ++steps;
    FilterState s;
    s.mean = anchor_mean;
    s.covariance = anchor_cov + static_cast<double>(steps) * noise.process->matrix;
    s.year = year;
    s.phase = Phase::predicted;
    record(s);
    state = std::move(s);
  }

  return result;
}

void write_state_csv(const StateRecord& record, const std::vector<std::string>& fips_order,
                     const std::filesystem::path& file) {
  if (static_cast<Eigen::Index>(fips_order.size()) != record.mean.size())
    throw std::invalid_argument("fips order length does not match state dimension");
  std::vector<std::string> lines;
  lines.reserve(fips_order.size() + 1);
  lines.emplace_back("fips,mean,std");
  for (std::size_t i = 0; i < fips_order.size(); ++i) {
    lines.push_back(fips_order[i] + "," + csv::format_double(record.mean[i]) + "," +
                    csv::format_double(record.std[i]));
  }
  csv::write_lines(file, lines);
}

}  // namespace skf
