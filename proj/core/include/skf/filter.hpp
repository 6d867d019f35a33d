#pragma once

#include "skf/geo.hpp"
#include "skf/panel.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

namespace skf {

/// Noise model: process covariance Q (spatial kernel, shared across runs)
/// and observation covariance R = observation_scale * I.
struct NoiseConfig {
  std::shared_ptr<const SpatialCovariance> process;
  double observation_scale = 0.01;
  // Joseph-form covariance update for ill-conditioned runs; default is
  // (I - K) P followed by forced symmetrization.
  bool joseph_update = false;
};

enum class Phase { predicted, updated };

/// State mean and error covariance at one point of the predict/update cycle.
/// States are immutable: every step returns a new one.
struct FilterState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  int year = 0;
  Phase phase = Phase::updated;
};

/// Starts the recursion from an observed column: mean = observation,
/// covariance = p0 * I, phase = updated (so the first step is a predict).
FilterState init_state(const Eigen::VectorXd& initial_observation, const NoiseConfig& noise,
                       double initial_covariance_scale, int year);

/// Prediction step with identity dynamics: mean unchanged, covariance += Q,
/// year incremented. Requires phase == updated; chaining predicts is only
/// sanctioned through run().
FilterState predict(const FilterState& state, const NoiseConfig& noise);

/// Measurement update with identity observation model. With S = P + r I and
/// K = P S^-1: mean += K (observation - mean), covariance = (I - K) P,
/// re-symmetrized. S is factorized (SPD Cholesky); its inverse is never
/// formed. Throws NumericalError (carrying the year) if S is not numerically
/// positive definite.
FilterState update(const FilterState& state, const Eigen::VectorXd& observation,
                   const NoiseConfig& noise);

/// Per-county standard deviations: sqrt of the covariance diagonal.
/// Diagonal entries in [-1e-9, 0) clamp to zero; anything lower throws.
Eigen::VectorXd marginal_std(const FilterState& state);

/// Inclusive year range; first > last means empty.
struct YearRange {
  int first = 0;
  int last = -1;

  bool empty() const { return first > last; }
  int size() const { return empty() ? 0 : last - first + 1; }
  bool contains(int y) const { return y >= first && y <= last; }
};

/// Mean and marginal standard deviation recorded for one step of a run.
/// The full covariance is not retained (a d x d matrix per recorded year
/// would dominate memory at national scale); pass an observer to run() when
/// complete states are needed.
struct StateRecord {
  int year = 0;
  Phase phase = Phase::updated;
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
};

struct FilterRun {
  std::vector<StateRecord> records;  // protocol order

  const StateRecord* find(int year, Phase phase) const;
};

using StateObserver = std::function<void(const FilterState&)>;

/// Full pass over a panel: initialize from the first panel year, then for
/// each training year predict and update (both recorded), then for each
/// prediction year predict only. The two ranges must partition the panel
/// years after the initialization year, with predictions last. Consecutive
/// forecast steps are computed from the last updated state as P + k * Q, so
/// forecast covariance growth is exactly linear.
FilterRun run(const CountyPanel& panel, const NoiseConfig& noise, const YearRange& train_years,
              const YearRange& predict_years, double initial_covariance_scale,
              const StateObserver& observer = {});

/// State snapshot export, header `fips,mean,std`.
void write_state_csv(const StateRecord& record, const std::vector<std::string>& fips_order,
                     const std::filesystem::path& file);

}  // namespace skf
