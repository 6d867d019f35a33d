#include "skf/filter.hpp"

#include "skf/errors.hpp"
#include "kalman_oracle.hpp"
#include "synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <memory>
#include <random>

using namespace skf;

namespace {

NoiseConfig synth_noise(const CentroidTable& table, double r, double threshold_km = 400.0) {
  NoiseConfig noise;
  noise.process = std::make_shared<SpatialCovariance>(
      build_process_covariance(table, calibrate_decay(threshold_km)));
  noise.observation_scale = r;
  return noise;
}

double rel_diff(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

}  // namespace

TEST_CASE("initialization adopts the first observation") {
  const auto table = skf_test::synth_centroids(6, 1);
  const auto noise = synth_noise(table, 0.01);
  Eigen::VectorXd obs(6);
  obs << 1, 2, 3, 4, 5, 6;
  const FilterState s = init_state(obs, noise, 0.01, 2014);
  CHECK(s.mean == obs);
  CHECK(s.covariance == Eigen::MatrixXd(0.01 * Eigen::MatrixXd::Identity(6, 6)));
  CHECK(s.year == 2014);
  CHECK(s.phase == Phase::updated);
  CHECK_THROWS_AS(init_state(obs, noise, -1.0, 2014), std::invalid_argument);
  CHECK_THROWS_AS(init_state(Eigen::VectorXd::Zero(4), noise, 0.01, 2014),
                  std::invalid_argument);
}

TEST_CASE("predict adds the process covariance and advances the year") {
  const auto table = skf_test::synth_centroids(5, 2);
  const auto noise = synth_noise(table, 0.01);
  const Eigen::VectorXd obs = Eigen::VectorXd::Constant(5, 10.0);
  const FilterState s0 = init_state(obs, noise, 0.02, 2014);

  const FilterState s1 = predict(s0, noise);
  CHECK(s1.phase == Phase::predicted);
  CHECK(s1.year == 2015);
  CHECK(s1.mean == obs);
  CHECK(s1.covariance == Eigen::MatrixXd(s0.covariance + noise.process->matrix));

  // a second predict without an update is a protocol violation
  CHECK_THROWS_AS(predict(s1, noise), std::logic_error);
}

TEST_CASE("update requires a prediction first") {
  const auto table = skf_test::synth_centroids(4, 3);
  const auto noise = synth_noise(table, 0.01);
  const FilterState s = init_state(Eigen::VectorXd::Zero(4), noise, 0.01, 2014);
  CHECK_THROWS_AS(update(s, Eigen::VectorXd::Zero(4), noise), std::logic_error);
}

TEST_CASE("scalar update matches the closed form") {
  // prior N(0, 1) after predict, observation 1.0 with r = 0.01:
  // posterior mean 1/1.01, posterior variance 0.01/1.01
  const auto table = CentroidTable::from_rows({{"00001", {40.0, -100.0}}});
  const auto noise = synth_noise(table, 0.01, 100.0);

  const FilterState s0 = init_state(Eigen::VectorXd::Zero(1), noise, 0.0, 2014);
  const FilterState s1 = predict(s0, noise);  // variance becomes exactly 1
  REQUIRE(s1.covariance(0, 0) == 1.0);
  const FilterState s2 = update(s1, Eigen::VectorXd::Ones(1), noise);

  CHECK(std::abs(s2.mean[0] - 1.0 / 1.01) <= 1e-12);
  CHECK(std::abs(s2.covariance(0, 0) - 0.01 / 1.01) <= 1e-12);
  CHECK(s2.phase == Phase::updated);
  CHECK(s2.year == 2015);
}

TEST_CASE("filter matches the dense reference on random instances") {
  std::mt19937 seeds(2024);
  for (int instance = 0; instance < 12; ++instance) {
    const int d = 2 + static_cast<int>(seeds() % 9);
    const int t = 2 + static_cast<int>(seeds() % 7);
    const auto table = skf_test::synth_centroids(d, seeds());
    const auto panel = skf_test::synth_panel(table.fips(), 2014, t, seeds());
    const double r = 0.01 + 0.01 * static_cast<double>(instance % 3);
    const auto noise = synth_noise(table, r);

    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd obs_cov = r * identity;
    skf_test::OracleState ref{panel.values.col(0), r * identity};

    FilterState s = init_state(panel.values.col(0), noise, r, 2014);
    for (int k = 1; k < t; ++k) {
      s = predict(s, noise);
      ref = skf_test::oracle_predict(ref, identity, noise.process->matrix);
      s = update(s, panel.values.col(k), noise);
      ref = skf_test::oracle_update(ref, identity, obs_cov, panel.values.col(k));
      for (int i = 0; i < d; ++i) {
        CHECK(rel_diff(s.mean[i], ref.mean[i]) <= 1e-8);
        for (int j = 0; j < d; ++j)
          CHECK(rel_diff(s.covariance(i, j), ref.cov(i, j)) <= 1e-8);
      }
    }
  }
}

TEST_CASE("update contracts the marginal variances") {
  const auto table = skf_test::synth_centroids(12, 9);
  const auto noise = synth_noise(table, 0.05);
  const auto panel = skf_test::synth_panel(table.fips(), 2014, 4, 10);
  FilterState s = init_state(panel.values.col(0), noise, 0.05, 2014);
  for (int k = 1; k < 4; ++k) {
    const FilterState prior = predict(s, noise);
    s = update(prior, panel.values.col(k), noise);
    for (int i = 0; i < 12; ++i)
      CHECK(s.covariance(i, i) <= prior.covariance(i, i) + 1e-10);
  }
}

TEST_CASE("an overwhelming observation noise leaves the mean unchanged") {
  const auto table = skf_test::synth_centroids(8, 13);
  const auto noise = synth_noise(table, 1e12);
  const auto panel = skf_test::synth_panel(table.fips(), 2014, 2, 14);
  const FilterState s0 = init_state(panel.values.col(0), noise, 0.01, 2014);
  const FilterState prior = predict(s0, noise);
  const FilterState post = update(prior, panel.values.col(1), noise);
  for (int i = 0; i < 8; ++i)
    CHECK(std::abs(post.mean[i] - prior.mean[i]) <=
          1e-6 * (1.0 + std::abs(prior.mean[i])));
}

TEST_CASE("joseph update agrees with the standard form") {
  const auto table = skf_test::synth_centroids(10, 15);
  const auto panel = skf_test::synth_panel(table.fips(), 2014, 3, 16);
  const auto standard = synth_noise(table, 0.01);
  NoiseConfig joseph = standard;
  joseph.joseph_update = true;

  FilterState a = init_state(panel.values.col(0), standard, 0.01, 2014);
  FilterState b = init_state(panel.values.col(0), joseph, 0.01, 2014);
  for (int k = 1; k < 3; ++k) {
    a = update(predict(a, standard), panel.values.col(k), standard);
    b = update(predict(b, joseph), panel.values.col(k), joseph);
  }
  for (int i = 0; i < 10; ++i) {
    CHECK(rel_diff(a.mean[i], b.mean[i]) <= 1e-8);
    for (int j = 0; j < 10; ++j)
      CHECK(rel_diff(a.covariance(i, j), b.covariance(i, j)) <= 1e-8);
  }
  // the Joseph-form result is symmetric like the standard one
  CHECK(b.covariance == Eigen::MatrixXd(b.covariance.transpose()));
}

TEST_CASE("update reports an indefinite innovation covariance") {
  auto broken = std::make_shared<SpatialCovariance>();
  broken->matrix = -2.0 * Eigen::MatrixXd::Identity(3, 3);
  broken->decay_rate = 0.1;
  NoiseConfig noise;
  noise.process = broken;
  noise.observation_scale = 0.01;

  const FilterState s = init_state(Eigen::VectorXd::Zero(3), noise, 0.01, 2014);
  const FilterState prior = predict(s, noise);
  CHECK_THROWS_WITH_AS(update(prior, Eigen::VectorXd::Zero(3), noise),
                       doctest::Contains("not positive definite"), NumericalError);
}

TEST_CASE("marginal standard deviations clamp rounding noise only") {
  FilterState s;
  s.mean = Eigen::VectorXd::Zero(3);
  s.covariance = Eigen::MatrixXd::Identity(3, 3);
  s.covariance(1, 1) = -1e-10;  // rounding-level negative variance
  const Eigen::VectorXd sd = marginal_std(s);
  CHECK(sd[0] == 1.0);
  CHECK(sd[1] == 0.0);

  s.covariance(1, 1) = -1.0;
  CHECK_THROWS_AS(marginal_std(s), NumericalError);
}

TEST_CASE("run enforces the year partition") {
  const auto table = skf_test::synth_centroids(5, 17);
  const auto noise = synth_noise(table, 0.01);
  const auto panel = skf_test::synth_panel(table.fips(), 2014, 7, 18);

  // training must start the year after initialization
  CHECK_THROWS_AS(run(panel, noise, YearRange{2016, 2019}, YearRange{2020, 2020}, 0.01),
                  DataError);
  // prediction must follow training with no gap
  CHECK_THROWS_AS(run(panel, noise, YearRange{2015, 2018}, YearRange{2020, 2020}, 0.01),
                  DataError);
  // the partition must reach the end of the panel
  CHECK_THROWS_AS(run(panel, noise, YearRange{2015, 2018}, YearRange{2019, 2019}, 0.01),
                  DataError);
  CHECK_THROWS_AS(run(panel, noise, YearRange{2015, 2019}, YearRange{2020, 2021}, 0.01),
                  DataError);
  CHECK_NOTHROW(run(panel, noise, YearRange{2015, 2019}, YearRange{2020, 2020}, 0.01));
}

TEST_CASE("run records the full predict and update trajectory") {
  const auto table = skf_test::synth_centroids(6, 19);
  const auto noise = synth_noise(table, 0.01);
  const auto panel = skf_test::synth_panel(table.fips(), 2014, 7, 20);

  const FilterRun fr =
      run(panel, noise, YearRange{2015, 2018}, YearRange{2019, 2020}, 0.01);
  // init + 4 training years x 2 phases + 2 prediction years
  CHECK(fr.records.size() == 1 + 4 * 2 + 2);
  CHECK(fr.records.front().year == 2014);
  CHECK(fr.records.front().phase == Phase::updated);
  REQUIRE(fr.find(2016, Phase::predicted) != nullptr);
  REQUIRE(fr.find(2016, Phase::updated) != nullptr);
  CHECK(fr.find(2019, Phase::updated) == nullptr);  // prediction years never update
  REQUIRE(fr.find(2020, Phase::predicted) != nullptr);
  CHECK(fr.find(2021, Phase::predicted) == nullptr);

  // prediction-year means stay frozen at the last trained mean
  const auto* trained = fr.find(2018, Phase::updated);
  REQUIRE(trained != nullptr);
  CHECK(fr.find(2019, Phase::predicted)->mean == trained->mean);
  CHECK(fr.find(2020, Phase::predicted)->mean == trained->mean);
}

TEST_CASE("chained forecasts accumulate the process covariance exactly") {
  const auto table = skf_test::synth_centroids(7, 23);
  const auto noise = synth_noise(table, 0.01);
  const auto panel = skf_test::synth_panel(table.fips(), 2014, 7, 24);

  Eigen::MatrixXd anchor;
  std::map<int, Eigen::MatrixXd> forecast_cov;
  const StateObserver observer = [&](const FilterState& s) {
    if (s.year == 2016 && s.phase == Phase::updated) anchor = s.covariance;
    if (s.year > 2016 && s.phase == Phase::predicted) forecast_cov[s.year] = s.covariance;
  };
  run(panel, noise, YearRange{2015, 2016}, YearRange{2017, 2020}, 0.01, observer);

  REQUIRE(anchor.size() > 0);
  REQUIRE(forecast_cov.size() == 4);
  for (int k = 1; k <= 4; ++k) {
    const Eigen::MatrixXd expected =
        anchor + static_cast<double>(k) * noise.process->matrix;
    CHECK(forecast_cov.at(2016 + k) == expected);  // bit-exact linear growth
  }
}

TEST_CASE("state snapshots export mean and spread per county") {
  const auto table = skf_test::synth_centroids(3, 29);
  const auto noise = synth_noise(table, 0.01);
  const auto panel = skf_test::synth_panel(table.fips(), 2014, 3, 30);
  const FilterRun fr =
      run(panel, noise, YearRange{2015, 2015}, YearRange{2016, 2016}, 0.01);

  skf_test::TempDir tmp("filter");
  const auto* rec = fr.find(2016, Phase::predicted);
  REQUIRE(rec != nullptr);
  write_state_csv(*rec, panel.fips_order, tmp.path / "state.csv");
  const std::string text = skf_test::read_file(tmp.path / "state.csv");
  CHECK(text.substr(0, 14) == "fips,mean,std\n");
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find("00001,") != std::string::npos);
}

TEST_CASE("year ranges") {
  const YearRange none{0, -1};
  CHECK(none.empty());
  CHECK(none.size() == 0);
  const YearRange span{2015, 2019};
  CHECK_FALSE(span.empty());
  CHECK(span.size() == 5);
  CHECK(span.contains(2015));
  CHECK(span.contains(2019));
  CHECK_FALSE(span.contains(2020));
}
