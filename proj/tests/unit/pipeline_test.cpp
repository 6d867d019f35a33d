#include "skf/pipeline.hpp"

#include "skf/errors.hpp"
#include "synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <string>

using namespace skf;

namespace {

RunConfig sample_config(const std::filesystem::path& out_dir, bool with_geometry = true) {
  RunConfig c;
  c.dataset = DatasetKind::mortality;
  c.rates_path = skf_test::test_data_dir() / "mortality_small.csv";
  c.centroids_path = skf_test::test_data_dir() / "centroids_small.csv";
  if (with_geometry) c.geometry_path = skf_test::test_data_dir() / "geometry_small.geojson";
  c.output_dir = out_dir;
  c.threshold_km = 250.0;
  c.train_years = YearRange{2015, 2019};
  c.predict_years = YearRange{2020, 2020};
  c.hotspot_quantile = 0.25;  // 3 of the 12 sample counties
  return c;
}

std::map<std::string, std::string> slurp_dir(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    out[entry.path().filename().string()] = skf_test::read_file(entry.path());
  return out;
}

}  // namespace

TEST_CASE("full pipeline writes one artifact set per run") {
  skf_test::TempDir tmp("run");
  const RunConfig config = sample_config(tmp.path / "out");
  const PipelineResult result = cmd_run(config);

  REQUIRE(result.assessments.size() == 6);  // 2015..2019 trained, 2020 predicted
  for (int i = 0; i < 6; ++i) CHECK(result.assessments[static_cast<std::size_t>(i)].year == 2015 + i);
  CHECK(result.summary.size() == 6);
  CHECK(result.summary.front().variable == "mortality");

  for (const auto& f : result.written) CHECK(std::filesystem::exists(f));

  const auto files = slurp_dir(tmp.path / "out");
  const char* expected[] = {
      "mortality_config.txt",
      "mortality_panel.csv",
      "mortality_missing_mask.csv",
      "mortality_2014_updated_state.csv",
      "mortality_2015_predicted_state.csv",
      "mortality_2015_updated_state.csv",
      "mortality_2019_predicted_state.csv",
      "mortality_2019_updated_state.csv",
      "mortality_2020_predicted_state.csv",
      "mortality_2015_assessment.csv",
      "mortality_2020_assessment.csv",
      "mortality_summary.csv",
      "mortality_2020_heat_map.geojson",
      "mortality_2020_heat_map.svg",
      "mortality_2020_accuracy_map.geojson",
      "mortality_2020_accuracy_map.svg",
      "mortality_2020_hotspot_map.geojson",
      "mortality_2020_hotspot_map.svg",
      "mortality_2020_hotspot_prediction_map.geojson",
      "mortality_2020_hotspot_prediction_map.svg",
      "mortality_2020_error_hist.csv",
      "mortality_2020_error_hist.svg",
  };
  for (const char* name : expected) CHECK(files.count(name) == 1);
  // figures cover prediction years only
  CHECK(files.count("mortality_2019_heat_map.geojson") == 0);
  CHECK(files.count("mortality_2019_error_hist.csv") == 0);
  CHECK(files.count("mortality_2020_updated_state.csv") == 0);
  CHECK(files.size() == result.written.size());

  // the summary mirrors the assessments row for row
  const std::string summary = files.at("mortality_summary.csv");
  CHECK(summary.rfind("variable,year,avg_general_acc,hotspot_acc,avg_error,max_error\n", 0) ==
        0);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 7);
  CHECK(summary.find("mortality,2020,") != std::string::npos);
}

TEST_CASE("reruns are byte-identical") {
  skf_test::TempDir tmp("det");
  const RunConfig config = sample_config(tmp.path / "out");
  cmd_run(config);
  const auto first = slurp_dir(tmp.path / "out");
  cmd_run(config);
  const auto second = slurp_dir(tmp.path / "out");
  REQUIRE(first.size() == second.size());
  for (const auto& [name, bytes] : first) {
    REQUIRE(second.count(name) == 1);
    CHECK_MESSAGE(bytes == second.at(name), name);
  }
}

TEST_CASE("an empty prediction range runs training only") {
  skf_test::TempDir tmp("trainonly");
  RunConfig config = sample_config(tmp.path / "out");
  config.predict_years = YearRange{0, -1};
  const PipelineResult result = cmd_run(config);

  REQUIRE(result.assessments.size() == 5);  // train years only
  CHECK(result.assessments.back().year == 2019);

  const auto files = slurp_dir(tmp.path / "out");
  for (const auto& [name, bytes] : files) {
    CHECK(name.find(".svg") == std::string::npos);
    CHECK(name.find(".geojson") == std::string::npos);
    CHECK(name.find("2020") == std::string::npos);  // panel truncated after 2019
  }
  CHECK(files.count("mortality_2019_predicted_state.csv") == 1);

  // the panel export ends at the training horizon
  const std::string panel = files.at("mortality_panel.csv");
  CHECK(panel.find("2019") != std::string::npos);
  CHECK(panel.find("2020") == std::string::npos);
}

TEST_CASE("training metrics can switch to the updated state") {
  skf_test::TempDir a_dir("predmetrics");
  RunConfig pred_cfg = sample_config(a_dir.path / "out", false);
  const PipelineResult pred = cmd_run(pred_cfg);

  skf_test::TempDir b_dir("updmetrics");
  RunConfig upd_cfg = sample_config(b_dir.path / "out", false);
  upd_cfg.metrics_use_updated = true;
  const PipelineResult upd = cmd_run(upd_cfg);

  // the updated state has absorbed the year's observation, so its training
  // error is strictly smaller on this data; the prediction year is unchanged
  CHECK(upd.assessments.front().avg_error < pred.assessments.front().avg_error);
  CHECK(upd.assessments.back().avg_error == pred.assessments.back().avg_error);
}

TEST_CASE("sensitivity table is sorted and consistent with single runs") {
  skf_test::TempDir tmp("sens");
  RunConfig config = sample_config(tmp.path / "out", false);
  const auto rows = cmd_sensitivity(config, {0.05, 0.01});
  REQUIRE(rows.size() == 2);  // one prediction year per scale
  CHECK(rows[0].r == 0.01);
  CHECK(rows[1].r == 0.05);

  const std::string csv =
      skf_test::read_file(tmp.path / "out" / "mortality_sensitivity.csv");
  CHECK(csv.rfind("r,variable,year,avg_general_acc,hotspot_acc,avg_error,max_error\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("0.01,mortality,2020,") != std::string::npos);

  // r = 0.01 with p0 following r matches the plain run exactly
  skf_test::TempDir run_dir("sensref");
  RunConfig ref_cfg = sample_config(run_dir.path / "out", false);
  const PipelineResult ref = cmd_run(ref_cfg);
  const SummaryRow& base = ref.summary.back();
  CHECK(rows[0].avg_general_accuracy == base.avg_general_acc);
  CHECK(rows[0].hotspot_accuracy == base.hotspot_acc);
  CHECK(rows[0].avg_error == base.avg_error);
  CHECK(rows[0].max_error == base.max_error);

  RunConfig no_predict = config;
  no_predict.predict_years = YearRange{0, -1};
  CHECK_THROWS_AS(cmd_sensitivity(no_predict, {0.01}), ConfigError);
}

TEST_CASE("multi-year study degrades the training window") {
  skf_test::TempDir tmp("multi");
  RunConfig config = sample_config(tmp.path / "out", false);
  const auto variants = cmd_multiyear(config);

  REQUIRE(variants.size() == 5);
  CHECK(variants[0].train_year_count == 5);
  CHECK(variants[4].train_year_count == 1);
  REQUIRE(variants[0].years.size() == 1);
  CHECK(variants[0].years[0].year == 2020);

  // the baseline variant equals the plain fully trained run
  skf_test::TempDir ref_dir("multiref");
  RunConfig ref_cfg = sample_config(ref_dir.path / "out", false);
  const PipelineResult ref = cmd_run(ref_cfg);
  CHECK(variants[0].years[0].abs_errors == ref.assessments.back().abs_errors);

  const auto files = slurp_dir(tmp.path / "out");
  CHECK(files.count("mortality_multiyear.csv") == 1);
  for (int k = 1; k <= 4; ++k) {
    CHECK(files.count("mortality_2020_trained_" + std::to_string(k) + "_hist.csv") == 1);
    CHECK(files.count("mortality_2020_trained_" + std::to_string(k) + "_hist.svg") == 1);
  }
  CHECK(files.count("mortality_2020_trained_5_hist.csv") == 0);  // baseline has no compare
  CHECK(files.count("mortality_2018_trained_2_hist.csv") == 0);  // non-final years off

  const std::string table = files.at("mortality_multiyear.csv");
  CHECK(table.rfind("train_year_count,year,avg_general_acc,avg_error,max_error\n", 0) == 0);
  // 1+2+3+4+5 prediction years across the five variants
  CHECK(std::count(table.begin(), table.end(), '\n') == 16);
  CHECK(table.find("5,2020,") != std::string::npos);
  CHECK(table.find("1,2016,") != std::string::npos);

  // reduced-training comparisons pair every predicted year when asked
  skf_test::TempDir all_dir("multiall");
  RunConfig all_cfg = sample_config(all_dir.path / "out", false);
  cmd_multiyear(all_cfg, true);
  const auto all_files = slurp_dir(all_dir.path / "out");
  CHECK(all_files.count("mortality_2018_trained_2_hist.csv") == 1);
  CHECK(all_files.count("mortality_2016_trained_1_hist.csv") == 1);
}

TEST_CASE("saved assessments re-render to identical figures") {
  skf_test::TempDir tmp("rerender");
  const RunConfig config = sample_config(tmp.path / "out");
  cmd_run(config);
  const auto original = slurp_dir(tmp.path / "out");

  RunConfig render_cfg = config;
  render_cfg.output_dir = tmp.path / "again";
  cmd_render(render_cfg, tmp.path / "out" / "mortality_2020_assessment.csv",
             tmp.path / "out" / "mortality_missing_mask.csv");
  const auto again = slurp_dir(tmp.path / "again");

  const char* names[] = {
      "mortality_2020_heat_map.geojson",       "mortality_2020_heat_map.svg",
      "mortality_2020_accuracy_map.geojson",   "mortality_2020_accuracy_map.svg",
      "mortality_2020_hotspot_map.geojson",    "mortality_2020_hotspot_map.svg",
      "mortality_2020_hotspot_prediction_map.geojson",
      "mortality_2020_hotspot_prediction_map.svg",
      "mortality_2020_error_hist.csv",         "mortality_2020_error_hist.svg",
  };
  for (const char* name : names) {
    REQUIRE_MESSAGE(again.count(name) == 1, name);
    CHECK_MESSAGE(again.at(name) == original.at(name), name);
  }

  // a mask is optional; without one no county renders as missing
  RunConfig bare_cfg = config;
  bare_cfg.output_dir = tmp.path / "bare";
  CHECK_NOTHROW(cmd_render(bare_cfg, tmp.path / "out" / "mortality_2020_assessment.csv"));

  CHECK_THROWS_AS(cmd_render(render_cfg, tmp.path / "out" / "mortality_summary.csv"),
                  ConfigError);
  RunConfig no_geo = render_cfg;
  no_geo.geometry_path.clear();
  CHECK_THROWS_AS(
      cmd_render(no_geo, tmp.path / "out" / "mortality_2020_assessment.csv"), ConfigError);
}

TEST_CASE("assessment files round trip through the reader") {
  skf_test::TempDir tmp("roundtrip");
  RunConfig config = sample_config(tmp.path / "out", false);
  const PipelineResult result = cmd_run(config);
  const YearlyAssessment& a = result.assessments.back();

  const YearlyAssessment back =
      read_assessment_csv(tmp.path / "out" / "mortality_2020_assessment.csv", 2020);
  CHECK(back.fips_order == a.fips_order);
  CHECK(back.abs_errors == a.abs_errors);
  CHECK(back.general_acc == a.general_acc);
  CHECK(back.cdf == a.cdf);
  CHECK(back.levels == a.levels);
  CHECK(back.actual_hotspots == a.actual_hotspots);
  CHECK(back.predicted_hotspots == a.predicted_hotspots);
  CHECK(back.hotspot_acc == a.hotspot_acc);
  CHECK(back.avg_error == doctest::Approx(a.avg_error).epsilon(1e-12));
  CHECK(back.max_error == a.max_error);

  skf_test::write_file(tmp.path / "bad_2020_assessment.csv", "who,what\n1,2\n");
  CHECK_THROWS_AS(read_assessment_csv(tmp.path / "bad_2020_assessment.csv", 2020), DataError);
  skf_test::write_file(tmp.path / "lvl_2020_assessment.csv",
                       "fips,abs_error,general_accuracy,level,cdf,is_actual_hotspot,"
                       "is_predicted_hotspot\n"
                       "01001,1,0.5,21,0.5,0,0\n");
  CHECK_THROWS_WITH_AS(read_assessment_csv(tmp.path / "lvl_2020_assessment.csv", 2020),
                       doctest::Contains("level"), DataError);
}

TEST_CASE("pipeline errors carry their stage") {
  skf_test::TempDir tmp("stages");
  RunConfig missing_rates = sample_config(tmp.path / "out", false);
  missing_rates.rates_path = tmp.path / "absent.csv";
  CHECK_THROWS_WITH_AS(cmd_run(missing_rates), doctest::Contains("config: "), ConfigError);
  CHECK_THROWS_WITH_AS(cmd_run(missing_rates), doctest::Contains("absent.csv"), ConfigError);

  RunConfig wrong_format = sample_config(tmp.path / "out", false);
  wrong_format.rates_path = skf_test::test_data_dir() / "centroids_small.csv";
  CHECK_THROWS_WITH_AS(cmd_run(wrong_format), doctest::Contains("ingest: "), DataError);
}

TEST_CASE("cleaning dispatch follows the dataset") {
  const auto centroids =
      CentroidTable::load_csv(skf_test::test_data_dir() / "centroids_small.csv");

  RunConfig biennial;
  biennial.dataset = DatasetKind::disability;
  biennial.rates_path = skf_test::test_data_dir() / "disability_small.csv";
  const CountyPanel panel = load_clean_panel(biennial, centroids);
  // odd years synthesized, correction applied to the named county
  const auto odd = panel.year_index(2017);
  REQUIRE(odd >= 0);
  const auto rio = static_cast<Eigen::Index>(6);  // 35039 in landscape order
  CHECK(panel.fips_order[static_cast<std::size_t>(rio)] == "35039");
  const double v2016 = panel.values(rio, panel.year_index(2016));
  const double v2020 = panel.values(rio, panel.year_index(2020));
  const double q = (v2020 - v2016) / 4.0;
  CHECK(panel.values(rio, panel.year_index(2017)) == v2016 + q);
  CHECK(panel.values(rio, panel.year_index(2018)) == v2016 + 2.0 * q);
  CHECK(panel.values(rio, panel.year_index(2019)) == v2016 + 3.0 * q);

  RunConfig no_fix = biennial;
  no_fix.rio_arriba_fips.clear();
  const CountyPanel untouched = load_clean_panel(no_fix, centroids);
  // without the correction, 2018 keeps its observed value
  CHECK(untouched.values(rio, untouched.year_index(2018)) == 60.5);
  CHECK(untouched.values(rio, untouched.year_index(2017)) ==
        untouched.values(rio, untouched.year_index(2016)) +
            (untouched.values(rio, untouched.year_index(2018)) -
             untouched.values(rio, untouched.year_index(2016))) /
                2.0);
}
