#include "skf/pipeline.hpp"

#include "skf/csv.hpp"
#include "skf/errors.hpp"
#include "skf/render.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>

namespace skf {

namespace {

// Tags escaping errors with the pipeline stage that raised them, preserving
// the error type so exit codes stay meaningful.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(name) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(name) + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write " + file.string());
  out << text;
  if (!out) throw DataError("failed writing " + file.string());
}

CountyPanel truncate_after(const CountyPanel& panel, int last_year) {
  const auto idx = panel.year_index(last_year);
  if (idx < 0)
    throw DataError("year " + std::to_string(last_year) + " is not in the panel");
  CountyPanel out;
  out.fips_order = panel.fips_order;
  out.years.assign(panel.years.begin(), panel.years.begin() + idx + 1);
  out.values = panel.values.leftCols(idx + 1);
  out.missing = panel.missing.leftCols(idx + 1);
  return out;
}

struct Prepared {
  CentroidTable centroids;
  CountyPanel panel;
  std::shared_ptr<const SpatialCovariance> process;
};

Prepared prepare(const RunConfig& config) {
  stage("config", [&] { validate(config); });
  Prepared p;
  stage("ingest", [&] {
    p.centroids = CentroidTable::load_csv(config.centroids_path);
    p.panel = load_clean_panel(config, p.centroids);
  });
  stage("covariance", [&] {
    const double b = calibrate_decay(config.resolved_threshold_km());
    p.process = std::make_shared<SpatialCovariance>(
        build_process_covariance(p.centroids, b, config.earth_radius_km));
  });
  return p;
}

NoiseConfig noise_from(const RunConfig& config, const Prepared& p) {
  NoiseConfig noise;
  noise.process = p.process;
  noise.observation_scale = config.observation_scale;
  noise.joseph_update = config.joseph_update;
  return noise;
}

AssessOptions assess_options(const RunConfig& config) {
  AssessOptions opts;
  opts.hotspot.quantile = config.hotspot_quantile;
  opts.hotspot.count_ceil = config.hotspot_count_ceil;
  opts.exclude_missing = config.exclude_missing;
  return opts;
}

std::string phase_name(Phase phase) {
  return phase == Phase::predicted ? "predicted" : "updated";
}

}  // namespace

CountyPanel load_clean_panel(const RunConfig& config, const CentroidTable& landscape) {
  CountyPanel panel = load_panel(config.rates_path, config.dataset, landscape);
  if (traits(config.dataset).biennial) {
    panel = interpolate_biennial(panel);
    if (!config.rio_arriba_fips.empty())
      panel = apply_rio_arriba_fix(panel, config.rio_arriba_fips);
  }
  return panel;
}

PipelineResult cmd_run(const RunConfig& config) {
  Prepared p = prepare(config);
  const std::string ds(traits(config.dataset).name);
  const std::string units(traits(config.dataset).units);
  const bool training_only = config.predict_years.empty();
  if (training_only)
    stage("ingest", [&] { p.panel = truncate_after(p.panel, config.train_years.last); });

  const FilterRun fr = stage("filter", [&] {
    return run(p.panel, noise_from(config, p), config.train_years, config.predict_years,
               config.resolved_p0());
  });

  PipelineResult result;
  const AssessOptions opts = assess_options(config);
  stage("analysis", [&] {
    const auto assess = [&](int year, Phase phase) {
      const StateRecord* rec = fr.find(year, phase);
      result.assessments.push_back(assess_year(year, rec->mean, p.panel.column(year),
                                               p.panel.fips_order, p.panel.missing_in(year),
                                               opts));
    };
    const Phase train_phase =
        config.metrics_use_updated ? Phase::updated : Phase::predicted;
    for (int y = config.train_years.first; y <= config.train_years.last; ++y)
      assess(y, train_phase);
    for (int y = config.predict_years.first; y <= config.predict_years.last; ++y)
      assess(y, Phase::predicted);
    for (const auto& a : result.assessments)
      result.summary.push_back(SummaryRow{ds, a.year, a.avg_general_accuracy, a.hotspot_acc,
                                          a.avg_error, a.max_error});
  });

  stage("render", [&] {
    const auto& dir = config.output_dir;
    std::filesystem::create_directories(dir);
    const auto emit = [&](const std::filesystem::path& file) { result.written.push_back(file); };

    write_text(dir / (ds + "_config.txt"), serialize(config));
    emit(dir / (ds + "_config.txt"));
    write_panel_csv(p.panel, dir / (ds + "_panel.csv"));
    emit(dir / (ds + "_panel.csv"));
    write_missing_csv(p.panel, dir / (ds + "_missing_mask.csv"));
    emit(dir / (ds + "_missing_mask.csv"));

    for (const auto& rec : fr.records) {
      const auto file = dir / (ds + "_" + std::to_string(rec.year) + "_" +
                               phase_name(rec.phase) + "_state.csv");
      write_state_csv(rec, p.panel.fips_order, file);
      emit(file);
    }
    for (const auto& a : result.assessments) {
      const auto file = dir / (ds + "_" + std::to_string(a.year) + "_assessment.csv");
      write_assessment_csv(a, file);
      emit(file);
    }
    write_summary_csv(result.summary, dir / (ds + "_summary.csv"));
    emit(dir / (ds + "_summary.csv"));

    GeometryTable geometry;
    const bool maps = !config.geometry_path.empty();
    if (maps) geometry = GeometryTable::load_geojson(config.geometry_path);
    RenderOptions ropts;
    ropts.inset_alaska_hawaii = config.inset_alaska_hawaii;

    for (const auto& a : result.assessments) {
      if (training_only || a.year < config.predict_years.first) continue;
      const std::string base = ds + "_" + std::to_string(a.year) + "_";
      const std::vector<bool> missing = p.panel.missing_in(a.year);
      if (maps) {
        emit_heat_map(a, geometry, missing, dir / (base + "heat_map"), ropts);
        emit(dir / (base + "heat_map.geojson"));
        emit(dir / (base + "heat_map.svg"));
        emit_accuracy_map(a, geometry, missing, dir / (base + "accuracy_map"), ropts);
        emit(dir / (base + "accuracy_map.geojson"));
        emit(dir / (base + "accuracy_map.svg"));
        emit_hotspot_map(a, geometry, missing, HotspotMapMode::accuracy,
                         dir / (base + "hotspot_map"), ropts);
        emit(dir / (base + "hotspot_map.geojson"));
        emit(dir / (base + "hotspot_map.svg"));
        emit_hotspot_map(a, geometry, missing, HotspotMapMode::prediction,
                         dir / (base + "hotspot_prediction_map"), ropts);
        emit(dir / (base + "hotspot_prediction_map.geojson"));
        emit(dir / (base + "hotspot_prediction_map.svg"));
      }
      emit_error_histogram(a.abs_errors, config.histogram_bins, units,
                           dir / (base + "error_hist"));
      emit(dir / (base + "error_hist.csv"));
      emit(dir / (base + "error_hist.svg"));
    }
  });
  return result;
}

std::vector<SensitivityRow> cmd_sensitivity(const RunConfig& config,
                                            std::vector<double> scales) {
  if (config.predict_years.empty())
    throw ConfigError("sensitivity analysis needs at least one prediction year");
  Prepared p = prepare(config);
  const std::string ds(traits(config.dataset).name);

  const Schedule schedule{config.train_years, config.predict_years};
  const auto rows = stage("analysis", [&] {
    return sensitivity_analysis(p.panel, noise_from(config, p), schedule, std::move(scales),
                                config.initial_covariance_scale, assess_options(config));
  });

  stage("render", [&] {
    std::filesystem::create_directories(config.output_dir);
    std::vector<std::string> lines;
    lines.emplace_back("r,variable,year,avg_general_acc,hotspot_acc,avg_error,max_error");
    for (const auto& row : rows)
      lines.push_back(csv::format_double(row.r) + "," + ds + "," + std::to_string(row.year) +
                      "," + csv::format_double(row.avg_general_accuracy) + "," +
                      csv::format_double(row.hotspot_accuracy) + "," +
                      csv::format_double(row.avg_error) + "," +
                      csv::format_double(row.max_error));
    csv::write_lines(config.output_dir / (ds + "_sensitivity.csv"), lines);
  });
  return rows;
}

std::vector<TrainingVariant> cmd_multiyear(const RunConfig& config, bool all_predicted_years) {
  Prepared p = prepare(config);
  const std::string ds(traits(config.dataset).name);
  const std::string units(traits(config.dataset).units);

  const auto variants = stage("analysis", [&] {
    return multi_year_study(p.panel, noise_from(config, p), config.initial_covariance_scale, 1);
  });

  stage("render", [&] {
    const auto& dir = config.output_dir;
    std::filesystem::create_directories(dir);

    std::vector<std::string> lines;
    lines.emplace_back("train_year_count,year,avg_general_acc,avg_error,max_error");
    for (const auto& v : variants)
      for (const auto& h : v.years) {
        const double avg = h.abs_errors.mean();
        const double acc = h.max_error > 0.0 ? 1.0 - avg / h.max_error : 1.0;
        lines.push_back(std::to_string(v.train_year_count) + "," + std::to_string(h.year) +
                        "," + csv::format_double(acc) + "," + csv::format_double(avg) + "," +
                        csv::format_double(h.max_error));
      }
    csv::write_lines(dir / (ds + "_multiyear.csv"), lines);

    // Baseline errors for `year`: the best-trained variant that still
    // predicts it, among those trained longer than `more_than` years.
    const auto reference_for = [&](int year, int more_than) -> const Eigen::VectorXd* {
      const TrainingVariant* best = nullptr;
      const HorizonErrors* best_h = nullptr;
      for (const auto& v : variants) {
        if (v.train_year_count <= more_than) continue;
        for (const auto& h : v.years)
          if (h.year == year &&
              (best == nullptr || v.train_year_count > best->train_year_count)) {
            best = &v;
            best_h = &h;
          }
      }
      return best_h == nullptr ? nullptr : &best_h->abs_errors;
    };

    const int full = variants.front().train_year_count;
    for (const auto& v : variants) {
      if (v.train_year_count == full) continue;
      for (const auto& h : v.years) {
        if (!all_predicted_years && h.year != v.years.back().year) continue;
        const auto base = dir / (ds + "_" + std::to_string(h.year) + "_trained_" +
                                 std::to_string(v.train_year_count) + "_hist");
        const Eigen::VectorXd* ref = reference_for(h.year, v.train_year_count);
        if (ref != nullptr)
          emit_error_histogram_comparison(*ref, h.abs_errors, config.histogram_bins, units,
                                          base);
        else
          emit_error_histogram(h.abs_errors, config.histogram_bins, units, base);
      }
    }
  });
  return variants;
}

void cmd_render(const RunConfig& config, const std::filesystem::path& assessment_csv,
                const std::filesystem::path& missing_mask_csv) {
  const std::string stem = assessment_csv.stem().string();
  const std::string suffix = "_assessment";
  if (stem.size() <= suffix.size() || stem.substr(stem.size() - suffix.size()) != suffix)
    throw ConfigError("expected a file named <dataset>_<year>_assessment.csv, got " +
                      assessment_csv.string());
  const std::string head = stem.substr(0, stem.size() - suffix.size());
  const auto us = head.rfind('_');
  if (us == std::string::npos)
    throw ConfigError("cannot read a year from file name " + assessment_csv.string());
  int year = 0;
  try {
    year = csv::parse_int(head.substr(us + 1));
  } catch (const DataError&) {
    throw ConfigError("cannot read a year from file name " + assessment_csv.string());
  }
  const std::string label = head.substr(0, us);

  if (config.geometry_path.empty())
    throw ConfigError("geometry is required to re-render maps");
  if (!std::filesystem::exists(config.geometry_path))
    throw ConfigError("missing file for geometry: " + config.geometry_path.string());

  const YearlyAssessment a =
      stage("ingest", [&] { return read_assessment_csv(assessment_csv, year); });

  std::vector<bool> missing;
  if (!missing_mask_csv.empty()) {
    stage("ingest", [&] {
      const auto rows = csv::read(missing_mask_csv);
      if (rows.empty()) throw DataError(missing_mask_csv.string() + ": empty mask");
      std::ptrdiff_t col = -1;
      for (std::size_t j = 1; j < rows.front().fields.size(); ++j)
        if (rows.front().fields[j] == std::to_string(year))
          col = static_cast<std::ptrdiff_t>(j);
      if (col < 0)
        throw DataError(missing_mask_csv.string() + ": no column for year " +
                        std::to_string(year));
      std::map<std::string, bool> by_fips;
      for (std::size_t i = 1; i < rows.size(); ++i)
        by_fips[rows[i].fields.front()] =
            rows[i].fields[static_cast<std::size_t>(col)] == "1";
      missing.reserve(a.fips_order.size());
      for (const auto& f : a.fips_order) {
        const auto it = by_fips.find(f);
        missing.push_back(it != by_fips.end() && it->second);
      }
    });
  }

  stage("render", [&] {
    const auto& dir = config.output_dir;
    std::filesystem::create_directories(dir);
    GeometryTable geometry = GeometryTable::load_geojson(config.geometry_path);
    RenderOptions ropts;
    ropts.inset_alaska_hawaii = config.inset_alaska_hawaii;
    const std::string base = label + "_" + std::to_string(year) + "_";
    emit_heat_map(a, geometry, missing, dir / (base + "heat_map"), ropts);
    emit_accuracy_map(a, geometry, missing, dir / (base + "accuracy_map"), ropts);
    emit_hotspot_map(a, geometry, missing, HotspotMapMode::accuracy,
                     dir / (base + "hotspot_map"), ropts);
    emit_hotspot_map(a, geometry, missing, HotspotMapMode::prediction,
                     dir / (base + "hotspot_prediction_map"), ropts);
    emit_error_histogram(a.abs_errors, config.histogram_bins,
                         std::string(traits(config.dataset).units),
                         dir / (base + "error_hist"));
  });
}

YearlyAssessment read_assessment_csv(const std::filesystem::path& file, int year) {
  const auto rows = csv::read(
      file, "fips,abs_error,general_accuracy,level,cdf,is_actual_hotspot,is_predicted_hotspot");
  if (rows.empty()) throw DataError(file.string() + ": no assessment rows");

  YearlyAssessment a;
  a.year = year;
  const auto n = static_cast<Eigen::Index>(rows.size());
  a.abs_errors.resize(n);
  a.general_acc.resize(n);
  a.levels.resize(n);
  a.cdf.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    const std::string where = file.string() + ":" + std::to_string(r.line_no) + ": ";
    if (r.fields.size() != 7) throw DataError(where + "expected 7 fields");
    try {
      a.fips_order.push_back(csv::parse_fips(r.fields[0]));
      a.abs_errors[i] = csv::parse_double(r.fields[1]);
      a.general_acc[i] = csv::parse_double(r.fields[2]);
      a.levels[i] = csv::parse_int(r.fields[3]);
      a.cdf[i] = csv::parse_double(r.fields[4]);
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    if (a.levels[i] < 0 || a.levels[i] > 20)
      throw DataError(where + "vulnerability level out of range");
    a.included.push_back(a.levels[i] != 0);
    if (r.fields[5] == "1") a.actual_hotspots.insert(a.fips_order.back());
    if (r.fields[6] == "1") a.predicted_hotspots.insert(a.fips_order.back());
  }

  a.max_error = 0.0;
  a.avg_error = 0.0;
  a.avg_general_accuracy = 0.0;
  Eigen::Index included = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!a.included[static_cast<std::size_t>(i)]) continue;
    ++included;
    a.max_error = std::max(a.max_error, a.abs_errors[i]);
    a.avg_error += a.abs_errors[i];
    a.avg_general_accuracy += a.general_acc[i];
  }
  if (included > 0) {
    a.avg_error /= static_cast<double>(included);
    a.avg_general_accuracy /= static_cast<double>(included);
  }
  a.hotspot_acc = a.actual_hotspots.empty()
                      ? 0.0
                      : hotspot_accuracy(a.predicted_hotspots, a.actual_hotspots);
  return a;
}

}  // namespace skf
