#pragma once

#include "skf/analysis.hpp"
#include "skf/config.hpp"
#include "skf/geometry.hpp"

#include <filesystem>
#include <vector>

namespace skf {

/// Loads the rate panel named by the config, aligned to the landscape, and
/// applies the cleaning steps its dataset calls for: biennial interpolation,
/// then the single-county progression correction.
CountyPanel load_clean_panel(const RunConfig& config, const CentroidTable& landscape);

struct PipelineResult {
  std::vector<YearlyAssessment> assessments;    // ascending year
  std::vector<SummaryRow> summary;              // one row per assessed year
  std::vector<std::filesystem::path> written;   // every artifact, emit order
};

/// End-to-end run: ingest, covariance, filter, assessment, artifacts.
/// Writes the cleaned panel, missing mask, per-year state snapshots,
/// per-year assessments, a summary table, the effective config, and (for
/// prediction years) maps plus error histograms under config.output_dir.
/// Outputs are byte-identical across invocations with identical inputs.
/// An empty predict_years runs training only and assesses the train years.
PipelineResult cmd_run(const RunConfig& config);

/// Repeats the run under each observation-noise scale and tabulates the
/// prediction-year metrics to `<dataset>_sensitivity.csv`, ascending in r.
/// When the config pins initial_covariance_scale it is held fixed; otherwise
/// the initial covariance follows each scale.
std::vector<SensitivityRow> cmd_sensitivity(const RunConfig& config, std::vector<double> scales);

/// Degrades the training window from the full span down to one year and
/// emits, per reduced run, an error-histogram comparison against the fully
/// trained baseline for the final year (all predicted years with the flag),
/// plus a study summary table.
std::vector<TrainingVariant> cmd_multiyear(const RunConfig& config,
                                           bool all_predicted_years = false);

/// Re-renders maps and the error histogram from a saved assessment CSV named
/// `<dataset>_<year>_assessment.csv`. The missing mask CSV is optional; when
/// given, that year's missing counties are painted as absent.
void cmd_render(const RunConfig& config, const std::filesystem::path& assessment_csv,
                const std::filesystem::path& missing_mask_csv = {});

/// Inverse of write_assessment_csv; aggregate metrics are recomputed from the
/// rows, counting only counties with a vulnerability level.
YearlyAssessment read_assessment_csv(const std::filesystem::path& file, int year);

}  // namespace skf
