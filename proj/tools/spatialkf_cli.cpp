#include "skf/csv.hpp"
#include "skf/errors.hpp"
#include "skf/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace {

struct Override {
  std::string key;
  std::string value;
};

struct CommandArgs {
  std::string config_path;
  std::vector<Override> overrides;
};

// Every flag funnels through the config key set, so the file format and the
// command line cannot drift apart. Typed flags apply before --set overrides.
void bind_config_flags(CLI::App* cmd, CommandArgs& args) {
  cmd->add_option("--config", args.config_path, "flat key = value config file");

  const auto bind = [cmd, &args](const std::string& flag, const std::string& key,
                                 const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&args, key](const std::string& value) { args.overrides.push_back({key, value}); },
        help);
  };
  bind("--dataset", "dataset", "mortality, dispensing, or disability");
  bind("--rates", "rates", "rate CSV (fips,year,rate)");
  bind("--centroids", "centroids", "centroid CSV (fips,lat,lon)");
  bind("--geometry", "geometry", "county boundary GeoJSON; omit to skip maps");
  bind("--output-dir", "output_dir", "artifact directory (default out)");
  bind("--threshold-km", "threshold_km", "correlation half-distance in km");
  bind("--observation-scale", "observation_scale", "observation noise r (default 0.01)");
  bind("--initial-covariance-scale", "initial_covariance_scale",
       "initial covariance p0 (default r)");
  bind("--earth-radius-km", "earth_radius_km", "great-circle radius (default 6371)");
  bind("--train-years", "train_years", "training span, e.g. 2015-2019");
  bind("--predict-years", "predict_years", "prediction span, e.g. 2020, or none");
  bind("--hotspot-quantile", "hotspot_quantile", "hotspot share (default 0.05)");
  bind("--hotspot-count-ceil", "hotspot_count_ceil", "round the hotspot count up (true/false)");
  bind("--exclude-missing", "exclude_missing",
       "drop missing counties from metrics (true/false)");
  bind("--joseph-update", "joseph_update", "Joseph-form covariance update (true/false)");
  bind("--metrics-use-updated", "metrics_use_updated",
       "assess training years on post-update means (true/false)");
  bind("--rio-arriba-fips", "rio_arriba_fips",
       "county receiving the disability progression fix, or none");
  bind("--inset-alaska-hawaii", "inset_alaska_hawaii", "inset AK/HI on SVG maps (true/false)");
  bind("--histogram-bins", "histogram_bins", "error histogram bin count (default 30)");

  cmd->add_option_function<std::vector<std::string>>(
      "--set",
      [&args](const std::vector<std::string>& pairs) {
        for (const auto& pair : pairs) {
          const auto eq = pair.find('=');
          if (eq == std::string::npos)
            throw CLI::ValidationError("--set", "expected key=value, got '" + pair + "'");
          args.overrides.push_back({pair.substr(0, eq), pair.substr(eq + 1)});
        }
      },
      "extra key=value override, repeatable");
}

skf::RunConfig build_config(const CommandArgs& args) {
  skf::RunConfig config;
  if (!args.config_path.empty()) config = skf::parse_config_file(args.config_path);
  for (const auto& o : args.overrides) skf::apply_override(config, o.key, o.value);
  return config;
}

std::vector<double> parse_scales(const std::string& text) {
  std::vector<double> scales;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string piece =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      scales.push_back(skf::csv::parse_double(piece));
    } catch (const skf::DataError&) {
      throw skf::ConfigError("invalid scale '" + piece + "' in --scales");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return scales;
}

void print_summary(const std::vector<skf::SummaryRow>& rows) {
  std::cout << "variable,year,avg_general_acc,hotspot_acc,avg_error,max_error\n";
  for (const auto& r : rows)
    std::cout << r.variable << ',' << r.year << ',' << skf::csv::format_double(r.avg_general_acc)
              << ',' << skf::csv::format_double(r.hotspot_acc) << ','
              << skf::csv::format_double(r.avg_error) << ','
              << skf::csv::format_double(r.max_error) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatial Kalman filtering for county rate panels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  CommandArgs args;

  auto* cmd_run = app.add_subcommand("run", "full pipeline: filter, assess, render");
  bind_config_flags(cmd_run, args);

  auto* cmd_sens = app.add_subcommand("sensitivity", "repeat the run across noise scales");
  bind_config_flags(cmd_sens, args);
  std::string scales_text = "0.01,0.03,0.05";
  cmd_sens->add_option("--scales", scales_text, "comma-separated r values (default 0.01,0.03,0.05)");

  auto* cmd_multi = app.add_subcommand("multiyear", "degrade the training window");
  bind_config_flags(cmd_multi, args);
  bool all_years = false;
  cmd_multi->add_flag("--all-years", all_years,
                      "emit comparisons for every predicted year, not just the last");

  auto* cmd_rend = app.add_subcommand("render", "re-render figures from a saved assessment");
  bind_config_flags(cmd_rend, args);
  std::string assessment_path;
  cmd_rend->add_option("assessment", assessment_path, "<dataset>_<year>_assessment.csv")
      ->required();
  std::string mask_path;
  cmd_rend->add_option("--missing-mask", mask_path, "missing mask CSV from the original run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const skf::PipelineResult result = skf::cmd_run(build_config(args));
      print_summary(result.summary);
      std::cout << "wrote " << result.written.size() << " files\n";
    } else if (cmd_sens->parsed()) {
      const auto rows = skf::cmd_sensitivity(build_config(args), parse_scales(scales_text));
      std::cout << "r,year,avg_general_acc,hotspot_acc\n";
      for (const auto& r : rows)
        std::cout << skf::csv::format_double(r.r) << ',' << r.year << ','
                  << skf::csv::format_double(r.avg_general_accuracy) << ','
                  << skf::csv::format_double(r.hotspot_accuracy) << '\n';
    } else if (cmd_multi->parsed()) {
      const auto variants = skf::cmd_multiyear(build_config(args), all_years);
      std::cout << "train_year_count,final_year_max_error\n";
      for (const auto& v : variants)
        std::cout << v.train_year_count << ','
                  << skf::csv::format_double(v.years.back().max_error) << '\n';
    } else if (cmd_rend->parsed()) {
      skf::cmd_render(build_config(args), assessment_path, mask_path);
      std::cout << "rendered figures from " << assessment_path << '\n';
    }
  } catch (const skf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const skf::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const skf::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
