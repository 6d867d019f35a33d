#pragma once

// Seeded generators and filesystem helpers shared across the test binaries.

#include "skf/geo.hpp"
#include "skf/panel.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace skf_test {

inline std::filesystem::path test_data_dir() { return SKF_TEST_DATA_DIR; }

struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("skf_" + tag + "_" + std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline void write_file(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string synth_fips(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05d", i + 1);
  return buf;
}

inline skf::CentroidTable synth_centroids(int d, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> lat(25.0, 49.0);
  std::uniform_real_distribution<double> lon(-124.0, -67.0);
  std::vector<std::pair<std::string, skf::GeoPoint>> rows;
  rows.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) rows.emplace_back(synth_fips(i), skf::GeoPoint{lat(rng), lon(rng)});
  return skf::CentroidTable::from_rows(std::move(rows));
}

inline skf::CountyPanel synth_panel(const std::vector<std::string>& fips, int first_year,
                                    int year_count, unsigned seed, double missing_prob = 0.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> rate(50.0, 12.0);
  std::bernoulli_distribution gone(missing_prob);

  skf::CountyPanel p;
  p.fips_order = fips;
  for (int k = 0; k < year_count; ++k) p.years.push_back(first_year + k);
  const auto d = static_cast<Eigen::Index>(fips.size());
  p.values.resize(d, year_count);
  p.missing.resize(d, year_count);
  for (Eigen::Index i = 0; i < d; ++i)
    for (int k = 0; k < year_count; ++k) {
      if (missing_prob > 0.0 && gone(rng)) {
        p.values(i, k) = 0.0;
        p.missing(i, k) = true;
      } else {
        p.values(i, k) = std::max(0.0, rate(rng));
        p.missing(i, k) = false;
      }
    }
  return p;
}

}  // namespace skf_test
