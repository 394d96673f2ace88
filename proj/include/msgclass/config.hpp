#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "msgclass/pipeline.hpp"
#include "msgclass/rank.hpp"
#include "msgclass/report.hpp"

namespace msgclass {

struct CvPlanConfig {
  int k = 10;
  int repeats = 10;
  std::uint64_t seed = 1;
};

// Everything a CLI run needs. Relative paths in a file are resolved against
// the file's directory.
struct RunConfig {
  std::optional<std::filesystem::path> corpus;
  std::optional<std::filesystem::path> lexicons;  // directory of lexicon files
  PipelineConfig pipeline;
  CvPlanConfig cv;
  double test_fraction = 0.2;
  SwrfOptions rank{200, 4.0, 0};
  double rope = 0.01;
  ScoreMetric metric = ScoreMetric::Accuracy;
  int threads = 0;
  std::filesystem::path output = "out";
};

RunConfig run_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {},
                               RunConfig defaults = {});
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json run_config_to_json(const RunConfig& config);

// Failures are ConfigError for configuration files, DataError otherwise.
nlohmann::json read_json_file(const std::filesystem::path& path, bool is_config = true);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace msgclass
