#include "msgclass/config.hpp"

#include <fstream>
#include <sstream>

#include "msgclass/error.hpp"
#include "msgclass/json_eigen.hpp"

namespace msgclass {

namespace {

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& into) {
  if (j.contains(key) && !j.at(key).is_null()) into = j.at(key).get<T>();
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base, RunConfig c) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  try {
    if (j.contains("format_version") && j.at("format_version").get<int>() != 1)
      throw ConfigError("run config: unsupported format_version");
    if (j.contains("corpus") && !j.at("corpus").is_null())
      c.corpus = resolve(j.at("corpus").get<std::string>(), base);
    if (j.contains("lexicons") && !j.at("lexicons").is_null())
      c.lexicons = resolve(j.at("lexicons").get<std::string>(), base);
    if (j.contains("pipeline")) c.pipeline = pipeline_config_from_json(j.at("pipeline"), c.pipeline);
    if (j.contains("cv")) {
      const auto& cv = j.at("cv");
      expect_keys(cv, "cv", {"k", "repeats", "seed"});
      read(cv, "k", c.cv.k);
      read(cv, "repeats", c.cv.repeats);
      read(cv, "seed", c.cv.seed);
    }
    read(j, "test_fraction", c.test_fraction);
    if (j.contains("rank")) {
      const auto& r = j.at("rank");
      expect_keys(r, "rank", {"samples", "steepness", "seed"});
      read(r, "samples", c.rank.samples);
      read(r, "steepness", c.rank.steepness);
      read(r, "seed", c.rank.seed);
    }
    if (j.contains("compare")) {
      const auto& cmp = j.at("compare");
      expect_keys(cmp, "compare", {"rope", "metric"});
      read(cmp, "rope", c.rope);
      if (cmp.contains("metric")) c.metric = parse_score_metric(cmp.at("metric").get<std::string>());
    }
    read(j, "threads", c.threads);
    if (j.contains("output") && !j.at("output").is_null()) c.output = resolve(j.at("output").get<std::string>(), base);
    expect_keys(j, "run config",
                {"format_version", "corpus", "lexicons", "pipeline", "cv", "test_fraction", "rank", "compare",
                 "threads", "output"});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  if (c.cv.k < 2) throw ConfigError("cv.k must be at least 2");
  if (c.cv.repeats < 1) throw ConfigError("cv.repeats must be at least 1");
  if (!(c.test_fraction > 0 && c.test_fraction < 1)) throw ConfigError("test_fraction must be in (0, 1)");
  if (c.rank.samples < 0) throw ConfigError("rank.samples must be non-negative");
  if (!(c.rank.steepness > 0)) throw ConfigError("rank.steepness must be positive");
  if (!(c.rope >= 0)) throw ConfigError("compare.rope must be non-negative");
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  return run_config_from_json(doc, path.parent_path());
}

nlohmann::json run_config_to_json(const RunConfig& c) {
  return {{"format_version", 1},
          {"corpus", c.corpus ? nlohmann::json(c.corpus->string()) : nlohmann::json(nullptr)},
          {"lexicons", c.lexicons ? nlohmann::json(c.lexicons->string()) : nlohmann::json(nullptr)},
          {"pipeline", pipeline_config_to_json(c.pipeline)},
          {"cv", {{"k", c.cv.k}, {"repeats", c.cv.repeats}, {"seed", c.cv.seed}}},
          {"test_fraction", c.test_fraction},
          {"rank", {{"samples", c.rank.samples}, {"steepness", c.rank.steepness}, {"seed", c.rank.seed}}},
          {"compare", {{"rope", c.rope}, {"metric", c.metric == ScoreMetric::Accuracy ? "accuracy" : "macro_f1"}}},
          {"threads", c.threads},
          {"output", c.output.string()}};
}

nlohmann::json read_json_file(const std::filesystem::path& path, bool is_config) {
  std::ifstream in(path);
  std::stringstream ss;
  if (in) ss << in.rdbuf();
  try {
    if (!in) throw std::runtime_error("cannot open file");
    return nlohmann::json::parse(ss.str());
  } catch (const std::exception& e) {
    if (is_config) throw ConfigError(path.string() + ": " + e.what());
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace msgclass
