#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msgclass/metrics.hpp"
#include "msgclass/ttest.hpp"
#include "msgclass/types.hpp"

namespace msgclass {

struct FoldScore {
  int repeat = 0;
  int fold = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::size_t instances = 0;
  nlohmann::json info;  // pipeline-specific extras (e.g. mixture weights)
};

struct EvalReport {
  std::string objective;
  std::vector<std::string> classes;
  // Per-class metrics averaged over folds; support may be fractional.
  ClassMetrics metrics;
  double accuracy = 0.0;  // mean over folds
  double macro_f1 = 0.0;
  // Pooled out-of-fold predictions of the first repeat.
  Matrix confusion;
  std::optional<RocCurve> roc;  // binary objectives only
  std::vector<FoldScore> folds;
  int k = 0;
  int repeats = 0;
  std::uint64_t seed = 0;
  std::string plan_fingerprint;
  std::string config_fingerprint;
  nlohmann::json config;
};

// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fingerprint(std::string_view text);

enum class ScoreMetric { Accuracy, MacroF1 };
ScoreMetric parse_score_metric(std::string_view name);
std::vector<double> fold_scores(const EvalReport& report, ScoreMetric metric = ScoreMetric::Accuracy);

struct Comparison {
  TTestResult result;
  std::string verdict;
  std::string name_a;
  std::string name_b;
  ScoreMetric metric = ScoreMetric::Accuracy;
};

// Paired test on the fold score vectors with rho = 1/k. Throws DataError
// when the reports were not produced from the same fold plan.
Comparison compare(const EvalReport& a, const EvalReport& b, double rope = 0.01,
                   ScoreMetric metric = ScoreMetric::Accuracy, const std::string& name_a = "A",
                   const std::string& name_b = "B");

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& doc);
nlohmann::json comparison_to_json(const Comparison& c);

// Precision / recall / f1-score / support table followed by accuracy.
std::string report_to_text(const EvalReport& report);
std::string confusion_to_text(const EvalReport& report);
std::string roc_to_csv(const RocCurve& roc);

}  // namespace msgclass
