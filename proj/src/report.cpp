#include "msgclass/report.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "msgclass/error.hpp"
#include "msgclass/json_eigen.hpp"

namespace msgclass {

std::string fingerprint(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScoreMetric parse_score_metric(std::string_view name) {
  if (name == "accuracy") return ScoreMetric::Accuracy;
  if (name == "macro_f1") return ScoreMetric::MacroF1;
  throw ConfigError("unknown score metric '" + std::string(name) + "'");
}

std::vector<double> fold_scores(const EvalReport& report, ScoreMetric metric) {
  std::vector<double> out;
  for (const auto& f : report.folds) out.push_back(metric == ScoreMetric::Accuracy ? f.accuracy : f.macro_f1);
  return out;
}

Comparison compare(const EvalReport& a, const EvalReport& b, double rope, ScoreMetric metric,
                   const std::string& name_a, const std::string& name_b) {
  if (a.plan_fingerprint != b.plan_fingerprint || a.k != b.k || a.repeats != b.repeats ||
      a.folds.size() != b.folds.size())
    throw DataError("compare: reports come from different fold plans");
  for (std::size_t i = 0; i < a.folds.size(); ++i)
    if (a.folds[i].repeat != b.folds[i].repeat || a.folds[i].fold != b.folds[i].fold)
      throw DataError("compare: fold order differs between reports");
  if (a.k < 2) throw DataError("compare: reports lack a fold count");
  Comparison c;
  c.name_a = name_a;
  c.name_b = name_b;
  c.metric = metric;
  c.result = bayes_corr_ttest(fold_scores(a, metric), fold_scores(b, metric), 1.0 / a.k, rope);
  c.verdict = verdict(c.result, name_a, name_b);
  return c;
}

namespace {

nlohmann::json metrics_to_json(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

ClassMetrics metrics_from_json(const nlohmann::json& j) {
  return {j.at("precision").get<std::vector<double>>(), j.at("recall").get<std::vector<double>>(),
          j.at("f1").get<std::vector<double>>(), j.at("support").get<std::vector<double>>()};
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"repeat", f.repeat},
                     {"fold", f.fold},
                     {"accuracy", f.accuracy},
                     {"macro_f1", f.macro_f1},
                     {"instances", f.instances},
                     {"info", f.info}});
  nlohmann::json j = {{"format_version", 1},
                      {"objective", r.objective},
                      {"classes", r.classes},
                      {"metrics", metrics_to_json(r.metrics)},
                      {"accuracy", r.accuracy},
                      {"macro_f1", r.macro_f1},
                      {"confusion", to_json(r.confusion)},
                      {"folds", folds},
                      {"k", r.k},
                      {"repeats", r.repeats},
                      {"seed", r.seed},
                      {"plan_fingerprint", r.plan_fingerprint},
                      {"config_fingerprint", r.config_fingerprint},
                      {"config", r.config}};
  if (r.roc)
    j["roc"] = {{"fpr", r.roc->fpr}, {"tpr", r.roc->tpr}, {"thresholds", r.roc->thresholds}, {"auc", r.roc->auc}};
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != 1) throw DataError("report json: unsupported format_version");
    EvalReport r;
    r.objective = j.at("objective").get<std::string>();
    r.classes = j.at("classes").get<std::vector<std::string>>();
    r.metrics = metrics_from_json(j.at("metrics"));
    r.accuracy = j.at("accuracy").get<double>();
    r.macro_f1 = j.at("macro_f1").get<double>();
    r.confusion = matrix_from_json(j.at("confusion"), static_cast<Index>(r.classes.size()));
    for (const auto& f : j.at("folds"))
      r.folds.push_back({f.at("repeat").get<int>(), f.at("fold").get<int>(), f.at("accuracy").get<double>(),
                         f.at("macro_f1").get<double>(), f.at("instances").get<std::size_t>(), f.value("info", nlohmann::json{})});
    r.k = j.at("k").get<int>();
    r.repeats = j.at("repeats").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.plan_fingerprint = j.at("plan_fingerprint").get<std::string>();
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    r.config = j.value("config", nlohmann::json{});
    if (j.contains("roc")) {
      const auto& roc = j.at("roc");
      std::vector<double> thresholds;
      // JSON has no infinity; the leading threshold is written as null.
      for (const auto& t : roc.at("thresholds"))
        thresholds.push_back(t.is_null() ? std::numeric_limits<double>::infinity() : t.get<double>());
      r.roc = RocCurve{roc.at("fpr").get<std::vector<double>>(), roc.at("tpr").get<std::vector<double>>(),
                       std::move(thresholds), roc.at("auc").get<double>()};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report json: ") + e.what());
  }
}

nlohmann::json comparison_to_json(const Comparison& c) {
  const auto& r = c.result;
  return {{"format_version", 1},
          {"a", c.name_a},
          {"b", c.name_b},
          {"metric", c.metric == ScoreMetric::Accuracy ? "accuracy" : "macro_f1"},
          {"p_left", r.p_left},
          {"p_rope", r.p_rope},
          {"p_right", r.p_right},
          {"posterior", {{"mean", r.mean}, {"scale", r.scale}, {"dof", r.dof}}},
          {"rope", {r.rope_low, r.rope_high}},
          {"rho", r.rho},
          {"verdict", c.verdict}};
}

std::string report_to_text(const EvalReport& r) {
  std::size_t width = 12;
  for (const auto& c : r.classes) width = std::max(width, c.size() + 2);
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%*s %10s %10s %10s %10s\n", static_cast<int>(width), "", "precision", "recall",
                "f1-score", "support");
  os << buf;
  for (std::size_t i = 0; i < r.classes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%*s %10.3f %10.3f %10.3f %10.1f\n", static_cast<int>(width), r.classes[i].c_str(),
                  r.metrics.precision[i], r.metrics.recall[i], r.metrics.f1[i], r.metrics.support[i]);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "\n%*s %32.3f\n%*s %32.3f\n", static_cast<int>(width), "accuracy", r.accuracy,
                static_cast<int>(width), "macro f1", r.macro_f1);
  os << buf;
  if (r.roc) {
    std::snprintf(buf, sizeof buf, "%*s %32.3f\n", static_cast<int>(width), "auroc", r.roc->auc);
    os << buf;
  }
  return os.str();
}

std::string confusion_to_text(const EvalReport& r) {
  std::size_t width = 8;
  for (const auto& c : r.classes) width = std::max(width, c.size() + 2);
  const int w = static_cast<int>(width);
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%*s", w, "true\\pred");
  os << buf;
  for (const auto& c : r.classes) {
    std::snprintf(buf, sizeof buf, "%*s", w, c.c_str());
    os << buf;
  }
  os << '\n';
  for (Index i = 0; i < r.confusion.rows(); ++i) {
    std::snprintf(buf, sizeof buf, "%*s", w, r.classes[static_cast<std::size_t>(i)].c_str());
    os << buf;
    for (Index j = 0; j < r.confusion.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%*.0f", w, r.confusion(i, j));
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::string roc_to_csv(const RocCurve& roc) {
  std::ostringstream os;
  os.precision(10);
  os << "threshold,fpr,tpr\n";
  for (std::size_t i = 0; i < roc.fpr.size(); ++i) os << roc.thresholds[i] << ',' << roc.fpr[i] << ',' << roc.tpr[i] << '\n';
  return os.str();
}

}  // namespace msgclass
