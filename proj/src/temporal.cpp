#include "msgclass/temporal.hpp"

#include <algorithm>
#include <cmath>

#include "msgclass/json_eigen.hpp"

namespace msgclass {

namespace {

void check_label(int v, std::size_t n_classes) {
  if (v >= static_cast<int>(n_classes)) throw DataError("temporal: label outside the class list");
}

bool has_labels(std::span<const LabelStream> streams) {
  for (const auto& s : streams)
    for (int v : s)
      if (v >= 0) return true;
  return false;
}

int argmax(const Vector& v) {
  Index arg = 0;
  v.maxCoeff(&arg);
  return static_cast<int>(arg);
}

}  // namespace

TransitionMatrix fit_markov(std::span<const LabelStream> streams, const std::vector<std::string>& classes,
                            double smoothing) {
  if (!has_labels(streams)) throw DataError("fit_markov: no labelled streams");
  if (classes.empty()) throw DataError("fit_markov: empty class list");
  if (smoothing < 0) throw ConfigError("fit_markov: smoothing must be non-negative");
  const auto c = static_cast<Index>(classes.size());
  Matrix counts = Matrix::Zero(c, c);
  Vector starts = Vector::Zero(c);
  for (const auto& s : streams) {
    if (s.empty()) continue;
    for (int v : s) check_label(v, classes.size());
    if (s.front() >= 0) starts(s.front()) += 1;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i - 1] >= 0 && s[i] >= 0) counts(s[i - 1], s[i]) += 1;
  }
  TransitionMatrix m;
  m.classes = classes;
  m.smoothing = smoothing;
  m.matrix = Matrix(c, c);
  for (Index r = 0; r < c; ++r) {
    const double denom = counts.row(r).sum() + smoothing * static_cast<double>(c);
    if (denom > 0) m.matrix.row(r) = (counts.row(r).array() + smoothing) / denom;
    else m.matrix.row(r).setConstant(1.0 / static_cast<double>(c));
  }
  const double denom = starts.sum() + smoothing * static_cast<double>(c);
  if (denom > 0) m.initial = (starts.array() + smoothing) / denom;
  else m.initial = Vector::Constant(c, 1.0 / static_cast<double>(c));
  return m;
}

Vector markov_predict(const TransitionMatrix& model, int previous) {
  if (previous < 0) return model.initial;
  if (previous >= model.matrix.rows()) throw DataError("markov_predict: label outside the class list");
  return model.matrix.row(previous).transpose();
}

Vector HistoryModel::distribution(const Vector& counts) const {
  const auto c = static_cast<double>(classes.size());
  const double denom = counts.sum() + smoothing * c;
  if (denom <= 0) return Vector::Constant(static_cast<Index>(classes.size()), 1.0 / c);
  return (counts.array() + smoothing) / denom;
}

Vector HistoryModel::prior() const {
  const auto it = tables.empty() ? nullptr : &tables.front();
  if (!it || it->empty()) return distribution(Vector::Zero(static_cast<Index>(classes.size())));
  return distribution(it->begin()->second);
}

HistoryModel fit_history(std::span<const LabelStream> streams, const std::vector<std::string>& classes, int n,
                         double smoothing, int min_count) {
  if (!has_labels(streams)) throw DataError("fit_history: no labelled streams");
  if (classes.empty()) throw DataError("fit_history: empty class list");
  if (n < 0) throw ConfigError("fit_history: history length must be non-negative");
  if (smoothing < 0) throw ConfigError("fit_history: smoothing must be non-negative");
  HistoryModel m;
  m.classes = classes;
  m.n = n;
  m.smoothing = smoothing;
  m.min_count = min_count;
  m.tables.resize(static_cast<std::size_t>(n) + 1);
  const auto c = static_cast<Index>(classes.size());
  m.tables[0][{}] = Vector::Zero(c);
  for (const auto& s : streams) {
    for (int v : s) check_label(v, classes.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] < 0) continue;
      for (int h = 0; h <= n && static_cast<std::size_t>(h) <= i; ++h) {
        std::vector<int> context(s.begin() + static_cast<std::ptrdiff_t>(i) - h,
                                 s.begin() + static_cast<std::ptrdiff_t>(i));
        if (std::find(context.begin(), context.end(), -1) != context.end()) break;
        auto [slot, fresh] = m.tables[static_cast<std::size_t>(h)].try_emplace(std::move(context), Vector::Zero(c));
        slot->second(s[i]) += 1;
      }
    }
  }
  return m;
}

Vector history_predict(const HistoryModel& model, std::span<const int> context) {
  const int longest = std::min<int>(model.n, static_cast<int>(context.size()));
  for (int h = longest; h >= 1; --h) {
    std::vector<int> suffix(context.end() - h, context.end());
    if (std::find(suffix.begin(), suffix.end(), -1) != suffix.end()) continue;
    const auto& table = model.tables[static_cast<std::size_t>(h)];
    const auto it = table.find(suffix);
    if (it != table.end() && it->second.sum() >= model.min_count) return model.distribution(it->second);
  }
  return model.prior();
}

void validate(const MixtureWeights& w) {
  if (!(w.alpha >= 0) || !(w.beta >= 0) || w.alpha + w.beta > 1.0 + 1e-12)
    throw ConfigError("mixture weights need alpha, beta >= 0 and alpha + beta <= 1");
}

SelectionMetric parse_selection_metric(std::string_view name) {
  if (name == "accuracy") return SelectionMetric::Accuracy;
  if (name == "macro_f1") return SelectionMetric::MacroF1;
  throw ConfigError("unknown selection metric '" + std::string(name) + "'");
}

std::string_view to_string(SelectionMetric m) { return m == SelectionMetric::Accuracy ? "accuracy" : "macro_f1"; }

MixtureSearch select_mixture(const Matrix& p_c, const Matrix& p_m, const Matrix& p_h, std::span<const int> y,
                             double step, SelectionMetric metric) {
  if (p_c.rows() != static_cast<Index>(y.size())) throw DataError("select_mixture: label count does not match rows");
  if (!(step > 0) || step > 1) throw ConfigError("grid step must be in (0, 1]");
  const double cells = 1.0 / step;
  const int grid = static_cast<int>(std::lround(cells));
  if (std::abs(cells - grid) > 1e-9) throw ConfigError("grid step must divide 1 evenly");

  std::vector<Index> rows;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] >= 0) rows.push_back(static_cast<Index>(i));
  const Matrix c = p_c(rows, Eigen::all), m = p_m(rows, Eigen::all), h = p_h(rows, Eigen::all);
  const Index k = c.cols();

  auto score_of = [&](const Matrix& mixed) {
    Matrix conf = Matrix::Zero(k, k);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Index arg = 0;
      mixed.row(static_cast<Index>(r)).maxCoeff(&arg);
      conf(y[static_cast<std::size_t>(rows[r])], arg) += 1;
    }
    if (metric == SelectionMetric::Accuracy) return conf.trace();
    double f1 = 0;
    for (Index j = 0; j < k; ++j) {
      const double tp = conf(j, j), pred = conf.col(j).sum(), actual = conf.row(j).sum();
      const double denom = pred + actual;
      f1 += denom > 0 ? 2 * tp / denom : 0.0;
    }
    return f1 / static_cast<double>(k);
  };

  MixtureSearch best;
  best.score = -1;
  // Visit cells by increasing alpha+beta then alpha, so strict improvement
  // implements the tie-break.
  for (int s = 0; s <= grid; ++s) {
    for (int i = 0; i <= s; ++i) {
      const MixtureWeights w{static_cast<double>(i) / grid, static_cast<double>(s - i) / grid};
      const double score = score_of(mix(c, m, h, w));
      ++best.cells;
      if (score > best.score + 1e-12) {
        best.score = score;
        best.weights = w;
      }
    }
  }
  if (metric == SelectionMetric::Accuracy && !rows.empty()) best.score /= static_cast<double>(rows.size());
  return best;
}

HistoryMode parse_history_mode(std::string_view name) {
  if (name == "oracle") return HistoryMode::Oracle;
  if (name == "predicted") return HistoryMode::Predicted;
  throw ConfigError("unknown history mode '" + std::string(name) + "'");
}

std::string_view to_string(HistoryMode m) { return m == HistoryMode::Oracle ? "oracle" : "predicted"; }

StreamPrediction stream_predict(const TemporalModel& model, std::span<const std::size_t> stream_indices,
                                const Matrix& p_c, HistoryMode mode, const LabelLookup& truth) {
  const auto n = static_cast<Index>(stream_indices.size());
  const auto k = static_cast<Index>(model.markov.classes.size());
  if (p_c.rows() != n || p_c.cols() != k) throw DataError("stream_predict: classifier output has the wrong shape");
  StreamPrediction out{Matrix(n, k), Matrix(n, k), Matrix(n, k)};
  std::vector<int> previous;
  previous.reserve(stream_indices.size());
  for (Index p = 0; p < n; ++p) {
    const int last = previous.empty() ? -1 : previous.back();
    out.markov.row(p) = markov_predict(model.markov, last).transpose();
    const std::size_t take = std::min<std::size_t>(previous.size(), static_cast<std::size_t>(model.history.n));
    out.history.row(p) =
        history_predict(model.history, std::span<const int>(previous).subspan(previous.size() - take)).transpose();
    out.mixed.row(p) = mix(p_c.row(p), out.markov.row(p), out.history.row(p), model.weights);
    if (p + 1 == n) break;
    if (mode == HistoryMode::Oracle) previous.push_back(truth(stream_indices[static_cast<std::size_t>(p)]));
    else previous.push_back(argmax(out.mixed.row(p).transpose()));
  }
  return out;
}

nlohmann::json temporal_to_json(const TemporalModel& model) {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& table : model.history.tables) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [context, counts] : table) entries.push_back({{"context", context}, {"counts", to_json(counts)}});
    tables.push_back(entries);
  }
  return {{"format_version", 1},
          {"classes", model.markov.classes},
          {"markov",
           {{"initial", to_json(model.markov.initial)},
            {"matrix", to_json(model.markov.matrix)},
            {"smoothing", model.markov.smoothing}}},
          {"history",
           {{"n", model.history.n},
            {"smoothing", model.history.smoothing},
            {"min_count", model.history.min_count},
            {"tables", tables}}},
          {"weights", {{"alpha", model.weights.alpha}, {"beta", model.weights.beta}}}};
}

TemporalModel temporal_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != 1) throw DataError("temporal json: unsupported format_version");
    TemporalModel m;
    const auto classes = j.at("classes").get<std::vector<std::string>>();
    const auto& mk = j.at("markov");
    m.markov.classes = classes;
    m.markov.initial = vector_from_json(mk.at("initial"));
    m.markov.matrix = matrix_from_json(mk.at("matrix"), static_cast<Index>(classes.size()));
    m.markov.smoothing = mk.at("smoothing").get<double>();
    const auto& h = j.at("history");
    m.history.classes = classes;
    m.history.n = h.at("n").get<int>();
    m.history.smoothing = h.at("smoothing").get<double>();
    m.history.min_count = h.at("min_count").get<int>();
    for (const auto& table : h.at("tables")) {
      auto& t = m.history.tables.emplace_back();
      for (const auto& e : table) t[e.at("context").get<std::vector<int>>()] = vector_from_json(e.at("counts"));
    }
    m.weights = {j.at("weights").at("alpha").get<double>(), j.at("weights").at("beta").get<double>()};
    validate(m.weights);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("temporal json: ") + e.what());
  }
}

}  // namespace msgclass
