#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "msgclass/error.hpp"
#include "msgclass/types.hpp"

namespace msgclass {

// Labels of one stream in time order; -1 marks an unknown label.
using LabelStream = std::vector<int>;

struct TransitionMatrix {
  std::vector<std::string> classes;
  Vector initial;  // from stream-start labels
  Matrix matrix;   // row = previous label
  double smoothing = 1.0;
};

TransitionMatrix fit_markov(std::span<const LabelStream> streams, const std::vector<std::string>& classes,
                            double smoothing = 1.0);
// Next-label distribution; a negative `previous` (stream start or unknown)
// gives the initial distribution.
Vector markov_predict(const TransitionMatrix& model, int previous);

struct HistoryModel {
  std::vector<std::string> classes;
  int n = 4;
  double smoothing = 1.0;
  int min_count = 5;
  // tables[h]: context of h labels -> raw next-label counts.
  std::vector<std::map<std::vector<int>, Vector>> tables;

  // Smoothed distribution for a context present in tables[h].
  Vector distribution(const Vector& counts) const;
  Vector prior() const;
};

// Contexts containing an unknown label are not counted.
HistoryModel fit_history(std::span<const LabelStream> streams, const std::vector<std::string>& classes, int n = 4,
                         double smoothing = 1.0, int min_count = 5);
// Backs off to the longest suffix of `context` (oldest first) seen at least
// min_count times; the prior otherwise.
Vector history_predict(const HistoryModel& model, std::span<const int> context);

struct MixtureWeights {
  double alpha = 0.0;
  double beta = 0.0;
  bool operator==(const MixtureWeights&) const = default;
};

// Throws ConfigError unless alpha, beta >= 0 and alpha + beta <= 1.
void validate(const MixtureWeights& w);

// (1 - alpha - beta) * p_c + alpha * p_m + beta * p_h, row-wise for matrices.
template <typename A, typename B, typename C>
MatrixX<typename A::Scalar> mix(const Eigen::MatrixBase<A>& p_c, const Eigen::MatrixBase<B>& p_m,
                                const Eigen::MatrixBase<C>& p_h, const MixtureWeights& w) {
  using Scalar = typename A::Scalar;
  if (p_c.rows() != p_m.rows() || p_c.rows() != p_h.rows() || p_c.cols() != p_m.cols() || p_c.cols() != p_h.cols())
    throw DataError("mix: distributions over different class lists");
  validate(w);
  const Scalar a = static_cast<Scalar>(w.alpha), b = static_cast<Scalar>(w.beta);
  return (Scalar(1) - a - b) * p_c + a * p_m + b * p_h;
}

enum class SelectionMetric { Accuracy, MacroF1 };
SelectionMetric parse_selection_metric(std::string_view name);
std::string_view to_string(SelectionMetric m);

struct MixtureSearch {
  MixtureWeights weights;
  double score = 0.0;
  std::size_t cells = 0;
};

// Exhaustive search over the simplex grid; ties go to the smaller alpha+beta,
// then the smaller alpha. Rows with a negative label are ignored. Throws
// ConfigError unless 1/step is an integer.
MixtureSearch select_mixture(const Matrix& p_c, const Matrix& p_m, const Matrix& p_h, std::span<const int> y,
                             double step = 0.01, SelectionMetric metric = SelectionMetric::Accuracy);

struct TemporalModel {
  TransitionMatrix markov;
  HistoryModel history;
  MixtureWeights weights;
};

enum class HistoryMode { Oracle, Predicted };
HistoryMode parse_history_mode(std::string_view name);
std::string_view to_string(HistoryMode m);

// True label of a corpus message (-1 if unknown). Only ever asked about
// messages that precede the one being predicted.
using LabelLookup = std::function<int(std::size_t corpus_index)>;

struct StreamPrediction {
  Matrix markov;  // per stream position
  Matrix history;
  Matrix mixed;
};

// Walks one stream in time order. `p_c` holds classifier probabilities per
// stream position. Oracle mode takes previous labels from `truth`; predicted
// mode uses the argmax of its own mixed output and never calls `truth`.
StreamPrediction stream_predict(const TemporalModel& model, std::span<const std::size_t> stream_indices,
                                const Matrix& p_c, HistoryMode mode, const LabelLookup& truth);

nlohmann::json temporal_to_json(const TemporalModel& model);
TemporalModel temporal_from_json(const nlohmann::json& doc);

}  // namespace msgclass
