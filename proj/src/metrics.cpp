#include "msgclass/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "msgclass/error.hpp"

namespace msgclass {

Matrix confusion(std::span<const int> truth, std::span<const int> predicted, std::size_t n_classes) {
  if (truth.size() != predicted.size()) throw DataError("confusion: label vectors differ in length");
  const auto k = static_cast<Index>(n_classes);
  Matrix m = Matrix::Zero(k, k);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= k || predicted[i] < 0 || predicted[i] >= k)
      throw DataError("confusion: label outside the class list at position " + std::to_string(i));
    m(truth[i], predicted[i]) += 1;
  }
  return m;
}

ClassMetrics prf(const Matrix& c) {
  ClassMetrics out;
  for (Index j = 0; j < c.rows(); ++j) {
    const double tp = c(j, j);
    const double predicted = c.col(j).sum();
    const double actual = c.row(j).sum();
    const double p = predicted > 0 ? tp / predicted : 0.0;
    const double r = actual > 0 ? tp / actual : 0.0;
    out.precision.push_back(p);
    out.recall.push_back(r);
    out.f1.push_back(p + r > 0 ? 2 * p * r / (p + r) : 0.0);
    out.support.push_back(actual);
  }
  return out;
}

double accuracy(const Matrix& c) {
  const double total = c.sum();
  return total > 0 ? c.trace() / total : 0.0;
}

double macro_f1(const Matrix& c) {
  const auto m = prf(c);
  if (m.f1.empty()) return 0.0;
  return std::accumulate(m.f1.begin(), m.f1.end(), 0.0) / static_cast<double>(m.f1.size());
}

RocCurve roc_auc(std::span<const double> scores, std::span<const int> positive) {
  if (scores.size() != positive.size()) throw DataError("roc_auc: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::int64_t pos = 0, neg = 0;
  for (int v : positive) (v ? pos : neg) += 1;
  if (pos == 0 || neg == 0) throw DataError("roc_auc: both classes must be present");

  RocCurve roc;
  roc.fpr.push_back(0);
  roc.tpr.push_back(0);
  roc.thresholds.push_back(std::numeric_limits<double>::infinity());
  // Twice the area in units of (positive x negative) pairs; integral, so exact.
  std::int64_t twice_area = 0, tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    std::int64_t dtp = 0, dfp = 0;
    for (; i < order.size() && scores[order[i]] == s; ++i) (positive[order[i]] ? dtp : dfp) += 1;
    twice_area += dfp * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    roc.fpr.push_back(static_cast<double>(fp) / static_cast<double>(neg));
    roc.tpr.push_back(static_cast<double>(tp) / static_cast<double>(pos));
    roc.thresholds.push_back(s);
  }
  roc.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return roc;
}

}  // namespace msgclass
