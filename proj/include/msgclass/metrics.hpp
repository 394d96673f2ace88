#pragma once

#include <span>
#include <vector>

#include "msgclass/types.hpp"

namespace msgclass {

// confusion(i, j) = count(true = i, predicted = j). Throws DataError for a
// label outside [0, n_classes) or unequal lengths.
Matrix confusion(std::span<const int> truth, std::span<const int> predicted, std::size_t n_classes);

struct ClassMetrics {
  std::vector<double> precision;  // 0 when nothing was predicted as the class
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<double> support;
};

ClassMetrics prf(const Matrix& confusion);
double accuracy(const Matrix& confusion);
double macro_f1(const Matrix& confusion);

struct RocCurve {
  std::vector<double> fpr;         // starts at 0, ends at 1
  std::vector<double> tpr;
  std::vector<double> thresholds;  // +inf first, then each distinct score, descending
  double auc = 0.0;
};

// Sweeps every distinct score as a threshold. Tied scores move together, so
// the trapezoid area counts tied (positive, negative) pairs as one half.
// Throws DataError unless both classes are present.
RocCurve roc_auc(std::span<const double> scores, std::span<const int> positive);

}  // namespace msgclass
