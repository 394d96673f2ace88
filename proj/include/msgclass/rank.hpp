#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "msgclass/models.hpp"
#include "msgclass/types.hpp"

namespace msgclass {

struct FeatureRanking {
  std::string method;
  std::vector<std::string> features;
  std::vector<double> scores;
  std::vector<double> ranks;  // 1 = best; tied scores share their mean rank
  bool lower_is_better = false;
};

// Ranks from scores, average ranks on exact ties.
std::vector<double> rank_scores(std::span<const double> scores, bool lower_is_better);

struct SwrfOptions {
  int samples = 0;          // 0 means every instance
  double steepness = 4.0;   // sigmoid width is sigma / steepness
  std::uint64_t seed = 0;
};

// Sigmoid-weighted Relief over every instance pair. Distances are Euclidean
// on range-normalized features. Throws DataError when fewer than two classes
// are present; `samples` above the row count is clamped with a warning.
FeatureRanking swrf_star(const Matrix& x, std::span<const int> y, const std::vector<std::string>& features,
                         const SwrfOptions& options = {}, std::vector<std::string>* warnings = nullptr);

// Largest absolute coefficient of each feature over classes.
FeatureRanking lr_importance(const LinearModel& model, const std::vector<std::string>& features);

// Mean of the per-method ranks (lower is better), re-ranked.
FeatureRanking aggregate_ranks(std::span<const FeatureRanking> rankings);

std::string ranking_to_csv(const FeatureRanking& ranking);

}  // namespace msgclass
