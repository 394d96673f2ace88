#include "msgclass/rank.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "msgclass/balance.hpp"
#include "msgclass/csv.hpp"
#include "msgclass/error.hpp"
#include "msgclass/random.hpp"

namespace msgclass {

std::vector<double> rank_scores(std::span<const double> scores, bool lower_is_better) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lower_is_better ? scores[a] < scores[b] : scores[a] > scores[b];
  });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mean = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean;
    i = j + 1;
  }
  return ranks;
}

FeatureRanking swrf_star(const Matrix& x, std::span<const int> y, const std::vector<std::string>& features,
                         const SwrfOptions& options, std::vector<std::string>* warnings) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (static_cast<Index>(y.size()) != n) throw DataError("swrf: label count does not match rows");
  if (static_cast<Index>(features.size()) != d) throw DataError("swrf: feature names do not match columns");

  std::map<int, double> prior;
  for (int v : y) prior[v] += 1.0;
  if (prior.size() < 2) throw DataError("swrf: labels are constant, nothing to rank against");
  for (auto& [c, p] : prior) p /= static_cast<double>(n);

  int m = options.samples <= 0 ? static_cast<int>(n) : options.samples;
  if (m > n) {
    if (warnings) warnings->push_back("swrf: sample count " + std::to_string(m) + " clamped to " + std::to_string(n));
    m = static_cast<int>(n);
  }

  // diff(f, a, b) = |a_f - b_f| / (max_f - min_f); constant columns never differ.
  Matrix z = x;
  for (Index f = 0; f < d; ++f) {
    const double lo = x.col(f).minCoeff(), hi = x.col(f).maxCoeff();
    if (hi > lo) z.col(f) = (x.col(f).array() - lo) / (hi - lo);
    else z.col(f).setZero();
  }

  const Matrix dist = squared_distances(z, z).cwiseSqrt();
  double sum = 0.0, sum_sq = 0.0;
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i) {
      sum += dist(i, j);
      sum_sq += dist(i, j) * dist(i, j);
    }
  const double mean = sum / pairs;
  const double sigma = std::sqrt(std::max(0.0, sum_sq / pairs - mean * mean));

  std::vector<Index> sample(static_cast<std::size_t>(n));
  std::iota(sample.begin(), sample.end(), Index{0});
  Rng rng(options.seed);
  rng.shuffle(sample);
  sample.resize(static_cast<std::size_t>(m));

  Vector score = Vector::Zero(d);
  for (Index r : sample) {
    const int cr = y[static_cast<std::size_t>(r)];
    Vector contrib = Vector::Zero(d);
    for (Index i = 0; i < n; ++i) {
      if (i == r) continue;
      double w;
      if (sigma > 0.0) w = 1.0 / (1.0 + std::exp((dist(r, i) - mean) / (sigma / options.steepness)));
      else w = 0.5;
      const int ci = y[static_cast<std::size_t>(i)];
      double coeff;
      if (ci == cr) coeff = 1.0 - 2.0 * w;
      else coeff = prior[ci] / (1.0 - prior[cr]) * (2.0 * w - 1.0);
      contrib += coeff * (z.row(i) - z.row(r)).cwiseAbs().transpose();
    }
    score += contrib;
  }
  score /= static_cast<double>(m) * static_cast<double>(n - 1);

  FeatureRanking out;
  out.method = "swrf_star";
  out.features = features;
  out.scores.assign(score.data(), score.data() + d);
  out.ranks = rank_scores(out.scores, false);
  return out;
}

FeatureRanking lr_importance(const LinearModel& model, const std::vector<std::string>& features) {
  if (static_cast<Index>(features.size()) != model.weights.cols())
    throw DataError("lr_importance: feature names do not match the model");
  FeatureRanking out;
  out.method = "lr_importance";
  out.features = features;
  for (Index f = 0; f < model.weights.cols(); ++f) out.scores.push_back(model.weights.col(f).cwiseAbs().maxCoeff());
  out.ranks = rank_scores(out.scores, false);
  return out;
}

FeatureRanking aggregate_ranks(std::span<const FeatureRanking> rankings) {
  if (rankings.empty()) throw ConfigError("aggregate_ranks: no rankings");
  const auto& features = rankings.front().features;
  FeatureRanking out;
  out.method = "mean_rank";
  out.features = features;
  out.lower_is_better = true;
  out.scores.assign(features.size(), 0.0);
  for (const auto& r : rankings) {
    if (r.features != features) throw DataError("aggregate_ranks: rankings cover different features");
    for (std::size_t f = 0; f < features.size(); ++f) out.scores[f] += r.ranks[f];
  }
  for (auto& s : out.scores) s /= static_cast<double>(rankings.size());
  out.ranks = rank_scores(out.scores, true);
  return out;
}

std::string ranking_to_csv(const FeatureRanking& ranking) {
  std::ostringstream os;
  os.precision(10);
  os << "feature,score,rank\n";
  for (std::size_t f = 0; f < ranking.features.size(); ++f)
    os << csv::escape(ranking.features[f]) << ',' << ranking.scores[f] << ',' << ranking.ranks[f] << '\n';
  return os.str();
}

}  // namespace msgclass
