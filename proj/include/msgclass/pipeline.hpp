#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "msgclass/balance.hpp"
#include "msgclass/corpus.hpp"
#include "msgclass/cv.hpp"
#include "msgclass/features.hpp"
#include "msgclass/models.hpp"
#include "msgclass/temporal.hpp"

namespace msgclass {

struct ResampleConfig {
  int k_neighbors = 5;
  std::map<std::string, int> targets;  // label -> count; others raised to the majority
};

struct TemporalConfig {
  bool enabled = false;
  std::optional<MixtureWeights> weights;  // fixed weights skip the grid search
  double grid_step = 0.01;
  int folds = 5;
  HistoryMode mode = HistoryMode::Oracle;
  SelectionMetric metric = SelectionMetric::Accuracy;
  int history_n = 4;
  double smoothing = 1.0;
  int min_count = 5;
};

struct PipelineConfig {
  std::string objective = std::string(kObjectiveRelevance);
  FeaturizerConfig features;
  ModelSpec model;
  std::optional<ResampleConfig> resample;
  TemporalConfig temporal;
  std::uint64_t seed = 0;
};

nlohmann::json pipeline_config_to_json(const PipelineConfig& c);
// Missing keys keep their defaults; unknown values throw ConfigError.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig base = {});

struct TrainedPipeline {
  PipelineConfig config;
  std::vector<std::string> classes;
  Featurizer featurizer;
  Model model;
  std::optional<TemporalModel> temporal;
  nlohmann::json info;  // resampling counts, grid-search outcome
};

// `corpus` supplies labels and streams; `prepared` supplies per-message
// features with the same indexing. Only the labels of `train` are read.
TrainedPipeline train_pipeline(const Corpus& corpus, const PreparedCorpus& prepared, std::span<const std::size_t> train,
                               const PipelineConfig& config);

// Classifier probabilities (no temporal mixing) for the given rows.
Matrix classifier_proba(const TrainedPipeline& p, const PreparedCorpus& prepared, std::span<const std::size_t> rows);

// Final probabilities for `rows`. With temporal models, each affected stream
// of `corpus` is walked in time order; oracle mode reads previous labels via
// `truth`, predicted mode never does.
Matrix predict_pipeline(const TrainedPipeline& p, const Corpus& corpus, const PreparedCorpus& prepared,
                        std::span<const std::size_t> rows, HistoryMode mode, const LabelLookup& truth);

// Streams with only the labels of `keep` (others unknown).
std::vector<LabelStream> label_streams(const Corpus& corpus, std::string_view objective,
                                       std::span<const std::size_t> keep);

// Cross-validated choice of (alpha, beta) on the training rows: inner folds
// give out-of-fold classifier probabilities and oracle-history temporal
// predictions, pooled and searched on the simplex grid.
MixtureSearch grid_search_mixture(const Corpus& corpus, const PreparedCorpus& prepared,
                                  std::span<const std::size_t> train, const PipelineConfig& config);

// CV adapter. Uses the fold's prepared cache when present, otherwise builds
// one over the fold context with `lexicons`.
PipelineFactory standard_pipeline_factory(PipelineConfig config, std::shared_ptr<const LexiconSet> lexicons);

nlohmann::json pipeline_to_json(const TrainedPipeline& p);
TrainedPipeline pipeline_from_json(const nlohmann::json& doc);

}  // namespace msgclass
