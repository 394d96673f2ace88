#include "msgclass/pipeline.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "msgclass/error.hpp"
#include "msgclass/json_eigen.hpp"
#include "msgclass/random.hpp"

namespace msgclass {

namespace {

Labels labels_of(const Labels& all, std::span<const std::size_t> rows, const Corpus& corpus) {
  Labels y;
  y.reserve(rows.size());
  for (auto i : rows) {
    if (all.at(i) < 0) throw DataError("training message '" + corpus[i].id + "' has no label");
    y.push_back(all[i]);
  }
  return y;
}

void check_alignment(const Corpus& corpus, const PreparedCorpus& prepared) {
  if (prepared.context().size() != corpus.size())
    throw DataError("prepared feature cache does not match the corpus");
}

// Markov and history predictions at `rows` when previous labels come from
// `truth`. The classifier input is irrelevant here, so it is left uniform.
std::pair<Matrix, Matrix> oracle_components(const TemporalModel& model, const std::vector<Stream>& streams,
                                            std::span<const std::size_t> rows, const LabelLookup& truth) {
  const auto k = static_cast<Index>(model.markov.classes.size());
  std::unordered_map<std::size_t, Index> wanted;
  for (std::size_t r = 0; r < rows.size(); ++r) wanted[rows[r]] = static_cast<Index>(r);
  Matrix pm(static_cast<Index>(rows.size()), k), ph(static_cast<Index>(rows.size()), k);
  for (const auto& s : streams) {
    if (std::none_of(s.indices.begin(), s.indices.end(), [&](std::size_t i) { return wanted.count(i) > 0; })) continue;
    const Matrix uniform = Matrix::Constant(static_cast<Index>(s.indices.size()), k, 1.0 / static_cast<double>(k));
    const auto pred = stream_predict(model, s.indices, uniform, HistoryMode::Oracle, truth);
    for (std::size_t p = 0; p < s.indices.size(); ++p) {
      const auto it = wanted.find(s.indices[p]);
      if (it == wanted.end()) continue;
      pm.row(it->second) = pred.markov.row(static_cast<Index>(p));
      ph.row(it->second) = pred.history.row(static_cast<Index>(p));
    }
  }
  return {pm, ph};
}

LabelLookup masked_truth(const Labels& all, std::span<const std::size_t> keep) {
  auto visible = std::make_shared<Labels>(all.size(), -1);
  for (auto i : keep) (*visible)[i] = all[i];
  return [visible](std::size_t i) { return visible->at(i); };
}

}  // namespace

std::vector<LabelStream> label_streams(const Corpus& corpus, std::string_view objective,
                                       std::span<const std::size_t> keep) {
  const Labels all = corpus.label_indices(objective);
  std::vector<char> visible(corpus.size(), 0);
  for (auto i : keep) visible.at(i) = 1;
  std::vector<LabelStream> out;
  for (const auto& s : partition_streams(corpus)) {
    LabelStream ls;
    ls.reserve(s.indices.size());
    for (auto i : s.indices) ls.push_back(visible[i] ? all[i] : -1);
    out.push_back(std::move(ls));
  }
  return out;
}

TrainedPipeline train_pipeline(const Corpus& corpus, const PreparedCorpus& prepared, std::span<const std::size_t> train,
                               const PipelineConfig& config) {
  check_alignment(corpus, prepared);
  if (train.empty()) throw DataError("no training messages");
  TrainedPipeline out;
  out.config = config;
  out.classes = corpus.classes(config.objective);
  const Labels all = corpus.label_indices(config.objective);
  Labels y = labels_of(all, train, corpus);

  const auto prep = prepared.prepared(train);
  const auto temp = prepared.temporal(train);
  out.featurizer = fit_featurizer(prep, temp, prepared.lexicons(), config.features);
  FeatureMatrix x = transform(prep, temp, out.featurizer);

  if (config.resample) {
    ResamplePlan plan;
    plan.k_neighbors = config.resample->k_neighbors;
    plan.seed = mix_seed(config.seed, 3);
    for (const auto& [label, count] : config.resample->targets) {
      const auto it = std::find(out.classes.begin(), out.classes.end(), label);
      if (it == out.classes.end()) throw ConfigError("resample target for unknown label '" + label + "'");
      plan.targets[static_cast<int>(it - out.classes.begin())] = count;
    }
    const auto before = x.rows();
    auto r = smote_tomek(x.values, y, plan);
    const auto synthetic = std::count(r.synthetic.begin(), r.synthetic.end(), true);
    x.values = std::move(r.features);
    y = std::move(r.labels);
    out.info["resample"] = {{"original", before}, {"synthetic", synthetic}, {"removed", r.removed}, {"rows", x.rows()}};
  }

  ModelSpec spec = config.model;
  spec.hyper.seed = mix_seed(config.seed, 5);
  out.model = train_model(spec, x, y, out.classes);

  if (config.temporal.enabled) {
    const auto& t = config.temporal;
    const auto streams = label_streams(corpus, config.objective, train);
    TemporalModel tm;
    tm.markov = fit_markov(streams, out.classes, t.smoothing);
    tm.history = fit_history(streams, out.classes, t.history_n, t.smoothing, t.min_count);
    if (t.weights) {
      validate(*t.weights);
      tm.weights = *t.weights;
    } else {
      const auto search = grid_search_mixture(corpus, prepared, train, config);
      tm.weights = search.weights;
      out.info["grid_search"] = {{"alpha", search.weights.alpha},
                                 {"beta", search.weights.beta},
                                 {"score", search.score},
                                 {"cells", search.cells}};
    }
    out.temporal = std::move(tm);
  }
  return out;
}

Matrix classifier_proba(const TrainedPipeline& p, const PreparedCorpus& prepared, std::span<const std::size_t> rows) {
  const auto x = transform(prepared.prepared(rows), prepared.temporal(rows), p.featurizer);
  return predict_proba(p.model, x.values);
}

Matrix predict_pipeline(const TrainedPipeline& p, const Corpus& corpus, const PreparedCorpus& prepared,
                        std::span<const std::size_t> rows, HistoryMode mode, const LabelLookup& truth) {
  check_alignment(corpus, prepared);
  if (!p.temporal) return classifier_proba(p, prepared, rows);
  const auto k = static_cast<Index>(p.classes.size());
  std::unordered_map<std::size_t, Index> wanted;
  for (std::size_t r = 0; r < rows.size(); ++r) wanted[rows[r]] = static_cast<Index>(r);

  std::vector<Stream> streams;
  for (auto& s : partition_streams(corpus))
    if (std::any_of(s.indices.begin(), s.indices.end(), [&](std::size_t i) { return wanted.count(i) > 0; }))
      streams.push_back(std::move(s));

  // Classifier output is needed for the targets in oracle mode and for every
  // message of an affected stream in predicted mode.
  std::vector<std::size_t> scored;
  if (mode == HistoryMode::Oracle) scored.assign(rows.begin(), rows.end());
  else
    for (const auto& s : streams) scored.insert(scored.end(), s.indices.begin(), s.indices.end());
  const Matrix pc = classifier_proba(p, prepared, scored);
  std::unordered_map<std::size_t, Index> scored_row;
  for (std::size_t r = 0; r < scored.size(); ++r) scored_row[scored[r]] = static_cast<Index>(r);

  Matrix out(static_cast<Index>(rows.size()), k);
  for (const auto& s : streams) {
    Matrix stream_pc = Matrix::Constant(static_cast<Index>(s.indices.size()), k, 1.0 / static_cast<double>(k));
    for (std::size_t q = 0; q < s.indices.size(); ++q) {
      const auto it = scored_row.find(s.indices[q]);
      if (it != scored_row.end()) stream_pc.row(static_cast<Index>(q)) = pc.row(it->second);
    }
    const auto pred = stream_predict(*p.temporal, s.indices, stream_pc, mode, truth);
    for (std::size_t q = 0; q < s.indices.size(); ++q) {
      const auto it = wanted.find(s.indices[q]);
      if (it != wanted.end()) out.row(it->second) = pred.mixed.row(static_cast<Index>(q));
    }
  }
  return out;
}

MixtureSearch grid_search_mixture(const Corpus& corpus, const PreparedCorpus& prepared,
                                  std::span<const std::size_t> train, const PipelineConfig& config) {
  const auto& t = config.temporal;
  if (t.folds < 2) throw ConfigError("grid search needs at least two folds");
  const auto classes = corpus.classes(config.objective);
  const Labels all = corpus.label_indices(config.objective);
  const Labels y = labels_of(all, train, corpus);
  const auto folds = stratified_assignment(y, t.folds, mix_seed(config.seed, 11));
  const auto truth = masked_truth(all, train);
  const auto streams = partition_streams(corpus);

  PipelineConfig inner = config;
  inner.temporal.enabled = false;
  const auto k = static_cast<Index>(classes.size());
  Matrix pc(static_cast<Index>(train.size()), k), pm(pc.rows(), k), ph(pc.rows(), k);
  Labels pooled_y;
  Index row = 0;
  for (int f = 0; f < t.folds; ++f) {
    std::vector<std::size_t> fit, held;
    for (std::size_t i = 0; i < train.size(); ++i) (folds[i] == f ? held : fit).push_back(train[i]);
    if (held.empty() || fit.empty()) continue;
    inner.seed = mix_seed(config.seed, 100 + static_cast<std::uint64_t>(f));
    const auto trained = train_pipeline(corpus, prepared, fit, inner);
    const auto n = static_cast<Index>(held.size());
    pc.middleRows(row, n) = classifier_proba(trained, prepared, held);

    const auto ls = label_streams(corpus, config.objective, fit);
    TemporalModel tm;
    tm.markov = fit_markov(ls, classes, t.smoothing);
    tm.history = fit_history(ls, classes, t.history_n, t.smoothing, t.min_count);
    auto [m, h] = oracle_components(tm, streams, held, truth);
    pm.middleRows(row, n) = m;
    ph.middleRows(row, n) = h;
    for (auto i : held) pooled_y.push_back(all[i]);
    row += n;
  }
  return select_mixture(pc.topRows(row), pm.topRows(row), ph.topRows(row), pooled_y, t.grid_step, t.metric);
}

namespace {

class StandardPipeline : public Pipeline {
 public:
  StandardPipeline(PipelineConfig config, std::shared_ptr<const LexiconSet> lexicons)
      : config_(std::move(config)), lexicons_(std::move(lexicons)) {}

  FoldOutput fit_predict(const FoldInput& in) override {
    // Resampling and fitting only ever see the training side.
    const std::unordered_set<std::size_t> test(in.test.begin(), in.test.end());
    for (auto i : in.train)
      if (test.count(i)) throw DataError("train and test rows overlap");
    std::unique_ptr<PreparedCorpus> own;
    const PreparedCorpus* prepared = in.prepared;
    if (!prepared) {
      own = std::make_unique<PreparedCorpus>(*in.context, lexicons_, config_.features.window);
      prepared = own.get();
    }
    PipelineConfig cfg = config_;
    cfg.objective = in.objective;
    cfg.seed = in.seed;
    const auto trained = train_pipeline(*in.context, *prepared, in.train, cfg);

    LabelLookup truth;
    if (in.history) truth = in.history->lookup();
    else {
      const Labels visible = in.context->label_indices(in.objective);
      truth = [visible](std::size_t i) { return visible.at(i); };
    }
    FoldOutput out;
    out.probabilities = predict_pipeline(trained, *in.context, *prepared, in.test, cfg.temporal.mode, truth);
    out.info = trained.info;
    if (trained.temporal)
      out.info["weights"] = {{"alpha", trained.temporal->weights.alpha}, {"beta", trained.temporal->weights.beta}};
    return out;
  }

 private:
  PipelineConfig config_;
  std::shared_ptr<const LexiconSet> lexicons_;
};

}  // namespace

PipelineFactory standard_pipeline_factory(PipelineConfig config, std::shared_ptr<const LexiconSet> lexicons) {
  return [config = std::move(config), lexicons = std::move(lexicons)]() -> std::unique_ptr<Pipeline> {
    return std::make_unique<StandardPipeline>(config, lexicons);
  };
}

// ---------------------------------------------------------------- json

nlohmann::json pipeline_config_to_json(const PipelineConfig& c) {
  nlohmann::json subsets = nlohmann::json::array();
  for (auto s : canonical_subsets(c.features.subsets)) subsets.push_back(std::string(to_string(s)));
  nlohmann::json j = {
      {"objective", c.objective},
      {"seed", c.seed},
      {"features",
       {{"subsets", subsets},
        {"min_df", c.features.min_df},
        {"tfidf", c.features.tfidf},
        {"scale", c.features.scale},
        {"scale_bow", c.features.scale_bow},
        {"window", c.features.window}}},
      {"model",
       {{"kind", std::string(to_string(c.model.kind))},
        {"learning_rate", c.model.hyper.learning_rate},
        {"l2", c.model.hyper.l2},
        {"epochs", c.model.hyper.epochs},
        {"inner_k", c.model.inner_k},
        {"calibration_folds", c.model.calibration_folds}}},
      {"resample", nullptr},
      {"temporal",
       {{"enabled", c.temporal.enabled},
        {"weights", nullptr},
        {"grid_step", c.temporal.grid_step},
        {"folds", c.temporal.folds},
        {"mode", std::string(to_string(c.temporal.mode))},
        {"metric", std::string(to_string(c.temporal.metric))},
        {"history_n", c.temporal.history_n},
        {"smoothing", c.temporal.smoothing},
        {"min_count", c.temporal.min_count}}}};
  if (c.resample) j["resample"] = {{"k_neighbors", c.resample->k_neighbors}, {"targets", c.resample->targets}};
  if (c.temporal.weights)
    j["temporal"]["weights"] = {{"alpha", c.temporal.weights->alpha}, {"beta", c.temporal.weights->beta}};
  return j;
}

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& into) {
  if (j.contains(key) && !j.at(key).is_null()) into = j.at(key).get<T>();
}

}  // namespace

PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig c) {
  try {
    expect_keys(j, "pipeline", {"objective", "seed", "features", "model", "resample", "temporal"});
    read(j, "objective", c.objective);
    read(j, "seed", c.seed);
    if (j.contains("features")) {
      const auto& f = j.at("features");
      expect_keys(f, "features", {"subsets", "min_df", "tfidf", "scale", "scale_bow", "window"});
      if (f.contains("subsets")) {
        c.features.subsets.clear();
        for (const auto& s : f.at("subsets")) c.features.subsets.push_back(parse_subset(s.get<std::string>()));
        if (c.features.subsets.empty()) throw ConfigError("features.subsets must not be empty");
      }
      read(f, "min_df", c.features.min_df);
      read(f, "tfidf", c.features.tfidf);
      read(f, "scale", c.features.scale);
      read(f, "scale_bow", c.features.scale_bow);
      read(f, "window", c.features.window);
    }
    if (j.contains("model")) {
      const auto& m = j.at("model");
      expect_keys(m, "model", {"kind", "learning_rate", "l2", "epochs", "inner_k", "calibration_folds"});
      if (m.contains("kind")) c.model.kind = parse_model_kind(m.at("kind").get<std::string>());
      read(m, "learning_rate", c.model.hyper.learning_rate);
      read(m, "l2", c.model.hyper.l2);
      read(m, "epochs", c.model.hyper.epochs);
      read(m, "inner_k", c.model.inner_k);
      read(m, "calibration_folds", c.model.calibration_folds);
    }
    if (j.contains("resample")) {
      const auto& r = j.at("resample");
      if (r.is_null() || (r.is_boolean() && !r.get<bool>())) c.resample.reset();
      else {
        ResampleConfig rc;
        if (r.is_object()) {
          expect_keys(r, "resample", {"k_neighbors", "targets"});
          read(r, "k_neighbors", rc.k_neighbors);
          read(r, "targets", rc.targets);
        }
        c.resample = rc;
      }
    }
    if (j.contains("temporal")) {
      const auto& t = j.at("temporal");
      expect_keys(t, "temporal",
                  {"enabled", "weights", "grid_step", "folds", "mode", "metric", "history_n", "smoothing", "min_count"});
      read(t, "enabled", c.temporal.enabled);
      if (t.contains("weights")) {
        if (t.at("weights").is_null()) c.temporal.weights.reset();
        else c.temporal.weights = MixtureWeights{t.at("weights").at("alpha").get<double>(),
                                                 t.at("weights").at("beta").get<double>()};
      }
      read(t, "grid_step", c.temporal.grid_step);
      read(t, "folds", c.temporal.folds);
      if (t.contains("mode")) c.temporal.mode = parse_history_mode(t.at("mode").get<std::string>());
      if (t.contains("metric")) c.temporal.metric = parse_selection_metric(t.at("metric").get<std::string>());
      read(t, "history_n", c.temporal.history_n);
      read(t, "smoothing", c.temporal.smoothing);
      read(t, "min_count", c.temporal.min_count);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("pipeline config: ") + e.what());
  }
  if (c.features.min_df < 1) throw ConfigError("features.min_df must be at least 1");
  if (c.features.window < 0) throw ConfigError("features.window must be non-negative");
  if (!(c.model.hyper.learning_rate > 0)) throw ConfigError("model.learning_rate must be positive");
  if (!(c.model.hyper.l2 >= 0)) throw ConfigError("model.l2 must be non-negative");
  if (c.model.hyper.epochs < 1) throw ConfigError("model.epochs must be at least 1");
  if (c.model.inner_k < 2) throw ConfigError("model.inner_k must be at least 2");
  if (c.model.calibration_folds < 2) throw ConfigError("model.calibration_folds must be at least 2");
  if (c.resample && c.resample->k_neighbors < 1) throw ConfigError("resample.k_neighbors must be at least 1");
  if (c.temporal.weights) validate(*c.temporal.weights);
  if (c.temporal.history_n < 0) throw ConfigError("temporal.history_n must be non-negative");
  if (!(c.temporal.smoothing >= 0)) throw ConfigError("temporal.smoothing must be non-negative");
  if (c.temporal.folds < 2) throw ConfigError("temporal.folds must be at least 2");
  {
    const double cells = 1.0 / c.temporal.grid_step;
    if (!(c.temporal.grid_step > 0) || std::abs(cells - std::round(cells)) > 1e-9)
      throw ConfigError("temporal.grid_step must divide 1 evenly");
  }
  return c;
}

nlohmann::json pipeline_to_json(const TrainedPipeline& p) {
  nlohmann::json j = {{"format_version", 1},
                      {"config", pipeline_config_to_json(p.config)},
                      {"classes", p.classes},
                      {"featurizer", featurizer_to_json(p.featurizer)},
                      {"model", model_to_json(p.model)},
                      {"temporal", nullptr},
                      {"info", p.info}};
  if (p.temporal) j["temporal"] = temporal_to_json(*p.temporal);
  return j;
}

TrainedPipeline pipeline_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != 1) throw DataError("model bundle: unsupported format_version");
    TrainedPipeline p;
    p.config = pipeline_config_from_json(j.at("config"));
    p.classes = j.at("classes").get<std::vector<std::string>>();
    p.featurizer = featurizer_from_json(j.at("featurizer"));
    p.model = model_from_json(j.at("model"));
    if (!j.at("temporal").is_null()) p.temporal = temporal_from_json(j.at("temporal"));
    p.info = j.value("info", nlohmann::json{});
    if (model_classes(p.model) != p.classes) throw DataError("model bundle: class lists disagree");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model bundle: ") + e.what());
  }
}

}  // namespace msgclass
