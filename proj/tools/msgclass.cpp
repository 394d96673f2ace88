// msgclass: command-line front end for the chat-message classification toolkit.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msgclass/balance.hpp"
#include "msgclass/config.hpp"
#include "msgclass/corpus.hpp"
#include "msgclass/csv.hpp"
#include "msgclass/cv.hpp"
#include "msgclass/error.hpp"
#include "msgclass/features.hpp"
#include "msgclass/metrics.hpp"
#include "msgclass/pipeline.hpp"
#include "msgclass/rank.hpp"
#include "msgclass/report.hpp"
#include "msgclass/synthetic.hpp"
#include "msgclass/textnorm.hpp"

namespace fs = std::filesystem;
using namespace msgclass;

namespace {

// Flags shared by the corpus-driven subcommands; unset ones leave the config
// file (or built-in default) value alone.
struct CommonFlags {
  std::string config;
  std::string corpus;
  std::string lexicons;
  std::string out;
  std::string objective;
  std::string subsets;
  std::string model;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> k;
  std::optional<int> repeats;
  std::optional<int> epochs;
  std::optional<double> learning_rate;
  std::optional<double> l2;
  std::optional<int> inner_k;
  bool resample = false;
  bool temporal = false;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::string history_mode;
  std::optional<double> grid_step;
  std::optional<double> test_fraction;
};

void add_common(CLI::App* app, CommonFlags& f, bool model_flags = true) {
  app->add_option("-c,--config", f.config, "run config (JSON)");
  app->add_option("--corpus", f.corpus, "corpus CSV");
  app->add_option("--lexicons", f.lexicons, "directory of lexicon files");
  app->add_option("-o,--out", f.out, "output directory");
  app->add_option("--objective", f.objective, "relevance, type, category_broad, ...");
  app->add_option("--subsets", f.subsets, "comma-separated feature subsets");
  app->add_option("--seed", f.seed, "seed");
  app->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  if (!model_flags) return;
  app->add_option("--model", f.model, "majority, uniform, logistic, svm or stack");
  app->add_option("--k", f.k, "CV folds");
  app->add_option("--repeats", f.repeats, "CV repeats");
  app->add_option("--epochs", f.epochs, "training epochs");
  app->add_option("--learning-rate", f.learning_rate, "initial learning rate");
  app->add_option("--l2", f.l2, "L2 strength");
  app->add_option("--inner-k", f.inner_k, "inner folds of the stacking ensemble");
  app->add_flag("--resample", f.resample, "SMOTE + Tomek on training partitions");
  app->add_flag("--temporal", f.temporal, "mix in the Markov and history label models");
  app->add_option("--alpha", f.alpha, "fixed Markov weight (skips the grid search)");
  app->add_option("--beta", f.beta, "fixed history weight (skips the grid search)");
  app->add_option("--history-mode", f.history_mode, "oracle or predicted");
  app->add_option("--grid-step", f.grid_step, "mixture grid resolution");
  app->add_option("--test-fraction", f.test_fraction, "holdout share for train --holdout");
}

RunConfig resolve_config(const CommonFlags& f) {
  RunConfig c;
  if (!f.config.empty()) c = load_run_config(f.config);
  if (!f.corpus.empty()) c.corpus = f.corpus;
  if (!f.lexicons.empty()) c.lexicons = f.lexicons;
  if (!f.out.empty()) c.output = f.out;
  auto& p = c.pipeline;
  if (!f.objective.empty()) p.objective = f.objective;
  if (!f.subsets.empty()) {
    p.features.subsets.clear();
    std::stringstream ss(f.subsets);
    for (std::string s; std::getline(ss, s, ',');)
      if (!s.empty()) p.features.subsets.push_back(parse_subset(s));
    if (p.features.subsets.empty()) throw ConfigError("--subsets is empty");
  }
  if (!f.model.empty()) p.model.kind = parse_model_kind(f.model);
  if (f.seed) {
    p.seed = *f.seed;
    c.cv.seed = *f.seed;
    c.rank.seed = *f.seed;
  }
  if (f.threads) c.threads = *f.threads;
  if (f.k) c.cv.k = *f.k;
  if (f.repeats) c.cv.repeats = *f.repeats;
  if (f.epochs) p.model.hyper.epochs = *f.epochs;
  if (f.learning_rate) p.model.hyper.learning_rate = *f.learning_rate;
  if (f.l2) p.model.hyper.l2 = *f.l2;
  if (f.inner_k) p.model.inner_k = *f.inner_k;
  if (f.resample && !p.resample) p.resample = ResampleConfig{};
  if (f.temporal) p.temporal.enabled = true;
  if (f.alpha || f.beta) p.temporal.weights = MixtureWeights{f.alpha.value_or(0.0), f.beta.value_or(0.0)};
  if (!f.history_mode.empty()) p.temporal.mode = parse_history_mode(f.history_mode);
  if (f.grid_step) p.temporal.grid_step = *f.grid_step;
  if (f.test_fraction) c.test_fraction = *f.test_fraction;
  // No lexicons given: use a `lexicons` directory next to the corpus if there is one.
  if (!c.lexicons && c.corpus) {
    const auto sibling = c.corpus->parent_path() / "lexicons";
    if (fs::is_directory(sibling)) c.lexicons = sibling;
  }
  // Absolute paths keep the written config re-runnable from any directory.
  if (c.corpus) c.corpus = fs::absolute(*c.corpus).lexically_normal();
  if (c.lexicons) c.lexicons = fs::absolute(*c.lexicons).lexically_normal();
  c.output = fs::absolute(c.output).lexically_normal();
  // Re-validate the merged values through the JSON path.
  return run_config_from_json(run_config_to_json(c));
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

Corpus load_input_corpus(const RunConfig& c) {
  if (!c.corpus) throw ConfigError("no corpus given (use --corpus or the config's \"corpus\")");
  std::vector<std::string> warnings;
  auto corpus = load_corpus(*c.corpus, &warnings);
  print_warnings(warnings);
  return corpus;
}

std::shared_ptr<const LexiconSet> load_input_lexicons(const RunConfig& c) {
  const auto& dir = c.lexicons;
  if (!dir) {
    std::cerr << "warning: no lexicons given; lexicon features will be zero\n";
    return std::make_shared<const LexiconSet>();
  }
  if (!fs::is_directory(*dir)) throw ConfigError("lexicon directory " + dir->string() + " does not exist");
  return std::make_shared<const LexiconSet>(load_lexicons(LexiconPaths::in_directory(*dir)));
}

void write_resolved(const RunConfig& c) {
  auto doc = run_config_to_json(c);
  write_json_file(c.output / "config.json", doc);
}

std::vector<std::size_t> labelled_rows(const Corpus& corpus, const std::string& objective) {
  const auto y = corpus.label_indices(objective);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] >= 0) rows.push_back(i);
  if (rows.empty()) throw DataError("no message is labelled for '" + objective + "'");
  return rows;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string matrix_csv(const Corpus& corpus, std::span<const std::size_t> rows, const FeatureMatrix& x) {
  std::ostringstream os;
  os << "id";
  for (const auto& c : x.columns) os << ',' << csv::escape(c);
  os << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    os << csv::escape(corpus[rows[r]].id);
    for (Index c = 0; c < x.cols(); ++c) os << ',' << format_number(x.values(static_cast<Index>(r), c));
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------- commands

int cmd_validate(const CommonFlags& f) {
  const auto c = resolve_config(f);
  if (!c.corpus) throw ConfigError("no corpus given");
  std::vector<std::string> warnings;
  const auto corpus = load_corpus(*c.corpus, &warnings);
  print_warnings(warnings);
  nlohmann::json summary = {{"messages", corpus.size()}, {"warnings", warnings}};
  const auto streams = partition_streams(corpus);
  summary["streams"] = streams.size();
  std::cout << corpus.size() << " messages in " << streams.size() << " streams\n";
  for (const auto& [objective, classes] : corpus.objectives()) {
    const auto y = corpus.label_indices(objective);
    std::map<std::string, int> counts;
    int missing = 0;
    for (int v : y) {
      if (v < 0) ++missing;
      else ++counts[classes[static_cast<std::size_t>(v)]];
    }
    summary["objectives"][objective] = {{"labels", counts}, {"unlabelled", missing}};
    std::cout << objective << ":";
    for (const auto& [label, n] : counts) std::cout << ' ' << label << '=' << n;
    if (missing) std::cout << " (unlabelled " << missing << ")";
    std::cout << '\n';
  }
  write_json_file(c.output / "validation.json", summary);
  write_resolved(c);
  return 0;
}

int cmd_generate(const std::string& config_path, const std::string& out, std::optional<std::size_t> messages,
                 std::optional<std::uint64_t> seed, const std::string& dump) {
  if (!dump.empty()) {
    write_json_file(dump, default_generator_json());
    std::cout << "wrote " << dump << '\n';
    return 0;
  }
  nlohmann::json doc = config_path.empty() ? default_generator_json() : read_json_file(config_path);
  if (messages) doc["messages"] = *messages;
  const std::uint64_t s = seed.value_or(doc.value("seed", std::uint64_t{1}));
  doc["seed"] = s;
  const auto gen = generator_config_from_json(doc);
  const auto corpus = generate_synthetic(gen, s);
  const fs::path dir = out.empty() ? fs::path("synthetic") : fs::path(out);
  save_corpus(corpus, dir / "corpus.csv");
  save_lexicons(synthetic_lexicons(gen), dir / "lexicons");
  write_json_file(dir / "generator.json", doc);
  std::cout << "wrote " << corpus.size() << " messages to " << (dir / "corpus.csv").string() << '\n';
  return 0;
}

int cmd_featurize(const CommonFlags& f) {
  const auto c = resolve_config(f);
  const auto corpus = load_input_corpus(c);
  const auto lex = load_input_lexicons(c);
  const PreparedCorpus prepared(corpus, lex, c.pipeline.features.window);
  std::vector<std::size_t> rows(corpus.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const auto prep = prepared.prepared(rows);
  const auto temp = prepared.temporal(rows);
  const auto fitted = fit_featurizer(prep, temp, lex, c.pipeline.features);
  const auto x = transform(prep, temp, fitted);
  write_text_file(c.output / "features.csv", matrix_csv(corpus, rows, x));
  write_json_file(c.output / "featurizer.json", featurizer_to_json(fitted));
  write_resolved(c);
  std::cout << x.rows() << " x " << x.cols() << " features;";
  for (const auto& r : x.subsets) std::cout << ' ' << to_string(r.subset) << '=' << r.size();
  std::cout << '\n';
  return 0;
}

struct Featurized {
  std::vector<std::size_t> rows;
  Labels y;
  FeatureMatrix x;
};

Featurized featurize_labelled(const Corpus& corpus, std::shared_ptr<const LexiconSet> lex, const RunConfig& c) {
  Featurized out;
  out.rows = labelled_rows(corpus, c.pipeline.objective);
  const auto all = corpus.label_indices(c.pipeline.objective);
  for (auto i : out.rows) out.y.push_back(all[i]);
  const PreparedCorpus prepared(corpus, lex, c.pipeline.features.window);
  const auto prep = prepared.prepared(out.rows);
  const auto temp = prepared.temporal(out.rows);
  const auto fitted = fit_featurizer(prep, temp, lex, c.pipeline.features);
  out.x = transform(prep, temp, fitted);
  return out;
}

int cmd_balance(const CommonFlags& f) {
  auto c = resolve_config(f);
  if (!c.pipeline.resample) c.pipeline.resample = ResampleConfig{};
  const auto corpus = load_input_corpus(c);
  const auto data = featurize_labelled(corpus, load_input_lexicons(c), c);
  const auto& classes = corpus.classes(c.pipeline.objective);
  ResamplePlan plan;
  plan.k_neighbors = c.pipeline.resample->k_neighbors;
  plan.seed = c.pipeline.seed;
  for (const auto& [label, count] : c.pipeline.resample->targets) {
    const auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) throw ConfigError("resample target for unknown label '" + label + "'");
    plan.targets[static_cast<int>(it - classes.begin())] = count;
  }
  const auto r = smote_tomek(data.x.values, data.y, plan);

  std::ostringstream os;
  os << "label,synthetic";
  for (const auto& col : data.x.columns) os << ',' << csv::escape(col);
  os << '\n';
  for (Index i = 0; i < r.features.rows(); ++i) {
    os << csv::escape(classes[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])]) << ','
       << (r.synthetic[static_cast<std::size_t>(i)] ? 1 : 0);
    for (Index j = 0; j < r.features.cols(); ++j) os << ',' << format_number(r.features(i, j));
    os << '\n';
  }
  write_text_file(c.output / "balanced.csv", os.str());
  nlohmann::json summary;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const auto before = std::count(data.y.begin(), data.y.end(), static_cast<int>(k));
    const auto after = std::count(r.labels.begin(), r.labels.end(), static_cast<int>(k));
    summary["classes"][classes[k]] = {{"before", before}, {"after", after}};
    std::cout << classes[k] << ": " << before << " -> " << after << '\n';
  }
  summary["synthetic"] = std::count(r.synthetic.begin(), r.synthetic.end(), true);
  summary["removed_by_tomek"] = r.removed;
  write_json_file(c.output / "balance.json", summary);
  write_resolved(c);
  return 0;
}

int cmd_rank(const CommonFlags& f) {
  const auto c = resolve_config(f);
  const auto corpus = load_input_corpus(c);
  const auto data = featurize_labelled(corpus, load_input_lexicons(c), c);
  std::vector<std::string> warnings;
  const auto swrf = swrf_star(data.x.values, data.y, data.x.columns, c.rank, &warnings);
  print_warnings(warnings);
  LinearHyper h = c.pipeline.model.hyper;
  h.seed = c.pipeline.seed;
  const auto lr = lr_importance(train_logistic(data.x.values, data.y, corpus.classes(c.pipeline.objective), h),
                                data.x.columns);
  const std::vector<FeatureRanking> both = {swrf, lr};
  const auto mean = aggregate_ranks(both);
  write_text_file(c.output / "rank_swrf.csv", ranking_to_csv(swrf));
  write_text_file(c.output / "rank_lr.csv", ranking_to_csv(lr));
  write_text_file(c.output / "rank_mean.csv", ranking_to_csv(mean));
  write_resolved(c);
  std::vector<std::size_t> order(mean.features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return mean.ranks[a] < mean.ranks[b]; });
  std::cout << "top features by mean rank:\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(10, order.size()); ++i)
    std::printf("%3zu. %-40s %.1f\n", i + 1, mean.features[order[i]].c_str(), mean.scores[order[i]]);
  return 0;
}

EvalReport holdout_report(const Corpus& corpus, const RunConfig& c, std::span<const std::size_t> test,
                          const Matrix& proba) {
  const auto& classes = corpus.classes(c.pipeline.objective);
  const auto all = corpus.label_indices(c.pipeline.objective);
  Labels yt, yp;
  const auto predicted = argmax_rows(proba);
  std::vector<double> scores;
  std::vector<int> positive;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (all[test[i]] < 0) continue;
    yt.push_back(all[test[i]]);
    yp.push_back(predicted[i]);
    if (classes.size() == 2) {
      scores.push_back(proba(static_cast<Index>(i), 1));
      positive.push_back(all[test[i]] == 1);
    }
  }
  EvalReport r;
  r.objective = c.pipeline.objective;
  r.classes = classes;
  r.confusion = confusion(yt, yp, classes.size());
  r.metrics = prf(r.confusion);
  r.accuracy = accuracy(r.confusion);
  r.macro_f1 = macro_f1(r.confusion);
  r.folds.push_back({0, 0, r.accuracy, r.macro_f1, yt.size(), {}});
  r.seed = c.pipeline.seed;
  r.config = run_config_to_json(c);
  r.config_fingerprint = fingerprint(r.config.dump());
  if (classes.size() == 2 && std::count(positive.begin(), positive.end(), 1) > 0 &&
      std::count(positive.begin(), positive.end(), 0) > 0)
    r.roc = roc_auc(scores, positive);
  return r;
}

int cmd_train(const CommonFlags& f, bool holdout) {
  const auto c = resolve_config(f);
  const auto corpus = load_input_corpus(c);
  const auto lex = load_input_lexicons(c);
  const PreparedCorpus prepared(corpus, lex, c.pipeline.features.window);
  std::vector<std::size_t> train = labelled_rows(corpus, c.pipeline.objective);
  if (holdout) {
    std::vector<std::string> warnings;
    const auto labelled = corpus.subset(train);
    auto split = split_train_test(labelled, c.test_fraction, c.pipeline.objective, c.pipeline.seed, &warnings);
    print_warnings(warnings);
    std::vector<std::size_t> tr, te;
    for (auto i : split.train_index) tr.push_back(train[i]);
    for (auto i : split.test_index) te.push_back(train[i]);
    // The model must not see the held-out labels, temporal models included.
    const auto context = corpus.without_labels(te, c.pipeline.objective);
    const auto trained = train_pipeline(context, prepared, tr, c.pipeline);
    const auto truth_labels = corpus.label_indices(c.pipeline.objective);
    const LabelLookup truth = [&](std::size_t i) { return truth_labels.at(i); };
    const auto proba = predict_pipeline(trained, context, prepared, te, c.pipeline.temporal.mode, truth);
    const auto report = holdout_report(corpus, c, te, proba);
    write_json_file(c.output / "holdout.json", report_to_json(report));
    write_text_file(c.output / "holdout.txt", report_to_text(report) + "\n" + confusion_to_text(report));
    if (report.roc) write_text_file(c.output / "roc.csv", roc_to_csv(*report.roc));
    write_json_file(c.output / "model.json", pipeline_to_json(trained));
    std::cout << report_to_text(report) << '\n' << confusion_to_text(report);
  } else {
    const auto trained = train_pipeline(corpus, prepared, train, c.pipeline);
    write_json_file(c.output / "model.json", pipeline_to_json(trained));
    std::cout << "trained " << to_string(c.pipeline.model.kind) << " on " << train.size() << " messages\n";
    if (trained.temporal)
      std::cout << "mixture alpha=" << trained.temporal->weights.alpha << " beta=" << trained.temporal->weights.beta
                << '\n';
  }
  write_resolved(c);
  return 0;
}

int cmd_evaluate(const CommonFlags& f) {
  const auto c = resolve_config(f);
  const auto corpus_all = load_input_corpus(c);
  // Unlabelled messages cannot be scored; they are dropped up front.
  const auto corpus = corpus_all.subset(labelled_rows(corpus_all, c.pipeline.objective));
  const auto lex = load_input_lexicons(c);
  const auto plan = make_cv_folds(corpus, c.cv.k, c.cv.repeats, c.pipeline.objective, c.cv.seed);
  const PreparedCorpus prepared(corpus, lex, c.pipeline.features.window);
  CvOptions options;
  options.threads = c.threads;
  // Where outputs go and how many threads run do not change results, so they
  // stay out of the fingerprinted config.
  options.config = run_config_to_json(c);
  options.config.erase("output");
  options.config.erase("threads");
  const auto report = run_cv(corpus, plan, standard_pipeline_factory(c.pipeline, lex), options, &prepared);

  write_json_file(c.output / "report.json", report_to_json(report));
  write_text_file(c.output / "report.txt", report_to_text(report));
  write_text_file(c.output / "confusion.txt", confusion_to_text(report));
  if (report.roc) write_text_file(c.output / "roc.csv", roc_to_csv(*report.roc));
  std::ostringstream folds;
  folds << "repeat,fold,accuracy,macro_f1,instances\n";
  for (const auto& s : report.folds)
    folds << s.repeat << ',' << s.fold << ',' << format_number(s.accuracy) << ',' << format_number(s.macro_f1) << ','
          << s.instances << '\n';
  write_text_file(c.output / "folds.csv", folds.str());
  write_json_file(c.output / "fold_plan.json", fold_plan_to_json(plan));
  write_resolved(c);
  std::cout << report_to_text(report) << '\n' << confusion_to_text(report);
  return 0;
}

int cmd_compare(const std::string& a, const std::string& b, std::optional<double> rope, const std::string& metric,
                const std::string& name_a, const std::string& name_b, const std::string& out) {
  const auto ra = report_from_json(read_json_file(a, false));
  const auto rb = report_from_json(read_json_file(b, false));
  const auto m = metric.empty() ? ScoreMetric::Accuracy : parse_score_metric(metric);
  const auto result = compare(ra, rb, rope.value_or(0.01), m, name_a, name_b);
  const fs::path dir = out.empty() ? fs::path("out") : fs::path(out);
  write_json_file(dir / "comparison.json", comparison_to_json(result));
  write_json_file(dir / "config.json", {{"a", a},
                                        {"b", b},
                                        {"rope", rope.value_or(0.01)},
                                        {"metric", metric.empty() ? "accuracy" : metric},
                                        {"names", {name_a, name_b}}});
  std::printf("p_left=%.4f p_rope=%.4f p_right=%.4f\n%s\n", result.result.p_left, result.result.p_rope,
              result.result.p_right, result.verdict.c_str());
  return 0;
}

int cmd_tune(const CommonFlags& f) {
  auto c = resolve_config(f);
  c.pipeline.temporal.enabled = true;
  c.pipeline.temporal.weights.reset();
  const auto corpus = load_input_corpus(c);
  const auto lex = load_input_lexicons(c);
  const PreparedCorpus prepared(corpus, lex, c.pipeline.features.window);
  const auto rows = labelled_rows(corpus, c.pipeline.objective);
  const auto search = grid_search_mixture(corpus, prepared, rows, c.pipeline);
  write_json_file(c.output / "mixture.json", {{"format_version", 1},
                                              {"objective", c.pipeline.objective},
                                              {"alpha", search.weights.alpha},
                                              {"beta", search.weights.beta},
                                              {"score", search.score},
                                              {"metric", std::string(to_string(c.pipeline.temporal.metric))},
                                              {"cells", search.cells}});
  write_resolved(c);
  std::printf("alpha=%.2f beta=%.2f (%s %.4f over %zu grid cells)\n", search.weights.alpha, search.weights.beta,
              std::string(to_string(c.pipeline.temporal.metric)).c_str(), search.score, search.cells);
  return 0;
}

int cmd_predict(const CommonFlags& f, const std::string& model_path) {
  const auto c = resolve_config(f);
  const auto corpus = load_input_corpus(c);
  const auto trained = pipeline_from_json(read_json_file(model_path, false));
  auto lex = trained.featurizer.lexicons ? trained.featurizer.lexicons : std::make_shared<const LexiconSet>();
  const PreparedCorpus prepared(corpus, lex, trained.config.features.window);
  std::vector<std::size_t> rows(corpus.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  const auto mode = f.history_mode.empty() ? trained.config.temporal.mode : parse_history_mode(f.history_mode);
  // Oracle history can only use labels the input actually carries.
  Labels truth_labels(corpus.size(), -1);
  if (corpus.has_objective(trained.config.objective)) {
    const auto& cls = corpus.classes(trained.config.objective);
    const auto local = corpus.label_indices(trained.config.objective);
    for (std::size_t i = 0; i < local.size(); ++i) {
      if (local[i] < 0) continue;
      const auto it = std::find(trained.classes.begin(), trained.classes.end(), cls[static_cast<std::size_t>(local[i])]);
      if (it != trained.classes.end()) truth_labels[i] = static_cast<int>(it - trained.classes.begin());
    }
  }
  const LabelLookup truth = [&](std::size_t i) { return truth_labels.at(i); };
  const auto proba = predict_pipeline(trained, corpus, prepared, rows, mode, truth);
  const auto predicted = argmax_rows(proba);
  std::ostringstream os;
  os << "id,predicted";
  for (const auto& cl : trained.classes) os << ',' << csv::escape("p_" + cl);
  os << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << csv::escape(corpus[i].id) << ',' << csv::escape(trained.classes[static_cast<std::size_t>(predicted[i])]);
    for (Index k = 0; k < proba.cols(); ++k) os << ',' << format_number(proba(static_cast<Index>(i), k));
    os << '\n';
  }
  write_text_file(c.output / "predictions.csv", os.str());
  write_resolved(c);
  std::cout << "wrote " << rows.size() << " predictions to " << (c.output / "predictions.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chat-message classification toolkit"};
  app.require_subcommand(1);

  CommonFlags validate_f, featurize_f, balance_f, rank_f, train_f, evaluate_f, tune_f, predict_f;

  auto* validate = app.add_subcommand("validate", "check a corpus CSV and summarize it");
  add_common(validate, validate_f, false);

  std::string gen_config, gen_out, gen_dump;
  std::optional<std::size_t> gen_messages;
  std::optional<std::uint64_t> gen_seed;
  auto* generate = app.add_subcommand("generate", "write a synthetic corpus and its lexicons");
  generate->add_option("-c,--config", gen_config, "generator config (JSON); default is the bundled one");
  generate->add_option("-o,--out", gen_out, "output directory");
  generate->add_option("-n,--messages", gen_messages, "message count");
  generate->add_option("--seed", gen_seed, "seed");
  generate->add_option("--dump-config", gen_dump, "write the bundled generator config to this file and stop");

  auto* featurize = app.add_subcommand("featurize", "fit features on a corpus and export the matrix");
  add_common(featurize, featurize_f, false);
  auto* balance = app.add_subcommand("balance", "SMOTE + Tomek resampling of the featurized corpus");
  add_common(balance, balance_f, false);
  auto* rank = app.add_subcommand("rank", "SWRF*, logistic-coefficient and mean-rank feature rankings");
  add_common(rank, rank_f);
  bool holdout = false;
  auto* train = app.add_subcommand("train", "train a model bundle");
  add_common(train, train_f);
  train->add_flag("--holdout", holdout, "train on a stratified split and report on the held-out part");
  auto* evaluate = app.add_subcommand("evaluate", "repeated stratified cross-validation");
  add_common(evaluate, evaluate_f);

  std::string cmp_a, cmp_b, cmp_metric, cmp_out, cmp_name_a = "A", cmp_name_b = "B";
  std::optional<double> cmp_rope;
  auto* cmp = app.add_subcommand("compare", "Bayesian correlated t-test between two evaluation reports");
  cmp->add_option("a", cmp_a, "report.json of the first pipeline")->required();
  cmp->add_option("b", cmp_b, "report.json of the second pipeline")->required();
  cmp->add_option("--rope", cmp_rope, "half-width of the region of practical equivalence");
  cmp->add_option("--metric", cmp_metric, "accuracy or macro_f1");
  cmp->add_option("--name-a", cmp_name_a, "label of the first pipeline");
  cmp->add_option("--name-b", cmp_name_b, "label of the second pipeline");
  cmp->add_option("-o,--out", cmp_out, "output directory");

  auto* tune = app.add_subcommand("tune-mixture", "cross-validated grid search of the temporal mixture weights");
  add_common(tune, tune_f);
  std::string model_path;
  auto* predict = app.add_subcommand("predict", "apply a trained model bundle to a corpus");
  add_common(predict, predict_f, false);
  predict->add_option("-m,--model", model_path, "model.json from train")->required();
  predict->add_option("--history-mode", predict_f.history_mode, "oracle or predicted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*validate) return cmd_validate(validate_f);
    if (*generate) return cmd_generate(gen_config, gen_out, gen_messages, gen_seed, gen_dump);
    if (*featurize) return cmd_featurize(featurize_f);
    if (*balance) return cmd_balance(balance_f);
    if (*rank) return cmd_rank(rank_f);
    if (*train) return cmd_train(train_f, holdout);
    if (*evaluate) return cmd_evaluate(evaluate_f);
    if (*cmp) return cmd_compare(cmp_a, cmp_b, cmp_rope, cmp_metric, cmp_name_a, cmp_name_b, cmp_out);
    if (*tune) return cmd_tune(tune_f);
    if (*predict) return cmd_predict(predict_f, model_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
