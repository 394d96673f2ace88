#include "msgclass/cv.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

#include "msgclass/error.hpp"
#include "msgclass/models.hpp"
#include "msgclass/random.hpp"

namespace msgclass {

namespace {

struct FoldResult {
  Labels predicted;
  Matrix probabilities;
  std::vector<std::size_t> test;
  nlohmann::json info;
  std::exception_ptr error;
};

[[noreturn]] void rethrow_for_fold(std::exception_ptr e, int repeat, int fold) {
  const std::string where = "fold (repeat " + std::to_string(repeat) + ", fold " + std::to_string(fold) + "): ";
  try {
    std::rethrow_exception(e);
  } catch (const NumericError& x) {
    throw NumericError(where + x.what());
  } catch (const ConfigError& x) {
    throw ConfigError(where + x.what());
  } catch (const DataError& x) {
    throw DataError(where + x.what());
  } catch (const std::exception& x) {
    throw Error(where + x.what());
  }
}

}  // namespace

EvalReport run_cv(const Corpus& corpus, const FoldPlan& plan, const PipelineFactory& factory, const CvOptions& options,
                  const PreparedCorpus* prepared) {
  if (plan.ids.size() != corpus.size()) throw DataError("run_cv: fold plan does not cover the corpus");
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (plan.ids[i] != corpus[i].id) throw DataError("run_cv: fold plan ids do not match the corpus order");
  const auto& classes = corpus.classes(plan.objective);
  const Labels truth = corpus.label_indices(plan.objective);
  const std::size_t tasks = plan.evaluations();
  std::vector<FoldResult> results(tasks);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks && !failed.load();) {
      const int repeat = static_cast<int>(t) / plan.k;
      const int fold = static_cast<int>(t) % plan.k;
      auto& out = results[t];
      try {
        FoldInput in;
        in.repeat = repeat;
        in.fold = fold;
        in.objective = plan.objective;
        in.train = plan.train_indices(repeat, fold);
        in.test = plan.test_indices(repeat, fold);
        const Corpus context = corpus.without_labels(in.test, plan.objective);
        const LabelHistory history(truth);
        in.context = &context;
        in.prepared = prepared;
        in.history = &history;
        in.seed = mix_seed(plan.seed, t);
        auto pipeline = factory();
        auto result = pipeline->fit_predict(in);
        if (result.probabilities.rows() != static_cast<Index>(in.test.size()) ||
            result.probabilities.cols() != static_cast<Index>(classes.size()))
          throw DataError("pipeline returned probabilities of the wrong shape");
        out.predicted = result.predicted.empty() ? argmax_rows(result.probabilities) : result.predicted;
        out.probabilities = std::move(result.probabilities);
        out.info = std::move(result.info);
        out.test = std::move(in.test);
      } catch (...) {
        out.error = std::current_exception();
        failed.store(true);
      }
    }
  };
  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(tasks, 1)));
  {
    std::vector<std::jthread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  for (std::size_t t = 0; t < tasks; ++t)
    if (results[t].error) rethrow_for_fold(results[t].error, static_cast<int>(t) / plan.k, static_cast<int>(t) % plan.k);

  EvalReport report;
  report.objective = plan.objective;
  report.classes = classes;
  report.k = plan.k;
  report.repeats = plan.repeats;
  report.seed = plan.seed;
  report.plan_fingerprint = fingerprint(fold_plan_to_json(plan).dump());
  report.config = options.config;
  report.config_fingerprint = fingerprint(options.config.dump());
  const std::size_t n_classes = classes.size();
  report.metrics.precision.assign(n_classes, 0.0);
  report.metrics.recall.assign(n_classes, 0.0);
  report.metrics.f1.assign(n_classes, 0.0);
  report.metrics.support.assign(n_classes, 0.0);
  report.confusion = Matrix::Zero(static_cast<Index>(n_classes), static_cast<Index>(n_classes));

  std::vector<double> roc_scores;
  std::vector<int> roc_truth;
  const int positive = options.positive_class.value_or(1);
  for (std::size_t t = 0; t < tasks; ++t) {
    const auto& r = results[t];
    Labels yt, yp;
    for (std::size_t i = 0; i < r.test.size(); ++i) {
      const int label = truth[r.test[i]];
      if (label < 0) continue;
      yt.push_back(label);
      yp.push_back(r.predicted[i]);
      if (t < static_cast<std::size_t>(plan.k) && n_classes == 2) {
        roc_scores.push_back(r.probabilities(static_cast<Index>(i), positive));
        roc_truth.push_back(label == positive ? 1 : 0);
      }
    }
    const Matrix c = confusion(yt, yp, n_classes);
    const auto m = prf(c);
    for (std::size_t j = 0; j < n_classes; ++j) {
      report.metrics.precision[j] += m.precision[j];
      report.metrics.recall[j] += m.recall[j];
      report.metrics.f1[j] += m.f1[j];
      report.metrics.support[j] += m.support[j];
    }
    if (t < static_cast<std::size_t>(plan.k)) report.confusion += c;
    FoldScore s;
    s.repeat = static_cast<int>(t) / plan.k;
    s.fold = static_cast<int>(t) % plan.k;
    s.accuracy = accuracy(c);
    s.macro_f1 = macro_f1(c);
    s.instances = yt.size();
    s.info = r.info;
    report.accuracy += s.accuracy;
    report.macro_f1 += s.macro_f1;
    report.folds.push_back(std::move(s));
  }
  const auto denom = static_cast<double>(std::max<std::size_t>(tasks, 1));
  for (std::size_t j = 0; j < n_classes; ++j) {
    report.metrics.precision[j] /= denom;
    report.metrics.recall[j] /= denom;
    report.metrics.f1[j] /= denom;
    report.metrics.support[j] /= denom;
  }
  report.accuracy /= denom;
  report.macro_f1 /= denom;
  if (n_classes == 2 && std::count(roc_truth.begin(), roc_truth.end(), 1) > 0 &&
      std::count(roc_truth.begin(), roc_truth.end(), 0) > 0)
    report.roc = roc_auc(roc_scores, roc_truth);
  return report;
}

}  // namespace msgclass
