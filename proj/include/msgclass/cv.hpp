#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msgclass/corpus.hpp"
#include "msgclass/features.hpp"
#include "msgclass/report.hpp"
#include "msgclass/temporal.hpp"

namespace msgclass {

// True labels handed to pipelines for oracle-history temporal context. Every
// read is counted so tests can assert that a mode never looks.
class LabelHistory {
 public:
  explicit LabelHistory(Labels truth) : truth_(std::move(truth)) {}
  int label(std::size_t index) const {
    reads_.fetch_add(1, std::memory_order_relaxed);
    return truth_.at(index);
  }
  std::size_t reads() const { return reads_.load(); }
  LabelLookup lookup() const {
    return [this](std::size_t i) { return label(i); };
  }

 private:
  Labels truth_;
  mutable std::atomic<std::size_t> reads_{0};
};

// What a pipeline sees for one (repeat, fold). `context` is the whole corpus
// with the test rows' labels for the objective removed; train and test are
// indices into it.
struct FoldInput {
  int repeat = 0;
  int fold = 0;
  std::string objective;
  const Corpus* context = nullptr;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  const PreparedCorpus* prepared = nullptr;  // optional cache, indexed like context
  const LabelHistory* history = nullptr;
  std::uint64_t seed = 0;
};

struct FoldOutput {
  Matrix probabilities;  // test rows x classes
  Labels predicted;      // empty means argmax of probabilities
  nlohmann::json info;
};

class Pipeline {
 public:
  virtual ~Pipeline() = default;
  virtual FoldOutput fit_predict(const FoldInput& input) = 0;
};

using PipelineFactory = std::function<std::unique_ptr<Pipeline>()>;

struct CvOptions {
  int threads = 0;  // 0 = hardware concurrency
  nlohmann::json config;
  // Class whose probability feeds the ROC of binary objectives; default the
  // second class.
  std::optional<int> positive_class;
};

// Fits a fresh pipeline per (repeat, fold) and evaluates it on the held-out
// fold. A failing fold aborts the run with its (repeat, fold) in the message.
EvalReport run_cv(const Corpus& corpus, const FoldPlan& plan, const PipelineFactory& factory,
                  const CvOptions& options = {}, const PreparedCorpus* prepared = nullptr);

}  // namespace msgclass
