#include <string>

#include "msgclass/corpus.hpp"
#include "msgclass/error.hpp"
#include "msgclass/models.hpp"
#include "msgclass/random.hpp"

namespace msgclass {

namespace {

Index expected_columns(const StackModel& stack) { return stack.subsets.empty() ? 0 : stack.subsets.back().end; }

// One subset's columns, kept sparse when that pays off so inner folds slice
// rows without densifying.
struct Block {
  Matrix dense;
  SparseMatrix sparse;
  bool is_sparse = false;

  explicit Block(const Matrix& m) : is_sparse(prefer_sparse(m)) {
    if (is_sparse) sparse = m.sparseView();
    else dense = m;
  }
  LinearModel fit(std::span<const Index> rows, std::span<const int> y, const std::vector<std::string>& classes,
                  const LinearHyper& h) const {
    if (is_sparse) return train_logistic(select_rows(sparse, rows), y, classes, h);
    return train_logistic(Matrix(dense(rows, Eigen::all)), y, classes, h);
  }
  Matrix scores(const LinearModel& m, std::span<const Index> rows) const {
    if (is_sparse) return decision_function(m, select_rows(sparse, rows));
    return decision_function(m, Matrix(dense(rows, Eigen::all)));
  }
};

}  // namespace

StackModel train_stack(const FeatureMatrix& x, std::span<const int> y, const std::vector<std::string>& classes,
                       const StackOptions& options) {
  const Index n = x.rows();
  if (n != static_cast<Index>(y.size())) throw DataError("stack: label count does not match rows");
  if (x.subsets.empty()) throw ConfigError("stack: no feature subsets");
  if (options.inner_k < 2) throw ConfigError("stack: inner_k must be at least 2");
  if (options.inner_k > n)
    throw ConfigError("stack: inner_k " + std::to_string(options.inner_k) + " exceeds the " + std::to_string(n) +
                      " training rows");
  for (const auto& r : x.subsets)
    if (r.size() == 0) throw DataError("stack: subset '" + std::string(to_string(r.subset)) + "' has no columns");

  const auto n_classes = static_cast<Index>(classes.size());
  const auto n_subsets = static_cast<Index>(x.subsets.size());

  StackModel stack;
  stack.subsets = x.subsets;
  stack.inner_k = options.inner_k;
  stack.classes = classes;
  stack.oof_folds = stratified_assignment(y, options.inner_k, mix_seed(options.seed, 7));
  stack.oof_meta_features = Matrix::Zero(n, n_subsets * n_classes);

  std::vector<Block> blocks;
  for (const auto& r : x.subsets) blocks.emplace_back(x.values.middleCols(r.begin, r.size()));
  std::vector<Index> all_rows(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all_rows[static_cast<std::size_t>(i)] = i;

  for (int fold = 0; fold < options.inner_k; ++fold) {
    std::vector<Index> train, held;
    for (Index i = 0; i < n; ++i) (stack.oof_folds[static_cast<std::size_t>(i)] == fold ? held : train).push_back(i);
    if (held.empty()) continue;
    if (train.empty()) throw DataError("stack: an inner fold leaves no training rows");
    Labels ytrain;
    ytrain.reserve(train.size());
    for (Index i : train) ytrain.push_back(y[static_cast<std::size_t>(i)]);
    for (Index s = 0; s < n_subsets; ++s) {
      const auto& block = blocks[static_cast<std::size_t>(s)];
      LinearHyper h = options.encoder;
      h.seed = mix_seed(options.seed, 1000 + static_cast<std::uint64_t>(fold * n_subsets + s));
      const auto enc = block.fit(train, ytrain, classes, h);
      stack.oof_meta_features(held, Eigen::seqN(s * n_classes, n_classes)) = softmax_rows(block.scores(enc, held));
    }
  }

  LinearHyper meta = options.meta;
  meta.seed = mix_seed(options.seed, 17);
  stack.meta = train_calibrated_svm(stack.oof_meta_features, y, classes, meta, options.calibration_folds);

  for (Index s = 0; s < n_subsets; ++s) {
    LinearHyper h = options.encoder;
    h.seed = mix_seed(options.seed, 500 + static_cast<std::uint64_t>(s));
    stack.encoders.push_back(blocks[static_cast<std::size_t>(s)].fit(all_rows, y, classes, h));
  }
  return stack;
}

Matrix stack_encode(const StackModel& stack, const Matrix& x) {
  if (x.cols() != expected_columns(stack))
    throw DataError("stack expects " + std::to_string(expected_columns(stack)) + " features, got " +
                    std::to_string(x.cols()));
  if (stack.encoders.size() != stack.subsets.size()) throw DataError("stack: encoder count does not match subsets");
  const auto n_classes = static_cast<Index>(stack.classes.size());
  Matrix out(x.rows(), static_cast<Index>(stack.subsets.size()) * n_classes);
  for (std::size_t s = 0; s < stack.subsets.size(); ++s) {
    const auto& r = stack.subsets[s];
    out.middleCols(static_cast<Index>(s) * n_classes, n_classes) =
        softmax_rows(decision_function(stack.encoders[s], x.middleCols(r.begin, r.size())));
  }
  return out;
}

Matrix predict_stack(const StackModel& stack, const Matrix& x) {
  return predict_proba(Model{stack.meta}, stack_encode(stack, x));
}

}  // namespace msgclass
