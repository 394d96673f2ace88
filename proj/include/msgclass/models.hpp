#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "msgclass/features.hpp"
#include "msgclass/types.hpp"

namespace msgclass {

struct LinearHyper {
  double learning_rate = 0.1;  // decayed as lr / sqrt(epoch)
  double l2 = 1e-3;
  int epochs = 500;
  std::uint64_t seed = 0;
};

enum class LinearKind { Logistic, Svm };

struct LinearModel {
  LinearKind kind = LinearKind::Logistic;
  std::vector<std::string> classes;
  Matrix weights;  // classes x features
  Vector bias;     // per class
  LinearHyper hyper;
  double final_loss = 0.0;
  std::vector<double> loss_trace;  // objective after each accepted epoch
};

// Loss and gradient of an objective at (weights, bias); exposed so the
// analytic gradients can be checked against finite differences.
struct LossGradient {
  double loss = 0.0;
  Matrix weights;
  Vector bias;
};

// Mean softmax cross-entropy + l2/2 * ||W||^2.
LossGradient logistic_objective(const Matrix& weights, const Vector& bias, const Matrix& x, std::span<const int> y,
                                double l2);
// Sum over classes of one-vs-rest mean hinge loss + l2/2 * ||W||^2.
LossGradient hinge_objective(const Matrix& weights, const Vector& bias, const Matrix& x, std::span<const int> y,
                             double l2);

// Multinomial logistic regression by full-batch gradient descent. Throws
// NumericError naming the epoch if the loss stops being finite.
LinearModel train_logistic(const Matrix& x, std::span<const int> y, const std::vector<std::string>& classes,
                           const LinearHyper& hyper = {});
LinearModel train_logistic(const SparseMatrix& x, std::span<const int> y, const std::vector<std::string>& classes,
                           const LinearHyper& hyper = {});

// One-vs-rest linear SVM by epoch-shuffled subgradient descent. An epoch
// whose full objective is higher than the previous one is rejected and the
// step size halved, so the recorded trace is non-increasing.
LinearModel train_svm(const Matrix& x, std::span<const int> y, const std::vector<std::string>& classes,
                      const LinearHyper& hyper = {});

// Raw scores x * W^T + b.
Matrix decision_function(const LinearModel& model, const Matrix& x);
Matrix decision_function(const LinearModel& model, const SparseMatrix& x);

// Sparse copy when fewer than a quarter of the entries are non-zero.
bool prefer_sparse(const Matrix& x);
SparseMatrix select_rows(const SparseMatrix& x, std::span<const Index> rows);

// Row-wise softmax with max subtraction.
template <typename Derived>
MatrixX<typename Derived::Scalar> softmax_rows(const Eigen::MatrixBase<Derived>& scores) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> p = scores.colwise() - scores.rowwise().maxCoeff();
  p = p.array().exp().matrix();
  const VectorX<Scalar> sums = p.rowwise().sum();
  return p.array().colwise() / sums.array();
}

// Per-class Platt sigmoid p = 1 / (1 + exp(a * s + b)).
struct Calibrator {
  Vector a;
  Vector b;
  // Raw per-class sigmoid values (not normalized across classes).
  Matrix apply(const Matrix& scores) const;
};

// Fits (a, b) per class by Newton's method on the regularized-target
// logistic likelihood (Platt 1999 with Lin et al.'s stable update).
Calibrator platt_fit(const Matrix& scores, std::span<const int> y, int n_classes);

struct CalibratedSvm {
  LinearModel svm;
  Calibrator calibrator;
};

// Fits the calibrator on out-of-fold decision scores from `calibration_folds`
// stratified folds, then refits the SVM on all rows.
CalibratedSvm train_calibrated_svm(const Matrix& x, std::span<const int> y, const std::vector<std::string>& classes,
                                   const LinearHyper& hyper = {}, int calibration_folds = 5);

struct MajorityModel {
  std::vector<std::string> classes;
  int modal = 0;
};

struct UniformModel {
  std::vector<std::string> classes;
  std::uint64_t seed = 0;
};

// Modal label, ties to the lowest class index.
MajorityModel train_majority(std::span<const int> y, const std::vector<std::string>& classes);
UniformModel make_uniform(const std::vector<std::string>& classes, std::uint64_t seed);

// Feature-stacking ensemble: one logistic encoder per feature subset and a
// calibrated SVM over their concatenated class probabilities.
struct StackModel {
  std::vector<SubsetRange> subsets;
  std::vector<LinearModel> encoders;  // refit on all training rows
  CalibratedSvm meta;
  int inner_k = 10;
  std::vector<std::string> classes;
  // Inner fold of each training row; the row's meta-features came from
  // encoders that never saw it.
  std::vector<int> oof_folds;
  Matrix oof_meta_features;
};

struct StackOptions {
  int inner_k = 10;
  int calibration_folds = 5;
  LinearHyper encoder;
  LinearHyper meta;
  std::uint64_t seed = 0;
};

StackModel train_stack(const FeatureMatrix& x, std::span<const int> y, const std::vector<std::string>& classes,
                       const StackOptions& options);
// Encoder probabilities concatenated subset by subset.
Matrix stack_encode(const StackModel& stack, const Matrix& x);
Matrix predict_stack(const StackModel& stack, const Matrix& x);

using Model = std::variant<MajorityModel, UniformModel, LinearModel, CalibratedSvm, StackModel>;

const std::vector<std::string>& model_classes(const Model& model);
// Rows sum to one. Throws DataError on a feature-count mismatch.
Matrix predict_proba(const Model& model, const Matrix& x);
// Argmax with lowest-index tie-break; the uniform baseline samples instead.
Labels predict(const Model& model, const Matrix& x);
Labels argmax_rows(const Matrix& probabilities);

enum class ModelKind { Majority, Uniform, Logistic, Svm, Stack };
std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::Stack;
  LinearHyper hyper;
  int inner_k = 10;
  int calibration_folds = 5;
};

Model train_model(const ModelSpec& spec, const FeatureMatrix& x, std::span<const int> y,
                  const std::vector<std::string>& classes);

nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& doc);

}  // namespace msgclass
