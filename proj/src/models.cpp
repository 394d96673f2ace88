#include "msgclass/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "msgclass/corpus.hpp"
#include "msgclass/error.hpp"
#include "msgclass/json_eigen.hpp"
#include "msgclass/random.hpp"

namespace msgclass {

namespace {

constexpr double kSparseDensity = 0.25;

std::string format_rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Matrix one_hot(std::span<const int> y, Index n_classes) {
  Matrix out = Matrix::Zero(static_cast<Index>(y.size()), n_classes);
  for (std::size_t i = 0; i < y.size(); ++i) out(static_cast<Index>(i), y[i]) = 1.0;
  return out;
}

void check_training_input(Index rows, std::span<const int> y, std::size_t n_classes) {
  if (rows != static_cast<Index>(y.size())) throw DataError("training: label count does not match rows");
  if (rows == 0) throw DataError("training: no rows");
  if (n_classes < 2) throw DataError("training: at least two classes are required");
  for (int v : y)
    if (v < 0 || v >= static_cast<int>(n_classes)) throw DataError("training: label outside the class list");
}

template <typename Mat>
LossGradient logistic_objective_impl(const Matrix& w, const Vector& b, const Mat& x, const Matrix& targets,
                                     double l2) {
  const double n = static_cast<double>(x.rows());
  Matrix scores = x * w.transpose();
  scores.rowwise() += b.transpose();
  const Vector max = scores.rowwise().maxCoeff();
  // One exp pass serves both the log-sum-exp and the softmax.
  Matrix g = (scores.colwise() - max).array().exp().matrix();
  const Vector sums = g.rowwise().sum();
  const Vector lse = sums.array().log().matrix() + max;
  const double nll = (lse - (scores.cwiseProduct(targets)).rowwise().sum()).sum() / n;
  g = g.array().colwise() / sums.array();
  g -= targets;
  g /= n;
  LossGradient out;
  out.loss = nll + 0.5 * l2 * w.squaredNorm();
  out.weights = (g.transpose() * x) + l2 * w;
  out.bias = g.colwise().sum().transpose();
  return out;
}

template <typename Mat>
double hinge_loss_impl(const Matrix& w, const Vector& b, const Mat& x, std::span<const int> y, double l2) {
  Matrix scores = x * w.transpose();
  scores.rowwise() += b.transpose();
  double hinge = 0.0;
  for (Index i = 0; i < scores.rows(); ++i)
    for (Index c = 0; c < scores.cols(); ++c) {
      const double sign = y[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
      hinge += std::max(0.0, 1.0 - sign * scores(i, c));
    }
  return hinge / static_cast<double>(x.rows()) + 0.5 * l2 * w.squaredNorm();
}

template <typename Mat>
LossGradient hinge_objective_impl(const Matrix& w, const Vector& b, const Mat& x, std::span<const int> y, double l2) {
  const double n = static_cast<double>(x.rows());
  Matrix scores = x * w.transpose();
  scores.rowwise() += b.transpose();
  Matrix g = Matrix::Zero(scores.rows(), scores.cols());
  double hinge = 0.0;
  for (Index i = 0; i < scores.rows(); ++i) {
    for (Index c = 0; c < scores.cols(); ++c) {
      const double sign = y[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
      const double margin = sign * scores(i, c);
      if (margin < 1.0) {
        hinge += 1.0 - margin;
        g(i, c) = -sign / n;
      }
    }
  }
  LossGradient out;
  out.loss = hinge / n + 0.5 * l2 * w.squaredNorm();
  out.weights = (g.transpose() * x) + l2 * w;
  out.bias = g.colwise().sum().transpose();
  return out;
}

template <typename Mat>
void logistic_descent(const Mat& x, std::span<const int> y, LinearModel& model) {
  const Matrix targets = one_hot(y, static_cast<Index>(model.classes.size()));
  const auto& h = model.hyper;
  for (int epoch = 1; epoch <= h.epochs; ++epoch) {
    auto lg = logistic_objective_impl(model.weights, model.bias, x, targets, h.l2);
    if (!std::isfinite(lg.loss))
      throw NumericError("logistic regression: non-finite loss at epoch " + std::to_string(epoch) +
                         " (learning rate " + format_rate(h.learning_rate) + "; try a smaller one)");
    model.loss_trace.push_back(lg.loss);
    const double step = h.learning_rate / std::sqrt(static_cast<double>(epoch));
    model.weights -= step * lg.weights;
    model.bias -= step * lg.bias;
  }
  const auto last = logistic_objective_impl(model.weights, model.bias, x, targets, h.l2);
  if (!std::isfinite(last.loss)) throw NumericError("logistic regression: non-finite final loss");
  model.final_loss = last.loss;
  model.loss_trace.push_back(last.loss);
}

// Subgradient descent with the weights kept as scale * v so the per-step L2
// shrink costs O(1) and updates touch only a row's non-zeros.
void svm_descent(const SparseMatrix& x, std::span<const int> y, LinearModel& model) {
  const auto& h = model.hyper;
  const Index n = x.rows();
  const Index n_classes = static_cast<Index>(model.classes.size());
  Rng rng(h.seed);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  auto objective = [&](const Matrix& w, const Vector& b) { return hinge_loss_impl(w, b, x, y, h.l2); };
  double current = objective(model.weights, model.bias);
  if (!std::isfinite(current)) throw NumericError("svm: non-finite initial loss");
  model.loss_trace.push_back(current);
  double step_scale = 1.0;

  for (int epoch = 1; epoch <= h.epochs; ++epoch) {
    const double step = step_scale * h.learning_rate / std::sqrt(static_cast<double>(epoch));
    Matrix v = model.weights;
    Vector bias = model.bias;
    Vector scale = Vector::Ones(n_classes);
    rng.shuffle(order);
    for (Index i : order) {
      for (Index c = 0; c < n_classes; ++c) {
        double dot = 0.0;
        for (SparseMatrix::InnerIterator it(x, i); it; ++it) dot += it.value() * v(c, it.col());
        const double score = scale(c) * dot + bias(c);
        const double sign = y[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
        const double shrink = 1.0 - step * h.l2;
        if (shrink <= 0.0) throw NumericError("svm: learning_rate * l2 must be below 1");
        scale(c) *= shrink;
        if (sign * score < 1.0) {
          const double delta = step * sign / scale(c);
          for (SparseMatrix::InnerIterator it(x, i); it; ++it) v(c, it.col()) += delta * it.value();
          bias(c) += step * sign;
        }
        if (scale(c) < 1e-9) {
          v.row(c) *= scale(c);
          scale(c) = 1.0;
        }
      }
    }
    for (Index c = 0; c < n_classes; ++c) v.row(c) *= scale(c);
    const double candidate = objective(v, bias);
    if (!std::isfinite(candidate))
      throw NumericError("svm: non-finite loss at epoch " + std::to_string(epoch) + " (learning rate " +
                         std::to_string(h.learning_rate) + ")");
    if (candidate <= current) {
      model.weights = std::move(v);
      model.bias = std::move(bias);
      current = candidate;
      model.loss_trace.push_back(current);
    } else {
      step_scale *= 0.5;
    }
  }
  model.final_loss = current;
}

template <typename Fn>
Matrix normalized_rows(Matrix p, Fn&& fallback) {
  for (Index r = 0; r < p.rows(); ++r) {
    const double s = p.row(r).sum();
    if (s > 1e-300 && std::isfinite(s)) p.row(r) /= s;
    else fallback(p, r);
  }
  return p;
}

void check_columns(Index expected, const Matrix& x) {
  if (x.cols() != expected)
    throw DataError("model expects " + std::to_string(expected) + " features, got " + std::to_string(x.cols()));
}

}  // namespace

bool prefer_sparse(const Matrix& x) {
  if (x.size() == 0) return false;
  const auto nnz = (x.array() != 0.0).count();
  return static_cast<double>(nnz) < kSparseDensity * static_cast<double>(x.size());
}

SparseMatrix select_rows(const SparseMatrix& x, std::span<const Index> rows) {
  SparseMatrix out(static_cast<Index>(rows.size()), x.cols());
  Index nnz = 0;
  for (Index r : rows) nnz += x.outerIndexPtr()[r + 1] - x.outerIndexPtr()[r];
  out.reserve(nnz);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.startVec(static_cast<Index>(i));
    for (SparseMatrix::InnerIterator it(x, rows[i]); it; ++it) out.insertBack(static_cast<Index>(i), it.col()) = it.value();
  }
  out.finalize();
  return out;
}

LossGradient logistic_objective(const Matrix& weights, const Vector& bias, const Matrix& x, std::span<const int> y,
                                double l2) {
  return logistic_objective_impl(weights, bias, x, one_hot(y, weights.rows()), l2);
}

LossGradient hinge_objective(const Matrix& weights, const Vector& bias, const Matrix& x, std::span<const int> y,
                             double l2) {
  return hinge_objective_impl(weights, bias, x, y, l2);
}

LinearModel train_logistic(const Matrix& x, std::span<const int> y, const std::vector<std::string>& classes,
                           const LinearHyper& hyper) {
  check_training_input(x.rows(), y, classes.size());
  LinearModel model;
  model.kind = LinearKind::Logistic;
  model.classes = classes;
  model.hyper = hyper;
  model.weights = Matrix::Zero(static_cast<Index>(classes.size()), x.cols());
  model.bias = Vector::Zero(static_cast<Index>(classes.size()));
  if (prefer_sparse(x)) {
    const SparseMatrix sx = x.sparseView();
    logistic_descent(sx, y, model);
  } else {
    logistic_descent(x, y, model);
  }
  return model;
}

LinearModel train_logistic(const SparseMatrix& x, std::span<const int> y, const std::vector<std::string>& classes,
                           const LinearHyper& hyper) {
  check_training_input(x.rows(), y, classes.size());
  LinearModel model;
  model.kind = LinearKind::Logistic;
  model.classes = classes;
  model.hyper = hyper;
  model.weights = Matrix::Zero(static_cast<Index>(classes.size()), x.cols());
  model.bias = Vector::Zero(static_cast<Index>(classes.size()));
  logistic_descent(x, y, model);
  return model;
}

LinearModel train_svm(const Matrix& x, std::span<const int> y, const std::vector<std::string>& classes,
                      const LinearHyper& hyper) {
  check_training_input(x.rows(), y, classes.size());
  LinearModel model;
  model.kind = LinearKind::Svm;
  model.classes = classes;
  model.hyper = hyper;
  model.weights = Matrix::Zero(static_cast<Index>(classes.size()), x.cols());
  model.bias = Vector::Zero(static_cast<Index>(classes.size()));
  const SparseMatrix sx = x.sparseView();
  svm_descent(sx, y, model);
  return model;
}

Matrix decision_function(const LinearModel& model, const Matrix& x) {
  check_columns(model.weights.cols(), x);
  Matrix scores = x * model.weights.transpose();
  scores.rowwise() += model.bias.transpose();
  return scores;
}

Matrix decision_function(const LinearModel& model, const SparseMatrix& x) {
  if (x.cols() != model.weights.cols())
    throw DataError("model expects " + std::to_string(model.weights.cols()) + " features, got " +
                    std::to_string(x.cols()));
  Matrix scores = x * model.weights.transpose();
  scores.rowwise() += model.bias.transpose();
  return scores;
}

// ---------------------------------------------------------------- Platt

Matrix Calibrator::apply(const Matrix& scores) const {
  Matrix p(scores.rows(), scores.cols());
  for (Index c = 0; c < scores.cols(); ++c) {
    for (Index r = 0; r < scores.rows(); ++r) {
      const double f = a(c) * scores(r, c) + b(c);
      p(r, c) = f >= 0 ? std::exp(-f) / (1.0 + std::exp(-f)) : 1.0 / (1.0 + std::exp(f));
    }
  }
  return p;
}

Calibrator platt_fit(const Matrix& scores, std::span<const int> y, int n_classes) {
  Calibrator cal{Vector::Zero(n_classes), Vector::Zero(n_classes)};
  const Index n = scores.rows();
  for (int c = 0; c < n_classes; ++c) {
    double prior1 = 0, prior0 = 0;
    for (Index i = 0; i < n; ++i) (y[static_cast<std::size_t>(i)] == c ? prior1 : prior0) += 1;
    const double hi = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo = 1.0 / (prior0 + 2.0);
    Vector t(n);
    for (Index i = 0; i < n; ++i) t(i) = y[static_cast<std::size_t>(i)] == c ? hi : lo;
    const auto f = scores.col(c);

    double A = 0.0, B = std::log((prior0 + 1.0) / (prior1 + 1.0));
    auto fval_at = [&](double a, double b) {
      double v = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double fa = f(i) * a + b;
        v += fa >= 0 ? t(i) * fa + std::log1p(std::exp(-fa)) : (t(i) - 1.0) * fa + std::log1p(std::exp(fa));
      }
      return v;
    };
    double fval = fval_at(A, B);
    constexpr double kSigma = 1e-12;
    for (int it = 0; it < 100; ++it) {
      double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double fa = f(i) * A + B;
        double p, q;
        if (fa >= 0) {
          p = std::exp(-fa) / (1.0 + std::exp(-fa));
          q = 1.0 / (1.0 + std::exp(-fa));
        } else {
          p = 1.0 / (1.0 + std::exp(fa));
          q = std::exp(fa) / (1.0 + std::exp(fa));
        }
        const double d2 = p * q;
        h11 += f(i) * f(i) * d2;
        h22 += d2;
        h21 += f(i) * d2;
        const double d1 = t(i) - p;
        g1 += f(i) * d1;
        g2 += d1;
      }
      if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
      const double det = h11 * h22 - h21 * h21;
      const double dA = -(h22 * g1 - h21 * g2) / det;
      const double dB = -(-h21 * g1 + h11 * g2) / det;
      const double gd = g1 * dA + g2 * dB;
      double step = 1.0;
      bool moved = false;
      while (step >= 1e-10) {
        const double na = A + step * dA, nb = B + step * dB;
        const double nf = fval_at(na, nb);
        if (nf < fval + 1e-4 * step * gd) {
          A = na;
          B = nb;
          fval = nf;
          moved = true;
          break;
        }
        step /= 2.0;
      }
      if (!moved) break;
    }
    cal.a(c) = A;
    cal.b(c) = B;
  }
  return cal;
}

CalibratedSvm train_calibrated_svm(const Matrix& x, std::span<const int> y, const std::vector<std::string>& classes,
                                   const LinearHyper& hyper, int calibration_folds) {
  check_training_input(x.rows(), y, classes.size());
  const int n_classes = static_cast<int>(classes.size());
  const int k = std::clamp(calibration_folds, 2, static_cast<int>(x.rows()));
  const auto folds = stratified_assignment(y, k, mix_seed(hyper.seed, 101));
  Matrix oof = Matrix::Zero(x.rows(), n_classes);
  for (int f = 0; f < k; ++f) {
    std::vector<Index> train, test;
    for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? test : train).push_back(static_cast<Index>(i));
    if (train.empty() || test.empty()) continue;
    Labels ytrain;
    for (auto i : train) ytrain.push_back(y[static_cast<std::size_t>(i)]);
    const auto svm = train_svm(x(train, Eigen::all), ytrain, classes, hyper);
    oof(test, Eigen::all) = decision_function(svm, x(test, Eigen::all));
  }
  CalibratedSvm out;
  out.calibrator = platt_fit(oof, y, n_classes);
  out.svm = train_svm(x, y, classes, hyper);
  return out;
}

// ---------------------------------------------------------------- baselines

MajorityModel train_majority(std::span<const int> y, const std::vector<std::string>& classes) {
  std::vector<std::size_t> counts(classes.size(), 0);
  for (int v : y)
    if (v >= 0 && v < static_cast<int>(classes.size())) ++counts[v];
  MajorityModel m;
  m.classes = classes;
  m.modal = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  return m;
}

UniformModel make_uniform(const std::vector<std::string>& classes, std::uint64_t seed) { return {classes, seed}; }

// ---------------------------------------------------------------- dispatch

const std::vector<std::string>& model_classes(const Model& model) {
  return std::visit(
      [](const auto& m) -> const std::vector<std::string>& {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CalibratedSvm>) return m.svm.classes;
        else return m.classes;
      },
      model);
}

Matrix predict_proba(const Model& model, const Matrix& x) {
  return std::visit(
      [&](const auto& m) -> Matrix {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, MajorityModel>) {
          Matrix p = Matrix::Zero(x.rows(), static_cast<Index>(m.classes.size()));
          p.col(m.modal).setOnes();
          return p;
        } else if constexpr (std::is_same_v<T, UniformModel>) {
          const auto c = static_cast<Index>(m.classes.size());
          return Matrix::Constant(x.rows(), c, 1.0 / static_cast<double>(c));
        } else if constexpr (std::is_same_v<T, LinearModel>) {
          return softmax_rows(decision_function(m, x));
        } else if constexpr (std::is_same_v<T, CalibratedSvm>) {
          const auto c = static_cast<double>(m.svm.classes.size());
          return normalized_rows(m.calibrator.apply(decision_function(m.svm, x)),
                                 [c](Matrix& p, Index r) { p.row(r).setConstant(1.0 / c); });
        } else {
          return predict_stack(m, x);
        }
      },
      model);
}

Labels argmax_rows(const Matrix& probabilities) {
  Labels out(static_cast<std::size_t>(probabilities.rows()));
  for (Index r = 0; r < probabilities.rows(); ++r) {
    Index arg;
    probabilities.row(r).maxCoeff(&arg);
    out[static_cast<std::size_t>(r)] = static_cast<int>(arg);
  }
  return out;
}

Labels predict(const Model& model, const Matrix& x) {
  if (const auto* u = std::get_if<UniformModel>(&model)) {
    Rng rng(u->seed);
    Labels out(static_cast<std::size_t>(x.rows()));
    for (auto& v : out) v = static_cast<int>(rng.index(u->classes.size()));
    return out;
  }
  return argmax_rows(predict_proba(model, x));
}

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Majority: return "majority";
    case ModelKind::Uniform: return "uniform";
    case ModelKind::Logistic: return "logistic";
    case ModelKind::Svm: return "svm";
    case ModelKind::Stack: return "stack";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  for (auto k : {ModelKind::Majority, ModelKind::Uniform, ModelKind::Logistic, ModelKind::Svm, ModelKind::Stack})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

Model train_model(const ModelSpec& spec, const FeatureMatrix& x, std::span<const int> y,
                  const std::vector<std::string>& classes) {
  switch (spec.kind) {
    case ModelKind::Majority: return train_majority(y, classes);
    case ModelKind::Uniform: return make_uniform(classes, spec.hyper.seed);
    case ModelKind::Logistic: return train_logistic(x.values, y, classes, spec.hyper);
    case ModelKind::Svm: return train_calibrated_svm(x.values, y, classes, spec.hyper, spec.calibration_folds);
    case ModelKind::Stack: {
      StackOptions opt;
      opt.inner_k = spec.inner_k;
      opt.calibration_folds = spec.calibration_folds;
      opt.encoder = spec.hyper;
      opt.meta = spec.hyper;
      opt.seed = spec.hyper.seed;
      return train_stack(x, y, classes, opt);
    }
  }
  throw ConfigError("unsupported model kind");
}

// ---------------------------------------------------------------- json

namespace {

nlohmann::json hyper_to_json(const LinearHyper& h) {
  return {{"learning_rate", h.learning_rate}, {"l2", h.l2}, {"epochs", h.epochs}, {"seed", h.seed}};
}

LinearHyper hyper_from_json(const nlohmann::json& j) {
  LinearHyper h;
  h.learning_rate = j.at("learning_rate").get<double>();
  h.l2 = j.at("l2").get<double>();
  h.epochs = j.at("epochs").get<int>();
  h.seed = j.at("seed").get<std::uint64_t>();
  return h;
}

nlohmann::json linear_to_json(const LinearModel& m) {
  return {{"kind", m.kind == LinearKind::Logistic ? "logistic" : "svm"},
          {"classes", m.classes},
          {"weights", to_json(m.weights)},
          {"bias", to_json(m.bias)},
          {"features", m.weights.cols()},
          {"hyper", hyper_to_json(m.hyper)},
          {"final_loss", m.final_loss}};
}

LinearModel linear_from_json(const nlohmann::json& j) {
  LinearModel m;
  m.kind = j.at("kind").get<std::string>() == "svm" ? LinearKind::Svm : LinearKind::Logistic;
  m.classes = j.at("classes").get<std::vector<std::string>>();
  m.weights = matrix_from_json(j.at("weights"), j.at("features").get<Index>());
  if (m.weights.rows() == 0) m.weights = Matrix::Zero(static_cast<Index>(m.classes.size()), j.at("features").get<Index>());
  m.bias = vector_from_json(j.at("bias"));
  m.hyper = hyper_from_json(j.at("hyper"));
  m.final_loss = j.at("final_loss").get<double>();
  return m;
}

nlohmann::json calibrated_to_json(const CalibratedSvm& m) {
  return {{"svm", linear_to_json(m.svm)},
          {"calibrator", {{"a", to_json(m.calibrator.a)}, {"b", to_json(m.calibrator.b)}}}};
}

CalibratedSvm calibrated_from_json(const nlohmann::json& j) {
  CalibratedSvm m;
  m.svm = linear_from_json(j.at("svm"));
  m.calibrator.a = vector_from_json(j.at("calibrator").at("a"));
  m.calibrator.b = vector_from_json(j.at("calibrator").at("b"));
  return m;
}

}  // namespace

nlohmann::json model_to_json(const Model& model) {
  return std::visit(
      [](const auto& m) -> nlohmann::json {
        using T = std::decay_t<decltype(m)>;
        nlohmann::json j = {{"format_version", 1}};
        if constexpr (std::is_same_v<T, MajorityModel>) {
          j["model"] = "majority";
          j["classes"] = m.classes;
          j["modal"] = m.modal;
        } else if constexpr (std::is_same_v<T, UniformModel>) {
          j["model"] = "uniform";
          j["classes"] = m.classes;
          j["seed"] = m.seed;
        } else if constexpr (std::is_same_v<T, LinearModel>) {
          j["model"] = "linear";
          j["linear"] = linear_to_json(m);
        } else if constexpr (std::is_same_v<T, CalibratedSvm>) {
          j["model"] = "svm";
          j["svm"] = calibrated_to_json(m);
        } else {
          j["model"] = "stack";
          j["classes"] = m.classes;
          j["inner_k"] = m.inner_k;
          nlohmann::json subsets = nlohmann::json::array();
          for (const auto& r : m.subsets)
            subsets.push_back({{"subset", to_string(r.subset)}, {"begin", r.begin}, {"end", r.end}});
          j["subset_map"] = subsets;
          nlohmann::json enc = nlohmann::json::array();
          for (const auto& e : m.encoders) enc.push_back(linear_to_json(e));
          j["encoders"] = enc;
          j["meta"] = calibrated_to_json(m.meta);
          j["oof_folds"] = m.oof_folds;
        }
        return j;
      },
      model);
}

Model model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != 1) throw DataError("model json: unsupported format_version");
    const auto kind = j.at("model").get<std::string>();
    if (kind == "majority") return MajorityModel{j.at("classes").get<std::vector<std::string>>(), j.at("modal").get<int>()};
    if (kind == "uniform")
      return UniformModel{j.at("classes").get<std::vector<std::string>>(), j.at("seed").get<std::uint64_t>()};
    if (kind == "linear") return linear_from_json(j.at("linear"));
    if (kind == "svm") return calibrated_from_json(j.at("svm"));
    if (kind == "stack") {
      StackModel s;
      s.classes = j.at("classes").get<std::vector<std::string>>();
      s.inner_k = j.at("inner_k").get<int>();
      for (const auto& r : j.at("subset_map"))
        s.subsets.push_back({parse_subset(r.at("subset").get<std::string>()), r.at("begin").get<Index>(),
                             r.at("end").get<Index>()});
      for (const auto& e : j.at("encoders")) s.encoders.push_back(linear_from_json(e));
      s.meta = calibrated_from_json(j.at("meta"));
      s.oof_folds = j.at("oof_folds").get<std::vector<int>>();
      return s;
    }
    throw DataError("model json: unknown model '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model json: ") + e.what());
  }
}

}  // namespace msgclass
