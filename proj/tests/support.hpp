#pragma once

// Test-only helpers: independent oracles and small random generators. Nothing
// here calls into the library code it is used to check.

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "msgclass/corpus.hpp"
#include "msgclass/types.hpp"

namespace msgclass::test {

// Hand-rolled generator for property tests; std::mt19937 keeps it separate
// from the library's own Rng.
class Gen {
 public:
  explicit Gen(unsigned seed) : engine_(seed) {}
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double real(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(engine_); }
  bool coin(double p = 0.5) { return real() < p; }

  Matrix matrix(Index rows, Index cols, double lo = -1.0, double hi = 1.0) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = real(lo, hi);
    return m;
  }
  Vector vector(Index n, double lo = -1.0, double hi = 1.0) { return matrix(n, 1, lo, hi).col(0); }

  // Every class present when n >= classes.
  Labels labels(std::size_t n, int classes) {
    Labels y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = i < static_cast<std::size_t>(classes) ? static_cast<int>(i) : integer(0, classes - 1);
    std::shuffle(y.begin(), y.end(), engine_);
    return y;
  }

  // Strictly positive entries summing to one.
  Vector distribution(Index n) {
    Vector v = matrix(n, 1, 0.05, 1.0).col(0);
    return v / v.sum();
  }
  Matrix distributions(Index rows, Index n) {
    Matrix m(rows, n);
    for (Index i = 0; i < rows; ++i) m.row(i) = distribution(n).transpose();
    return m;
  }

  // Mixed ASCII, Slovene letters, punctuation, emoji and repeats.
  std::string text(int max_len = 24) {
    static const std::vector<std::string> pieces = {"a",  "b", "e",  "k", "n", "A", "Z", "č", "Š", "ž", "1",
                                                    "7",  " ", " ",  "!", "?", ".", ",", "-", "'", "😀", "…",
                                                    "aa", "ee", "!!", "\"", "(", ")", "ne", "sm", "Jaaa"};
    std::string s;
    const int n = integer(0, max_len);
    for (int i = 0; i < n; ++i) s += pieces[static_cast<std::size_t>(integer(0, static_cast<int>(pieces.size()) - 1))];
    return s;
  }

  std::mt19937& engine() { return engine_; }

 private:
  std::mt19937 engine_;
};

inline Message message(std::string id, int seconds, std::string school, std::string cohort, std::string user,
                       std::string text, std::map<std::string, std::string> labels = {}) {
  Message m;
  m.id = std::move(id);
  m.timestamp = Timestamp(std::chrono::seconds(1'550'000'000 + seconds));
  m.school = std::move(school);
  m.cohort = std::move(cohort);
  m.user_id = user;
  m.username = std::move(user);
  m.book_id = "book";
  m.text = std::move(text);
  m.labels = std::move(labels);
  return m;
}

// Fraction of (positive, negative) pairs ordered correctly, ties one half.
inline double brute_force_auc(const std::vector<double>& scores, const std::vector<int>& positive) {
  double good = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) good += 1.0;
      else if (scores[i] == scores[j]) good += 0.5;
    }
  }
  return good / pairs;
}

// Central differences of f over every entry of x.
inline Matrix finite_difference(const std::function<double(const Matrix&)>& f, Matrix x, double eps = 1e-5) {
  Matrix g(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) {
      const double keep = x(i, j);
      x(i, j) = keep + eps;
      const double up = f(x);
      x(i, j) = keep - eps;
      const double down = f(x);
      x(i, j) = keep;
      g(i, j) = (up - down) / (2 * eps);
    }
  return g;
}

inline double boost_t_cdf(double t, double nu) {
  return boost::math::cdf(boost::math::students_t_distribution<double>(nu), t);
}

}  // namespace msgclass::test
