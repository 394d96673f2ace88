#include "msgclass/ttest.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "msgclass/error.hpp"

namespace msgclass {

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw NumericError("incomplete beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (a <= 0 || b <= 0) throw NumericError("incomplete beta: parameters must be positive");
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1) / (a + b + 2)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1 - x) / b;
}

double student_t_cdf(double t, double nu) {
  if (!(nu > 0)) throw NumericError("student t: degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = nu / (nu + t * t);
  const double tail = 0.5 * incomplete_beta(nu / 2, 0.5, x);
  return t > 0 ? 1.0 - tail : tail;
}

TTestResult bayes_corr_ttest(std::span<const double> a, std::span<const double> b, double rho, double rope) {
  if (a.size() != b.size()) throw DataError("t-test: score vectors differ in length");
  if (a.size() < 2) throw DataError("t-test: at least two paired scores are needed");
  if (!(rho > 0 && rho < 1)) throw ConfigError("t-test: rho must be in (0, 1)");
  if (!(rope >= 0)) throw ConfigError("t-test: rope must be non-negative");
  const auto n = static_cast<double>(a.size());
  double mean = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i] - mean) * (a[i] - b[i] - mean);
  const double var = ss / (n - 1);

  TTestResult r;
  r.mean = mean;
  r.dof = n - 1;
  r.rope_low = -rope;
  r.rope_high = rope;
  r.rho = rho;
  r.scale = std::sqrt((1 / n + rho / (1 - rho)) * var);
  // Differences that agree to rounding error are treated as constant.
  if (var <= 1e-24 * std::max(1.0, mean * mean) || r.scale == 0) {
    r.scale = 0;
    if (mean < r.rope_low) r.p_left = 1;
    else if (mean > r.rope_high) r.p_right = 1;
    else r.p_rope = 1;
    return r;
  }
  r.p_left = student_t_cdf((r.rope_low - mean) / r.scale, r.dof);
  r.p_right = student_t_cdf((mean - r.rope_high) / r.scale, r.dof);
  r.p_rope = std::max(0.0, 1.0 - r.p_left - r.p_right);
  return r;
}

std::string verdict(const TTestResult& r, const std::string& name_a, const std::string& name_b) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s is better than %s with probability %.2f; equal with probability %.2f; worse with probability %.2f",
                name_a.c_str(), name_b.c_str(), r.p_right, r.p_rope, r.p_left);
  return buf;
}

}  // namespace msgclass
