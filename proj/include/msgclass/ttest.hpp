#pragma once

#include <span>
#include <string>

namespace msgclass {

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);
// CDF of the standard Student-t with nu degrees of freedom.
double student_t_cdf(double t, double nu);

struct TTestResult {
  double p_left = 0.0;   // mass below the rope: b better
  double p_rope = 0.0;
  double p_right = 0.0;  // mass above the rope: a better
  double mean = 0.0;
  double scale = 0.0;
  double dof = 0.0;
  double rope_low = -0.01;
  double rope_high = 0.01;
  double rho = 0.1;
};

// Posterior of the mean of x = a - b: Student-t with n - 1 degrees of freedom,
// location mean(x), scale^2 = (1/n + rho/(1 - rho)) * var(x). Zero variance
// puts all mass in the region containing the mean.
TTestResult bayes_corr_ttest(std::span<const double> a, std::span<const double> b, double rho, double rope = 0.01);

// "better with probability 0.97, equal with probability 0.02, worse with
// probability 0.01" style summary, from a's point of view.
std::string verdict(const TTestResult& r, const std::string& name_a, const std::string& name_b);

}  // namespace msgclass
