#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace blockdp {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// Series expansion for x < a + 1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

// Chi-square CDF with df degrees of freedom.
double chi_square_cdf(double x, int df);

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// Pearson chi-square test of independence on a contingency table of counts.
// Rows and columns whose margin is zero contribute neither to the statistic
// nor to the degrees of freedom.
ChiSquareResult chi_square_independence(const Eigen::MatrixXd& counts);

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample Kolmogorov-Smirnov test of `sample` against a continuous CDF.
// The p-value uses the asymptotic distribution of sqrt(n) * D_n.
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval for a binomial proportion at 95% coverage.
WilsonInterval wilson95(int successes, int trials);

// Standard normal survival function.
double normal_sf(double x);

}  // namespace blockdp
