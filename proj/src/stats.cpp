#include "blockdp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blockdp/errors.hpp"

namespace blockdp {

namespace {

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), modified Lentz.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || !std::isfinite(x)) {
    throw SpecError("gamma_p: requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(a) || !std::isfinite(x)) {
    throw SpecError("gamma_q: requires a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_cdf(double x, int df) {
  if (df <= 0) throw SpecError("chi_square_cdf: df must be positive");
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * df, 0.5 * x);
}

ChiSquareResult chi_square_independence(const Eigen::MatrixXd& counts) {
  if (counts.rows() < 2 || counts.cols() < 2) {
    throw SpecError("chi_square_independence: table needs at least 2x2 cells");
  }
  if ((counts.array() < 0.0).any()) {
    throw SpecError("chi_square_independence: counts must be nonnegative");
  }
  const Eigen::VectorXd row_sum = counts.rowwise().sum();
  const Eigen::VectorXd col_sum = counts.colwise().sum();
  const double total = row_sum.sum();
  if (total <= 0.0) throw SpecError("chi_square_independence: empty table");

  int live_rows = 0;
  int live_cols = 0;
  for (Eigen::Index r = 0; r < counts.rows(); ++r) live_rows += row_sum[r] > 0.0;
  for (Eigen::Index c = 0; c < counts.cols(); ++c) live_cols += col_sum[c] > 0.0;

  ChiSquareResult out;
  out.df = std::max(0, (live_rows - 1) * (live_cols - 1));
  for (Eigen::Index r = 0; r < counts.rows(); ++r) {
    for (Eigen::Index c = 0; c < counts.cols(); ++c) {
      const double expected = row_sum[r] * col_sum[c] / total;
      if (expected > 0.0) {
        const double diff = counts(r, c) - expected;
        out.statistic += diff * diff / expected;
      }
    }
  }
  out.p_value = out.df == 0 ? 1.0 : gamma_q(0.5 * out.df, 0.5 * out.statistic);
  return out;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw SpecError("ks_test: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return {d, kolmogorov_sf(std::sqrt(n) * d)};
}

WilsonInterval wilson95(int successes, int trials) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw SpecError("wilson95: requires 0 <= successes <= trials, trials > 0");
  }
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2n = z * z / n;
  const double denom = 1.0 + z2n;
  const double center = (phat + 0.5 * z2n) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / n + 0.25 * z2n / n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double normal_sf(double x) {
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

}  // namespace blockdp
