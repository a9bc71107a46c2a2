#include "blockdp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blockdp {

void validate(const AccuracyParams& params, bool require_slacks) {
  if (!(params.eps >= 0.0)) throw std::domain_error("bounds: eps must be >= 0");
  if (!(params.delta >= 0.0 && params.delta <= 1.0)) {
    throw std::domain_error("bounds: delta must lie in [0, 1]");
  }
  if (!(params.alpha >= 0.0)) throw std::domain_error("bounds: alpha must be >= 0");
  if (!(params.beta >= 0.0 && params.beta <= 1.0)) {
    throw std::domain_error("bounds: beta must lie in [0, 1]");
  }
  if (params.m < 1) throw std::domain_error("bounds: m must be a positive integer");
  if (params.n < 1) throw std::domain_error("bounds: n must be a positive integer");
  if (!(params.p >= 0.0 && params.p <= 1.0)) throw std::domain_error("bounds: p must lie in [0, 1]");
  if (params.width < 1) throw std::domain_error("bounds: width must be a positive integer");
  if (require_slacks && (!(params.slack_c > 0.0) || !(params.slack_f > 0.0))) {
    throw std::domain_error("bounds: slack parameters must be positive");
  }
}

std::string_view to_string(BoundTheorem t) {
  switch (t) {
    case BoundTheorem::transfer: return "transfer";
    case BoundTheorem::full: return "full";
    case BoundTheorem::partial: return "partial";
    case BoundTheorem::decay: return "decay";
    case BoundTheorem::sliding: return "sliding";
  }
  return "unknown";
}

namespace {

// Every bound here has the shape
//   alpha'(c, f) = alpha_base + c + 2 f
//   beta'(c, f)  = beta_over_c / c + beta_over_f / f + beta_extra
// Keeping the coefficients explicit makes the p = 1 collapse of the decaying
// bounds onto the independent-blocks bound exact, not approximate, and gives
// the slack optimizer one uniform objective.
struct BoundShape {
  double alpha_base = 0.0;
  double beta_over_c = 0.0;
  double beta_over_f = 0.0;
  double beta_extra = 0.0;

  BoundResult eval(double slack_c, double slack_f) const {
    return {alpha_base + slack_c + 2.0 * slack_f,
            beta_over_c / slack_c + beta_over_f / slack_f + beta_extra};
  }
};

BoundShape shape_of(BoundTheorem t, const AccuracyParams& params) {
  const double m = static_cast<double>(params.m);
  const double n = static_cast<double>(params.n);
  BoundShape s;
  switch (t) {
    case BoundTheorem::transfer:
      s = {params.alpha + std::expm1(params.eps), params.beta, params.delta, 0.0};
      break;
    case BoundTheorem::full:
      s = {params.alpha + std::expm1(params.eps), m * params.beta, m * params.delta, 0.0};
      break;
    case BoundTheorem::partial:
      s = {params.alpha + std::expm1(2.0 * params.eps), m * params.beta, 2.0 * m * params.delta,
           0.0};
      break;
    case BoundTheorem::decay:
      s = {params.alpha + std::expm1(params.eps), m * params.beta, m * params.delta,
           2.0 * n * std::pow(1.0 - params.p, params.width + 1)};
      break;
    case BoundTheorem::sliding:
      s = {params.alpha + std::expm1(params.eps), m * params.beta, m * params.delta,
           n * std::pow(1.0 - params.p, params.width + 1)};
      break;
  }
  return s;
}

}  // namespace

BoundResult transfer_bound(double eps, double delta, double alpha, double beta, double slack_c,
                           double slack_f) {
  AccuracyParams params;
  params.eps = eps;
  params.delta = delta;
  params.alpha = alpha;
  params.beta = beta;
  params.slack_c = slack_c;
  params.slack_f = slack_f;
  validate(params);
  return shape_of(BoundTheorem::transfer, params).eval(slack_c, slack_f);
}

BoundResult full_independence_bound(const AccuracyParams& params) {
  validate(params);
  return shape_of(BoundTheorem::full, params).eval(params.slack_c, params.slack_f);
}

BoundResult partial_independence_bound(const AccuracyParams& params) {
  validate(params);
  return shape_of(BoundTheorem::partial, params).eval(params.slack_c, params.slack_f);
}

BoundResult decaying_general_bound(const AccuracyParams& params) {
  validate(params);
  return shape_of(BoundTheorem::decay, params).eval(params.slack_c, params.slack_f);
}

BoundResult decaying_sliding_bound(const AccuracyParams& params) {
  validate(params);
  return shape_of(BoundTheorem::sliding, params).eval(params.slack_c, params.slack_f);
}

BoundResult evaluate_bound(BoundTheorem t, const AccuracyParams& params) {
  validate(params);
  return shape_of(t, params).eval(params.slack_c, params.slack_f);
}

LabelSplitResult label_split_bound(double alpha0, double beta0, double alpha1, double beta1,
                                   double p_label, long n, double margin) {
  if (!(margin > 0.0)) throw std::domain_error("label_split_bound: margin must be positive");
  if (!(p_label >= 0.0 && p_label <= 1.0)) {
    throw std::domain_error("label_split_bound: p_label must lie in [0, 1]");
  }
  if (n < 1) throw std::domain_error("label_split_bound: n must be a positive integer");
  if (alpha0 < 0.0 || alpha1 < 0.0 || beta0 < 0.0 || beta1 < 0.0) {
    throw std::domain_error("label_split_bound: sub-accuracies must be nonnegative");
  }
  LabelSplitResult out;
  out.alpha = p_label * alpha0 + (1.0 - p_label) * alpha1 +
              margin * p_label / std::sqrt(static_cast<double>(n));
  out.beta = beta0 + beta1 + 2.0 * std::exp(-2.0 * margin * margin);
  return out;
}

double hoeffding_two_sided(long n, double t) {
  if (n < 1 || t < 0.0) throw std::domain_error("hoeffding_two_sided: needs n >= 1 and t >= 0");
  return 2.0 * std::exp(-2.0 * static_cast<double>(n) * t * t);
}

CompositionResult naive_composition_bound(double eps, double delta, int k, double delta_prime) {
  if (!(eps >= 0.0)) throw std::domain_error("naive_composition_bound: eps must be >= 0");
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw std::domain_error("naive_composition_bound: delta must lie in [0, 1]");
  }
  if (k < 1) throw std::domain_error("naive_composition_bound: k must be a positive integer");
  if (!(delta_prime > 0.0)) {
    throw std::domain_error("naive_composition_bound: delta_prime must be positive");
  }
  const double kd = static_cast<double>(k);
  CompositionResult out;
  out.eps_total =
      eps * std::sqrt(2.0 * kd * std::log(1.0 / delta_prime)) + kd * eps * std::expm1(eps);
  out.delta_total = kd * delta + delta_prime;
  return out;
}

namespace {

double clamp_slack(double v) { return std::clamp(v, kSlackLo, kSlackHi); }

// Log-spaced axis at 60 points per decade over [kSlackLo, kSlackHi].
std::vector<double> slack_grid() {
  std::vector<double> grid;
  const double lo_exp = std::log10(kSlackLo);
  const double hi_exp = std::log10(kSlackHi);
  const int steps = static_cast<int>(std::lround((hi_exp - lo_exp) * 60.0));
  grid.reserve(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    grid.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / steps));
  }
  return grid;
}

}  // namespace

BoundReport optimize_slack(BoundTheorem t, const AccuracyParams& params, double beta_target) {
  validate(params, /*require_slacks=*/false);
  if (!(beta_target > 0.0)) throw std::domain_error("optimize_slack: beta_target must be positive");

  const BoundShape shape = shape_of(t, params);
  const double a_c = shape.beta_over_c;
  const double a_f = shape.beta_over_f;

  BoundReport report;
  report.theorem = t;
  report.inputs = params;

  // Feasibility probe: beta' is decreasing in both slacks, so its infimum
  // over the search box sits at the upper corner.
  const double beta_floor = a_c / kSlackHi + a_f / kSlackHi + shape.beta_extra;
  if (beta_floor > beta_target * (1.0 + 1e-12)) {
    report.feasible = false;
    report.min_achievable_beta = beta_floor;
    report.inputs.slack_c = kSlackHi;
    report.inputs.slack_f = kSlackHi;
    report.result = shape.eval(kSlackHi, kSlackHi);
    return report;
  }

  // Keeps only candidates that meet the target; beta' equality is fine.
  const auto feasible = [&](const BoundResult& r) {
    return r.beta_prime <= beta_target * (1.0 + 1e-12);
  };

  // Stage 1: full log grid.
  const std::vector<double> grid = slack_grid();
  double best_c = kSlackHi;
  double best_f = kSlackHi;
  BoundResult best = shape.eval(best_c, best_f);
  for (double c : grid) {
    for (double f : grid) {
      const BoundResult r = shape.eval(c, f);
      if (feasible(r) && r.alpha_prime < best.alpha_prime) {
        best = r;
        best_c = c;
        best_f = f;
      }
    }
  }
  report.trace.push_back({"grid", best_c, best_f, best.alpha_prime, best.beta_prime});

  // Stage 2: with slack_c fixed, the smallest admissible slack_f solves the
  // beta' constraint with equality, so alpha' becomes a convex function of
  // slack_c alone; bisect on its derivative sign via ternary search.
  const double budget = beta_target - shape.beta_extra;  // mass left for the slack terms
  const auto min_f_for = [&](double c) -> double {
    if (a_f == 0.0) return kSlackLo;
    const double room = budget - a_c / c;
    if (room <= 0.0) return kSlackHi * 2.0;  // marks c infeasible
    return a_f / room;
  };
  const auto alpha_at = [&](double c) -> double {
    const double f_needed = min_f_for(c);
    if (f_needed > kSlackHi) return std::numeric_limits<double>::infinity();
    const BoundResult r = shape.eval(c, clamp_slack(f_needed));
    return feasible(r) ? r.alpha_prime : std::numeric_limits<double>::infinity();
  };

  // Feasible slack_c interval: large enough that a_c/c leaves room for the
  // slack_f term even at its cap.
  double c_lo = kSlackLo;
  if (a_c > 0.0) {
    const double room_at_cap = budget - a_f / kSlackHi;
    if (room_at_cap > 0.0) c_lo = clamp_slack(a_c / room_at_cap);
  }
  double c_hi = kSlackHi;
  for (int iter = 0; iter < 300; ++iter) {
    const double c1 = c_lo + (c_hi - c_lo) / 3.0;
    const double c2 = c_hi - (c_hi - c_lo) / 3.0;
    if (alpha_at(c1) <= alpha_at(c2)) {
      c_hi = c2;
    } else {
      c_lo = c1;
    }
  }
  const double c_star = 0.5 * (c_lo + c_hi);
  double f_star = clamp_slack(min_f_for(c_star));
  // Equality solutions can land a rounding error above the target.
  for (int nudge = 0; nudge < 8 && !feasible(shape.eval(c_star, f_star)); ++nudge) {
    f_star = clamp_slack(f_star * (1.0 + 1e-12));
  }
  const BoundResult refined = shape.eval(c_star, f_star);
  if (feasible(refined)) {
    report.trace.push_back({"refine", c_star, f_star, refined.alpha_prime, refined.beta_prime});
    if (refined.alpha_prime < best.alpha_prime) {
      best = refined;
      best_c = c_star;
      best_f = f_star;
    }
  }

  report.inputs.slack_c = best_c;
  report.inputs.slack_f = best_f;
  report.result = best;
  report.trace.push_back({"final", best_c, best_f, best.alpha_prime, best.beta_prime});
  return report;
}

}  // namespace blockdp
