#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace blockdp {

// Inputs to the accuracy-bound calculators.
//
// eps/delta are the per-unit privacy totals after within-unit composition,
// alpha/beta the sample accuracy of the whole transcript, m the number of
// units the transcript decomposes into, n the number of individuals, p the
// fresh-link probability of the decaying model, width the query width limit.
// slack_c and slack_f are the free positive constants every transfer-shaped
// bound leaves to the caller; they are named after their role because the
// conventional second symbol would collide with the width parameter.
struct AccuracyParams {
  double eps = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  int m = 1;
  long n = 1;
  double p = 1.0;
  int width = 1;
  double slack_c = 0.1;
  double slack_f = 0.1;
};

// Throws std::domain_error on violated invariants. Slack positivity is only
// enforced when require_slacks is set; the optimizer chooses its own.
void validate(const AccuracyParams& params, bool require_slacks = true);

struct BoundResult {
  double alpha_prime = 0.0;
  double beta_prime = 0.0;
};

enum class BoundTheorem { transfer, full, partial, decay, sliding };

std::string_view to_string(BoundTheorem t);

// Single-unit transfer from (eps, delta)-privacy plus (alpha, beta)-sample
// accuracy to distributional accuracy:
//   alpha' = alpha + (e^eps - 1) + slack_c + 2 slack_f
//   beta'  = beta / slack_c + delta / slack_f
BoundResult transfer_bound(double eps, double delta, double alpha, double beta, double slack_c,
                           double slack_f);

// Mutually independent blocks: transfer alpha', beta' scaled by m.
BoundResult full_independence_bound(const AccuracyParams& params);

// 1-dependent blocks under streaming access: alpha' pays e^{2 eps} - 1 and
// the delta term doubles.
BoundResult partial_independence_bound(const AccuracyParams& params);

// Decaying correlation, width-limited access: full-independence beta' plus
// the residual long-range dependence mass 2 n (1-p)^{width+1}.
BoundResult decaying_general_bound(const AccuracyParams& params);

// Decaying correlation, sliding-window access: residual mass halves to
// n (1-p)^{width+1}.
BoundResult decaying_sliding_bound(const AccuracyParams& params);

// Dispatch over the five transfer-shaped bounds above.
BoundResult evaluate_bound(BoundTheorem t, const AccuracyParams& params);

struct LabelSplitResult {
  double alpha = 0.0;
  double beta = 0.0;
};

// Accuracy of the label-blend combiner from per-label sub-mechanism accuracy
// (alpha_y, beta_y), label marginal p_label = P[y = 0], and a free
// concentration margin:
//   alpha = p a0 + (1-p) a1 + margin * p / sqrt(n)
//   beta  = b0 + b1 + 2 e^{-2 margin^2}
LabelSplitResult label_split_bound(double alpha0, double beta0, double alpha1, double beta1,
                                   double p_label, long n, double margin);

// Standard two-sided Hoeffding tail for the mean of n bounded draws,
// 2 e^{-2 n t^2}, provided as the textbook reference point next to the
// label-split concentration term (which omits the n factor by design).
double hoeffding_two_sided(long n, double t);

struct CompositionResult {
  double eps_total = 0.0;
  double delta_total = 0.0;
};

// Global advanced-composition cost of answering k queries without any
// budget re-use, the baseline the per-unit accounting is compared against:
//   eps_total  = eps sqrt(2 k ln(1/delta_prime)) + k eps (e^eps - 1)
//   delta_total = k delta + delta_prime
CompositionResult naive_composition_bound(double eps, double delta, int k, double delta_prime);

struct OptTracePoint {
  std::string phase;  // "grid", "refine", "final"
  double slack_c = 0.0;
  double slack_f = 0.0;
  double alpha_prime = 0.0;
  double beta_prime = 0.0;
};

struct BoundReport {
  BoundTheorem theorem = BoundTheorem::transfer;
  AccuracyParams inputs;  // slack_c / slack_f hold the values actually used
  BoundResult result;
  bool feasible = true;
  double min_achievable_beta = 0.0;  // meaningful when infeasible
  std::vector<OptTracePoint> trace;  // nonempty iff the optimizer ran
};

// Slack search range shared by the grid and the refinement stage.
inline constexpr double kSlackLo = 1e-6;
inline constexpr double kSlackHi = 1e2;

// Minimizes alpha' subject to beta' <= beta_target over
// (slack_c, slack_f) in [kSlackLo, kSlackHi]^2. Two stages: a log-spaced
// grid at 60 points per decade per axis, then a convex refinement that
// solves slack_f exactly per slack_c and bisects on slack_c. The result
// never loses to the grid stage. When no slacks in range reach beta_target,
// the report comes back infeasible with the minimal achievable beta'.
BoundReport optimize_slack(BoundTheorem t, const AccuracyParams& params, double beta_target);

}  // namespace blockdp
