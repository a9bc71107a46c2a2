#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "blockdp/dataset.hpp"
#include "blockdp/ledger.hpp"
#include "blockdp/policy.hpp"
#include "blockdp/query.hpp"
#include "blockdp/rng.hpp"
#include "blockdp/transcript.hpp"

namespace blockdp {

enum class AnswererKind {
  exact,    // releases q(S) directly; charges nothing
  laplace,  // q(S) + Laplace(1 / (n * eps)) clamped to [0, 1]
};

// How the label column of a labeled sample enters the interaction.
enum class LabelMode {
  none,       // labels ignored
  attribute,  // label exposed as attribute m+1, queryable like any other
  split,      // answers formed as a size-weighted blend over the two
              // label-restricted sub-samples, each with its own noise stream
};

double answer_exact(const LinearQuery& q, const Dataset& sample);
double answer_laplace(const LinearQuery& q, const Dataset& sample, double eps_per_query,
                      Rng& rng);

// P[|Laplace(1/(n*eps))| > alpha] = exp(-alpha * n * eps): the per-query
// sample-accuracy failure probability of the laplace answerer.
double laplace_tail(double alpha, long n, double eps_per_query);

// Size-weighted blend of per-label sub-answers:
// (|S_0| a_0 + |S_1| a_1) / |S|. An empty side contributes weight 0.
double label_split_answer(
    const LinearQuery& q, const Dataset& labeled,
    const std::function<double(const LinearQuery&, const Dataset&)>& sub_answer0,
    const std::function<double(const LinearQuery&, const Dataset&)>& sub_answer1);

struct MechanismConfig {
  explicit MechanismConfig(AccessPolicy p) : policy(std::move(p)) {}

  AccessPolicy policy;
  AnswererKind answerer = AnswererKind::laplace;

  // Per-unit caps. Every accepted query charges one
  // (eps_per_query, delta_per_query) entry to its unit; basic composition
  // within the unit, nothing across units.
  double eps_cap = 1.0;
  double delta_cap = 0.0;

  // Explicit per-query charge, or 0 to divide the caps evenly over a
  // declared per-unit query quota.
  double eps_per_query = 0.0;
  double delta_per_query = 0.0;
  int quota = 0;

  LabelMode label_mode = LabelMode::none;

  double effective_eps_per_query() const;
  double effective_delta_per_query() const;
  void validate() const;  // throws ConfigError
};

// The sample as the mechanism's answerer sees it under the config's label
// mode (attribute mode appends the label as column m+1).
Dataset interaction_view(const MechanismConfig& config, const Dataset& sample);

struct RejectionRecord {
  int step = 0;
  LinearQuery query;
  RejectReason reason = RejectReason::malformed;
};

// An adaptive query strategy. next_query sees everything the mechanism has
// released so far (including rejections, which are public) and returns the
// next proposal, or nullopt to stop.
class Analyst {
 public:
  virtual ~Analyst() = default;
  virtual std::optional<LinearQuery> next_query(const Transcript& t,
                                                const std::vector<RejectionRecord>& rejections) = 0;
};

struct InteractionResult {
  Transcript transcript;
  std::vector<RejectionRecord> rejections;
  BudgetLedger ledger;
  int steps = 0;  // proposals processed, accepted or not
};

// Drives analyst against mechanism on the given sample for at most max_steps
// proposals. Order per proposal: policy check, budget charge, then answer.
// A rejection at any stage is recorded and consumes neither budget nor
// noise randomness nor policy state.
InteractionResult run_interaction(const MechanismConfig& config, Analyst& analyst,
                                  const Dataset& sample, int max_steps, std::uint64_t seed);

}  // namespace blockdp
