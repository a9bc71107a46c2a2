#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "blockdp/dataset.hpp"
#include "blockdp/query.hpp"
#include "blockdp/rng.hpp"
#include "blockdp/transcript.hpp"

namespace blockdp {

// Per-attribute marginal distribution on [0, 1]. Samplers realize values
// through the inverse CDF of a shared latent uniform, so coupling latents
// couples attributes while leaving every marginal exact.
struct Marginal {
  enum class Kind { bernoulli, uniform };

  Kind kind = Kind::bernoulli;
  double theta = 0.5;  // P[x = 1] for bernoulli; unused for uniform

  double mean() const;
  double realize(double u) const;        // inverse CDF at u in [0, 1)
  double tail_ge(double t) const;        // P[x >= t] for t in [0, 1]
};

// How a linked attribute's latent uniform is derived from its neighbor.
// copy keeps it, negate flips it to 1-u, noisy keeps it with probability
// 1-rho and redraws otherwise. All three preserve the uniform marginal.
struct LinkCoupling {
  enum class Kind { copy, negate, noisy };

  Kind kind = Kind::copy;
  double rho = 0.0;  // redraw probability, noisy only
};

enum class ModelKind {
  independent_blocks,   // blocks mutually independent
  one_dependent_blocks, // adjacent blocks may depend, distance >= 2 never
  decaying_correlation, // chain: each adjacent pair linked with prob 1-p
  labeled,              // independent attributes plus a binary label
};

// Rule attaching a label to an individual. bernoulli draws it independently
// of the attributes; threshold derives it deterministically from one of them.
struct LabelRule {
  enum class Kind { bernoulli, threshold };

  Kind kind = Kind::bernoulli;
  double q = 0.5;    // P[y = 1], bernoulli only
  int attr = 1;      // threshold only
  double t = 0.5;    // threshold only
};

struct PopulationSpec {
  ModelKind model = ModelKind::independent_blocks;
  int m = 1;
  std::vector<Marginal> marginals;  // size m

  // Block models only.
  std::optional<BlockLayout> block_layout;
  // independent_blocks: share one latent uniform per block, making
  // within-block attributes comonotone while blocks stay independent.
  bool comonotone_blocks = false;
  // one_dependent_blocks: probability that a non-leading attribute of block
  // k realizes from block k-1's latent instead of a fresh draw. 0 decouples
  // everything, 1 makes each block a deterministic echo of its predecessor.
  double coupling_weight = 0.0;

  // decaying_correlation only: adjacent attributes are independent with
  // probability p, linked otherwise.
  double p = 1.0;
  LinkCoupling link;

  // labeled only.
  std::optional<LabelRule> label_rule;

  void validate() const;  // throws SpecError

  // Statistical facts shared by sampler and closed-form oracle. Attribute
  // m+1 addresses the label column of the labeled model.
  double attribute_mean(int attr) const;
  double attribute_tail_ge(int attr, double t) const;
  bool mutually_independent(const std::vector<int>& attrs) const;
};

PopulationSpec iid_bernoulli_spec(ModelKind model, int m, double theta);

// Which adjacent attribute pairs were actually linked when a decaying
// population was sampled. Two attributes of one individual are related iff
// every gap between them is linked. Rows are 0-based, gap g covers
// attributes g and g+1 (1-based).
class LinkTrace {
 public:
  LinkTrace(int n, int m);

  void set(int row, int gap, bool linked);
  bool linked(int row, int gap) const;
  bool related(int row, int attr_a, int attr_b) const;

  int n() const { return n_; }
  int m() const { return m_; }

 private:
  int n_ = 0;
  int m_ = 1;
  std::vector<std::uint8_t> bits_;
};

Dataset sample_independent_blocks(const PopulationSpec& spec, int n, std::uint64_t seed);
Dataset sample_one_dependent(const PopulationSpec& spec, int n, std::uint64_t seed);
std::pair<Dataset, LinkTrace> sample_decaying(const PopulationSpec& spec, int n,
                                              std::uint64_t seed);
Dataset sample_labeled(const PopulationSpec& spec, int n, std::uint64_t seed);

// Dispatch on spec.model. Labeled datasets come back with the label held
// separately; callers opt in to exposing it as attribute m+1.
Dataset sample_dataset(const PopulationSpec& spec, int n, std::uint64_t seed);

// Exact population value of the query, when one exists. Linearity handles
// weighted queries whose clamp provably never binds; factorization handles
// product and agreement queries over mutually independent attributes.
// Throws UnsupportedQueryError when the model's dependence structure leaves
// no closed form; callers then fall back to Monte Carlo.
double population_value(const LinearQuery& q, const PopulationSpec& spec);

struct MonteCarlo {
  long samples = 200000;
  std::uint64_t seed = 0;
};

// Monte Carlo estimate of the population value. Deterministic in
// (query, spec, mc): the sampling stream is derived from the query
// descriptor, so repeated calls agree bit for bit.
double population_value(const LinearQuery& q, const PopulationSpec& spec, const MonteCarlo& mc);

// PopulationOracle over a PopulationSpec. closed_form throws on unsupported
// queries; monte_carlo always estimates; closed_form_with_fallback prefers
// the exact value and estimates only when none exists. Values are cached by
// query descriptor.
class SpecOracle : public PopulationOracle {
 public:
  enum class Mode { closed_form, monte_carlo, closed_form_with_fallback };

  explicit SpecOracle(PopulationSpec spec, Mode mode = Mode::closed_form, MonteCarlo mc = {});

  double value(const LinearQuery& q) const override;

 private:
  PopulationSpec spec_;
  Mode mode_;
  MonteCarlo mc_;
  mutable std::unordered_map<std::string, double> cache_;
};

}  // namespace blockdp
