#include "blockdp/population.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "blockdp/errors.hpp"

namespace blockdp {

double Marginal::mean() const {
  return kind == Kind::bernoulli ? theta : 0.5;
}

double Marginal::realize(double u) const {
  // Inverse CDF so that equal latents give comonotone values.
  if (kind == Kind::bernoulli) return u >= 1.0 - theta ? 1.0 : 0.0;
  return u;
}

double Marginal::tail_ge(double t) const {
  if (t <= 0.0) return 1.0;
  if (kind == Kind::bernoulli) return t <= 1.0 ? theta : 0.0;
  return t <= 1.0 ? 1.0 - t : 0.0;
}

void PopulationSpec::validate() const {
  if (m < 1) throw SpecError("population: m must be >= 1");
  if (static_cast<int>(marginals.size()) != m) {
    throw SpecError("population: need one marginal per attribute");
  }
  for (const Marginal& mg : marginals) {
    if (mg.kind == Marginal::Kind::bernoulli && !(mg.theta >= 0.0 && mg.theta <= 1.0)) {
      throw SpecError("population: bernoulli theta must lie in [0, 1]");
    }
  }
  const bool block_model =
      model == ModelKind::independent_blocks || model == ModelKind::one_dependent_blocks;
  if (block_model) {
    if (!block_layout) throw SpecError("population: block models need a block layout");
    validate_block_layout(*block_layout, m);
  }
  if (model == ModelKind::one_dependent_blocks &&
      !(coupling_weight >= 0.0 && coupling_weight <= 1.0)) {
    throw SpecError("population: coupling weight must lie in [0, 1]");
  }
  if (model == ModelKind::decaying_correlation) {
    if (!(p >= 0.0 && p <= 1.0)) throw SpecError("population: p must lie in [0, 1]");
    if (link.kind == LinkCoupling::Kind::noisy && !(link.rho >= 0.0 && link.rho <= 1.0)) {
      throw SpecError("population: noisy link rho must lie in [0, 1]");
    }
  }
  if (model == ModelKind::labeled) {
    if (!label_rule) throw SpecError("population: labeled model needs a label rule");
    if (label_rule->kind == LabelRule::Kind::bernoulli) {
      if (!(label_rule->q >= 0.0 && label_rule->q <= 1.0)) {
        throw SpecError("population: label probability must lie in [0, 1]");
      }
    } else {
      if (label_rule->attr < 1 || label_rule->attr > m) {
        throw SpecError("population: label rule attribute out of range");
      }
      if (!(label_rule->t >= 0.0 && label_rule->t <= 1.0)) {
        throw SpecError("population: label rule threshold must lie in [0, 1]");
      }
    }
  } else if (label_rule) {
    throw SpecError("population: label rule only applies to the labeled model");
  }
}

double PopulationSpec::attribute_mean(int attr) const {
  if (attr >= 1 && attr <= m) return marginals[attr - 1].mean();
  if (attr == m + 1 && model == ModelKind::labeled) {
    if (label_rule->kind == LabelRule::Kind::bernoulli) return label_rule->q;
    return marginals[label_rule->attr - 1].tail_ge(label_rule->t);
  }
  throw SpecError("population: attribute index out of range");
}

double PopulationSpec::attribute_tail_ge(int attr, double t) const {
  if (attr >= 1 && attr <= m) return marginals[attr - 1].tail_ge(t);
  if (attr == m + 1 && model == ModelKind::labeled) {
    // The label is 0/1, so its tail matches a bernoulli with its mean.
    if (t <= 0.0) return 1.0;
    return t <= 1.0 ? attribute_mean(attr) : 0.0;
  }
  throw SpecError("population: attribute index out of range");
}

bool PopulationSpec::mutually_independent(const std::vector<int>& attrs) const {
  std::set<int> uniq(attrs.begin(), attrs.end());
  for (int a : uniq) {
    if (a < 1 || a > m + (model == ModelKind::labeled ? 1 : 0)) {
      throw SpecError("population: attribute index out of range");
    }
  }
  if (uniq.size() <= 1) return true;

  if (model == ModelKind::labeled) {
    // Attributes are iid; only a threshold label breaks joint independence.
    if (uniq.count(m + 1) == 0) return true;
    return label_rule->kind == LabelRule::Kind::bernoulli;
  }
  if (model == ModelKind::independent_blocks) {
    if (!comonotone_blocks) return true;
    std::set<int> blocks;
    for (int a : uniq) {
      const int b = *block_of(*block_layout, {a, a});
      if (!blocks.insert(b).second) return false;  // two attrs share a latent
    }
    return true;
  }
  if (model == ModelKind::one_dependent_blocks) {
    if (coupling_weight == 0.0) return true;
    // Conservative: any two attributes in the same or adjacent blocks may
    // share a latent, so require pairwise block distance >= 2.
    std::vector<int> blocks;
    for (int a : uniq) blocks.push_back(*block_of(*block_layout, {a, a}));
    std::sort(blocks.begin(), blocks.end());
    for (std::size_t i = 1; i < blocks.size(); ++i) {
      if (blocks[i] - blocks[i - 1] < 2) return false;
    }
    return true;
  }
  // decaying_correlation: any pair is related with probability (1-p)^gap.
  return p == 1.0;
}

PopulationSpec iid_bernoulli_spec(ModelKind model, int m, double theta) {
  PopulationSpec spec;
  spec.model = model;
  spec.m = m;
  spec.marginals.assign(static_cast<std::size_t>(m), {Marginal::Kind::bernoulli, theta});
  return spec;
}

LinkTrace::LinkTrace(int n, int m) : n_(n), m_(m) {
  if (n < 1 || m < 1) throw SpecError("link trace: needs n >= 1 and m >= 1");
  bits_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(std::max(0, m - 1)), 0);
}

void LinkTrace::set(int row, int gap, bool linked) {
  if (row < 0 || row >= n_ || gap < 1 || gap > m_ - 1) {
    throw SpecError("link trace: index out of range");
  }
  bits_[static_cast<std::size_t>(row) * (m_ - 1) + (gap - 1)] = linked ? 1 : 0;
}

bool LinkTrace::linked(int row, int gap) const {
  if (row < 0 || row >= n_ || gap < 1 || gap > m_ - 1) {
    throw SpecError("link trace: index out of range");
  }
  return bits_[static_cast<std::size_t>(row) * (m_ - 1) + (gap - 1)] != 0;
}

bool LinkTrace::related(int row, int attr_a, int attr_b) const {
  if (attr_a > attr_b) std::swap(attr_a, attr_b);
  if (attr_a < 1 || attr_b > m_) throw SpecError("link trace: attribute out of range");
  for (int gap = attr_a; gap < attr_b; ++gap) {
    if (!linked(row, gap)) return false;
  }
  return true;
}

namespace {

void require_model(const PopulationSpec& spec, ModelKind expected, const char* sampler) {
  spec.validate();
  if (spec.model != expected) {
    throw SpecError(std::string(sampler) + ": population model mismatch");
  }
}

void require_n(int n) {
  if (n < 1) throw SpecError("sampler: n must be >= 1");
}

}  // namespace

Dataset sample_independent_blocks(const PopulationSpec& spec, int n, std::uint64_t seed) {
  require_model(spec, ModelKind::independent_blocks, "sample_independent_blocks");
  require_n(n);
  Rng rng(seed);
  Dataset::Matrix attrs(n, spec.m);
  for (int row = 0; row < n; ++row) {
    for (const AttrRange& block : *spec.block_layout) {
      if (spec.comonotone_blocks) {
        const double u = rng.uniform01();
        for (int a = block.lo; a <= block.hi; ++a) {
          attrs(row, a - 1) = spec.marginals[a - 1].realize(u);
        }
      } else {
        for (int a = block.lo; a <= block.hi; ++a) {
          attrs(row, a - 1) = spec.marginals[a - 1].realize(rng.uniform01());
        }
      }
    }
  }
  return Dataset(std::move(attrs));
}

Dataset sample_one_dependent(const PopulationSpec& spec, int n, std::uint64_t seed) {
  require_model(spec, ModelKind::one_dependent_blocks, "sample_one_dependent");
  require_n(n);
  Rng rng(seed);
  const BlockLayout& layout = *spec.block_layout;
  Dataset::Matrix attrs(n, spec.m);
  std::vector<double> latent(layout.size() + 1);
  for (int row = 0; row < n; ++row) {
    for (double& z : latent) z = rng.uniform01();
    // Block k's leading attribute realizes from latent k; the rest reach
    // back into latent k-1 with probability coupling_weight. Blocks k and
    // k+1 share exactly one latent, blocks two apart share none.
    for (std::size_t k = 0; k < layout.size(); ++k) {
      const AttrRange& block = layout[k];
      attrs(row, block.lo - 1) = spec.marginals[block.lo - 1].realize(latent[k + 1]);
      for (int a = block.lo + 1; a <= block.hi; ++a) {
        const double u = rng.bernoulli(spec.coupling_weight) ? latent[k] : rng.uniform01();
        attrs(row, a - 1) = spec.marginals[a - 1].realize(u);
      }
    }
  }
  return Dataset(std::move(attrs));
}

std::pair<Dataset, LinkTrace> sample_decaying(const PopulationSpec& spec, int n,
                                              std::uint64_t seed) {
  require_model(spec, ModelKind::decaying_correlation, "sample_decaying");
  require_n(n);
  Rng rng(seed);
  Dataset::Matrix attrs(n, spec.m);
  LinkTrace trace(n, spec.m);
  for (int row = 0; row < n; ++row) {
    double u = rng.uniform01();
    attrs(row, 0) = spec.marginals[0].realize(u);
    for (int a = 2; a <= spec.m; ++a) {
      const bool linked = rng.bernoulli(1.0 - spec.p);
      trace.set(row, a - 1, linked);
      if (linked) {
        switch (spec.link.kind) {
          case LinkCoupling::Kind::copy:
            break;
          case LinkCoupling::Kind::negate:
            u = 1.0 - u;
            break;
          case LinkCoupling::Kind::noisy:
            if (rng.bernoulli(spec.link.rho)) u = rng.uniform01();
            break;
        }
      } else {
        u = rng.uniform01();
      }
      attrs(row, a - 1) = spec.marginals[a - 1].realize(u);
    }
  }
  return {Dataset(std::move(attrs)), std::move(trace)};
}

Dataset sample_labeled(const PopulationSpec& spec, int n, std::uint64_t seed) {
  require_model(spec, ModelKind::labeled, "sample_labeled");
  require_n(n);
  Rng rng(seed);
  Dataset::Matrix attrs(n, spec.m);
  Eigen::VectorXd labels(n);
  for (int row = 0; row < n; ++row) {
    for (int a = 1; a <= spec.m; ++a) {
      attrs(row, a - 1) = spec.marginals[a - 1].realize(rng.uniform01());
    }
    if (spec.label_rule->kind == LabelRule::Kind::bernoulli) {
      labels[row] = rng.bernoulli(spec.label_rule->q) ? 1.0 : 0.0;
    } else {
      labels[row] = attrs(row, spec.label_rule->attr - 1) >= spec.label_rule->t ? 1.0 : 0.0;
    }
  }
  return Dataset(std::move(attrs), std::move(labels));
}

Dataset sample_dataset(const PopulationSpec& spec, int n, std::uint64_t seed) {
  switch (spec.model) {
    case ModelKind::independent_blocks:
      return sample_independent_blocks(spec, n, seed);
    case ModelKind::one_dependent_blocks:
      return sample_one_dependent(spec, n, seed);
    case ModelKind::decaying_correlation:
      return sample_decaying(spec, n, seed).first;
    case ModelKind::labeled:
      return sample_labeled(spec, n, seed);
  }
  throw SpecError("sample_dataset: unknown model");
}

namespace {

int max_query_attr(const PopulationSpec& spec) {
  return spec.model == ModelKind::labeled ? spec.m + 1 : spec.m;
}

void require_window_fits(const LinearQuery& q, const PopulationSpec& spec) {
  if (q.window().hi > max_query_attr(spec)) {
    throw SpecError("population_value: query window outside population attributes");
  }
}

}  // namespace

double population_value(const LinearQuery& q, const PopulationSpec& spec) {
  spec.validate();
  require_window_fits(q, spec);

  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, WeightedQuery>) {
          // Linearity needs no independence, but only holds when the clamp
          // provably never binds over the attribute box [0, 1]^k.
          double raw_lo = fam.bias;
          double raw_hi = fam.bias;
          for (Eigen::Index i = 0; i < fam.weights.size(); ++i) {
            raw_lo += std::min(0.0, fam.weights[i]);
            raw_hi += std::max(0.0, fam.weights[i]);
          }
          if (raw_lo < -1e-12 || raw_hi > 1.0 + 1e-12) {
            throw UnsupportedQueryError("weighted query: clamp may bind, no closed form");
          }
          double v = fam.bias;
          for (Eigen::Index i = 0; i < fam.weights.size(); ++i) {
            v += fam.weights[i] * spec.attribute_mean(fam.window.lo + static_cast<int>(i));
          }
          return std::clamp(v, 0.0, 1.0);
        } else if constexpr (std::is_same_v<T, ThresholdQuery>) {
          return spec.attribute_tail_ge(fam.attr, fam.threshold);
        } else if constexpr (std::is_same_v<T, ProductQuery>) {
          std::vector<int> attrs;
          for (const auto& lit : fam.literals) attrs.push_back(lit.attr);
          if (attrs.size() > 1 && !spec.mutually_independent(attrs)) {
            throw UnsupportedQueryError("product query: attributes may be dependent");
          }
          double v = 1.0;
          for (const auto& lit : fam.literals) {
            const double mu = spec.attribute_mean(lit.attr);
            v *= lit.negated ? 1.0 - mu : mu;
          }
          return v;
        } else {
          double sum = 0.0;
          for (const auto& pr : fam.pairs) {
            if (!spec.mutually_independent({pr.attr, fam.partner})) {
              throw UnsupportedQueryError("agreement query: pair may be dependent");
            }
            const double mu = spec.attribute_mean(pr.attr);
            const double nu = spec.attribute_mean(fam.partner);
            const double a = mu * nu + (1.0 - mu) * (1.0 - nu);
            sum += pr.agree ? a : 1.0 - a;
          }
          return sum / static_cast<double>(fam.pairs.size());
        }
      },
      q.family());
}

double population_value(const LinearQuery& q, const PopulationSpec& spec, const MonteCarlo& mc) {
  spec.validate();
  require_window_fits(q, spec);
  if (mc.samples < 1) throw SpecError("population_value: monte carlo needs samples >= 1");

  // Stream derived from the descriptor: the estimate is a pure function of
  // (query, spec, mc), so oracle calls for one query always agree.
  const std::uint64_t qseed =
      mix_seed(mc.seed, std::hash<std::string>{}(q.descriptor()), "mc-query");
  const bool needs_label =
      spec.model == ModelKind::labeled && q.window().hi > spec.m;

  long remaining = mc.samples;
  long batch_index = 0;
  double weighted_sum = 0.0;
  while (remaining > 0) {
    const int batch = static_cast<int>(std::min<long>(remaining, 65536));
    Dataset ds = sample_dataset(spec, batch, mix_seed(qseed, batch_index, "mc-batch"));
    if (needs_label) ds = ds.with_label_as_attribute();
    weighted_sum += evaluate_on_sample(q, ds) * batch;
    remaining -= batch;
    ++batch_index;
  }
  return weighted_sum / static_cast<double>(mc.samples);
}

SpecOracle::SpecOracle(PopulationSpec spec, Mode mode, MonteCarlo mc)
    : spec_(std::move(spec)), mode_(mode), mc_(mc) {
  spec_.validate();
}

double SpecOracle::value(const LinearQuery& q) const {
  const std::string key = q.descriptor();
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  double v = 0.0;
  switch (mode_) {
    case Mode::closed_form:
      v = population_value(q, spec_);
      break;
    case Mode::monte_carlo:
      v = population_value(q, spec_, mc_);
      break;
    case Mode::closed_form_with_fallback:
      try {
        v = population_value(q, spec_);
      } catch (const UnsupportedQueryError&) {
        v = population_value(q, spec_, mc_);
      }
      break;
  }
  cache_.emplace(key, v);
  return v;
}

}  // namespace blockdp
