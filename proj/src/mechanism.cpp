#include "blockdp/mechanism.hpp"

#include <algorithm>
#include <cmath>

#include "blockdp/errors.hpp"

namespace blockdp {

double answer_exact(const LinearQuery& q, const Dataset& sample) {
  return evaluate_on_sample(q, sample);
}

double answer_laplace(const LinearQuery& q, const Dataset& sample, double eps_per_query,
                      Rng& rng) {
  if (!(eps_per_query > 0.0)) throw SpecError("answer_laplace: eps per query must be positive");
  const double scale = 1.0 / (sample.n() * eps_per_query);
  const double noisy = evaluate_on_sample(q, sample) + rng.laplace(scale);
  return std::clamp(noisy, 0.0, 1.0);
}

double laplace_tail(double alpha, long n, double eps_per_query) {
  if (alpha < 0.0 || n < 1 || !(eps_per_query > 0.0)) {
    throw SpecError("laplace_tail: needs alpha >= 0, n >= 1, eps > 0");
  }
  return std::exp(-alpha * static_cast<double>(n) * eps_per_query);
}

double label_split_answer(
    const LinearQuery& q, const Dataset& labeled,
    const std::function<double(const LinearQuery&, const Dataset&)>& sub_answer0,
    const std::function<double(const LinearQuery&, const Dataset&)>& sub_answer1) {
  const auto s0 = labeled.rows_with_label(0.0);
  const auto s1 = labeled.rows_with_label(1.0);
  const double n = labeled.n();
  double blend = 0.0;
  if (s0) blend += s0->n() * sub_answer0(q, *s0);
  if (s1) blend += s1->n() * sub_answer1(q, *s1);
  return std::clamp(blend / n, 0.0, 1.0);
}

double MechanismConfig::effective_eps_per_query() const {
  if (answerer == AnswererKind::exact) return 0.0;
  if (eps_per_query > 0.0) return eps_per_query;
  if (quota > 0) return eps_cap / quota;
  return 0.0;
}

double MechanismConfig::effective_delta_per_query() const {
  if (answerer == AnswererKind::exact) return 0.0;
  if (delta_per_query > 0.0) return delta_per_query;
  if (quota > 0) return delta_cap / quota;
  return 0.0;
}

void MechanismConfig::validate() const {
  if (!(eps_cap >= 0.0) || !(delta_cap >= 0.0)) {
    throw ConfigError("mechanism: caps must be nonnegative");
  }
  if (eps_per_query < 0.0 || delta_per_query < 0.0 || quota < 0) {
    throw ConfigError("mechanism: per-query charges and quota must be nonnegative");
  }
  if (answerer == AnswererKind::laplace && !(effective_eps_per_query() > 0.0)) {
    throw ConfigError("mechanism: laplace answerer needs eps_per_query or a quota");
  }
}

Dataset interaction_view(const MechanismConfig& config, const Dataset& sample) {
  if (config.label_mode == LabelMode::attribute) return sample.with_label_as_attribute();
  return sample;
}

namespace {

double dispatch_answer(const MechanismConfig& config, const LinearQuery& q, const Dataset& view,
                       double eps_q, Rng& rng) {
  switch (config.answerer) {
    case AnswererKind::exact:
      return answer_exact(q, view);
    case AnswererKind::laplace:
      return answer_laplace(q, view, eps_q, rng);
  }
  throw ConfigError("mechanism: unknown answerer");
}

}  // namespace

InteractionResult run_interaction(const MechanismConfig& config, Analyst& analyst,
                                  const Dataset& sample, int max_steps, std::uint64_t seed) {
  config.validate();
  if (config.label_mode != LabelMode::none && !sample.has_labels()) {
    throw ConfigError("mechanism: label mode set but the sample has no labels");
  }

  const Dataset view = interaction_view(config, sample);
  std::optional<Dataset> sub0;
  std::optional<Dataset> sub1;
  if (config.label_mode == LabelMode::split) {
    sub0 = sample.rows_with_label(0.0);
    sub1 = sample.rows_with_label(1.0);
  }

  AccessPolicy policy = config.policy;
  policy.reset();

  InteractionResult out{Transcript{}, {}, BudgetLedger(config.eps_cap, config.delta_cap), 0};
  Rng noise(mix_seed(seed, 0, "noise"));
  Rng noise0(mix_seed(seed, 0, "noise-sub0"));
  Rng noise1(mix_seed(seed, 1, "noise-sub1"));
  const double eps_q = config.effective_eps_per_query();
  const double delta_q = config.effective_delta_per_query();

  for (int step = 0; step < max_steps; ++step) {
    auto proposal = analyst.next_query(out.transcript, out.rejections);
    if (!proposal) break;
    out.steps = step + 1;
    LinearQuery q = std::move(*proposal);

    if (auto reason = policy.check(q, view.m())) {
      out.rejections.push_back({step, std::move(q), *reason});
      continue;
    }
    const int unit = policy.unit_of(q);
    if (!out.ledger.try_charge(unit, eps_q, delta_q)) {
      out.rejections.push_back({step, std::move(q), RejectReason::budget});
      continue;
    }
    policy.note_accepted(q);

    double answer = 0.0;
    if (config.label_mode == LabelMode::split) {
      // Disjoint sub-samples, one independent noise stream each; the blend
      // weights are the public sub-sample sizes. Each sub-mechanism is
      // (eps_q, delta_q) private on its rows, so one charge covers both.
      const double n = sample.n();
      double blend = 0.0;
      if (sub0) blend += sub0->n() * dispatch_answer(config, q, *sub0, eps_q, noise0);
      if (sub1) blend += sub1->n() * dispatch_answer(config, q, *sub1, eps_q, noise1);
      answer = std::clamp(blend / n, 0.0, 1.0);
    } else {
      answer = dispatch_answer(config, q, view, eps_q, noise);
    }
    out.transcript.add(std::move(q), answer, step);
  }
  return out;
}

}  // namespace blockdp
