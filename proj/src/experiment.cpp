#include "blockdp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "blockdp/errors.hpp"
#include "blockdp/stats.hpp"

namespace blockdp {

void ExperimentConfig::validate() const {
  population.validate();
  mechanism.validate();
  if (n < 1) throw ConfigError("experiment: n must be >= 1");
  if (trials < 1) throw ConfigError("experiment: trials must be >= 1");
  if (max_steps < 1) throw ConfigError("experiment: max_steps must be >= 1");
  if (mc_samples < 1) throw ConfigError("experiment: mc_samples must be >= 1");
  if (!(bound.sample_alpha >= 0.0)) throw ConfigError("experiment: sample_alpha must be >= 0");
  if (!(bound.beta_target > 0.0)) throw ConfigError("experiment: beta_target must be positive");
  if (bound.sample_beta && !(*bound.sample_beta >= 0.0 && *bound.sample_beta <= 1.0)) {
    throw ConfigError("experiment: sample_beta must lie in [0, 1]");
  }
  const auto kind = mechanism.policy.kind();
  const bool block_policy = kind == AccessPolicy::Kind::cross_block_refusal ||
                            kind == AccessPolicy::Kind::streaming_blocks;
  if (block_policy && mechanism.policy.layout().back().hi != population.m) {
    throw ConfigError("experiment: policy block layout must cover the population attributes");
  }
  if (mechanism.label_mode != LabelMode::none && population.model != ModelKind::labeled) {
    throw ConfigError("experiment: label mode needs the labeled population model");
  }
  if (analyst.strategy == AnalystConfig::Strategy::freedman && analyst.per_block && !block_policy) {
    throw ConfigError("experiment: per-block screening needs a block policy");
  }
  if (analyst.strategy == AnalystConfig::Strategy::freedman &&
      analyst.stat == FreedmanAnalyst::Stat::label_association &&
      mechanism.label_mode != LabelMode::attribute) {
    throw ConfigError(
        "experiment: label association screening needs the label exposed as an attribute");
  }
}

std::unique_ptr<Analyst> make_analyst(const AnalystConfig& config,
                                      const MechanismConfig& mechanism, int m_features,
                                      std::uint64_t seed) {
  switch (config.strategy) {
    case AnalystConfig::Strategy::freedman: {
      std::optional<BlockLayout> blocks;
      if (config.per_block) blocks = mechanism.policy.layout();
      return std::make_unique<FreedmanAnalyst>(m_features, config.k_sel, config.stat,
                                               std::move(blocks), config.baseline);
    }
    case AnalystConfig::Strategy::correlation_chaser:
      return std::make_unique<CorrelationChaser>(m_features, config.width, config.steps,
                                                 config.baseline, seed);
    case AnalystConfig::Strategy::random:
      return std::make_unique<RandomAnalyst>(m_features, config.steps, config.family, seed);
  }
  throw ConfigError("experiment: unknown analyst strategy");
}

namespace {

// Per-unit sample-accuracy failure probability beta at threshold alpha:
// union bound of the per-query noise tail over the unit's query quota.
double derived_sample_beta(const ExperimentConfig& config) {
  if (config.bound.sample_beta) return *config.bound.sample_beta;
  switch (config.mechanism.answerer) {
    case AnswererKind::exact:
      return 0.0;
    case AnswererKind::laplace: {
      if (config.mechanism.quota < 1) {
        throw ConfigError(
            "experiment: deriving sample_beta for a noisy answerer needs a per-unit quota");
      }
      const double tail = laplace_tail(config.bound.sample_alpha, config.n,
                                       config.mechanism.effective_eps_per_query());
      return std::min(1.0, config.mechanism.quota * tail);
    }
  }
  throw ConfigError("experiment: unknown answerer");
}

BoundReport derive_bound_report(const ExperimentConfig& config) {
  AccuracyParams params;
  params.eps = config.mechanism.answerer == AnswererKind::exact ? 0.0 : config.mechanism.eps_cap;
  params.delta =
      config.mechanism.answerer == AnswererKind::exact ? 0.0 : config.mechanism.delta_cap;
  params.alpha = config.bound.sample_alpha;
  params.beta = derived_sample_beta(config);
  params.m = config.mechanism.policy.unit_count(config.population.m);
  params.n = config.n;
  params.p = config.population.p;
  params.width = std::max(1, config.mechanism.policy.max_width());

  if (config.bound.slack_c && config.bound.slack_f) {
    params.slack_c = *config.bound.slack_c;
    params.slack_f = *config.bound.slack_f;
    BoundReport report;
    report.theorem = config.bound.theorem;
    report.inputs = params;
    report.result = evaluate_bound(config.bound.theorem, params);
    report.feasible = true;
    return report;
  }
  return optimize_slack(config.bound.theorem, params, config.bound.beta_target);
}

void audit_budget(const BudgetLedger& ledger) {
  const double eps_limit = ledger.eps_cap() * (1.0 + 1e-9) + 1e-12;
  const double delta_limit = ledger.delta_cap() * (1.0 + 1e-9) + 1e-12;
  for (const auto& [unit, charges] : ledger.charges()) {
    if (ledger.eps_spent(unit) > eps_limit || ledger.delta_spent(unit) > delta_limit) {
      throw std::logic_error("experiment: ledger exceeded a per-unit cap");
    }
  }
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& config, int trial_id) {
  const Dataset sample =
      sample_dataset(config.population, config.n, mix_seed(config.base_seed, trial_id, "data"));
  auto analyst = make_analyst(config.analyst, config.mechanism, config.population.m,
                              mix_seed(config.base_seed, trial_id, "analyst"));
  InteractionResult inter =
      run_interaction(config.mechanism, *analyst, sample, config.max_steps,
                      mix_seed(config.base_seed, trial_id, "mechanism"));
  audit_budget(inter.ledger);

  const Dataset view = interaction_view(config.mechanism, sample);
  const SpecOracle oracle(config.population, config.oracle_mode,
                          {config.mc_samples, mix_seed(config.base_seed, 0, "oracle")});

  TrialRecord record;
  record.result.trial_id = trial_id;
  record.result.transcript_len = static_cast<int>(inter.transcript.size());
  for (const auto& entry : inter.transcript) {
    const double sample_value = evaluate_on_sample(entry.query, view);
    const double population_value = oracle.value(entry.query);
    record.sample_values.push_back(sample_value);
    record.population_values.push_back(population_value);
    record.result.max_sample_error =
        std::max(record.result.max_sample_error, std::abs(entry.answer - sample_value));
    record.result.max_distributional_error =
        std::max(record.result.max_distributional_error, std::abs(entry.answer - population_value));
  }
  for (const auto& rejection : inter.rejections) {
    record.result.rejections[static_cast<std::size_t>(rejection.reason)]++;
  }
  record.result.max_eps_spent = inter.ledger.max_eps_spent();
  record.result.max_delta_spent = inter.ledger.max_delta_spent();
  record.transcript = std::move(inter.transcript);
  record.rejection_log = std::move(inter.rejections);
  return record;
}

RateEstimate estimate_failure_rate(const std::vector<TrialResult>& results, double threshold,
                                   ErrorKind kind) {
  if (results.empty()) throw SpecError("estimate_failure_rate: no results");
  int failures = 0;
  for (const TrialResult& r : results) {
    const double err =
        kind == ErrorKind::sample ? r.max_sample_error : r.max_distributional_error;
    failures += err > threshold;
  }
  const int trials = static_cast<int>(results.size());
  const WilsonInterval w = wilson95(failures, trials);
  return {static_cast<double>(failures) / trials, w.lo, w.hi, failures, trials};
}

ExperimentOutput run_experiment(const ExperimentConfig& config, int jobs) {
  config.validate();
  const BoundReport report = derive_bound_report(config);

  ExperimentOutput out;
  out.results.resize(static_cast<std::size_t>(config.trials));

  jobs = std::clamp(jobs, 1, config.trials);
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&]() {
    for (;;) {
      const int trial = next.fetch_add(1);
      if (trial >= config.trials) return;
      try {
        out.results[static_cast<std::size_t>(trial)] = run_trial(config, trial).result;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  ExperimentSummary& s = out.summary;
  s.per_unit_eps = report.inputs.eps;
  s.per_unit_delta = report.inputs.delta;
  s.sample_alpha = report.inputs.alpha;
  s.sample_beta = report.inputs.beta;
  s.bound_report = report;
  s.sample_rate = estimate_failure_rate(out.results, s.sample_alpha, ErrorKind::sample);
  s.distributional_rate =
      estimate_failure_rate(out.results, report.result.alpha_prime, ErrorKind::distributional);

  std::vector<double> sample_errors;
  std::vector<double> dist_errors;
  for (const TrialResult& r : out.results) {
    sample_errors.push_back(r.max_sample_error);
    dist_errors.push_back(r.max_distributional_error);
    s.worst_sample_error = std::max(s.worst_sample_error, r.max_sample_error);
    s.worst_distributional_error =
        std::max(s.worst_distributional_error, r.max_distributional_error);
  }
  s.median_sample_error = median(std::move(sample_errors));
  s.median_distributional_error = median(std::move(dist_errors));
  s.check_passed =
      report.feasible && s.distributional_rate.wilson_hi <= report.result.beta_prime + 1e-12;
  return out;
}

}  // namespace blockdp
