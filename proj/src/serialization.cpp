#include "blockdp/serialization.hpp"

#include <cstdio>

#include "blockdp/errors.hpp"
#include "blockdp/version.hpp"

namespace blockdp {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

Marginal parse_marginal(const nlohmann::json& j) {
  Marginal m;
  const std::string kind = get_or<std::string>(j, "kind", "bernoulli");
  if (kind == "bernoulli") {
    m.kind = Marginal::Kind::bernoulli;
    m.theta = get_or<double>(j, "theta", 0.5);
  } else if (kind == "uniform") {
    m.kind = Marginal::Kind::uniform;
  } else {
    throw ConfigError("config: unknown marginal kind '" + kind + "'");
  }
  return m;
}

nlohmann::ordered_json marginal_json(const Marginal& m) {
  nlohmann::ordered_json j;
  if (m.kind == Marginal::Kind::bernoulli) {
    j["kind"] = "bernoulli";
    j["theta"] = m.theta;
  } else {
    j["kind"] = "uniform";
  }
  return j;
}

BlockLayout parse_blocks(const nlohmann::json& j, int m) {
  if (j.is_object()) {
    return uniform_blocks(m, j.at("size").get<int>());
  }
  if (j.is_array()) {
    BlockLayout layout;
    for (const auto& pair : j) {
      layout.push_back({pair.at(0).get<int>(), pair.at(1).get<int>()});
    }
    return layout;
  }
  throw ConfigError("config: blocks must be {\"size\": k} or [[lo, hi], ...]");
}

nlohmann::ordered_json blocks_json(const BlockLayout& layout) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const AttrRange& b : layout) j.push_back({b.lo, b.hi});
  return j;
}

ModelKind parse_model(const std::string& tag) {
  if (tag == "independent_blocks") return ModelKind::independent_blocks;
  if (tag == "one_dependent_blocks") return ModelKind::one_dependent_blocks;
  if (tag == "decaying_correlation") return ModelKind::decaying_correlation;
  if (tag == "labeled") return ModelKind::labeled;
  throw ConfigError("config: unknown population model '" + tag + "'");
}

std::string model_tag(ModelKind model) {
  switch (model) {
    case ModelKind::independent_blocks: return "independent_blocks";
    case ModelKind::one_dependent_blocks: return "one_dependent_blocks";
    case ModelKind::decaying_correlation: return "decaying_correlation";
    case ModelKind::labeled: return "labeled";
  }
  return "unknown";
}

BoundTheorem parse_theorem(const std::string& tag) {
  if (tag == "transfer") return BoundTheorem::transfer;
  if (tag == "full") return BoundTheorem::full;
  if (tag == "partial") return BoundTheorem::partial;
  if (tag == "decay") return BoundTheorem::decay;
  if (tag == "sliding") return BoundTheorem::sliding;
  throw ConfigError("config: unknown bound theorem '" + tag + "'");
}

}  // namespace

PopulationSpec parse_population_spec(const nlohmann::json& j) {
  PopulationSpec spec;
  spec.model = parse_model(j.at("model").get<std::string>());
  spec.m = j.at("m").get<int>();
  if (spec.m < 1) throw ConfigError("config: population m must be >= 1");

  if (!j.contains("marginals")) {
    spec.marginals.assign(static_cast<std::size_t>(spec.m), Marginal{});
  } else if (j.at("marginals").is_array()) {
    for (const auto& mj : j.at("marginals")) spec.marginals.push_back(parse_marginal(mj));
  } else {
    spec.marginals.assign(static_cast<std::size_t>(spec.m), parse_marginal(j.at("marginals")));
  }

  if (j.contains("blocks")) spec.block_layout = parse_blocks(j.at("blocks"), spec.m);
  spec.comonotone_blocks = get_or<bool>(j, "comonotone_blocks", false);
  spec.coupling_weight = get_or<double>(j, "coupling_weight", 0.0);
  spec.p = get_or<double>(j, "p", 1.0);
  if (j.contains("link")) {
    const auto& lj = j.at("link");
    const std::string kind = get_or<std::string>(lj, "kind", "copy");
    if (kind == "copy") {
      spec.link.kind = LinkCoupling::Kind::copy;
    } else if (kind == "negate") {
      spec.link.kind = LinkCoupling::Kind::negate;
    } else if (kind == "noisy") {
      spec.link.kind = LinkCoupling::Kind::noisy;
      spec.link.rho = get_or<double>(lj, "rho", 0.0);
    } else {
      throw ConfigError("config: unknown link kind '" + kind + "'");
    }
  }
  if (j.contains("label")) {
    const auto& lj = j.at("label");
    LabelRule rule;
    const std::string kind = get_or<std::string>(lj, "kind", "bernoulli");
    if (kind == "bernoulli") {
      rule.kind = LabelRule::Kind::bernoulli;
      rule.q = get_or<double>(lj, "q", 0.5);
    } else if (kind == "threshold") {
      rule.kind = LabelRule::Kind::threshold;
      rule.attr = get_or<int>(lj, "attr", 1);
      rule.t = get_or<double>(lj, "t", 0.5);
    } else {
      throw ConfigError("config: unknown label rule '" + kind + "'");
    }
    spec.label_rule = rule;
  }
  spec.validate();
  return spec;
}

nlohmann::ordered_json population_spec_json(const PopulationSpec& spec) {
  nlohmann::ordered_json j;
  j["model"] = model_tag(spec.model);
  j["m"] = spec.m;
  nlohmann::ordered_json marginals = nlohmann::ordered_json::array();
  for (const Marginal& m : spec.marginals) marginals.push_back(marginal_json(m));
  j["marginals"] = marginals;
  if (spec.block_layout) j["blocks"] = blocks_json(*spec.block_layout);
  if (spec.model == ModelKind::independent_blocks) {
    j["comonotone_blocks"] = spec.comonotone_blocks;
  }
  if (spec.model == ModelKind::one_dependent_blocks) {
    j["coupling_weight"] = spec.coupling_weight;
  }
  if (spec.model == ModelKind::decaying_correlation) {
    j["p"] = spec.p;
    nlohmann::ordered_json link;
    switch (spec.link.kind) {
      case LinkCoupling::Kind::copy: link["kind"] = "copy"; break;
      case LinkCoupling::Kind::negate: link["kind"] = "negate"; break;
      case LinkCoupling::Kind::noisy:
        link["kind"] = "noisy";
        link["rho"] = spec.link.rho;
        break;
    }
    j["link"] = link;
  }
  if (spec.label_rule) {
    nlohmann::ordered_json label;
    if (spec.label_rule->kind == LabelRule::Kind::bernoulli) {
      label["kind"] = "bernoulli";
      label["q"] = spec.label_rule->q;
    } else {
      label["kind"] = "threshold";
      label["attr"] = spec.label_rule->attr;
      label["t"] = spec.label_rule->t;
    }
    j["label"] = label;
  }
  return j;
}

namespace {

AccessPolicy parse_policy(const nlohmann::json& j, const PopulationSpec& population) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "width_limited") return AccessPolicy::width_limited(j.at("width").get<int>());
  if (kind == "sliding_window") return AccessPolicy::sliding_window(j.at("width").get<int>());

  BlockLayout layout;
  if (j.contains("blocks")) {
    layout = parse_blocks(j.at("blocks"), population.m);
  } else if (population.block_layout) {
    layout = *population.block_layout;
  } else {
    throw ConfigError("config: block policy needs blocks here or on the population");
  }
  if (kind == "cross_block_refusal") return AccessPolicy::cross_block_refusal(std::move(layout));
  if (kind == "streaming_blocks") return AccessPolicy::streaming_blocks(std::move(layout));
  throw ConfigError("config: unknown policy kind '" + kind + "'");
}

nlohmann::ordered_json policy_json(const AccessPolicy& policy) {
  nlohmann::ordered_json j;
  switch (policy.kind()) {
    case AccessPolicy::Kind::cross_block_refusal:
      j["kind"] = "cross_block_refusal";
      j["blocks"] = blocks_json(policy.layout());
      break;
    case AccessPolicy::Kind::streaming_blocks:
      j["kind"] = "streaming_blocks";
      j["blocks"] = blocks_json(policy.layout());
      break;
    case AccessPolicy::Kind::width_limited:
      j["kind"] = "width_limited";
      j["width"] = policy.max_width();
      break;
    case AccessPolicy::Kind::sliding_window:
      j["kind"] = "sliding_window";
      j["width"] = policy.max_width();
      break;
  }
  return j;
}

MechanismConfig parse_mechanism(const nlohmann::json& j, const PopulationSpec& population) {
  MechanismConfig config(parse_policy(j.at("policy"), population));
  const std::string answerer = get_or<std::string>(j, "answerer", "laplace");
  if (answerer == "exact") {
    config.answerer = AnswererKind::exact;
  } else if (answerer == "laplace") {
    config.answerer = AnswererKind::laplace;
  } else {
    throw ConfigError("config: unknown answerer '" + answerer + "'");
  }
  config.eps_cap = get_or<double>(j, "eps_cap", 1.0);
  config.delta_cap = get_or<double>(j, "delta_cap", 0.0);
  config.eps_per_query = get_or<double>(j, "eps_per_query", 0.0);
  config.delta_per_query = get_or<double>(j, "delta_per_query", 0.0);
  config.quota = get_or<int>(j, "quota", 0);
  const std::string label_mode = get_or<std::string>(j, "label_mode", "none");
  if (label_mode == "none") {
    config.label_mode = LabelMode::none;
  } else if (label_mode == "attribute") {
    config.label_mode = LabelMode::attribute;
  } else if (label_mode == "split") {
    config.label_mode = LabelMode::split;
  } else {
    throw ConfigError("config: unknown label mode '" + label_mode + "'");
  }
  config.validate();
  return config;
}

nlohmann::ordered_json mechanism_json(const MechanismConfig& config) {
  nlohmann::ordered_json j;
  j["policy"] = policy_json(config.policy);
  j["answerer"] = config.answerer == AnswererKind::exact ? "exact" : "laplace";
  j["eps_cap"] = config.eps_cap;
  j["delta_cap"] = config.delta_cap;
  j["eps_per_query"] = config.eps_per_query;
  j["delta_per_query"] = config.delta_per_query;
  j["quota"] = config.quota;
  switch (config.label_mode) {
    case LabelMode::none: j["label_mode"] = "none"; break;
    case LabelMode::attribute: j["label_mode"] = "attribute"; break;
    case LabelMode::split: j["label_mode"] = "split"; break;
  }
  return j;
}

AnalystConfig parse_analyst(const nlohmann::json& j) {
  AnalystConfig config;
  const std::string strategy = j.at("strategy").get<std::string>();
  if (strategy == "freedman") {
    config.strategy = AnalystConfig::Strategy::freedman;
  } else if (strategy == "correlation_chaser") {
    config.strategy = AnalystConfig::Strategy::correlation_chaser;
  } else if (strategy == "random") {
    config.strategy = AnalystConfig::Strategy::random;
  } else {
    throw ConfigError("config: unknown analyst strategy '" + strategy + "'");
  }
  config.k_sel = get_or<int>(j, "k_sel", 3);
  const std::string stat = get_or<std::string>(j, "stat", "label_association");
  if (stat == "label_association") {
    config.stat = FreedmanAnalyst::Stat::label_association;
  } else if (stat == "marginal_deviation") {
    config.stat = FreedmanAnalyst::Stat::marginal_deviation;
  } else {
    throw ConfigError("config: unknown screening stat '" + stat + "'");
  }
  config.per_block = get_or<bool>(j, "per_block", false);
  config.baseline = get_or<double>(j, "baseline", 0.5);
  config.width = get_or<int>(j, "width", 1);
  config.steps = get_or<int>(j, "steps", 100);
  const std::string family = get_or<std::string>(j, "family", "threshold");
  if (family == "threshold") {
    config.family = RandomAnalyst::Family::threshold;
  } else if (family == "weighted") {
    config.family = RandomAnalyst::Family::weighted;
  } else if (family == "product") {
    config.family = RandomAnalyst::Family::product;
  } else {
    throw ConfigError("config: unknown query family '" + family + "'");
  }
  return config;
}

nlohmann::ordered_json analyst_json(const AnalystConfig& config) {
  nlohmann::ordered_json j;
  switch (config.strategy) {
    case AnalystConfig::Strategy::freedman:
      j["strategy"] = "freedman";
      j["k_sel"] = config.k_sel;
      j["stat"] = config.stat == FreedmanAnalyst::Stat::label_association ? "label_association"
                                                                          : "marginal_deviation";
      j["per_block"] = config.per_block;
      j["baseline"] = config.baseline;
      break;
    case AnalystConfig::Strategy::correlation_chaser:
      j["strategy"] = "correlation_chaser";
      j["width"] = config.width;
      j["steps"] = config.steps;
      j["baseline"] = config.baseline;
      break;
    case AnalystConfig::Strategy::random:
      j["strategy"] = "random";
      j["steps"] = config.steps;
      switch (config.family) {
        case RandomAnalyst::Family::threshold: j["family"] = "threshold"; break;
        case RandomAnalyst::Family::weighted: j["family"] = "weighted"; break;
        case RandomAnalyst::Family::product: j["family"] = "product"; break;
      }
      break;
  }
  return j;
}

BoundConfig parse_bound(const nlohmann::json& j) {
  BoundConfig config;
  config.theorem = parse_theorem(get_or<std::string>(j, "theorem", "full"));
  config.sample_alpha = get_or<double>(j, "sample_alpha", 0.1);
  if (j.contains("sample_beta") && !j.at("sample_beta").is_null()) {
    config.sample_beta = j.at("sample_beta").get<double>();
  }
  config.beta_target = get_or<double>(j, "beta_target", 0.2);
  if (j.contains("slack_c") && !j.at("slack_c").is_null()) {
    config.slack_c = j.at("slack_c").get<double>();
  }
  if (j.contains("slack_f") && !j.at("slack_f").is_null()) {
    config.slack_f = j.at("slack_f").get<double>();
  }
  return config;
}

nlohmann::ordered_json bound_config_json(const BoundConfig& config) {
  nlohmann::ordered_json j;
  j["theorem"] = std::string(to_string(config.theorem));
  j["sample_alpha"] = config.sample_alpha;
  if (config.sample_beta) j["sample_beta"] = *config.sample_beta;
  j["beta_target"] = config.beta_target;
  if (config.slack_c) j["slack_c"] = *config.slack_c;
  if (config.slack_f) j["slack_f"] = *config.slack_f;
  return j;
}

}  // namespace

ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  PopulationSpec population = parse_population_spec(j.at("population"));
  ExperimentConfig config(parse_mechanism(j.at("mechanism"), population));
  config.population = std::move(population);
  config.analyst = parse_analyst(j.at("analyst"));
  config.bound = parse_bound(j.at("bound"));
  config.n = get_or<int>(j, "n", 1000);
  config.trials = get_or<int>(j, "trials", 200);
  config.max_steps = get_or<int>(j, "max_steps", 100000);
  config.base_seed = get_or<std::uint64_t>(j, "base_seed", 1);
  if (j.contains("oracle")) {
    const auto& oj = j.at("oracle");
    const std::string mode = get_or<std::string>(oj, "mode", "closed_form_with_fallback");
    if (mode == "closed_form") {
      config.oracle_mode = SpecOracle::Mode::closed_form;
    } else if (mode == "monte_carlo") {
      config.oracle_mode = SpecOracle::Mode::monte_carlo;
    } else if (mode == "closed_form_with_fallback") {
      config.oracle_mode = SpecOracle::Mode::closed_form_with_fallback;
    } else {
      throw ConfigError("config: unknown oracle mode '" + mode + "'");
    }
    config.mc_samples = get_or<long>(oj, "mc_samples", 200000);
  }
  config.validate();
  return config;
}

nlohmann::ordered_json experiment_config_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["population"] = population_spec_json(config.population);
  j["mechanism"] = mechanism_json(config.mechanism);
  j["analyst"] = analyst_json(config.analyst);
  j["bound"] = bound_config_json(config.bound);
  j["n"] = config.n;
  j["trials"] = config.trials;
  j["max_steps"] = config.max_steps;
  j["base_seed"] = config.base_seed;
  nlohmann::ordered_json oracle;
  switch (config.oracle_mode) {
    case SpecOracle::Mode::closed_form: oracle["mode"] = "closed_form"; break;
    case SpecOracle::Mode::monte_carlo: oracle["mode"] = "monte_carlo"; break;
    case SpecOracle::Mode::closed_form_with_fallback:
      oracle["mode"] = "closed_form_with_fallback";
      break;
  }
  oracle["mc_samples"] = config.mc_samples;
  j["oracle"] = oracle;
  return j;
}

nlohmann::ordered_json bound_report_json(const BoundReport& report) {
  nlohmann::ordered_json j;
  j["theorem"] = std::string(to_string(report.theorem));
  nlohmann::ordered_json inputs;
  inputs["eps"] = report.inputs.eps;
  inputs["delta"] = report.inputs.delta;
  inputs["alpha"] = report.inputs.alpha;
  inputs["beta"] = report.inputs.beta;
  inputs["m"] = report.inputs.m;
  inputs["n"] = report.inputs.n;
  inputs["p"] = report.inputs.p;
  inputs["width"] = report.inputs.width;
  inputs["slack_c"] = report.inputs.slack_c;
  inputs["slack_f"] = report.inputs.slack_f;
  j["inputs"] = inputs;
  j["alpha_prime"] = report.result.alpha_prime;
  j["beta_prime"] = report.result.beta_prime;
  j["feasible"] = report.feasible;
  if (!report.feasible) j["min_achievable_beta"] = report.min_achievable_beta;
  if (!report.trace.empty()) {
    nlohmann::ordered_json trace = nlohmann::ordered_json::array();
    for (const OptTracePoint& pt : report.trace) {
      nlohmann::ordered_json tj;
      tj["phase"] = pt.phase;
      tj["slack_c"] = pt.slack_c;
      tj["slack_f"] = pt.slack_f;
      tj["alpha_prime"] = pt.alpha_prime;
      tj["beta_prime"] = pt.beta_prime;
      trace.push_back(tj);
    }
    j["trace"] = trace;
  }
  return j;
}

nlohmann::ordered_json experiment_summary_json(const ExperimentConfig& config,
                                               const ExperimentOutput& output) {
  const ExperimentSummary& s = output.summary;
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["config"] = experiment_config_json(config);

  nlohmann::ordered_json theory;
  theory["per_unit_eps"] = s.per_unit_eps;
  theory["per_unit_delta"] = s.per_unit_delta;
  theory["sample_alpha"] = s.sample_alpha;
  theory["sample_beta"] = s.sample_beta;
  theory["bound"] = bound_report_json(s.bound_report);
  j["theory"] = theory;

  const auto rate_json = [](const RateEstimate& r, double threshold) {
    nlohmann::ordered_json rj;
    rj["threshold"] = threshold;
    rj["failures"] = r.failures;
    rj["trials"] = r.trials;
    rj["rate"] = r.rate;
    rj["wilson_lo"] = r.wilson_lo;
    rj["wilson_hi"] = r.wilson_hi;
    return rj;
  };
  nlohmann::ordered_json empirical;
  empirical["sample_failure"] = rate_json(s.sample_rate, s.sample_alpha);
  empirical["distributional_failure"] =
      rate_json(s.distributional_rate, s.bound_report.result.alpha_prime);
  empirical["median_sample_error"] = s.median_sample_error;
  empirical["worst_sample_error"] = s.worst_sample_error;
  empirical["median_distributional_error"] = s.median_distributional_error;
  empirical["worst_distributional_error"] = s.worst_distributional_error;
  j["empirical"] = empirical;

  nlohmann::ordered_json check;
  check["rule"] = "distributional failure wilson_hi <= beta_prime";
  check["passed"] = s.check_passed;
  j["check"] = check;
  return j;
}

std::string results_csv(const std::vector<TrialResult>& results) {
  std::string out =
      "trial_id,max_sample_error,max_distributional_error,transcript_len,"
      "rej_cross_block,rej_width,rej_window_passed,rej_budget,rej_malformed,"
      "max_eps_spent,max_delta_spent\n";
  for (const TrialResult& r : results) {
    out += std::to_string(r.trial_id);
    out += ',' + fmt(r.max_sample_error);
    out += ',' + fmt(r.max_distributional_error);
    out += ',' + std::to_string(r.transcript_len);
    for (int count : r.rejections) out += ',' + std::to_string(count);
    out += ',' + fmt(r.max_eps_spent);
    out += ',' + fmt(r.max_delta_spent);
    out += '\n';
  }
  return out;
}

std::string transcript_csv(int trial_id, const TrialRecord& record) {
  std::string out =
      "trial_id,step,query_descriptor,window_lo,window_hi,answer,sample_value,population_value\n";
  for (std::size_t i = 0; i < record.transcript.size(); ++i) {
    const TranscriptEntry& entry = record.transcript[i];
    out += std::to_string(trial_id);
    out += ',' + std::to_string(entry.step);
    out += ',' + entry.query.descriptor();
    out += ',' + std::to_string(entry.query.window().lo);
    out += ',' + std::to_string(entry.query.window().hi);
    out += ',' + fmt(entry.answer);
    out += ',' + fmt(record.sample_values[i]);
    out += ',' + fmt(record.population_values[i]);
    out += '\n';
  }
  return out;
}

std::string rejections_csv(int trial_id, const std::vector<RejectionRecord>& rejections) {
  std::string out = "trial_id,step,query_descriptor,reason\n";
  for (const RejectionRecord& r : rejections) {
    out += std::to_string(trial_id);
    out += ',' + std::to_string(r.step);
    out += ',' + r.query.descriptor();
    out += ',';
    out += to_string(r.reason);
    out += '\n';
  }
  return out;
}

std::string dataset_csv(const Dataset& dataset) {
  std::string out;
  for (int a = 1; a <= dataset.m(); ++a) {
    if (a > 1) out += ',';
    out += "attr_" + std::to_string(a);
  }
  if (dataset.has_labels()) out += ",label";
  out += '\n';
  for (int row = 0; row < dataset.n(); ++row) {
    for (int a = 1; a <= dataset.m(); ++a) {
      if (a > 1) out += ',';
      out += fmt(dataset.attributes()(row, a - 1));
    }
    if (dataset.has_labels()) out += ',' + fmt(dataset.labels()[row]);
    out += '\n';
  }
  return out;
}

}  // namespace blockdp
