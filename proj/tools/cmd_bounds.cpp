#include <cstdio>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "blockdp/bounds.hpp"
#include "blockdp/errors.hpp"
#include "commands.hpp"

namespace blockdp::cli {

namespace {

struct BoundsOpts {
  std::string theorem = "full";
  double eps = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  int m = 1;
  long n = 1;
  double p = 1.0;
  int width = 1;
  std::optional<double> slack_c;
  std::optional<double> slack_f;
  double beta_target = 0.2;

  // label theorem
  double alpha0 = 0.0;
  double beta0 = 0.0;
  double alpha1 = 0.0;
  double beta1 = 0.0;
  double p_label = 0.5;
  double margin = 2.0;

  // naive theorem
  int k = 1;
  double delta_prime = 1e-6;

  bool csv = false;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void row(const char* key, const std::string& value) {
  std::printf("%-20s %s\n", key, value.c_str());
}

BoundTheorem parse_theorem_tag(const std::string& tag) {
  if (tag == "transfer") return BoundTheorem::transfer;
  if (tag == "full") return BoundTheorem::full;
  if (tag == "partial") return BoundTheorem::partial;
  if (tag == "decay") return BoundTheorem::decay;
  if (tag == "sliding") return BoundTheorem::sliding;
  throw ConfigError("bounds: unknown theorem '" + tag + "'");
}

int label_main(const BoundsOpts& o) {
  const LabelSplitResult r =
      label_split_bound(o.alpha0, o.beta0, o.alpha1, o.beta1, o.p_label, o.n, o.margin);
  if (o.csv) {
    std::printf("theorem,alpha0,beta0,alpha1,beta1,p_label,n,margin,alpha,beta\n");
    std::printf("label,%s,%s,%s,%s,%s,%ld,%s,%s,%s\n", fmt(o.alpha0).c_str(), fmt(o.beta0).c_str(),
                fmt(o.alpha1).c_str(), fmt(o.beta1).c_str(), fmt(o.p_label).c_str(), o.n,
                fmt(o.margin).c_str(), fmt(r.alpha).c_str(), fmt(r.beta).c_str());
    return 0;
  }
  row("theorem", "label");
  row("alpha0 / beta0", fmt(o.alpha0) + " / " + fmt(o.beta0));
  row("alpha1 / beta1", fmt(o.alpha1) + " / " + fmt(o.beta1));
  row("p_label", fmt(o.p_label));
  row("n", std::to_string(o.n));
  row("margin", fmt(o.margin));
  row("alpha", fmt(r.alpha));
  row("beta", fmt(r.beta));
  return 0;
}

int naive_main(const BoundsOpts& o) {
  const CompositionResult r = naive_composition_bound(o.eps, o.delta, o.k, o.delta_prime);
  if (o.csv) {
    std::printf("theorem,eps,delta,k,delta_prime,eps_total,delta_total\n");
    std::printf("naive,%s,%s,%d,%s,%s,%s\n", fmt(o.eps).c_str(), fmt(o.delta).c_str(), o.k,
                fmt(o.delta_prime).c_str(), fmt(r.eps_total).c_str(), fmt(r.delta_total).c_str());
    return 0;
  }
  row("theorem", "naive");
  row("eps / delta", fmt(o.eps) + " / " + fmt(o.delta));
  row("k", std::to_string(o.k));
  row("delta_prime", fmt(o.delta_prime));
  row("eps_total", fmt(r.eps_total));
  row("delta_total", fmt(r.delta_total));
  return 0;
}

int bounds_main(const BoundsOpts& o) {
  if (o.theorem == "label") return label_main(o);
  if (o.theorem == "naive") return naive_main(o);

  const BoundTheorem theorem = parse_theorem_tag(o.theorem);
  if (o.slack_c.has_value() != o.slack_f.has_value()) {
    throw ConfigError("bounds: give both --slack-c and --slack-f or neither");
  }

  AccuracyParams params;
  params.eps = o.eps;
  params.delta = o.delta;
  params.alpha = o.alpha;
  params.beta = o.beta;
  params.m = o.m;
  params.n = o.n;
  params.p = o.p;
  params.width = o.width;

  BoundReport report;
  try {
    if (o.slack_c) {
      params.slack_c = *o.slack_c;
      params.slack_f = *o.slack_f;
      report.theorem = theorem;
      report.inputs = params;
      report.result = evaluate_bound(theorem, params);
      report.feasible = true;
    } else {
      report = optimize_slack(theorem, params, o.beta_target);
    }
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("bounds: ") + e.what());
  }

  if (o.csv) {
    std::printf(
        "theorem,eps,delta,alpha,beta,m,n,p,width,slack_c,slack_f,"
        "alpha_prime,beta_prime,feasible,min_achievable_beta\n");
    std::printf("%s,%s,%s,%s,%s,%d,%ld,%s,%d,%s,%s,%s,%s,%d,%s\n",
                std::string(to_string(report.theorem)).c_str(), fmt(params.eps).c_str(),
                fmt(params.delta).c_str(), fmt(params.alpha).c_str(), fmt(params.beta).c_str(),
                params.m, params.n, fmt(params.p).c_str(), params.width,
                fmt(report.inputs.slack_c).c_str(), fmt(report.inputs.slack_f).c_str(),
                fmt(report.result.alpha_prime).c_str(), fmt(report.result.beta_prime).c_str(),
                report.feasible ? 1 : 0, fmt(report.min_achievable_beta).c_str());
    return 0;
  }

  row("theorem", std::string(to_string(report.theorem)));
  row("eps / delta", fmt(params.eps) + " / " + fmt(params.delta));
  row("alpha / beta", fmt(params.alpha) + " / " + fmt(params.beta));
  row("m / n", std::to_string(params.m) + " / " + std::to_string(params.n));
  if (theorem == BoundTheorem::decay || theorem == BoundTheorem::sliding) {
    row("p / width", fmt(params.p) + " / " + std::to_string(params.width));
  }
  row("slack_c / slack_f", fmt(report.inputs.slack_c) + " / " + fmt(report.inputs.slack_f));
  row("alpha_prime", fmt(report.result.alpha_prime));
  row("beta_prime", fmt(report.result.beta_prime));
  if (!o.slack_c) {
    row("beta_target", fmt(o.beta_target));
    row("feasible", report.feasible ? "yes" : "no");
    if (!report.feasible) row("min_achievable_beta", fmt(report.min_achievable_beta));
  }
  return 0;
}

}  // namespace

void register_bounds(CLI::App& app, int& rc) {
  auto opts = std::make_shared<BoundsOpts>();
  CLI::App* sub = app.add_subcommand(
      "bounds", "evaluate a distributional accuracy bound or optimize its slack constants");
  sub->add_option("--theorem", opts->theorem,
                  "transfer | full | partial | decay | sliding | label | naive");
  sub->add_option("--eps", opts->eps, "per-unit epsilon");
  sub->add_option("--delta", opts->delta, "per-unit delta");
  sub->add_option("--alpha", opts->alpha, "sample accuracy alpha");
  sub->add_option("--beta", opts->beta, "sample accuracy beta");
  sub->add_option("--m", opts->m, "number of units");
  sub->add_option("--n", opts->n, "individuals");
  sub->add_option("--p", opts->p, "fresh-link probability (decay, sliding)");
  sub->add_option("--width", opts->width, "query width limit (decay, sliding)");
  sub->add_option("--slack-c", opts->slack_c, "fixed slack c; with --slack-f skips optimization");
  sub->add_option("--slack-f", opts->slack_f, "fixed slack f; with --slack-c skips optimization");
  sub->add_option("--beta-target", opts->beta_target, "beta' target for slack optimization");
  sub->add_option("--alpha0", opts->alpha0, "label: sub-mechanism alpha for y = 0");
  sub->add_option("--beta0", opts->beta0, "label: sub-mechanism beta for y = 0");
  sub->add_option("--alpha1", opts->alpha1, "label: sub-mechanism alpha for y = 1");
  sub->add_option("--beta1", opts->beta1, "label: sub-mechanism beta for y = 1");
  sub->add_option("--p-label", opts->p_label, "label: P[y = 0]");
  sub->add_option("--margin", opts->margin, "label: concentration margin");
  sub->add_option("--k", opts->k, "naive: query count");
  sub->add_option("--delta-prime", opts->delta_prime, "naive: advanced-composition delta'");
  sub->add_flag("--csv", opts->csv, "machine-readable one-row CSV");
  sub->callback([opts, &rc] { rc = bounds_main(*opts); });
}

}  // namespace blockdp::cli
