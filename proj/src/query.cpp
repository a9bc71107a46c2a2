#include "blockdp/query.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "blockdp/errors.hpp"

namespace blockdp {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double agree(double u, double v) { return u * v + (1.0 - u) * (1.0 - v); }

AttrRange window_of(const WeightedQuery& q) { return q.window; }
AttrRange window_of(const ThresholdQuery& q) { return {q.attr, q.attr}; }

AttrRange window_of(const ProductQuery& q) {
  int lo = q.literals.front().attr;
  int hi = lo;
  for (const auto& lit : q.literals) {
    lo = std::min(lo, lit.attr);
    hi = std::max(hi, lit.attr);
  }
  return {lo, hi};
}

AttrRange window_of(const AgreementQuery& q) {
  int lo = q.partner;
  int hi = q.partner;
  for (const auto& pr : q.pairs) {
    lo = std::min(lo, pr.attr);
    hi = std::max(hi, pr.attr);
  }
  return {lo, hi};
}

void validate(const WeightedQuery& q) {
  if (q.window.lo < 1 || q.window.lo > q.window.hi) {
    throw SpecError("weighted query: window must satisfy 1 <= lo <= hi");
  }
  if (q.weights.size() != q.window.size()) {
    throw SpecError("weighted query: one weight per window attribute");
  }
  if (!q.weights.allFinite() || !std::isfinite(q.bias)) {
    throw SpecError("weighted query: weights and bias must be finite");
  }
}

void validate(const ThresholdQuery& q) {
  if (q.attr < 1) throw SpecError("threshold query: attribute index must be >= 1");
  if (!(q.threshold >= 0.0 && q.threshold <= 1.0)) {
    throw SpecError("threshold query: threshold must lie in [0, 1]");
  }
}

void validate(const ProductQuery& q) {
  if (q.literals.empty() || q.literals.size() > 3) {
    throw SpecError("product query: 1 to 3 literals");
  }
  std::set<int> seen;
  for (const auto& lit : q.literals) {
    if (lit.attr < 1) throw SpecError("product query: attribute index must be >= 1");
    if (!seen.insert(lit.attr).second) {
      throw SpecError("product query: literal attributes must be distinct");
    }
  }
}

void validate(const AgreementQuery& q) {
  if (q.pairs.empty()) throw SpecError("agreement query: needs at least one pair");
  if (q.partner < 1) throw SpecError("agreement query: partner index must be >= 1");
  std::set<int> seen;
  for (const auto& pr : q.pairs) {
    if (pr.attr < 1) throw SpecError("agreement query: attribute index must be >= 1");
    if (pr.attr == q.partner) {
      throw SpecError("agreement query: pair attribute must differ from partner");
    }
    if (!seen.insert(pr.attr).second) {
      throw SpecError("agreement query: pair attributes must be distinct");
    }
  }
}

}  // namespace

LinearQuery::LinearQuery(WeightedQuery q) : family_(std::move(q)) {
  const auto& w = std::get<WeightedQuery>(family_);
  validate(w);
  window_ = window_of(w);
}

LinearQuery::LinearQuery(ThresholdQuery q) : family_(q) {
  validate(q);
  window_ = window_of(q);
}

LinearQuery::LinearQuery(ProductQuery q) : family_(std::move(q)) {
  const auto& p = std::get<ProductQuery>(family_);
  validate(p);
  window_ = window_of(p);
}

LinearQuery::LinearQuery(AgreementQuery q) : family_(std::move(q)) {
  const auto& a = std::get<AgreementQuery>(family_);
  validate(a);
  window_ = window_of(a);
}

double LinearQuery::evaluate_window(const Eigen::Ref<const Eigen::RowVectorXd>& sub) const {
  const int lo = window_.lo;
  return std::visit(
      [&](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, WeightedQuery>) {
          const double raw = q.bias + sub.dot(q.weights);
          return std::clamp(raw, 0.0, 1.0);
        } else if constexpr (std::is_same_v<T, ThresholdQuery>) {
          return sub[q.attr - lo] >= q.threshold ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, ProductQuery>) {
          double prod = 1.0;
          for (const auto& lit : q.literals) {
            const double x = sub[lit.attr - lo];
            prod *= lit.negated ? 1.0 - x : x;
          }
          return prod;
        } else {
          const double partner = sub[q.partner - lo];
          double sum = 0.0;
          for (const auto& pr : q.pairs) {
            const double a = agree(sub[pr.attr - lo], partner);
            sum += pr.agree ? a : 1.0 - a;
          }
          return sum / static_cast<double>(q.pairs.size());
        }
      },
      family_);
}

std::string LinearQuery::descriptor() const {
  return std::visit(
      [&](const auto& q) -> std::string {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, WeightedQuery>) {
          std::string s = "weighted[" + std::to_string(q.window.lo) + ".." +
                          std::to_string(q.window.hi) + "]b=" + fmt_double(q.bias) + ":w=";
          for (Eigen::Index i = 0; i < q.weights.size(); ++i) {
            if (i > 0) s += ';';
            s += fmt_double(q.weights[i]);
          }
          return s;
        } else if constexpr (std::is_same_v<T, ThresholdQuery>) {
          return "threshold[" + std::to_string(q.attr) + "]t=" + fmt_double(q.threshold);
        } else if constexpr (std::is_same_v<T, ProductQuery>) {
          std::string s = "product[";
          for (std::size_t i = 0; i < q.literals.size(); ++i) {
            if (i > 0) s += ';';
            s += std::to_string(q.literals[i].attr);
            s += q.literals[i].negated ? '-' : '+';
          }
          return s + "]";
        } else {
          std::string s = "agree[";
          for (std::size_t i = 0; i < q.pairs.size(); ++i) {
            if (i > 0) s += ';';
            s += std::to_string(q.pairs[i].attr);
            s += q.pairs[i].agree ? '+' : '-';
          }
          return s + "]~" + std::to_string(q.partner);
        }
      },
      family_);
}

double evaluate_on_sample(const LinearQuery& q, const Dataset& sample) {
  const AttrRange w = q.window();
  if (w.hi > sample.m()) {
    throw SpecError("evaluate_on_sample: query window exceeds dataset attributes");
  }
  const auto& attrs = sample.attributes();
  const int lo = w.lo;

  return std::visit(
      [&](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, WeightedQuery>) {
          Eigen::ArrayXd raw =
              (attrs.middleCols(lo - 1, w.size()) * fam.weights).array() + fam.bias;
          return raw.min(1.0).max(0.0).mean();
        } else if constexpr (std::is_same_v<T, ThresholdQuery>) {
          return (attrs.col(fam.attr - 1).array() >= fam.threshold)
              .template cast<double>()
              .mean();
        } else if constexpr (std::is_same_v<T, ProductQuery>) {
          Eigen::ArrayXd prod = Eigen::ArrayXd::Ones(attrs.rows());
          for (const auto& lit : fam.literals) {
            const auto col = attrs.col(lit.attr - 1).array();
            if (lit.negated) {
              prod *= 1.0 - col;
            } else {
              prod *= col;
            }
          }
          return prod.mean();
        } else {
          const auto partner = attrs.col(fam.partner - 1).array();
          Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(attrs.rows());
          for (const auto& pr : fam.pairs) {
            const auto col = attrs.col(pr.attr - 1).array();
            Eigen::ArrayXd a = col * partner + (1.0 - col) * (1.0 - partner);
            sum += pr.agree ? a : (1.0 - a).eval();
          }
          return sum.mean() / static_cast<double>(fam.pairs.size());
        }
      },
      q.family());
}

int query_width(const LinearQuery& q) { return q.window().width(); }

}  // namespace blockdp
