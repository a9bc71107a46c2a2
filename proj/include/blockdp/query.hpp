#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "blockdp/dataset.hpp"

namespace blockdp {

// Every query family maps one individual's windowed attribute sub-vector
// into [0, 1]; the value on a sample is the mean over individuals. Families
// are closed under this range by construction, so mechanism answers can be
// clamped to [0, 1] without bias at the extremes.

// clamp(bias + sum_i weights[i] * x[window.lo + i], 0, 1)
struct WeightedQuery {
  AttrRange window;
  Eigen::VectorXd weights;  // one weight per attribute in the window
  double bias = 0.0;
};

// 1[x_attr >= threshold]
struct ThresholdQuery {
  int attr = 1;
  double threshold = 0.5;
};

// Product of 1 to 3 literals, where a literal is x_a or (1 - x_a).
struct ProductQuery {
  struct Literal {
    int attr = 1;
    bool negated = false;
  };
  std::vector<Literal> literals;
};

// Mean agreement between a partner attribute and a set of paired attributes:
// agree(u, v) = u v + (1 - u)(1 - v), and a pair marked disagree contributes
// 1 - agree. On binary attributes this is the fraction of exact (mis)matches.
struct AgreementQuery {
  struct Pair {
    int attr = 1;
    bool agree = true;
  };
  std::vector<Pair> pairs;
  int partner = 1;
};

class LinearQuery {
 public:
  using Family = std::variant<WeightedQuery, ThresholdQuery, ProductQuery, AgreementQuery>;

  // Each constructor validates structure (ordering, index ranges, finite
  // coefficients) and throws SpecError on violation. Whether the window fits
  // a concrete dataset is the mechanism's concern, not the query's.
  explicit LinearQuery(WeightedQuery q);
  explicit LinearQuery(ThresholdQuery q);
  explicit LinearQuery(ProductQuery q);
  explicit LinearQuery(AgreementQuery q);

  const Family& family() const { return family_; }

  // Minimal contiguous attribute range the evaluator reads.
  const AttrRange& window() const { return window_; }

  // Evaluator on one individual's windowed sub-vector. The argument has
  // window().size() entries; absolute attribute a maps to index a - lo.
  double evaluate_window(const Eigen::Ref<const Eigen::RowVectorXd>& sub) const;

  // Canonical comma-free text form, stable across runs.
  std::string descriptor() const;

 private:
  Family family_;
  AttrRange window_;
};

// Mean of the query over all rows of the sample. Throws SpecError when the
// window does not fit the dataset.
double evaluate_on_sample(const LinearQuery& q, const Dataset& sample);

// Window span of the query: hi - lo, so a single-attribute query has width 0.
int query_width(const LinearQuery& q);

}  // namespace blockdp
