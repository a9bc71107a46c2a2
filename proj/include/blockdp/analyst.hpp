#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "blockdp/mechanism.hpp"
#include "blockdp/rng.hpp"

namespace blockdp {

// Selection attack in the style of Freedman's regression paradox: screen
// every attribute with cheap queries, keep the k_sel most extreme
// statistics, then issue one composite query concentrated on the survivors.
// With many attributes and no noise the composite overfits the sample badly;
// under per-unit budgets it is exactly the workload the accuracy bounds are
// supposed to contain.
//
// Two screening statistics:
//   label_association  stat_i = E[x_i | y=1] - E[x_i | y=0], estimated from
//                      two counting queries per attribute plus one shared
//                      label-mean query; requires the label exposed as
//                      attribute m+1. Composite: mean agreement with the
//                      label across the selected attributes, signed by the
//                      observed association direction.
//   marginal_deviation stat_i = q_i(S) - baseline, one query per attribute,
//                      label-free. Composite: signed average of the selected
//                      attributes' deviations, biased so the clamp never
//                      binds.
//
// Scopes: with a block layout, screening and the composite run per block and
// every query stays inside one block; without, there is a single scope over
// all attributes. A rejected screening query removes its attribute from the
// candidate set; everything else proceeds with what was answered.
class FreedmanAnalyst : public Analyst {
 public:
  enum class Stat { label_association, marginal_deviation };

  FreedmanAnalyst(int m_features, int k_sel, Stat stat,
                  std::optional<BlockLayout> blocks = std::nullopt, double baseline = 0.5);

  std::optional<LinearQuery> next_query(const Transcript& t,
                                        const std::vector<RejectionRecord>& rejections) override;

  // Screening statistic per attribute, NaN where screening was rejected or
  // is still pending.
  const std::vector<double>& statistics() const { return stats_; }
  double max_abs_statistic() const;

  // Transcript indices of the accepted composite queries, one per scope
  // that had at least one surviving candidate.
  const std::vector<int>& composite_indices() const { return composite_indices_; }

 private:
  enum class Pending { none, label_mean, attr_product, attr_mean, composite };

  std::optional<LinearQuery> advance();
  void consume_outcome(const Transcript& t, const std::vector<RejectionRecord>& rejections);
  LinearQuery make_composite(const std::vector<int>& chosen) const;

  int m_;
  int k_sel_;
  Stat stat_;
  double baseline_;
  std::vector<AttrRange> scopes_;

  // Plan cursor.
  std::size_t scope_ = 0;
  int attr_cursor_ = 0;   // next attribute offset within the current scope
  bool label_known_ = false;
  bool done_ = false;

  // In-flight proposal bookkeeping. Exactly one proposal is pending between
  // next_query calls.
  Pending pending_ = Pending::none;
  int pending_attr_ = 0;
  std::size_t seen_entries_ = 0;
  std::size_t seen_rejections_ = 0;

  double label_mean_ = 0.0;
  std::vector<double> product_with_label_;  // E_S[x_i * y] estimates
  std::vector<double> attr_mean_;           // E_S[x_i] estimates
  std::vector<double> stats_;
  std::vector<int> scope_candidates_;
  std::vector<int> composite_indices_;
};

// Width-respecting adaptive stressor for the window policies. Walks a
// window of width <= max_width across the attributes; each visit asks one
// equal-weight composite over the window plus one query per attribute, then
// steps toward the half of the window whose answers deviate most from the
// expected marginal. After the first rejection the walk only ever advances,
// so under a sliding-window policy its positions are non-decreasing from
// that point on.
class CorrelationChaser : public Analyst {
 public:
  CorrelationChaser(int m_features, int max_width, int steps, double baseline,
                    std::uint64_t seed);

  std::optional<LinearQuery> next_query(const Transcript& t,
                                        const std::vector<RejectionRecord>& rejections) override;

  // Largest |composite answer - baseline| observed so far: the dependence
  // evidence the chaser accumulated.
  double max_composite_deviation() const { return max_composite_dev_; }
  const std::vector<int>& positions_visited() const { return positions_; }

 private:
  int window_size() const;
  void move(int direction);

  int m_;
  int max_width_;
  int steps_;
  double baseline_;
  Rng rng_;

  int issued_ = 0;
  int pos_ = 1;             // window lo
  int cursor_ = -1;         // -1: composite next; k >= 0: single for offset k
  bool forward_only_ = false;

  std::vector<int> positions_;
  std::vector<double> window_devs_;
  double max_composite_dev_ = 0.0;
  std::size_t seen_entries_ = 0;
  std::size_t seen_rejections_ = 0;
};

// Non-adaptive control: k queries drawn up front, blind to every answer.
class RandomAnalyst : public Analyst {
 public:
  enum class Family { threshold, weighted, product };

  RandomAnalyst(int m_features, int k, Family family, std::uint64_t seed);

  std::optional<LinearQuery> next_query(const Transcript& t,
                                        const std::vector<RejectionRecord>& rejections) override;

 private:
  LinearQuery random_query();

  int m_;
  int k_;
  Family family_;
  Rng rng_;
  int issued_ = 0;
};

}  // namespace blockdp
