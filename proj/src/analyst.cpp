#include "blockdp/analyst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blockdp/errors.hpp"

namespace blockdp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

LinearQuery single_mean_query(int attr) {
  WeightedQuery q;
  q.window = {attr, attr};
  q.weights = Eigen::VectorXd::Ones(1);
  q.bias = 0.0;
  return LinearQuery(q);
}

}  // namespace

FreedmanAnalyst::FreedmanAnalyst(int m_features, int k_sel, Stat stat,
                                 std::optional<BlockLayout> blocks, double baseline)
    : m_(m_features), k_sel_(k_sel), stat_(stat), baseline_(baseline) {
  if (m_ < 1) throw SpecError("freedman analyst: needs at least one attribute");
  if (k_sel_ < 1) throw SpecError("freedman analyst: selection count must be >= 1");
  if (blocks) {
    validate_block_layout(*blocks, m_);
    scopes_ = std::move(*blocks);
  } else {
    scopes_ = {{1, m_}};
  }
  product_with_label_.assign(static_cast<std::size_t>(m_) + 1, kNaN);
  attr_mean_.assign(static_cast<std::size_t>(m_) + 1, kNaN);
  stats_.assign(static_cast<std::size_t>(m_), kNaN);
}

double FreedmanAnalyst::max_abs_statistic() const {
  double worst = 0.0;
  for (double s : stats_) {
    if (!std::isnan(s)) worst = std::max(worst, std::abs(s));
  }
  return worst;
}

void FreedmanAnalyst::consume_outcome(const Transcript& t,
                                      const std::vector<RejectionRecord>& rejections) {
  if (pending_ == Pending::none) return;
  const bool accepted = t.size() > seen_entries_;
  const double answer = accepted ? t[t.size() - 1].answer : 0.0;
  seen_entries_ = t.size();
  seen_rejections_ = rejections.size();
  const int attr = pending_attr_;
  const Pending pending = pending_;
  pending_ = Pending::none;

  switch (pending) {
    case Pending::label_mean:
      if (!accepted) {
        done_ = true;  // no label estimate, no association screening
        return;
      }
      label_mean_ = answer;
      label_known_ = true;
      return;
    case Pending::attr_product:
      if (!accepted) {
        ++attr_cursor_;  // attribute leaves the candidate set
        return;
      }
      product_with_label_[attr] = answer;
      return;  // the paired mean query comes next
    case Pending::attr_mean: {
      ++attr_cursor_;
      if (!accepted) return;
      attr_mean_[attr] = answer;
      double stat = 0.0;
      if (stat_ == Stat::label_association) {
        const double r = product_with_label_[attr];
        if (label_mean_ > 0.0 && label_mean_ < 1.0) {
          stat = r / label_mean_ - (answer - r) / (1.0 - label_mean_);
        }
      } else {
        stat = answer - baseline_;
      }
      stats_[attr - 1] = stat;
      scope_candidates_.push_back(attr);
      return;
    }
    case Pending::composite:
      if (accepted) composite_indices_.push_back(static_cast<int>(t.size()) - 1);
      ++scope_;
      attr_cursor_ = 0;
      scope_candidates_.clear();
      return;
    case Pending::none:
      return;
  }
}

LinearQuery FreedmanAnalyst::make_composite(const std::vector<int>& chosen) const {
  if (stat_ == Stat::label_association) {
    AgreementQuery q;
    q.partner = m_ + 1;
    for (int attr : chosen) {
      q.pairs.push_back({attr, stats_[attr - 1] >= 0.0});
    }
    return LinearQuery(q);
  }
  // Signed average of the chosen attributes over the scope window, shifted
  // so the raw value stays inside [0, 1] and the clamp never binds.
  const AttrRange scope = scopes_[scope_];
  WeightedQuery q;
  q.window = scope;
  q.weights = Eigen::VectorXd::Zero(scope.size());
  const double k = static_cast<double>(chosen.size());
  int negatives = 0;
  for (int attr : chosen) {
    const double sign = stats_[attr - 1] >= 0.0 ? 1.0 : -1.0;
    negatives += sign < 0.0;
    q.weights[attr - scope.lo] = sign / k;
  }
  q.bias = negatives / k;
  return LinearQuery(q);
}

std::optional<LinearQuery> FreedmanAnalyst::advance() {
  if (stat_ == Stat::label_association && !label_known_) {
    pending_ = Pending::label_mean;
    pending_attr_ = 0;
    return single_mean_query(m_ + 1);
  }
  while (scope_ < scopes_.size()) {
    const AttrRange scope = scopes_[scope_];
    if (attr_cursor_ < scope.size()) {
      const int attr = scope.lo + attr_cursor_;
      if (stat_ == Stat::label_association && std::isnan(product_with_label_[attr])) {
        pending_ = Pending::attr_product;
        pending_attr_ = attr;
        ProductQuery q;
        q.literals = {{attr, false}, {m_ + 1, false}};
        return LinearQuery(q);
      }
      pending_ = Pending::attr_mean;
      pending_attr_ = attr;
      return single_mean_query(attr);
    }
    if (!scope_candidates_.empty()) {
      std::vector<int> chosen = scope_candidates_;
      std::sort(chosen.begin(), chosen.end(), [&](int a, int b) {
        const double sa = std::abs(stats_[a - 1]);
        const double sb = std::abs(stats_[b - 1]);
        if (sa != sb) return sa > sb;
        return a < b;
      });
      chosen.resize(std::min<std::size_t>(chosen.size(), static_cast<std::size_t>(k_sel_)));
      std::sort(chosen.begin(), chosen.end());
      pending_ = Pending::composite;
      pending_attr_ = 0;
      return make_composite(chosen);
    }
    ++scope_;
    attr_cursor_ = 0;
  }
  done_ = true;
  return std::nullopt;
}

std::optional<LinearQuery> FreedmanAnalyst::next_query(
    const Transcript& t, const std::vector<RejectionRecord>& rejections) {
  consume_outcome(t, rejections);
  if (done_) return std::nullopt;
  return advance();
}

CorrelationChaser::CorrelationChaser(int m_features, int max_width, int steps, double baseline,
                                     std::uint64_t seed)
    : m_(m_features), max_width_(max_width), steps_(steps), baseline_(baseline), rng_(seed) {
  if (m_ < 1) throw SpecError("correlation chaser: needs at least one attribute");
  if (max_width_ < 0) throw SpecError("correlation chaser: width must be >= 0");
  if (steps_ < 1) throw SpecError("correlation chaser: steps must be >= 1");
  window_devs_.assign(static_cast<std::size_t>(window_size()), 0.0);
  positions_.push_back(pos_);
}

int CorrelationChaser::window_size() const { return std::min(max_width_ + 1, m_); }

void CorrelationChaser::move(int direction) {
  if (forward_only_) direction = 1;
  pos_ = std::clamp(pos_ + direction, 1, m_ - window_size() + 1);
  positions_.push_back(pos_);
  std::fill(window_devs_.begin(), window_devs_.end(), 0.0);
}

std::optional<LinearQuery> CorrelationChaser::next_query(
    const Transcript& t, const std::vector<RejectionRecord>& rejections) {
  // Outcome of the previous proposal, if any.
  if (issued_ > 0) {
    const bool accepted = t.size() > seen_entries_;
    seen_entries_ = t.size();
    seen_rejections_ = rejections.size();
    if (!accepted) {
      // The policy retired part of the current window: latch forward-only
      // movement and restart the visit one step ahead.
      forward_only_ = true;
      move(1);
      cursor_ = -1;
    } else if (cursor_ == -1) {
      max_composite_dev_ = std::max(max_composite_dev_, std::abs(t[t.size() - 1].answer - baseline_));
      cursor_ = 0;
    } else {
      window_devs_[cursor_] = std::abs(t[t.size() - 1].answer - baseline_);
      ++cursor_;
      if (cursor_ >= window_size()) {
        // Steer toward the more anomalous half of the window; coin-flip on a
        // dead tie so the walk cannot stall.
        const auto best =
            std::max_element(window_devs_.begin(), window_devs_.end()) - window_devs_.begin();
        int direction;
        if (2 * best + 1 == window_size()) {
          direction = rng_.bernoulli(0.5) ? 1 : -1;
        } else {
          direction = 2 * best + 1 > window_size() ? 1 : -1;
        }
        move(direction);
        cursor_ = -1;
      }
    }
  }

  if (issued_ >= steps_) return std::nullopt;
  ++issued_;
  if (cursor_ == -1) {
    WeightedQuery q;
    q.window = {pos_, pos_ + window_size() - 1};
    q.weights = Eigen::VectorXd::Constant(window_size(), 1.0 / window_size());
    q.bias = 0.0;
    return LinearQuery(q);
  }
  return single_mean_query(pos_ + cursor_);
}

RandomAnalyst::RandomAnalyst(int m_features, int k, Family family, std::uint64_t seed)
    : m_(m_features), k_(k), family_(family), rng_(seed) {
  if (m_ < 1) throw SpecError("random analyst: needs at least one attribute");
  if (k_ < 0) throw SpecError("random analyst: query count must be >= 0");
}

LinearQuery RandomAnalyst::random_query() {
  switch (family_) {
    case Family::threshold: {
      ThresholdQuery q;
      q.attr = rng_.uniform_int(1, m_);
      q.threshold = 0.5;
      return LinearQuery(q);
    }
    case Family::weighted: {
      WeightedQuery q;
      const int attr = rng_.uniform_int(1, m_);
      const double w = rng_.uniform01();
      q.window = {attr, attr};
      q.weights = Eigen::VectorXd::Constant(1, w);
      q.bias = 0.5 * (1.0 - w);
      return LinearQuery(q);
    }
    case Family::product: {
      ProductQuery q;
      const int count = std::min(rng_.uniform_int(1, 3), m_);
      std::vector<int> attrs;
      while (static_cast<int>(attrs.size()) < count) {
        const int a = rng_.uniform_int(1, m_);
        if (std::find(attrs.begin(), attrs.end(), a) == attrs.end()) attrs.push_back(a);
      }
      for (int a : attrs) q.literals.push_back({a, rng_.bernoulli(0.5)});
      return LinearQuery(q);
    }
  }
  throw SpecError("random analyst: unknown family");
}

std::optional<LinearQuery> RandomAnalyst::next_query(const Transcript&,
                                                     const std::vector<RejectionRecord>&) {
  if (issued_ >= k_) return std::nullopt;
  ++issued_;
  return random_query();
}

}  // namespace blockdp
