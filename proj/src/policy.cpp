#include "blockdp/policy.hpp"

#include <algorithm>

#include "blockdp/errors.hpp"

namespace blockdp {

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::cross_block: return "cross_block";
    case RejectReason::width: return "width";
    case RejectReason::window_passed: return "window_passed";
    case RejectReason::budget: return "budget";
    case RejectReason::malformed: return "malformed";
  }
  return "unknown";
}

AccessPolicy AccessPolicy::cross_block_refusal(BlockLayout layout) {
  AccessPolicy p(Kind::cross_block_refusal);
  validate_block_layout(layout, layout.back().hi);
  p.layout_ = std::move(layout);
  return p;
}

AccessPolicy AccessPolicy::streaming_blocks(BlockLayout layout) {
  AccessPolicy p(Kind::streaming_blocks);
  validate_block_layout(layout, layout.back().hi);
  p.layout_ = std::move(layout);
  return p;
}

AccessPolicy AccessPolicy::width_limited(int max_width) {
  if (max_width < 0) throw SpecError("width_limited: max width must be >= 0");
  AccessPolicy p(Kind::width_limited);
  p.max_width_ = max_width;
  return p;
}

AccessPolicy AccessPolicy::sliding_window(int max_width) {
  if (max_width < 0) throw SpecError("sliding_window: max width must be >= 0");
  AccessPolicy p(Kind::sliding_window);
  p.max_width_ = max_width;
  return p;
}

std::optional<RejectReason> AccessPolicy::check(const LinearQuery& q, int m) const {
  const AttrRange w = q.window();
  if (w.hi > m) return RejectReason::malformed;

  switch (kind_) {
    case Kind::cross_block_refusal:
      if (!block_of(layout_, w)) return RejectReason::cross_block;
      return std::nullopt;
    case Kind::streaming_blocks: {
      const auto block = block_of(layout_, w);
      if (!block) return RejectReason::cross_block;
      if (*block < current_block_) return RejectReason::window_passed;
      return std::nullopt;
    }
    case Kind::width_limited:
      if (w.width() > max_width_) return RejectReason::width;
      return std::nullopt;
    case Kind::sliding_window:
      if (w.width() > max_width_) return RejectReason::width;
      // Once attribute i has been answered, everything at or below i - d is
      // retired for good, including i - d itself. Before the first answer
      // high_water_ is 0 and nothing is retired.
      if (w.lo <= high_water_ - max_width_) return RejectReason::window_passed;
      return std::nullopt;
  }
  return std::nullopt;
}

void AccessPolicy::note_accepted(const LinearQuery& q) {
  const AttrRange w = q.window();
  switch (kind_) {
    case Kind::streaming_blocks:
      current_block_ = std::max(current_block_, *block_of(layout_, w));
      break;
    case Kind::sliding_window:
      high_water_ = std::max(high_water_, w.hi);
      break;
    default:
      break;
  }
}

std::optional<RejectReason> AccessPolicy::admit(const LinearQuery& q, int m) {
  const auto reason = check(q, m);
  if (!reason) note_accepted(q);
  return reason;
}

int AccessPolicy::unit_of(const LinearQuery& q) const {
  const AttrRange w = q.window();
  switch (kind_) {
    case Kind::cross_block_refusal:
    case Kind::streaming_blocks: {
      const auto block = block_of(layout_, w);
      if (!block) throw SpecError("unit_of: window straddles blocks");
      return *block;
    }
    case Kind::width_limited:
    case Kind::sliding_window:
      return (w.lo + w.hi) / 2;
  }
  throw SpecError("unit_of: unknown policy kind");
}

int AccessPolicy::unit_count(int m) const {
  switch (kind_) {
    case Kind::cross_block_refusal:
    case Kind::streaming_blocks:
      return static_cast<int>(layout_.size());
    case Kind::width_limited:
    case Kind::sliding_window:
      return m;
  }
  throw SpecError("unit_count: unknown policy kind");
}

void AccessPolicy::reset() {
  high_water_ = 0;
  current_block_ = 1;
}

}  // namespace blockdp
