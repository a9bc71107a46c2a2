#pragma once

#include <optional>
#include <string_view>

#include "blockdp/query.hpp"

namespace blockdp {

enum class RejectReason {
  cross_block,     // window straddles a block boundary
  width,           // window wider than the policy allows
  window_passed,   // window reaches into a region the policy has retired
  budget,          // per-unit privacy budget exhausted
  malformed,       // window does not fit the dataset's attribute range
};

std::string_view to_string(RejectReason r);

// Decides which query windows an interaction may still touch. Policies are
// pure window logic; budget is the ledger's concern.
//
// check() inspects a proposal without changing state; note_accepted() commits
// the state transition for a query that was actually answered. The split
// exists because a budget rejection must not advance window state.
class AccessPolicy {
 public:
  enum class Kind {
    cross_block_refusal,  // any in-block window, forever
    streaming_blocks,     // in-block windows, block index must not decrease
    width_limited,        // any window of width <= d
    sliding_window,       // width <= d, and lo > high_water - d
  };

  static AccessPolicy cross_block_refusal(BlockLayout layout);
  static AccessPolicy streaming_blocks(BlockLayout layout);
  static AccessPolicy width_limited(int max_width);
  static AccessPolicy sliding_window(int max_width);

  std::optional<RejectReason> check(const LinearQuery& q, int m) const;
  void note_accepted(const LinearQuery& q);

  // check + note_accepted in one step, for callers without budget charging.
  std::optional<RejectReason> admit(const LinearQuery& q, int m);

  // Budget unit of an admissible query: the block index under block
  // policies, the window midpoint under width policies.
  int unit_of(const LinearQuery& q) const;

  // Number of distinct budget units reachable on a dataset with m
  // attributes: block count, or one unit per attribute position.
  int unit_count(int m) const;

  Kind kind() const { return kind_; }
  const BlockLayout& layout() const { return layout_; }
  int max_width() const { return max_width_; }
  int high_water() const { return high_water_; }
  int current_block() const { return current_block_; }

  // Forgets interaction state (high-water mark, streaming position).
  void reset();

 private:
  explicit AccessPolicy(Kind kind) : kind_(kind) {}

  Kind kind_;
  BlockLayout layout_;
  int max_width_ = 0;
  int high_water_ = 0;     // sliding_window: highest attribute answered
  int current_block_ = 1;  // streaming_blocks: earliest block still open
};

}  // namespace blockdp
