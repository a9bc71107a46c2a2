#pragma once

#include <functional>
#include <vector>

#include "blockdp/query.hpp"

namespace blockdp {

struct TranscriptEntry {
  LinearQuery query;
  double answer = 0.0;  // what the mechanism released, already in [0, 1]
  int step = 0;         // proposal index within the interaction
};

// Ordered record of the accepted query/answer pairs of one interaction.
class Transcript {
 public:
  // step < 0 self-indexes: the entry's position becomes its step.
  void add(LinearQuery query, double answer, int step = -1);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const TranscriptEntry& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::vector<TranscriptEntry> entries_;
};

// Entries whose query satisfies the predicate, original order preserved.
Transcript restrict_transcript(const Transcript& t,
                               const std::function<bool(const LinearQuery&)>& keep);

// Supplies the true population value of a query under some distribution.
class PopulationOracle {
 public:
  virtual ~PopulationOracle() = default;
  virtual double value(const LinearQuery& q) const = 0;
};

// max_i |answer_i - q_i(sample)|; 0 on an empty transcript.
double max_sample_error(const Transcript& t, const Dataset& sample);

// max_i |answer_i - q_i(population)|; 0 on an empty transcript.
double max_distributional_error(const Transcript& t, const PopulationOracle& oracle);

}  // namespace blockdp
