#include "blockdp/transcript.hpp"

#include <cmath>

#include "blockdp/errors.hpp"

namespace blockdp {

void Transcript::add(LinearQuery query, double answer, int step) {
  if (!(answer >= 0.0 && answer <= 1.0)) {
    throw SpecError("transcript: answers must lie in [0, 1]");
  }
  if (step < 0) step = static_cast<int>(entries_.size());
  entries_.push_back({std::move(query), answer, step});
}

Transcript restrict_transcript(const Transcript& t,
                               const std::function<bool(const LinearQuery&)>& keep) {
  Transcript out;
  for (const auto& entry : t) {
    if (keep(entry.query)) out.add(entry.query, entry.answer, entry.step);
  }
  return out;
}

double max_sample_error(const Transcript& t, const Dataset& sample) {
  double worst = 0.0;
  for (const auto& entry : t) {
    worst = std::max(worst, std::abs(entry.answer - evaluate_on_sample(entry.query, sample)));
  }
  return worst;
}

double max_distributional_error(const Transcript& t, const PopulationOracle& oracle) {
  double worst = 0.0;
  for (const auto& entry : t) {
    worst = std::max(worst, std::abs(entry.answer - oracle.value(entry.query)));
  }
  return worst;
}

}  // namespace blockdp
