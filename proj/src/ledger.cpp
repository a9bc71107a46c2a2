#include "blockdp/ledger.hpp"

#include <algorithm>

#include "blockdp/errors.hpp"

namespace blockdp {

namespace {

// Accumulated floating point sums of quota-sized charges can overshoot the
// cap by an ulp; treat anything within this relative slack as at the cap.
bool fits(double spent, double charge, double cap) {
  return spent + charge <= cap + cap * 1e-9 + 1e-12;
}

}  // namespace

BudgetLedger::BudgetLedger(double eps_cap, double delta_cap)
    : eps_cap_(eps_cap), delta_cap_(delta_cap) {
  if (!(eps_cap >= 0.0) || !(delta_cap >= 0.0)) {
    throw SpecError("budget ledger: caps must be nonnegative");
  }
}

bool BudgetLedger::try_charge(int unit, double eps, double delta) {
  if (eps < 0.0 || delta < 0.0) throw SpecError("budget ledger: charges must be nonnegative");
  if (!fits(eps_spent(unit), eps, eps_cap_) || !fits(delta_spent(unit), delta, delta_cap_)) {
    return false;
  }
  charges_[unit].push_back({eps, delta});
  return true;
}

double BudgetLedger::eps_spent(int unit) const {
  const auto it = charges_.find(unit);
  if (it == charges_.end()) return 0.0;
  double sum = 0.0;
  for (const Charge& c : it->second) sum += c.eps;
  return sum;
}

double BudgetLedger::delta_spent(int unit) const {
  const auto it = charges_.find(unit);
  if (it == charges_.end()) return 0.0;
  double sum = 0.0;
  for (const Charge& c : it->second) sum += c.delta;
  return sum;
}

double BudgetLedger::max_eps_spent() const {
  double worst = 0.0;
  for (const auto& [unit, list] : charges_) worst = std::max(worst, eps_spent(unit));
  return worst;
}

double BudgetLedger::max_delta_spent() const {
  double worst = 0.0;
  for (const auto& [unit, list] : charges_) worst = std::max(worst, delta_spent(unit));
  return worst;
}

}  // namespace blockdp
