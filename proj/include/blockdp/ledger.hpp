#pragma once

#include <map>
#include <vector>

namespace blockdp {

// Per-unit privacy spend. A unit is whatever the access policy treats as an
// isolated re-use region (a block index, or a window position). Charges
// accumulate by basic composition within a unit and never across units;
// that separation is the entire point of the accounting.
class BudgetLedger {
 public:
  struct Charge {
    double eps = 0.0;
    double delta = 0.0;
  };

  BudgetLedger(double eps_cap, double delta_cap);

  // Records the charge if it fits under both caps and reports success.
  // A rejected charge leaves the ledger untouched. Cap comparison uses a
  // tiny relative tolerance so that a quota of k charges of cap/k lands
  // exactly at the cap instead of overshooting by rounding.
  bool try_charge(int unit, double eps, double delta);

  double eps_spent(int unit) const;
  double delta_spent(int unit) const;
  double max_eps_spent() const;
  double max_delta_spent() const;

  double eps_cap() const { return eps_cap_; }
  double delta_cap() const { return delta_cap_; }

  const std::map<int, std::vector<Charge>>& charges() const { return charges_; }

 private:
  double eps_cap_;
  double delta_cap_;
  std::map<int, std::vector<Charge>> charges_;
};

}  // namespace blockdp
