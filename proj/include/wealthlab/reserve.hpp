#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wealthlab/population.hpp"

namespace wealthlab {

/// Banking with a required reserve ratio r. Every agent carries a cash
/// balance and a debt balance, both >= 0; its money is cash - debt.
///
/// Each step draws an ordered pair (payer, payee) and one of the two ledgers
/// with equal probability:
///  - cash: the payer hands over nu * (total cash)/N. A payer short of cash
///    borrows exactly the shortfall from the bank, provided aggregate debt
///    stays within D = M0/r - M0; otherwise the payment is rejected.
///  - debt: the payer takes over nu * D/N of the payee's debt; rejected when
///    the payee owes less than that.
/// nu is uniform on [0, 1]. Loans are interest-free. Money (cash - debt) is
/// conserved by every step.
struct ReserveConfig {
  std::size_t n_agents = 1000;
  double money_base = 1e6;  // M0, initial cash shared equally
  double reserve_ratio = 1.0;
  std::uint64_t n_steps = 0;
  std::uint64_t seed = 0;

  void validate() const;
  double debt_cap() const { return money_base / reserve_ratio - money_base; }
};

struct ReserveRun {
  Population money;  // cash - debt per agent; floor is the debt cap
  std::vector<double> cash;
  std::vector<double> debt;
  double total_cash = 0.0;
  double total_debt = 0.0;
  double debt_cap = 0.0;
  std::uint64_t loans = 0;
  std::uint64_t rejected = 0;
};

ReserveRun run_reserve_ratio(const ReserveConfig& config);

/// Mean of the positive balances (T+) and of the magnitudes of the negative
/// ones (T-). An empty branch reports 0.
struct BranchTemperatures {
  double positive = 0.0;
  double negative = 0.0;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
};
BranchTemperatures branch_temperatures(std::span<const double> balances);

}  // namespace wealthlab
