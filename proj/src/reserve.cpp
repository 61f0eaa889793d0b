#include "wealthlab/reserve.hpp"

#include <algorithm>
#include <cmath>

#include "wealthlab/rng.hpp"

namespace wealthlab {

void ReserveConfig::validate() const {
  require(n_agents >= 2, ErrorCode::InvalidSize, "reserve model needs two agents");
  require(money_base > 0, ErrorCode::InvalidParameter, "money base must be > 0");
  require(reserve_ratio > 0 && reserve_ratio <= 1, ErrorCode::InvalidParameter,
          "reserve ratio must lie in (0, 1]");
}

ReserveRun run_reserve_ratio(const ReserveConfig& config) {
  config.validate();
  const std::size_t n = config.n_agents;
  const double nd = static_cast<double>(n);
  const double cap = config.debt_cap();

  std::vector<double> cash(n, config.money_base / nd);
  std::vector<double> debt(n, 0.0);
  double total_cash = config.money_base;
  double total_debt = 0.0;
  ReserveRun run{Population(n, 0.0), {}, {}, 0.0, 0.0, cap, 0, 0};
  Rng rng(config.seed);

  for (std::uint64_t step = 0; step < config.n_steps; ++step) {
    const auto [payer, payee] = draw_pair(rng, n);
    const bool cash_ledger = rng.uniform() < 0.5;
    const double nu = rng.uniform();
    if (cash_ledger) {
      const double amount = nu * total_cash / nd;
      const double shortfall = amount - cash[payer];
      if (shortfall > 0) {
        if (total_debt + shortfall > cap) {
          ++run.rejected;
          continue;
        }
        debt[payer] += shortfall;
        cash[payer] += shortfall;
        total_debt += shortfall;
        total_cash += shortfall;
        ++run.loans;
      }
      cash[payer] -= amount;
      cash[payee] += amount;
    } else {
      const double amount = nu * cap / nd;
      if (debt[payee] < amount) {
        ++run.rejected;
        continue;
      }
      debt[payee] -= amount;
      debt[payer] += amount;
    }
  }

  std::vector<double> money(n);
  for (std::size_t i = 0; i < n; ++i) money[i] = cash[i] - debt[i];
  const double floor = std::max(cap, -*std::min_element(money.begin(), money.end()));
  run.money = Population(std::move(money), floor);
  run.cash = std::move(cash);
  run.debt = std::move(debt);
  run.total_cash = total_cash;
  run.total_debt = total_debt;
  return run;
}

BranchTemperatures branch_temperatures(std::span<const double> balances) {
  BranchTemperatures t;
  double pos = 0.0, neg = 0.0;
  for (double b : balances) {
    if (b > 0) {
      pos += b;
      ++t.n_positive;
    } else if (b < 0) {
      neg -= b;
      ++t.n_negative;
    }
  }
  if (t.n_positive > 0) t.positive = pos / static_cast<double>(t.n_positive);
  if (t.n_negative > 0) t.negative = neg / static_cast<double>(t.n_negative);
  return t;
}

}  // namespace wealthlab
