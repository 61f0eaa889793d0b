#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <type_traits>
#include <vector>

#include "wealthlab/error.hpp"

namespace wealthlab {

/// Balance in integer cents. Exact conservation audits run in this mode.
using Cents = std::int64_t;

template <class Amount>
concept MoneyRepresentation = std::is_same_v<Amount, double> || std::is_same_v<Amount, Cents>;

/// Rounds a real-valued transfer to the representation. Integer mode
/// truncates toward -inf so a transfer never exceeds what was computed.
template <MoneyRepresentation Amount>
Amount quantize(double value) noexcept {
  if constexpr (std::is_same_v<Amount, Cents>) {
    return static_cast<Cents>(std::floor(value));
  } else {
    return value;
  }
}

enum class TransferOutcome { Applied, Rejected };

/// Agent money balances with a population-wide debt floor.
///
/// Every mutation goes through transfer() or redistribute(), both of which
/// preserve the sum of balances and refuse to move any agent below
/// -debt_limit.
template <MoneyRepresentation Amount>
class BasicPopulation {
 public:
  using amount_type = Amount;

  BasicPopulation(std::size_t n, Amount initial_balance) {
    require(n >= 1, ErrorCode::InvalidSize, "population needs at least one agent");
    require(initial_balance >= Amount{0}, ErrorCode::InvalidParameter,
            "initial balance must be non-negative");
    balances_.assign(n, initial_balance);
    nominal_total_ = total_money();
  }

  explicit BasicPopulation(std::vector<Amount> balances, Amount debt_limit = Amount{0})
      : balances_(std::move(balances)) {
    require(!balances_.empty(), ErrorCode::InvalidSize, "population needs at least one agent");
    set_debt_limit(debt_limit);
    nominal_total_ = total_money();
  }

  std::size_t size() const noexcept { return balances_.size(); }
  std::span<const Amount> balances() const noexcept { return balances_; }
  Amount operator[](std::size_t i) const { return balances_[i]; }
  Amount debt_limit() const noexcept { return debt_limit_; }

  void set_debt_limit(Amount limit) {
    require(limit >= Amount{0}, ErrorCode::InvalidParameter, "debt limit must be non-negative");
    for (Amount b : balances_) {
      require(b >= -limit, ErrorCode::InvalidParameter, "existing balance below new debt floor");
    }
    debt_limit_ = limit;
  }

  bool admissible(Amount balance) const noexcept { return balance >= -debt_limit_; }

  /// Moves `delta` from payer to payee if the payer stays above the floor.
  TransferOutcome transfer(std::size_t payer, std::size_t payee, Amount delta) {
    check_index(payer);
    check_index(payee);
    require(payer != payee, ErrorCode::InvalidAgent, "payer and payee must differ");
    require(delta >= Amount{0}, ErrorCode::InvalidParameter, "transfer must be non-negative");
    if (!admissible(balances_[payer] - delta)) return TransferOutcome::Rejected;
    balances_[payer] -= delta;
    balances_[payee] += delta;
    return TransferOutcome::Applied;
  }

  /// Sets agent i to `new_i` and agent j to the remainder of their joint
  /// balance. Rejected if either side would breach the floor.
  TransferOutcome redistribute(std::size_t i, std::size_t j, Amount new_i) {
    check_index(i);
    check_index(j);
    require(i != j, ErrorCode::InvalidAgent, "pair members must differ");
    const Amount pair_total = balances_[i] + balances_[j];
    const Amount new_j = pair_total - new_i;
    if (!admissible(new_i) || !admissible(new_j)) return TransferOutcome::Rejected;
    balances_[i] = new_i;
    balances_[j] = new_j;
    return TransferOutcome::Applied;
  }

  Amount total_money() const noexcept {
    if constexpr (std::is_same_v<Amount, Cents>) {
      Cents sum = 0;
      for (Cents b : balances_) sum += b;
      return sum;
    } else {
      // Neumaier summation: the real-mode conservation audit is relative 1e-9
      // and a naive sum over 10^4 agents already loses digits.
      double sum = 0.0, carry = 0.0;
      for (double b : balances_) {
        const double t = sum + b;
        carry += (std::fabs(sum) >= std::fabs(b)) ? (sum - t) + b : (b - t) + sum;
        sum = t;
      }
      return sum + carry;
    }
  }

  /// Total at construction. Equal to total_money() for every reachable
  /// state (exactly in cent mode, up to rounding in real mode); rules read
  /// this instead of re-summing each step.
  Amount nominal_total() const noexcept { return nominal_total_; }

  /// Money temperature T_d = m_d + M/N.
  double effective_temperature() const noexcept {
    return static_cast<double>(debt_limit_) +
           static_cast<double>(total_money()) / static_cast<double>(balances_.size());
  }

  std::vector<double> as_real() const {
    return std::vector<double>(balances_.begin(), balances_.end());
  }

  friend bool operator==(const BasicPopulation&, const BasicPopulation&) = default;

 private:
  void check_index(std::size_t i) const {
    require(i < balances_.size(), ErrorCode::InvalidAgent, "agent index out of range");
  }

  std::vector<Amount> balances_;
  Amount debt_limit_{0};
  Amount nominal_total_{0};
};

using Population = BasicPopulation<double>;
using CentPopulation = BasicPopulation<Cents>;

template <MoneyRepresentation Amount>
BasicPopulation<Amount> new_population(std::size_t n, Amount initial_balance) {
  return BasicPopulation<Amount>(n, initial_balance);
}

/// Snapshot CSV: header `balance`, one agent per line in index order.
void write_snapshot_csv(std::ostream& out, const Population& pop);
void write_snapshot_csv(std::ostream& out, const CentPopulation& pop);

/// Reads a snapshot written by write_snapshot_csv. Throws MalformedInput.
Population read_snapshot_csv(std::istream& in);

}  // namespace wealthlab
