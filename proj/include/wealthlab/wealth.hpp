#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "wealthlab/rng.hpp"

namespace wealthlab {

/// Agents holding money and shares of a single stock. Wealth is valued at
/// the current price: w_i = m_i + p * s_i.
struct MarketState {
  std::vector<double> money;
  std::vector<double> stock;
  double price = 1.0;

  MarketState() = default;
  MarketState(std::size_t n, double money_each, double stock_each, double price = 1.0);
  MarketState(std::vector<double> money, std::vector<double> stock, double price);

  void validate() const;
  std::size_t size() const noexcept { return money.size(); }
  double total_money() const noexcept;
  double total_stock() const noexcept;
  double wealth(std::size_t i) const { return money[i] + price * stock[i]; }
  double wealth_at(std::size_t i, double p) const { return money[i] + p * stock[i]; }
  std::vector<double> wealths() const;
};

/// Price at which desired holdings f_i * w_i(p) / p add up to the stock.
/// Throws NoDemand when no money is offered, NoClearing when the offered
/// shares already cover the stock.
double clearing_price(std::span<const double> fractions, const MarketState& mkt);

enum class PreferenceRedraw {
  All,  // every agent draws a fresh fraction each round
  One,  // one random agent redraws; the rest keep their current allocation
};

struct SilverRoundResult {
  double price = 0.0;
  std::uint32_t redraws = 0;  // preference draws discarded for lack of clearing
};

/// One market round: new preference fractions (uniform on [0, 1]), clearing,
/// then every agent rebalances to s' = f w / p and m' = (1 - f) w at the new
/// price p. Throws NoClearing after repeated failed draws.
SilverRoundResult silver_round(MarketState& mkt, Rng& rng,
                               PreferenceRedraw mode = PreferenceRedraw::All);

/// Rebalancing step with caller-chosen fractions, used by silver_round.
double rebalance(MarketState& mkt, std::span<const double> fractions);

void write_market_csv(std::ostream& out, const MarketState& mkt);

/// Mean-field exchange with multiplicative noise, in relative units
/// (mean renormalized to 1 after every step).
struct RelativeWealthState {
  std::vector<double> w_tilde;
  double J = 1.0;
  double sigma2 = 0.5;

  RelativeWealthState() = default;
  RelativeWealthState(std::size_t n, double J, double sigma2);

  void validate() const;
  double kappa() const noexcept { return J / sigma2; }
};

/// Advances every agent by dw = J(1 - w) dt + sqrt(2 sigma2 dt) w xi, then
/// divides by the new mean. An update that would leave w <= 0 is redrawn.
/// Returns the mean before renormalization.
double bm_step(RelativeWealthState& state, double dt, Rng& rng);

void write_relative_wealth_csv(std::ostream& out, std::span<const double> w_tilde);

/// Pairwise proportional exchange where every transaction also grows both
/// participants' wealth by 1 + zeta. Absolute wealth is kept with a lazily
/// applied common scale; relative() reports w_i N / sum(w).
class SlaninaModel {
 public:
  SlaninaModel(std::size_t n, double gamma, double zeta);

  void step(Rng& rng);
  std::vector<double> relative() const;
  std::span<const double> raw() const noexcept { return w_; }
  std::size_t size() const noexcept { return w_.size(); }
  double gamma() const noexcept { return gamma_; }
  double zeta() const noexcept { return zeta_; }

 private:
  void renormalize();

  std::vector<double> w_;
  double gamma_;
  double zeta_;
  double total_;
};

/// Exponent kappa of the inverse-gamma law approached by SlaninaModel when
/// gamma and zeta are small and gamma << zeta: gamma / (zeta^2 + gamma^2/4).
/// Per transaction an agent relaxes toward the mean at rate gamma/2, while the
/// payer's loss and the random time between its transactions (during which
/// the mean grows) give multiplicative noise of variance gamma^2/4 + zeta^2.
double slanina_kappa(double gamma, double zeta);

/// Single step on a bare wealth vector; mean renormalized to 1 afterwards.
void slanina_step(std::vector<double>& wealths, double gamma, double zeta, Rng& rng);

}  // namespace wealthlab
