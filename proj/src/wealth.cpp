#include "wealthlab/wealth.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "wealthlab/error.hpp"
#include "wealthlab/io.hpp"

namespace wealthlab {
namespace {

constexpr std::uint32_t kMaxClearingRedraws = 1000;

double kahan_sum(std::span<const double> values) {
  double sum = 0.0, c = 0.0;
  for (double v : values) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

MarketState::MarketState(std::size_t n, double money_each, double stock_each, double p)
    : money(n, money_each), stock(n, stock_each), price(p) {
  validate();
}

MarketState::MarketState(std::vector<double> m, std::vector<double> s, double p)
    : money(std::move(m)), stock(std::move(s)), price(p) {
  validate();
}

void MarketState::validate() const {
  require(!money.empty(), ErrorCode::InvalidSize, "market needs at least one agent");
  require(money.size() == stock.size(), ErrorCode::InvalidSize,
          "money and stock must have one entry per agent");
  require(std::isfinite(price) && price > 0.0, ErrorCode::InvalidParameter,
          "price must be positive");
  for (std::size_t i = 0; i < money.size(); ++i) {
    require(std::isfinite(money[i]) && money[i] >= 0.0, ErrorCode::InvalidParameter,
            "money holdings must be non-negative");
    require(std::isfinite(stock[i]) && stock[i] >= 0.0, ErrorCode::InvalidParameter,
            "stock holdings must be non-negative");
  }
  require(total_stock() > 0.0, ErrorCode::InvalidParameter, "total stock must be positive");
}

double MarketState::total_money() const noexcept { return kahan_sum(money); }
double MarketState::total_stock() const noexcept { return kahan_sum(stock); }

std::vector<double> MarketState::wealths() const {
  std::vector<double> w(size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = wealth(i);
  return w;
}

double clearing_price(std::span<const double> fractions, const MarketState& mkt) {
  require(fractions.size() == mkt.size(), ErrorCode::InvalidSize,
          "one fraction per agent required");
  double offered_money = 0.0, offered_stock = 0.0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double f = fractions[i];
    require(f >= 0.0 && f <= 1.0, ErrorCode::InvalidParameter, "fractions must lie in [0, 1]");
    offered_money += f * mkt.money[i];
    offered_stock += f * mkt.stock[i];
  }
  require(offered_money > 0.0, ErrorCode::NoDemand, "no money is offered for stock");
  const double residual = mkt.total_stock() - offered_stock;
  require(residual > 1e-12 * mkt.total_stock(), ErrorCode::NoClearing,
          "offered shares cover the whole stock");
  return offered_money / residual;
}

double rebalance(MarketState& mkt, std::span<const double> fractions) {
  const double p = clearing_price(fractions, mkt);
  for (std::size_t i = 0; i < mkt.size(); ++i) {
    const double w = mkt.wealth_at(i, p);
    mkt.stock[i] = fractions[i] * w / p;
    mkt.money[i] = (1.0 - fractions[i]) * w;
  }
  mkt.price = p;
  return p;
}

SilverRoundResult silver_round(MarketState& mkt, Rng& rng, PreferenceRedraw mode) {
  const std::size_t n = mkt.size();
  std::vector<double> f(n);
  if (mode == PreferenceRedraw::One) {
    // Current allocation expressed as a fraction at the current price.
    for (std::size_t i = 0; i < n; ++i) {
      const double w = mkt.wealth(i);
      f[i] = w > 0.0 ? std::min(1.0, mkt.price * mkt.stock[i] / w) : 0.0;
    }
  }
  SilverRoundResult result;
  const std::size_t chosen = mode == PreferenceRedraw::One ? rng.below(n) : 0;
  for (;;) {
    if (mode == PreferenceRedraw::All) {
      for (auto& x : f) x = rng.uniform();
    } else {
      f[chosen] = rng.uniform();
    }
    try {
      result.price = rebalance(mkt, f);
      return result;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoClearing && e.code() != ErrorCode::NoDemand) throw;
      if (++result.redraws >= kMaxClearingRedraws) {
        throw Error(ErrorCode::NoClearing, "no clearing price after repeated preference draws");
      }
    }
  }
}

void write_market_csv(std::ostream& out, const MarketState& mkt) {
  out << "money,stock\n";
  for (std::size_t i = 0; i < mkt.size(); ++i) {
    out << format_real(mkt.money[i], 17) << ',' << format_real(mkt.stock[i], 17) << '\n';
  }
}

RelativeWealthState::RelativeWealthState(std::size_t n, double j, double s2)
    : w_tilde(n, 1.0), J(j), sigma2(s2) {
  validate();
}

void RelativeWealthState::validate() const {
  require(w_tilde.size() >= 2, ErrorCode::InvalidSize, "need at least two agents");
  require(std::isfinite(J) && J >= 0.0, ErrorCode::InvalidParameter, "J must be non-negative");
  require(std::isfinite(sigma2) && sigma2 > 0.0, ErrorCode::InvalidParameter,
          "sigma2 must be positive");
  for (double w : w_tilde) {
    require(std::isfinite(w) && w > 0.0, ErrorCode::InvalidParameter,
            "relative wealth must be positive");
  }
}

double bm_step(RelativeWealthState& state, double dt, Rng& rng) {
  require(std::isfinite(dt) && dt > 0.0 && dt * (state.J + 2.0 * state.sigma2) < 0.1,
          ErrorCode::InvalidParameter, "dt * (J + 2 sigma2) must be below 0.1");
  const double noise = std::sqrt(2.0 * state.sigma2 * dt);
  const double relax = state.J * dt;
  double sum = 0.0;
  for (double& w : state.w_tilde) {
    const double drifted = w + relax * (1.0 - w);
    double next;
    do {
      next = drifted + noise * w * rng.normal();
    } while (next <= 0.0);
    w = next;
    sum += next;
  }
  const double mean = sum / static_cast<double>(state.w_tilde.size());
  const double inv = 1.0 / mean;
  for (double& w : state.w_tilde) w *= inv;
  return mean;
}

void write_relative_wealth_csv(std::ostream& out, std::span<const double> w_tilde) {
  out << "w_tilde\n";
  for (double w : w_tilde) out << format_real(w, 17) << '\n';
}

SlaninaModel::SlaninaModel(std::size_t n, double gamma, double zeta)
    : w_(n, 1.0), gamma_(gamma), zeta_(zeta), total_(static_cast<double>(n)) {
  require(n >= 2, ErrorCode::InvalidSize, "need at least two agents");
  require(gamma > 0.0 && gamma < 1.0, ErrorCode::InvalidParameter, "gamma must lie in (0, 1)");
  require(std::isfinite(zeta) && zeta >= 0.0, ErrorCode::InvalidParameter,
          "zeta must be non-negative");
}

void SlaninaModel::step(Rng& rng) {
  const auto [payer, payee] = draw_pair(rng, w_.size());
  const double delta = gamma_ * w_[payer];
  const double before = w_[payer] + w_[payee];
  w_[payer] = (w_[payer] - delta) * (1.0 + zeta_);
  w_[payee] = (w_[payee] + delta) * (1.0 + zeta_);
  total_ += zeta_ * before;
  // Growth is geometric; rescale well before overflow.
  if (total_ > 1e100) renormalize();
}

void SlaninaModel::renormalize() {
  const double scale = static_cast<double>(w_.size()) / kahan_sum(w_);
  for (double& w : w_) w *= scale;
  total_ = static_cast<double>(w_.size());
}

std::vector<double> SlaninaModel::relative() const {
  std::vector<double> out(w_);
  const double scale = static_cast<double>(w_.size()) / kahan_sum(w_);
  for (double& w : out) w *= scale;
  return out;
}

double slanina_kappa(double gamma, double zeta) {
  require(gamma > 0.0 && gamma < 1.0 && zeta >= 0.0, ErrorCode::InvalidParameter,
          "gamma must lie in (0, 1) and zeta be non-negative");
  return gamma / (zeta * zeta + 0.25 * gamma * gamma);
}

void slanina_step(std::vector<double>& wealths, double gamma, double zeta, Rng& rng) {
  require(wealths.size() >= 2, ErrorCode::InvalidSize, "need at least two agents");
  require(gamma > 0.0 && gamma < 1.0 && zeta >= 0.0, ErrorCode::InvalidParameter,
          "gamma must lie in (0, 1) and zeta be non-negative");
  const auto [payer, payee] = draw_pair(rng, wealths.size());
  const double delta = gamma * wealths[payer];
  wealths[payer] = (wealths[payer] - delta) * (1.0 + zeta);
  wealths[payee] = (wealths[payee] + delta) * (1.0 + zeta);
  const double scale = static_cast<double>(wealths.size()) / kahan_sum(wealths);
  for (double& w : wealths) w *= scale;
}

}  // namespace wealthlab
