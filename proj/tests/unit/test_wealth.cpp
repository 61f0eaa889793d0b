#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "wealthlab/empirics.hpp"
#include "wealthlab/error.hpp"
#include "wealthlab/exchange.hpp"
#include "wealthlab/laws.hpp"
#include "wealthlab/wealth.hpp"

using namespace wealthlab;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidParameter;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("clearing price examples") {
  MarketState even(10, 3.0, 3.0);
  const std::vector<double> half(10, 0.5);
  CHECK(clearing_price(half, even) == doctest::Approx(1.0));

  const std::vector<double> none(10, 0.0);
  CHECK(code_of([&] { clearing_price(none, even); }) == ErrorCode::NoDemand);

  MarketState single(std::vector<double>{10.0}, std::vector<double>{5.0}, 1.0);
  CHECK(clearing_price(std::vector<double>{0.5}, single) == doctest::Approx(2.0));

  // Offering every share leaves nothing to clear against.
  MarketState one(std::vector<double>{10.0}, std::vector<double>{5.0}, 1.0);
  CHECK(code_of([&] { clearing_price(std::vector<double>{1.0}, one); }) == ErrorCode::NoClearing);

  CHECK(code_of([&] { clearing_price(std::vector<double>{0.5, 0.5}, one); }) ==
        ErrorCode::InvalidSize);
  CHECK(code_of([] { MarketState(std::vector<double>{1.0}, std::vector<double>{-1.0}, 1.0); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("rebalancing clears the market and keeps wealth at the new price") {
  MarketState mkt({4.0, 1.0, 7.0, 0.5}, {1.0, 3.0, 0.0, 2.0}, 1.3);
  const std::vector<double> f = {0.2, 0.9, 0.5, 0.35};
  const double p = clearing_price(f, mkt);
  std::vector<double> at_new(mkt.size());
  for (std::size_t i = 0; i < mkt.size(); ++i) at_new[i] = mkt.wealth_at(i, p);
  const double S = mkt.total_stock(), M = mkt.total_money();

  CHECK(rebalance(mkt, f) == p);
  CHECK(mkt.price == p);
  CHECK(mkt.total_stock() == doctest::Approx(S).epsilon(1e-12));
  CHECK(mkt.total_money() == doctest::Approx(M).epsilon(1e-12));
  for (std::size_t i = 0; i < mkt.size(); ++i) {
    CHECK(mkt.wealth(i) == doctest::Approx(at_new[i]).epsilon(1e-12));
    CHECK(mkt.price * mkt.stock[i] == doctest::Approx(f[i] * at_new[i]).epsilon(1e-12));
  }
}

TEST_CASE("equal preferences move only the price") {
  MarketState mkt({4.0, 1.0, 7.0, 0.5}, {1.0, 3.0, 0.0, 2.0}, 1.0);
  const std::vector<double> f(4, 0.4);
  rebalance(mkt, f);
  const std::vector<double> w1 = mkt.wealths();
  const double p1 = mkt.price;
  rebalance(mkt, f);
  CHECK(mkt.price == doctest::Approx(p1).epsilon(1e-12));
  const std::vector<double> w2 = mkt.wealths();
  for (std::size_t i = 0; i < 4; ++i) CHECK(w2[i] == doctest::Approx(w1[i]).epsilon(1e-12));
  // Shares of wealth are what they were before the common trade.
  const double total1 = std::accumulate(w1.begin(), w1.end(), 0.0);
  MarketState start({4.0, 1.0, 7.0, 0.5}, {1.0, 3.0, 0.0, 2.0}, 1.0);
  const double p = clearing_price(f, start);
  double total0 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) total0 += start.wealth_at(i, p);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(w1[i] / total1 == doctest::Approx(start.wealth_at(i, p) / total0).epsilon(1e-12));
  }
}

TEST_CASE("silver rounds conserve money and stock") {
  MarketState mkt(200, 1.0, 1.0);
  Rng rng(5);
  for (int r = 0; r < 2000; ++r) silver_round(mkt, rng);
  CHECK(mkt.total_money() == doctest::Approx(200.0).epsilon(1e-9));
  CHECK(mkt.total_stock() == doctest::Approx(200.0).epsilon(1e-9));

  MarketState single(200, 1.0, 1.0);
  for (int r = 0; r < 5000; ++r) silver_round(single, rng, PreferenceRedraw::One);
  CHECK(single.total_money() == doctest::Approx(200.0).epsilon(1e-9));
  CHECK(single.total_stock() == doctest::Approx(200.0).epsilon(1e-9));

  std::ostringstream out;
  write_market_csv(out, mkt);
  CHECK(out.str().rfind("money,stock\n", 0) == 0);
}

TEST_CASE("bm_step keeps the mean at one") {
  RelativeWealthState s(1000, 1.0, 0.5);
  Rng rng(9);
  for (int k = 0; k < 200; ++k) bm_step(s, 1e-3, rng);
  CHECK(mean(s.w_tilde) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*std::min_element(s.w_tilde.begin(), s.w_tilde.end()) > 0.0);
  CHECK(s.kappa() == 2.0);
  CHECK(code_of([&] { bm_step(s, 0.1, rng); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { RelativeWealthState(1, 1.0, 0.5); }) == ErrorCode::InvalidSize);
  CHECK(code_of([] { RelativeWealthState(5, 1.0, 0.0); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("bm_step without noise relaxes to the mean") {
  RelativeWealthState s(100, 1.0, 1e-14);
  for (std::size_t i = 0; i < s.w_tilde.size(); ++i) s.w_tilde[i] = 0.1 + 0.02 * i;
  Rng rng(1);
  for (int k = 0; k < 20000; ++k) bm_step(s, 1e-3, rng);
  for (double w : s.w_tilde) CHECK(w == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("slanina without growth is the proportional rule") {
  std::vector<double> w = {1.5, 0.5};
  Rng a(21), b(21);
  slanina_step(w, 0.25, 0.0, a);
  Population p(std::vector<double>{1.5, 0.5});
  const StepRecord rec = apply_rule(p, ExchangeRule{Proportional{0.25}}, b);
  CHECK(w[0] == doctest::Approx(p[0]).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(p[1]).epsilon(1e-14));
  CHECK(rec.outcome == TransferOutcome::Applied);

  SlaninaModel m(50, 0.25, 0.0);
  Rng c(3);
  for (int k = 0; k < 1000; ++k) m.step(c);
  const auto raw = m.raw();
  CHECK(std::accumulate(raw.begin(), raw.end(), 0.0) == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("slanina relative wealth sums to N") {
  SlaninaModel m(100, 0.1, 0.05);
  Rng rng(2);
  for (int k = 0; k < 100000; ++k) m.step(rng);
  const auto rel = m.relative();
  CHECK(std::accumulate(rel.begin(), rel.end(), 0.0) == doctest::Approx(100.0).epsilon(1e-12));

  std::vector<double> w(10, 1.0);
  for (int k = 0; k < 1000; ++k) slanina_step(w, 0.1, 0.05, rng);
  CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(10.0).epsilon(1e-12));

  CHECK(slanina_kappa(0.005, 0.035) == doctest::Approx(0.005 / (0.035 * 0.035 + 0.25 * 0.005 * 0.005)));
  CHECK(code_of([] { SlaninaModel(1, 0.1, 0.0); }) == ErrorCode::InvalidSize);
  CHECK(code_of([] { SlaninaModel(5, 1.0, 0.0); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("slanina tail follows the inverse-gamma law") {
  const double gamma = 0.005, zeta = 0.035;
  const double kappa = slanina_kappa(gamma, zeta);
  const std::size_t n = 2000;
  SlaninaModel m(n, gamma, zeta);
  Rng rng(77);
  for (std::uint64_t k = 0; k < 4000ull * n; ++k) m.step(rng);
  std::vector<double> pool;
  for (int snap = 0; snap < 20; ++snap) {
    for (std::uint64_t k = 0; k < 100ull * n; ++k) m.step(rng);
    const auto rel = m.relative();
    pool.insert(pool.end(), rel.begin(), rel.end());
  }
  double inv = 0.0;
  for (double w : pool) inv += 1.0 / w;
  const double kappa_hat = 1.0 / (inv / static_cast<double>(pool.size()) - 1.0);
  CHECK(kappa_hat == doctest::Approx(kappa).epsilon(0.15));

  std::sort(pool.begin(), pool.end());
  const double xmin = pool[pool.size() * 9 / 10];
  std::vector<double> tail(pool.begin() + static_cast<std::ptrdiff_t>(pool.size() * 9 / 10),
                           pool.end());
  const laws::DistributionLaw law = laws::InverseGammaBM{kappa};
  const double f0 = laws::cdf(law, xmin);
  const double ks = ks_statistic_cdf(
      tail, [&](double x) { return (laws::cdf(law, x) - f0) / (1.0 - f0); });
  // Pooled snapshots are correlated; score against the critical value of one snapshot's tail.
  CHECK(ks < ks_critical(n / 10, 0.05));
}
