#include "wealthlab/firm.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "wealthlab/quadrature.hpp"

namespace wealthlab {

void FirmParams::validate() const {
  require(v > 0 && std::isfinite(v), ErrorCode::InvalidParameter, "demand scale v must be > 0");
  require(eta > 0 && eta < 1, ErrorCode::InvalidParameter, "demand exponent eta must lie in (0, 1)");
  require(chi > 0 && chi < 1, ErrorCode::InvalidParameter, "labour share chi must lie in (0, 1)");
  require(interest > 0, ErrorCode::InvalidParameter, "interest rate must be > 0");
  require(wage > 0, ErrorCode::InvalidParameter, "wage must be > 0");
  require(labor_max > 0 && capital_max > 0, ErrorCode::InvalidParameter,
          "search bounds must be > 0");
}

namespace {

double revenue(const FirmParams& p, double labor, double capital) {
  const double rho = 1.0 - p.eta;
  return p.v * std::exp(rho * (p.chi * std::log(labor) + (1.0 - p.chi) * std::log(capital)));
}

// Capital maximising profit at fixed labour.
double best_capital(const FirmParams& p, double labor) {
  const double rho = 1.0 - p.eta;
  const double ck = (1.0 - p.chi) * rho;
  const double log_k =
      (std::log(ck * p.v / p.interest) + p.chi * rho * std::log(labor)) / (1.0 - ck);
  return std::exp(log_k);
}

FirmOptimum make_optimum(const FirmParams& p, double labor, double capital) {
  FirmOptimum o;
  o.labor = labor;
  o.capital = capital;
  o.profit = firm_profit(p, labor, capital);
  o.output = std::pow(labor, p.chi) * std::pow(capital, 1.0 - p.chi);
  o.price = p.v / std::pow(o.output, p.eta);
  return o;
}

}  // namespace

double firm_profit(const FirmParams& p, double labor, double capital) {
  return revenue(p, labor, capital) - p.wage * labor - p.interest * capital;
}

std::pair<double, double> firm_profit_gradient(const FirmParams& p, double labor, double capital) {
  const double rho = 1.0 - p.eta;
  const double rev = revenue(p, labor, capital);
  return {p.chi * rho * rev / labor - p.wage, (1.0 - p.chi) * rho * rev / capital - p.interest};
}

FirmOptimum optimize_firm(const FirmParams& p) {
  p.validate();
  const double rho = 1.0 - p.eta;
  const double cl = p.chi * rho;
  const double ck = (1.0 - p.chi) * rho;
  const double log_rev =
      (std::log(p.v) + cl * std::log(cl / p.wage) + ck * std::log(ck / p.interest)) / (1.0 - rho);
  double labor = cl * std::exp(log_rev) / p.wage;
  double capital = ck * std::exp(log_rev) / p.interest;

  if (!std::isfinite(labor) || !std::isfinite(capital) || labor <= 0 || capital <= 0) {
    auto profile = [&](double log_l) {
      const double l = std::exp(log_l);
      return firm_profit(p, l, best_capital(p, l));
    };
    const double log_l = quad::golden_section_max(profile, -700.0, std::log(p.labor_max), 1e-12);
    labor = std::exp(log_l);
    capital = best_capital(p, labor);
  }
  require(std::isfinite(labor) && std::isfinite(capital) && labor > 0 && capital > 0 &&
              labor <= p.labor_max && capital <= p.capital_max,
          ErrorCode::NoInteriorOptimum, "profit maximum lies outside the search bounds");
  return make_optimum(p, labor, capital);
}

template <MoneyRepresentation Amount>
FirmRoundResult firm_round(BasicPopulation<Amount>& pop, const FirmParams& params,
                           const FirmOptimum& plan, Rng& rng) {
  const auto workers = static_cast<std::size_t>(std::ceil(plan.labor));
  const auto units = static_cast<std::size_t>(std::floor(plan.output));
  const std::size_t n = pop.size();
  require(n >= workers + units + 2, ErrorCode::InvalidSize,
          "not enough distinct agents for a firm round");

  const Amount loan = quantize<Amount>(plan.capital);
  const Amount wage = quantize<Amount>(params.wage);
  const Amount price = quantize<Amount>(plan.price);
  const Amount repayment = quantize<Amount>((1.0 + params.interest) * plan.capital);

  // Participants are drawn without replacement by a partial Fisher-Yates
  // shuffle; a buyer or lender who cannot pay is consumed and replaced.
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::size_t drawn = 0;
  auto next_agent = [&]() {
    const std::size_t k = drawn + static_cast<std::size_t>(rng.below(n - drawn));
    std::swap(pool[drawn], pool[k]);
    return pool[drawn++];
  };
  auto reserve_left = [&](std::size_t still_needed) { return n - drawn > still_needed; };

  const BasicPopulation<Amount> saved = pop;
  FirmRoundResult result;
  auto abort = [&]() {
    pop = saved;
    result.completed = false;
    return result;
  };

  const std::size_t firm = next_agent();
  std::size_t lender = next_agent();
  while (pop.transfer(lender, firm, loan) == TransferOutcome::Rejected) {
    if (!reserve_left(workers + units)) return abort();
    lender = next_agent();
  }

  for (std::size_t w = 0; w < workers; ++w) {
    if (pop.transfer(firm, next_agent(), wage) == TransferOutcome::Rejected) return abort();
    ++result.workers;
  }

  while (result.units_sold < units) {
    if (drawn == n) return abort();
    if (pop.transfer(next_agent(), firm, price) == TransferOutcome::Applied) {
      ++result.units_sold;
    } else {
      ++result.buyer_redraws;
    }
  }

  if (pop.transfer(firm, lender, repayment) == TransferOutcome::Rejected) return abort();
  result.completed = true;
  return result;
}

template <MoneyRepresentation Amount>
FirmRoundResult firm_round(BasicPopulation<Amount>& pop, const FirmParams& params, Rng& rng) {
  return firm_round(pop, params, optimize_firm(params), rng);
}

template FirmRoundResult firm_round(Population&, const FirmParams&, Rng&);
template FirmRoundResult firm_round(CentPopulation&, const FirmParams&, Rng&);
template FirmRoundResult firm_round(Population&, const FirmParams&, const FirmOptimum&, Rng&);
template FirmRoundResult firm_round(CentPopulation&, const FirmParams&, const FirmOptimum&, Rng&);

}  // namespace wealthlab
