#pragma once

#include <cstddef>

#include "wealthlab/population.hpp"
#include "wealthlab/rng.hpp"

namespace wealthlab {

/// Demand curve R(Q) = v / Q^eta and Cobb-Douglas production
/// Q(L, K) = L^chi K^(1-chi). `wage` is W, `interest` is h.
struct FirmParams {
  double v = 0.0;
  double eta = 0.0;
  double chi = 0.0;
  double interest = 0.0;
  double wage = 0.0;
  double labor_max = 1e12;
  double capital_max = 1e12;

  void validate() const;
};

struct FirmOptimum {
  double capital = 0.0;  // K*
  double labor = 0.0;    // L*
  double profit = 0.0;   // F*
  double output = 0.0;   // Q(L*, K*)
  double price = 0.0;    // R(Q*)
};

/// F(L, K) = v (L^chi K^(1-chi))^(1-eta) - W L - h K.
double firm_profit(const FirmParams& p, double labor, double capital);

/// Gradient (dF/dL, dF/dK).
std::pair<double, double> firm_profit_gradient(const FirmParams& p, double labor, double capital);

/// Interior profit maximum. Uses the closed-form first-order conditions and
/// falls back to golden-section search on the capital-optimised labour
/// profile when the closed form is not finite. Throws NoInteriorOptimum if
/// the maximiser lies outside (0, labor_max] x (0, capital_max].
FirmOptimum optimize_firm(const FirmParams& p);

struct FirmRoundResult {
  bool completed = false;
  std::size_t workers = 0;
  std::size_t units_sold = 0;
  std::size_t buyer_redraws = 0;
};

/// One firm round as a many-body transfer: a firm agent borrows K from a
/// lender, pays W to ceil(L*) workers, sells floor(Q*) units at R(Q*) to
/// distinct buyers (buyers who cannot pay are re-drawn), then repays
/// (1+h)K. Every leg is a floor-checked pairwise transfer; if any leg cannot
/// complete the round is rolled back and reported as not completed.
template <MoneyRepresentation Amount>
FirmRoundResult firm_round(BasicPopulation<Amount>& pop, const FirmParams& params, Rng& rng);

template <MoneyRepresentation Amount>
FirmRoundResult firm_round(BasicPopulation<Amount>& pop, const FirmParams& params,
                           const FirmOptimum& plan, Rng& rng);

}  // namespace wealthlab
