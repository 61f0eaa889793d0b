#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wealthlab/firm.hpp"
#include "wealthlab/population.hpp"
#include "wealthlab/rng.hpp"

namespace wealthlab {

/// Constant transfer, dm = delta.
struct FixedAmount {
  double delta = 1.0;
};

/// dm = nu * M / N with nu uniform on [0, 1].
struct RandomFractionOfAverage {};

/// dm = nu * (m_i + m_j) / 2 with nu uniform on [0, 1].
struct RandomFractionOfPairSum {};

/// dm = gamma * m_payer.
struct Proportional {
  double gamma = 0.5;
};

/// m_i' = lambda m_i + xi (1 - lambda)(m_i + m_j), j takes the remainder.
struct SavingPropensity {
  double lambda = 0.0;
};

/// Saving rule with a per-agent propensity fixed for the whole run. An empty
/// `lambdas` is filled at run setup from the run seed.
struct RandomSavingPropensity {
  std::vector<double> lambdas;

  static RandomSavingPropensity draw(std::size_t n_agents, Rng& rng);
};

using PairRule = std::variant<FixedAmount, RandomFractionOfAverage, RandomFractionOfPairSum,
                              Proportional, SavingPropensity, RandomSavingPropensity>;

/// Base rule applied with the payment direction of every pair fixed in
/// advance (derived from a hash of the pair and `orientation_seed`).
struct DirectedLinks {
  PairRule base;
  std::uint64_t orientation_seed = 0;
};

/// Firm rounds. With a base rule, one firm round replaces every N-th
/// pairwise step; without one, every step is a firm round.
struct FirmRound {
  FirmParams params;
  std::optional<PairRule> base;
};

using ExchangeRule = std::variant<FixedAmount, RandomFractionOfAverage, RandomFractionOfPairSum,
                                  Proportional, SavingPropensity, RandomSavingPropensity,
                                  DirectedLinks, FirmRound>;

/// Throws InvalidParameter when a rule parameter is outside its range.
void validate_rule(const ExchangeRule& rule, std::size_t n_agents);

std::string rule_name(const ExchangeRule& rule);

/// True if the link between agents a and b pays from a to b.
bool link_pays_forward(std::size_t a, std::size_t b, std::uint64_t orientation_seed) noexcept;

/// What one apply_rule call did. For saving rules `payer` is the agent whose
/// balance went down and `delta` the amount it lost.
struct StepRecord {
  std::size_t payer = 0;
  std::size_t payee = 0;
  double payer_before = 0.0;
  double payee_before = 0.0;
  double delta = 0.0;
  TransferOutcome outcome = TransferOutcome::Rejected;
  bool many_body = false;
};

template <MoneyRepresentation Amount>
TransferOutcome pair_transfer(BasicPopulation<Amount>& pop, std::size_t payer, std::size_t payee,
                              Amount delta) {
  return pop.transfer(payer, payee, delta);
}

/// Joint update of the saving-propensity rule for given draws.
std::pair<double, double> saving_exchange(double m_i, double m_j, double lambda_i,
                                          double lambda_j, double xi) noexcept;

/// One exchange attempt between a uniformly drawn pair. Throws InvalidSize
/// for N < 2.
template <MoneyRepresentation Amount>
StepRecord apply_rule(BasicPopulation<Amount>& pop, const ExchangeRule& rule, Rng& rng);

template <MoneyRepresentation Amount>
struct SimConfig {
  std::size_t n_agents = 500;
  Amount initial_balance{1000};
  ExchangeRule rule = FixedAmount{1.0};
  Amount debt_limit{0};
  std::uint64_t n_steps = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> snapshot_schedule;
  // Entropy histogram: bins of this width starting at -debt_limit
  // (0 selects T_eff / 10), sampled every `entropy_window` steps (0 selects N).
  double entropy_bin_width = 0.0;
  std::uint64_t entropy_window = 0;

  void validate() const;
};

template <MoneyRepresentation Amount>
struct Snapshot {
  std::uint64_t step = 0;
  BasicPopulation<Amount> population;
};

struct EntropyPoint {
  std::uint64_t step = 0;
  double entropy = 0.0;
};

template <MoneyRepresentation Amount>
struct KineticsRun {
  std::vector<Snapshot<Amount>> snapshots;
  std::vector<EntropyPoint> entropy;
  double entropy_bin_width = 0.0;
  std::uint64_t rejected = 0;
};

/// Deterministic Monte Carlo run: identical configs give bit-identical
/// snapshot sequences.
template <MoneyRepresentation Amount>
KineticsRun<Amount> run_kinetics(const SimConfig<Amount>& config);

/// Draw order used by run_kinetics to fill setup-time randomness (random
/// saving propensities, link orientations) from the run seed.
ExchangeRule resolve_rule(const ExchangeRule& rule, std::size_t n_agents, std::uint64_t seed);

}  // namespace wealthlab
