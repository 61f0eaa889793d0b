#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wealthlab/exchange.hpp"

namespace wealthlab {

struct SymmetryConfig {
  ExchangeRule rule = FixedAmount{1.0};
  std::size_t n_agents = 500;
  double initial_balance = 1000.0;
  double debt_limit = 0.0;
  std::uint64_t burn_in_steps = 0;
  std::uint64_t n_samples = 0;  // measured steps after burn-in
  double bin_width = 1.0;       // shared by balance and transfer bins
  std::uint64_t min_attempts = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One forward/reverse pair. Forward: payer in balance bin a, payee in bin b,
/// transfer of k bins. Reverse: payer in bin b + k pays k bins to a payee in
/// bin a - k. Rates are transitions per attempted pairing of the two bins.
struct SymmetryBin {
  long a = 0, b = 0, k = 0;
  std::uint64_t forward_attempts = 0, forward_hits = 0;
  std::uint64_t reverse_attempts = 0, reverse_hits = 0;
  double forward_rate = 0.0;
  double reverse_rate = 0.0;
  double z = 0.0;  // two-proportion z score, pooled variance
};

struct TransitionSymmetryReport {
  std::vector<SymmetryBin> bins;  // bins with adequate counts only
  std::size_t bins_flagged = 0;   // pairs dropped for undersampling
  double max_abs_z = 0.0;
  double max_relative_difference = 0.0;
  double chi2 = 0.0;     // sum of z^2
  std::size_t dof = 0;   // bins with non-degenerate pooled rate
  /// (chi2 - dof) / sqrt(2 dof): overall asymmetry in standard errors.
  double aggregate_z = 0.0;
};

/// Runs the rule on a fresh population, discards `burn_in_steps`, then bins
/// every attempted exchange and every applied transfer. Pairs touching the
/// lowest balance bin are excluded since the floor rejects transfers there.
TransitionSymmetryReport measure_transition_symmetry(const SymmetryConfig& config);

/// Two-proportion z statistic with pooled variance; 0 when both are empty.
double two_proportion_z(std::uint64_t hits1, std::uint64_t n1, std::uint64_t hits2,
                        std::uint64_t n2);

}  // namespace wealthlab
