#include "wealthlab/symmetry.hpp"

#include <cmath>
#include <map>
#include <tuple>
#include <unordered_map>

namespace wealthlab {
namespace {

std::uint64_t pack(long a, long b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

void SymmetryConfig::validate() const {
  require(n_agents >= 2, ErrorCode::InvalidSize, "probe needs two agents");
  require(n_samples >= 1, ErrorCode::InvalidParameter, "probe needs samples");
  require(bin_width > 0, ErrorCode::InvalidParameter, "bin width must be > 0");
  require(initial_balance >= 0 && debt_limit >= 0, ErrorCode::InvalidParameter,
          "balances and debt limit must be >= 0");
}

double two_proportion_z(std::uint64_t hits1, std::uint64_t n1, std::uint64_t hits2,
                        std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) return 0.0;
  const double p1 = static_cast<double>(hits1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(hits2) / static_cast<double>(n2);
  const double p = static_cast<double>(hits1 + hits2) / static_cast<double>(n1 + n2);
  const double var = p * (1.0 - p) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
  if (var <= 0) return 0.0;
  return (p1 - p2) / std::sqrt(var);
}

TransitionSymmetryReport measure_transition_symmetry(const SymmetryConfig& config) {
  config.validate();
  const ExchangeRule rule = resolve_rule(config.rule, config.n_agents, config.seed);
  validate_rule(rule, config.n_agents);
  require(!std::holds_alternative<FirmRound>(rule), ErrorCode::InvalidParameter,
          "the probe needs a pairwise rule");

  Population pop(config.n_agents, config.initial_balance);
  pop.set_debt_limit(config.debt_limit);
  Rng rng(config.seed);
  for (std::uint64_t s = 0; s < config.burn_in_steps; ++s) apply_rule(pop, rule, rng);

  const double origin = -config.debt_limit;
  auto bin_of = [&](double m) { return static_cast<long>(std::floor((m - origin) / config.bin_width)); };

  std::unordered_map<std::uint64_t, std::uint64_t> attempts;
  std::map<std::tuple<long, long, long>, std::uint64_t> hits;
  for (std::uint64_t s = 0; s < config.n_samples; ++s) {
    const StepRecord rec = apply_rule(pop, rule, rng);
    // Keyed on the paying and receiving balances: the rate measured is the
    // rule's own dependence on (m, m'), not which agent happened to pay.
    const long a = bin_of(rec.payer_before);
    const long b = bin_of(rec.payee_before);
    ++attempts[pack(a, b)];
    if (rec.outcome == TransferOutcome::Applied) {
      const long k = std::lround(rec.delta / config.bin_width);
      if (k > 0) ++hits[{a, b, k}];
    }
  }

  auto attempts_of = [&](long a, long b) -> std::uint64_t {
    const auto it = attempts.find(pack(a, b));
    return it == attempts.end() ? 0 : it->second;
  };
  auto hits_of = [&](long a, long b, long k) -> std::uint64_t {
    const auto it = hits.find({a, b, k});
    return it == hits.end() ? 0 : it->second;
  };

  TransitionSymmetryReport report;
  for (const auto& [key, count] : hits) {
    const auto [a, b, k] = key;
    const long ra = b + k, rb = a - k;
    // Visit each forward/reverse pair once, from its lexicographically
    // smaller member; a member without hits is reached from the other side.
    const std::tuple<long, long, long> reverse{ra, rb, k};
    if (reverse < key && hits.count(reverse)) continue;
    if (a <= 0 || b <= 0 || ra <= 0 || rb <= 0) continue;
    SymmetryBin bin{a, b, k};
    bin.forward_attempts = attempts_of(a, b);
    bin.forward_hits = count;
    bin.reverse_attempts = attempts_of(ra, rb);
    bin.reverse_hits = hits_of(ra, rb, k);
    if (bin.forward_attempts < config.min_attempts || bin.reverse_attempts < config.min_attempts) {
      ++report.bins_flagged;
      continue;
    }
    bin.forward_rate = static_cast<double>(bin.forward_hits) / static_cast<double>(bin.forward_attempts);
    bin.reverse_rate = static_cast<double>(bin.reverse_hits) / static_cast<double>(bin.reverse_attempts);
    bin.z = two_proportion_z(bin.forward_hits, bin.forward_attempts, bin.reverse_hits,
                             bin.reverse_attempts);
    report.max_abs_z = std::max(report.max_abs_z, std::fabs(bin.z));
    const double scale = std::max(bin.forward_rate, bin.reverse_rate);
    if (scale > 0) {
      report.max_relative_difference = std::max(
          report.max_relative_difference, std::fabs(bin.forward_rate - bin.reverse_rate) / scale);
    }
    report.chi2 += bin.z * bin.z;
    // Bins where both rates are 0 or 1 carry no sampling variance.
    if (bin.forward_hits + bin.reverse_hits > 0 &&
        bin.forward_hits + bin.reverse_hits < bin.forward_attempts + bin.reverse_attempts) {
      ++report.dof;
    }
    report.bins.push_back(bin);
  }
  const double dof = static_cast<double>(report.dof);
  if (dof > 0) report.aggregate_z = (report.chi2 - dof) / std::sqrt(2.0 * dof);
  return report;
}

}  // namespace wealthlab
