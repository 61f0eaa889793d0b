#include "wealthlab/exchange.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>


namespace wealthlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate_pair_rule(const PairRule& rule, std::size_t n_agents) {
  std::visit(Overloaded{
                 [](const FixedAmount& r) {
                   require(r.delta > 0 && std::isfinite(r.delta), ErrorCode::InvalidParameter,
                           "fixed transfer must be positive");
                 },
                 [](const RandomFractionOfAverage&) {},
                 [](const RandomFractionOfPairSum&) {},
                 [](const Proportional& r) {
                   require(r.gamma > 0 && r.gamma < 1, ErrorCode::InvalidParameter,
                           "proportional gamma must lie in (0, 1)");
                 },
                 [](const SavingPropensity& r) {
                   require(r.lambda >= 0 && r.lambda < 1, ErrorCode::InvalidParameter,
                           "saving propensity must lie in [0, 1)");
                 },
                 [n_agents](const RandomSavingPropensity& r) {
                   require(r.lambdas.size() == n_agents, ErrorCode::InvalidParameter,
                           "one saving propensity per agent required");
                   for (double l : r.lambdas) {
                     require(l >= 0 && l < 1, ErrorCode::InvalidParameter,
                             "saving propensity must lie in [0, 1)");
                   }
                 },
             },
             rule);
}

template <MoneyRepresentation Amount>
StepRecord exchange_pair(BasicPopulation<Amount>& pop, const PairRule& rule, std::size_t payer,
                         std::size_t payee, Rng& rng) {
  StepRecord rec;
  rec.payer = payer;
  rec.payee = payee;
  rec.payer_before = static_cast<double>(pop[payer]);
  rec.payee_before = static_cast<double>(pop[payee]);

  auto pay = [&](double amount) {
    const Amount delta = std::max(Amount{0}, quantize<Amount>(amount));
    rec.delta = static_cast<double>(delta);
    rec.outcome = pop.transfer(payer, payee, delta);
  };
  auto save = [&](double lambda_i, double lambda_j) {
    const double xi = rng.uniform();
    const auto [new_i, new_j] =
        saving_exchange(rec.payer_before, rec.payee_before, lambda_i, lambda_j, xi);
    (void)new_j;
    const Amount target = quantize<Amount>(new_i);
    rec.outcome = pop.redistribute(payer, payee, target);
    const double moved = static_cast<double>(target) - rec.payer_before;
    if (moved < 0) {
      rec.delta = -moved;
    } else {
      std::swap(rec.payer, rec.payee);
      std::swap(rec.payer_before, rec.payee_before);
      rec.delta = moved;
    }
  };

  std::visit(Overloaded{
                 [&](const FixedAmount& r) { pay(r.delta); },
                 [&](const RandomFractionOfAverage&) {
                   const double average = static_cast<double>(pop.nominal_total()) /
                                          static_cast<double>(pop.size());
                   pay(rng.uniform() * average);
                 },
                 [&](const RandomFractionOfPairSum&) {
                   pay(rng.uniform() * 0.5 * (rec.payer_before + rec.payee_before));
                 },
                 [&](const Proportional& r) { pay(r.gamma * rec.payer_before); },
                 [&](const SavingPropensity& r) { save(r.lambda, r.lambda); },
                 [&](const RandomSavingPropensity& r) {
                   save(r.lambdas[payer], r.lambdas[payee]);
                 },
             },
             rule);
  return rec;
}

template <MoneyRepresentation Amount>
StepRecord firm_step(BasicPopulation<Amount>& pop, const FirmParams& params, Rng& rng) {
  StepRecord rec;
  rec.many_body = true;
  const auto result = firm_round(pop, params, rng);
  rec.outcome = result.completed ? TransferOutcome::Applied : TransferOutcome::Rejected;
  return rec;
}

template <MoneyRepresentation Amount>
StepRecord pairwise_step(BasicPopulation<Amount>& pop, const PairRule& rule,
                         std::optional<std::uint64_t> orientation, Rng& rng) {
  auto [i, j] = draw_pair(rng, pop.size());
  if (orientation && !link_pays_forward(i, j, *orientation)) std::swap(i, j);
  return exchange_pair(pop, rule, i, j, rng);
}

PairRule resolve_pair_rule(const PairRule& rule, std::size_t n_agents, std::uint64_t seed) {
  if (const auto* r = std::get_if<RandomSavingPropensity>(&rule); r && r->lambdas.empty()) {
    Rng setup(derive_seed(seed, 0x5A71));
    return RandomSavingPropensity::draw(n_agents, setup);
  }
  return rule;
}

// Histogram of balances on a fixed grid, updated per transfer.
class RunningHistogram {
 public:
  RunningHistogram(double origin, double width) : origin_(origin), width_(width) {}

  void add(double x) { bump(x, +1); }
  void remove(double x) { bump(x, -1); }

  template <class Range>
  void rebuild(const Range& values) {
    counts_.clear();
    n_ = 0;
    for (auto v : values) add(static_cast<double>(v));
  }

  double entropy() const {
    double s = 0.0;
    const double n = static_cast<double>(n_);
    for (auto c : counts_) {
      if (c > 0) {
        const double p = static_cast<double>(c) / n;
        s -= p * std::log(p);
      }
    }
    return s;
  }

 private:
  void bump(double x, int sign) {
    const double pos = std::floor((x - origin_) / width_);
    const auto k = static_cast<std::size_t>(std::max(0.0, pos));
    if (k >= counts_.size()) counts_.resize(k + 1, 0);
    counts_[k] += sign;
    n_ += sign;
  }

  double origin_;
  double width_;
  std::vector<std::int64_t> counts_;
  std::int64_t n_ = 0;
};

}  // namespace

RandomSavingPropensity RandomSavingPropensity::draw(std::size_t n_agents, Rng& rng) {
  RandomSavingPropensity rule;
  rule.lambdas.resize(n_agents);
  for (auto& l : rule.lambdas) l = rng.uniform();
  return rule;
}

void validate_rule(const ExchangeRule& rule, std::size_t n_agents) {
  std::visit(Overloaded{
                 [&](const DirectedLinks& r) { validate_pair_rule(r.base, n_agents); },
                 [&](const FirmRound& r) {
                   r.params.validate();
                   if (r.base) validate_pair_rule(*r.base, n_agents);
                 },
                 [&](const auto& r) { validate_pair_rule(PairRule{r}, n_agents); },
             },
             rule);
}

std::string rule_name(const ExchangeRule& rule) {
  return std::visit(Overloaded{
                        [](const FixedAmount&) -> std::string { return "fixed"; },
                        [](const RandomFractionOfAverage&) -> std::string { return "frac-avg"; },
                        [](const RandomFractionOfPairSum&) -> std::string { return "pair-sum"; },
                        [](const Proportional&) -> std::string { return "proportional"; },
                        [](const SavingPropensity&) -> std::string { return "saving"; },
                        [](const RandomSavingPropensity&) -> std::string { return "random-saving"; },
                        [](const DirectedLinks&) -> std::string { return "directed"; },
                        [](const FirmRound&) -> std::string { return "firm"; },
                    },
                    rule);
}

bool link_pays_forward(std::size_t a, std::size_t b, std::uint64_t orientation_seed) noexcept {
  const std::uint64_t lo = std::min(a, b);
  const std::uint64_t hi = std::max(a, b);
  std::uint64_t state = orientation_seed ^ (lo * 0x9E3779B97F4A7C15ULL) ^ (hi << 32 | hi >> 32);
  const bool lo_pays = (splitmix64(state) & 1ULL) == 0;
  return lo_pays == (a == lo);
}

std::pair<double, double> saving_exchange(double m_i, double m_j, double lambda_i,
                                          double lambda_j, double xi) noexcept {
  const double pot = (1.0 - lambda_i) * m_i + (1.0 - lambda_j) * m_j;
  return {lambda_i * m_i + xi * pot, lambda_j * m_j + (1.0 - xi) * pot};
}

ExchangeRule resolve_rule(const ExchangeRule& rule, std::size_t n_agents, std::uint64_t seed) {
  return std::visit(Overloaded{
                        [&](const DirectedLinks& r) -> ExchangeRule {
                          DirectedLinks out{resolve_pair_rule(r.base, n_agents, seed),
                                            r.orientation_seed};
                          if (out.orientation_seed == 0) out.orientation_seed = derive_seed(seed, 0xD1EC);
                          return out;
                        },
                        [&](const FirmRound& r) -> ExchangeRule {
                          FirmRound out = r;
                          if (out.base) out.base = resolve_pair_rule(*out.base, n_agents, seed);
                          return out;
                        },
                        [&](const auto& r) -> ExchangeRule {
                          return std::visit([](auto&& x) -> ExchangeRule { return x; },
                                            resolve_pair_rule(PairRule{r}, n_agents, seed));
                        },
                    },
                    rule);
}

template <MoneyRepresentation Amount>
StepRecord apply_rule(BasicPopulation<Amount>& pop, const ExchangeRule& rule, Rng& rng) {
  require(pop.size() >= 2, ErrorCode::InvalidSize, "an exchange needs at least two agents");
  return std::visit(Overloaded{
                        [&](const DirectedLinks& r) {
                          return pairwise_step(pop, r.base, r.orientation_seed, rng);
                        },
                        [&](const FirmRound& r) { return firm_step(pop, r.params, rng); },
                        [&](const auto& r) {
                          return pairwise_step(pop, PairRule{r}, std::nullopt, rng);
                        },
                    },
                    rule);
}

template <MoneyRepresentation Amount>
void SimConfig<Amount>::validate() const {
  require(n_agents >= 1, ErrorCode::InvalidSize, "n_agents must be positive");
  require(n_steps >= 1, ErrorCode::InvalidParameter, "n_steps must be positive");
  require(initial_balance >= Amount{0}, ErrorCode::InvalidParameter,
          "initial balance must be non-negative");
  require(debt_limit >= Amount{0}, ErrorCode::InvalidParameter, "debt limit must be non-negative");
  require(entropy_bin_width >= 0, ErrorCode::InvalidParameter, "entropy bin width must be >= 0");
  for (std::size_t k = 0; k < snapshot_schedule.size(); ++k) {
    require(snapshot_schedule[k] <= n_steps, ErrorCode::InvalidParameter,
            "snapshot beyond the last step");
    if (k > 0) {
      require(snapshot_schedule[k] > snapshot_schedule[k - 1], ErrorCode::InvalidParameter,
              "snapshot schedule must be strictly increasing");
    }
  }
}

template <MoneyRepresentation Amount>
KineticsRun<Amount> run_kinetics(const SimConfig<Amount>& config) {
  config.validate();
  const ExchangeRule rule = resolve_rule(config.rule, config.n_agents, config.seed);
  validate_rule(rule, config.n_agents);
  require(config.n_agents >= 2, ErrorCode::InvalidSize, "an exchange needs at least two agents");

  BasicPopulation<Amount> pop(config.n_agents, config.initial_balance);
  pop.set_debt_limit(config.debt_limit);
  Rng rng(config.seed);

  KineticsRun<Amount> run;
  run.entropy_bin_width = config.entropy_bin_width > 0 ? config.entropy_bin_width
                                                       : pop.effective_temperature() / 10.0;
  if (!(run.entropy_bin_width > 0)) run.entropy_bin_width = 1.0;
  const std::uint64_t window = config.entropy_window > 0 ? config.entropy_window : config.n_agents;

  RunningHistogram hist(-static_cast<double>(config.debt_limit), run.entropy_bin_width);
  hist.rebuild(pop.balances());
  run.entropy.push_back({0, hist.entropy()});

  auto schedule = config.snapshot_schedule.begin();
  if (schedule != config.snapshot_schedule.end() && *schedule == 0) {
    run.snapshots.push_back({0, pop});
    ++schedule;
  }

  const auto* firm = std::get_if<FirmRound>(&rule);
  const auto* directed = std::get_if<DirectedLinks>(&rule);
  const std::uint64_t n = config.n_agents;

  for (std::uint64_t step = 1; step <= config.n_steps; ++step) {
    StepRecord rec;
    if (firm && firm->base && step % n != 0) {
      rec = pairwise_step(pop, *firm->base, std::nullopt, rng);
    } else if (firm) {
      rec = firm_step(pop, firm->params, rng);
    } else if (directed) {
      rec = pairwise_step(pop, directed->base, directed->orientation_seed, rng);
    } else {
      rec = apply_rule(pop, rule, rng);
    }

    if (rec.outcome == TransferOutcome::Applied) {
      if (rec.many_body) {
        hist.rebuild(pop.balances());
      } else {
        hist.remove(rec.payer_before);
        hist.remove(rec.payee_before);
        hist.add(static_cast<double>(pop[rec.payer]));
        hist.add(static_cast<double>(pop[rec.payee]));
      }
    } else {
      ++run.rejected;
    }

    if (step % window == 0) run.entropy.push_back({step, hist.entropy()});
    if (schedule != config.snapshot_schedule.end() && *schedule == step) {
      run.snapshots.push_back({step, pop});
      ++schedule;
    }
  }
  return run;
}

template StepRecord apply_rule(Population&, const ExchangeRule&, Rng&);
template StepRecord apply_rule(CentPopulation&, const ExchangeRule&, Rng&);
template struct SimConfig<double>;
template struct SimConfig<Cents>;
template KineticsRun<double> run_kinetics(const SimConfig<double>&);
template KineticsRun<Cents> run_kinetics(const SimConfig<Cents>&);

}  // namespace wealthlab
