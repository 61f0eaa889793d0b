#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "wealthlab/empirics.hpp"
#include "wealthlab/error.hpp"
#include "wealthlab/exchange.hpp"
#include "wealthlab/io.hpp"
#include "wealthlab/laws.hpp"
#include "wealthlab/population.hpp"
#include "wealthlab/reserve.hpp"
#include "wealthlab/rng.hpp"
#include "wealthlab/wealth.hpp"

#ifndef WEALTHLAB_VERSION
#define WEALTHLAB_VERSION "0.0.0"
#endif

namespace wealthlab::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Bad flags, parameters or input files: exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kModels = {
    "fixed", "frac-avg", "pair-sum", "proportional", "saving", "random-saving", "directed",
    "firm",  "reserve",  "silver",   "bm",           "slanina", "kesten"};

struct SimOptions {
  std::string model;
  std::size_t agents = 500;
  std::uint64_t steps = 1000000;
  std::uint64_t seed = 0;
  std::size_t snapshots = 1;
  double initial = 1000.0;
  bool cents = false;
  double delta = 1.0;
  double gamma = 1.0 / 3.0;
  double lambda = 0.5;
  double debt_limit = 0.0;
  double reserve_ratio = 0.8;
  std::string base = "fixed";
  double firm_v = 10.0;
  double firm_eta = 0.5;
  double firm_chi = 0.5;
  double interest = 0.1;
  double wage = 1.0;
  std::string redraw = "all";
  double J = 1.0;
  double sigma2 = 0.5;
  double dt = 1e-3;
  double zeta = 0.05;
  double A0 = 1.0;
  double a = 0.0;
  double B0 = 1.0;
  double b = 0.0;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SimOptions, model, agents, steps, seed, snapshots,
                                                initial, cents, delta, gamma, lambda, debt_limit,
                                                reserve_ratio, base, firm_v, firm_eta, firm_chi,
                                                interest, wage, redraw, J, sigma2, dt, zeta, A0, a,
                                                B0, b)

fs::path default_out_dir() {
  if (const char* env = std::getenv("WEALTHLAB_OUT"); env != nullptr && *env != '\0') return env;
  return ".";
}

// Writes `content` and records its git blob id under `name`.
void emit(const fs::path& dir, const std::string& name, const std::string& content,
          json& digests) {
  write_file(dir / name, content);
  digests[name] = git_blob_sha1(content);
}

std::vector<std::uint64_t> snapshot_steps(std::uint64_t steps, std::size_t k) {
  std::vector<std::uint64_t> at;
  for (std::size_t i = 1; i <= k; ++i) at.push_back(steps * i / k);
  at.erase(std::unique(at.begin(), at.end()), at.end());
  return at;
}

std::string snapshot_name(std::uint64_t step) { return "snapshot_" + std::to_string(step) + ".csv"; }

PairRule pair_rule(const std::string& name, const SimOptions& o) {
  if (name == "fixed") return FixedAmount{o.delta};
  if (name == "frac-avg") return RandomFractionOfAverage{};
  if (name == "pair-sum") return RandomFractionOfPairSum{};
  if (name == "proportional") return Proportional{o.gamma};
  if (name == "saving") return SavingPropensity{o.lambda};
  if (name == "random-saving") return RandomSavingPropensity{};
  throw UsageError("unknown base rule '" + name + "'");
}

ExchangeRule exchange_rule(const SimOptions& o) {
  if (o.model == "directed") return DirectedLinks{pair_rule(o.base, o), 0};
  if (o.model == "firm") {
    FirmRound firm;
    firm.params = FirmParams{o.firm_v, o.firm_eta, o.firm_chi, o.interest, o.wage};
    if (o.base != "none") firm.base = pair_rule(o.base, o);
    return firm;
  }
  return std::visit([](auto r) -> ExchangeRule { return r; }, pair_rule(o.model, o));
}

using Runner = std::function<void(const fs::path&, json&)>;

template <MoneyRepresentation Amount>
Runner kinetics_runner(const SimOptions& o) {
  SimConfig<Amount> config;
  config.n_agents = o.agents;
  config.initial_balance = static_cast<Amount>(o.initial);
  config.debt_limit = static_cast<Amount>(o.debt_limit);
  config.rule = exchange_rule(o);
  config.n_steps = o.steps;
  config.seed = o.seed;
  config.snapshot_schedule = snapshot_steps(o.steps, o.snapshots);
  if constexpr (std::is_same_v<Amount, Cents>) {
    if (const auto* f = std::get_if<FixedAmount>(&config.rule)) {
      if (f->delta != std::floor(f->delta)) throw UsageError("--cents needs an integral --delta");
    }
  }
  config.validate();
  validate_rule(resolve_rule(config.rule, config.n_agents, config.seed), config.n_agents);
  return [config](const fs::path& dir, json& files) {
    const auto run = run_kinetics(config);
    for (const auto& snap : run.snapshots) {
      std::ostringstream csv;
      write_snapshot_csv(csv, snap.population);
      emit(dir, snapshot_name(snap.step), csv.str(), files);
    }
    std::ostringstream entropy;
    entropy << "step,entropy\n";
    for (const auto& p : run.entropy) entropy << p.step << ',' << format_real(p.entropy, 6) << '\n';
    emit(dir, "entropy.csv", entropy.str(), files);
  };
}

Runner reserve_runner(const SimOptions& o) {
  ReserveConfig config;
  config.n_agents = o.agents;
  config.money_base = o.initial * static_cast<double>(o.agents);
  config.reserve_ratio = o.reserve_ratio;
  config.n_steps = o.steps;
  config.seed = o.seed;
  config.validate();
  return [config](const fs::path& dir, json& files) {
    const auto run = run_reserve_ratio(config);
    std::ostringstream csv;
    write_snapshot_csv(csv, run.money);
    emit(dir, snapshot_name(config.n_steps), csv.str(), files);
  };
}

Runner silver_runner(const SimOptions& o) {
  if (o.redraw != "all" && o.redraw != "one") throw UsageError("--redraw must be all or one");
  MarketState initial(o.agents, o.initial, o.initial, 1.0);
  const auto mode = o.redraw == "all" ? PreferenceRedraw::All : PreferenceRedraw::One;
  const auto schedule = snapshot_steps(o.steps, o.snapshots);
  const std::uint64_t seed = o.seed;
  return [initial, mode, schedule, seed](const fs::path& dir, json& files) {
    MarketState mkt = initial;
    Rng rng(seed);
    std::uint64_t round = 0;
    for (std::uint64_t at : schedule) {
      for (; round < at; ++round) silver_round(mkt, rng, mode);
      std::ostringstream csv;
      write_market_csv(csv, mkt);
      emit(dir, snapshot_name(at), csv.str(), files);
    }
  };
}

Runner bm_runner(const SimOptions& o) {
  RelativeWealthState initial(o.agents, o.J, o.sigma2);
  if (!(o.dt > 0.0 && o.dt * (o.J + 2.0 * o.sigma2) < 0.1)) {
    throw UsageError("--dt must satisfy dt * (J + 2 sigma2) < 0.1");
  }
  const auto schedule = snapshot_steps(o.steps, o.snapshots);
  const double dt = o.dt;
  const std::uint64_t seed = o.seed;
  return [initial, schedule, dt, seed](const fs::path& dir, json& files) {
    RelativeWealthState state = initial;
    Rng rng(seed);
    std::uint64_t step = 0;
    std::ostringstream means;
    means << "step,mean\n";
    for (std::uint64_t at : schedule) {
      for (; step < at; ++step) {
        const double mean = bm_step(state, dt, rng);
        means << step + 1 << ',' << format_real(mean, 6) << '\n';
      }
      std::ostringstream csv;
      write_relative_wealth_csv(csv, state.w_tilde);
      emit(dir, snapshot_name(at), csv.str(), files);
    }
    emit(dir, "mean.csv", means.str(), files);
  };
}

Runner slanina_runner(const SimOptions& o) {
  SlaninaModel initial(o.agents, o.gamma, o.zeta);
  const auto schedule = snapshot_steps(o.steps, o.snapshots);
  const std::uint64_t seed = o.seed;
  return [initial, schedule, seed](const fs::path& dir, json& files) {
    SlaninaModel model = initial;
    Rng rng(seed);
    std::uint64_t step = 0;
    for (std::uint64_t at : schedule) {
      for (; step < at; ++step) model.step(rng);
      std::ostringstream csv;
      write_relative_wealth_csv(csv, model.relative());
      emit(dir, snapshot_name(at), csv.str(), files);
    }
  };
}

Runner kesten_runner(const SimOptions& o) {
  KestenParams params;
  params.A0 = o.A0;
  params.a = o.a;
  params.B0 = o.B0;
  params.b = o.b;
  params.n_walkers = o.agents;
  params.n_steps = o.steps;
  params.dt = o.dt;
  params.seed = o.seed;
  params.validate();
  return [params](const fs::path& dir, json& files) {
    const auto r = income_kesten_simulate(params);
    std::ostringstream csv;
    csv << "r\n";
    for (double x : r) csv << format_real(x, 17) << '\n';
    emit(dir, snapshot_name(params.n_steps), csv.str(), files);
  };
}

// Everything that can be checked before the run starts; failures are usage
// errors.
Runner prepare(const SimOptions& o) {
  if (std::find(kModels.begin(), kModels.end(), o.model) == kModels.end()) {
    throw UsageError("unknown model '" + o.model + "'");
  }
  if (o.steps == 0) throw UsageError("--steps must be positive");
  if (o.snapshots == 0) throw UsageError("--snapshots must be positive");
  try {
    if (o.model == "reserve") return reserve_runner(o);
    if (o.model == "silver") return silver_runner(o);
    if (o.model == "bm") return bm_runner(o);
    if (o.model == "slanina") return slanina_runner(o);
    if (o.model == "kesten") return kesten_runner(o);
    return o.cents ? kinetics_runner<Cents>(o) : kinetics_runner<double>(o);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

json run_simulation(const SimOptions& o, const Runner& runner, const fs::path& dir) {
  fs::create_directories(dir);
  json files = json::object();
  const auto start = std::chrono::steady_clock::now();
  runner(dir, files);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest;
  manifest["artifact"] = "wealthlab";
  manifest["version"] = WEALTHLAB_VERSION;
  manifest["command"] = "simulate";
  manifest["config"] = o;
  manifest["seed"] = o.seed;
  manifest["steps"] = o.steps;
  manifest["wall_clock_seconds"] = seconds;
  manifest["files"] = files;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

// Flat `key = value` lines become `--key=value` flags placed ahead of the
// command line, so explicit flags (last value wins) override the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r\"'");
        const auto e = s.find_last_not_of(" \t\r\"'");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      if (trim(line).empty()) continue;
      if (eq == std::string::npos) throw UsageError("config line without '=': " + line);
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (value == "true") {
        from_file.push_back("--" + key);
      } else if (value != "false") {
        from_file.push_back("--" + key + "=" + value);
      }
    }
  }
  // The subcommand (first token after the program name) must precede its flags.
  std::size_t insert_at = std::min<std::size_t>(out.size(), 2);
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(insert_at), from_file.begin(),
             from_file.end());
  return out;
}

void add_sim_options(CLI::App& sim, SimOptions& o) {
  sim.add_option("--model", o.model, "Model to run")->check(CLI::IsMember(kModels));
  sim.add_option("--agents", o.agents, "Number of agents (walkers for kesten)")
      ->capture_default_str();
  sim.add_option("--steps", o.steps, "Steps (rounds for silver)")->capture_default_str();
  sim.add_option("--seed", o.seed, "Master seed")->capture_default_str();
  sim.add_option("--snapshots", o.snapshots, "Evenly spaced snapshots; the last is the final state")
      ->capture_default_str();
  sim.add_option("--initial", o.initial, "Initial balance per agent")->capture_default_str();
  sim.add_flag("--cents", o.cents, "Integer balances for exchange models");
  sim.add_option("--delta", o.delta, "Fixed transfer amount")->capture_default_str();
  sim.add_option("--gamma", o.gamma, "Proportional fraction")->capture_default_str();
  sim.add_option("--lambda", o.lambda, "Saving propensity")->capture_default_str();
  sim.add_option("--debt-limit", o.debt_limit, "Common debt floor")->capture_default_str();
  sim.add_option("--reserve-ratio", o.reserve_ratio, "Required reserve ratio")
      ->capture_default_str();
  sim.add_option("--base", o.base, "Pair rule under directed/firm (or none for firm)")
      ->capture_default_str();
  sim.add_option("--firm-v", o.firm_v, "Firm productivity")->capture_default_str();
  sim.add_option("--firm-eta", o.firm_eta, "Firm returns-to-scale parameter")
      ->capture_default_str();
  sim.add_option("--firm-chi", o.firm_chi, "Labor share")->capture_default_str();
  sim.add_option("--interest", o.interest, "Capital interest rate")->capture_default_str();
  sim.add_option("--wage", o.wage, "Wage per worker")->capture_default_str();
  sim.add_option("--redraw", o.redraw, "Preference redraw for silver: all or one")
      ->capture_default_str();
  sim.add_option("--J", o.J, "Exchange strength")->capture_default_str();
  sim.add_option("--sigma2", o.sigma2, "Noise variance")->capture_default_str();
  sim.add_option("--dt", o.dt, "Time step")->capture_default_str();
  sim.add_option("--zeta", o.zeta, "Growth per transaction")->capture_default_str();
  sim.add_option("--A0", o.A0, "Additive drift")->capture_default_str();
  sim.add_option("--a", o.a, "Multiplicative drift")->capture_default_str();
  sim.add_option("--B0", o.B0, "Additive diffusion")->capture_default_str();
  sim.add_option("--b", o.b, "Multiplicative diffusion")->capture_default_str();
}

int cmd_simulate(SimOptions o, const std::string& out_flag, const std::string& replay,
                 std::size_t replicas, std::ostream& out) {
  const fs::path dir = out_flag.empty() ? default_out_dir() : fs::path(out_flag);
  if (!replay.empty()) {
    json manifest;
    try {
      manifest = json::parse(read_file(replay));
      o = manifest.at("config").get<SimOptions>();
    } catch (const std::exception& e) {
      throw UsageError(std::string("unreadable manifest: ") + e.what());
    }
    const json fresh = run_simulation(o, prepare(o), dir);
    bool identical = true;
    for (const auto& [name, digest] : manifest.at("files").items()) {
      const bool same = fresh["files"].contains(name) && fresh["files"][name] == digest;
      out << (same ? "match    " : "MISMATCH ") << name << ' ' << digest.get<std::string>() << '\n';
      identical = identical && same;
    }
    identical = identical && fresh["files"].size() == manifest["files"].size();
    out << (identical ? "replay: identical\n" : "replay: digests differ\n");
    return identical ? 0 : 1;
  }
  if (o.model.empty()) throw UsageError("--model is required");
  if (replicas == 0) throw UsageError("--replicas must be positive");
  if (replicas == 1) {
    const json m = run_simulation(o, prepare(o), dir);
    out << "wrote " << m["files"].size() << " files and manifest.json to " << dir.string() << '\n';
    return 0;
  }
  // Replica r runs with seed derive_seed(seed, r) in <out>/replica_<r>.
  std::vector<SimOptions> opts(replicas, o);
  std::vector<Runner> runners;
  for (std::size_t r = 0; r < replicas; ++r) {
    opts[r].seed = derive_seed(o.seed, r);
    runners.push_back(prepare(opts[r]));
  }
  std::mutex mu;
  std::optional<std::string> failure;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t r;
      {
        std::lock_guard lock(mu);
        if (next >= replicas || failure) return;
        r = next++;
      }
      try {
        run_simulation(opts[r], runners[r], dir / ("replica_" + std::to_string(r)));
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        if (!failure) failure = e.what();
      }
    }
  };
  const std::size_t n_threads =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, replicas);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) throw std::runtime_error(*failure);
  out << "wrote " << replicas << " replicas to " << dir.string() << '\n';
  return 0;
}

struct AnalyzeOptions {
  std::string input;
  std::string column = "value";
  bool binned = false;
  std::string fit;
  std::optional<double> xmin;
  std::optional<double> floor;
  bool lorenz = false;
  bool gini = false;
};

json fit_json(const TwoClassReport& r) {
  json j;
  j["two_class"] = r.two_class;
  j["T_r"] = r.T_r;
  j["alpha"] = r.alpha;
  j["r_star"] = r.r_star ? json(*r.r_star) : json(nullptr);
  j["f"] = r.f;
  j["f_nonparametric"] = r.f_nonparametric;
  j["upper_fraction"] = r.upper_fraction;
  j["bulk_amplitude"] = r.bulk_amplitude;
  j["xmin"] = r.xmin;
  j["tail_points"] = r.tail_points;
  j["ks_bulk"] = r.ks_bulk;
  j["ks_tail"] = r.ks_tail;
  j["mean"] = r.mean;
  j["gini_two_class"] = r.gini_two_class;
  j["gini_empirical"] = r.gini_empirical;
  return j;
}

std::string lorenz_csv(const LorenzCurve& c) {
  std::ostringstream csv;
  csv << "population_share,income_share\n";
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    csv << format_real(c.x[i], 6) << ',' << format_real(c.y[i], 6) << '\n';
  }
  return csv.str();
}

int cmd_analyze(const AnalyzeOptions& a, const std::string& out_flag, std::ostream& out) {
  const fs::path dir = out_flag.empty() ? default_out_dir() : fs::path(out_flag);
  std::vector<double> samples;
  std::vector<CcdfRow> table;
  try {
    std::ifstream in(a.input);
    if (!in) throw UsageError("cannot read " + a.input);
    if (a.binned) {
      const auto cols = read_columns(in, {"lower_bound", "cum_count"});
      for (std::size_t i = 0; i < cols[0].size(); ++i) table.push_back({cols[0][i], cols[1][i]});
      if (table.empty()) throw UsageError("table has no rows");
    } else {
      samples = read_column(in, a.column);
      if (samples.empty()) throw UsageError("input has no samples");
    }
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (a.binned && !a.fit.empty() && a.fit != "two-class") {
    throw UsageError("binned input supports only --fit two-class");
  }

  json report;
  report["input"] = a.input;
  if (!a.binned) {
    double sum = 0.0;
    for (double x : samples) sum += x;
    report["n"] = samples.size();
    report["mean"] = sum / static_cast<double>(samples.size());
  } else {
    report["rows"] = table.size();
  }

  if (a.fit == "exp") {
    if (a.floor) {
      report["fit"] = {{"law", "exponential"}, {"floor", *a.floor},
                       {"T", fit_exponential(samples, *a.floor)}};
    } else {
      const auto f = fit_exponential_location(samples);
      report["fit"] = {{"law", "exponential"}, {"floor", f.floor}, {"T", f.T}};
    }
    const double T = report["fit"]["T"], fl = report["fit"]["floor"];
    report["fit"]["ks"] = ks_statistic(samples, laws::Exponential{T, fl});
  } else if (a.fit == "gamma") {
    const auto g = fit_gamma_moments(samples);
    report["fit"] = {{"law", "gamma"}, {"beta", g.beta}, {"T", g.T}};
    if (g.beta > -1.0) report["fit"]["ks"] = ks_statistic(samples, laws::Gamma{g.beta, g.T});
  } else if (a.fit == "pareto") {
    double xmin;
    if (a.xmin) {
      xmin = *a.xmin;
    } else {
      std::vector<double> s = samples;
      std::sort(s.begin(), s.end());
      xmin = s[s.size() * 95 / 100];
    }
    const double alpha = fit_pareto_hill(samples, xmin);
    report["fit"] = {{"law", "pareto"}, {"alpha", alpha}, {"xmin", xmin}};
  } else if (a.fit == "two-class") {
    report["fit"] = fit_json(a.binned ? two_class_decompose(std::span<const CcdfRow>(table))
                                      : two_class_decompose(std::span<const double>(samples)));
  }

  fs::create_directories(dir);
  if (a.lorenz || a.gini) {
    const LorenzCurve curve = a.binned ? lorenz_from_table(table) : lorenz_empirical(samples);
    if (a.lorenz) write_file(dir / "lorenz.csv", lorenz_csv(curve));
    if (a.gini) {
      const double g = a.binned ? 1.0 - 2.0 * lorenz_area(curve) : gini_empirical(samples);
      report["gini"] = g;
      out << "gini " << format_real(g, 6) << '\n';
    }
  }
  write_file(dir / "report.json", report.dump(2) + "\n");
  return 0;
}

struct LawOptions {
  std::string law;
  double T = 1.0;
  double floor = 0.0;
  double beta = 0.0;
  double kappa = 2.0;
  double r0 = 1.0;
  double ab = 1.0;
  double alpha = 1.5;
  double xmin = 1.0;
  std::string grid;
};

laws::DistributionLaw make_law(const LawOptions& l) {
  if (l.law == "exp") return laws::Exponential{l.T, l.floor};
  if (l.law == "gamma") return laws::Gamma{l.beta, l.T};
  if (l.law == "bm") return laws::InverseGammaBM{l.kappa};
  if (l.law == "arctan") return laws::ArctanLaw(l.T, l.r0, l.ab);
  if (l.law == "family") return laws::FamilyIncome{l.T};
  if (l.law == "pareto") return laws::Pareto{l.alpha, l.xmin};
  throw UsageError("unknown law '" + l.law + "'");
}

int cmd_laws(const LawOptions& l, const std::string& out_flag, std::ostream& out) {
  const fs::path dir = out_flag.empty() ? default_out_dir() : fs::path(out_flag);
  std::optional<laws::DistributionLaw> law;
  double lo = 0.0, hi = 0.0;
  std::size_t n = 201;
  try {
    law = make_law(l);
    laws::validate(*law);
    lo = laws::support_min(*law);
    const double scale = l.law == "exp" || l.law == "gamma" || l.law == "family" ? l.T : 1.0;
    hi = lo + 10.0 * scale;
    if (!l.grid.empty()) {
      char c1 = 0, c2 = 0;
      std::istringstream g(l.grid);
      if (!(g >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || !(g >> std::ws).eof()) {
        throw UsageError("--grid must be lo:hi:n");
      }
    }
    if (!(hi > lo) || n < 2) throw UsageError("--grid needs lo < hi and n >= 2");
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::ostringstream csv;
  csv << "r,pdf,ccdf\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double r = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    csv << format_real(r, 6) << ',' << format_real(laws::pdf(*law, r), 6) << ','
        << format_real(laws::ccdf(*law, r), 6) << '\n';
  }
  fs::create_directories(dir);
  const fs::path file = dir / ("law_" + l.law + ".csv");
  write_file(file, csv.str());
  out << "wrote " << file.string() << '\n';
  return 0;
}

}  // namespace

const char* version() noexcept { return WEALTHLAB_VERSION; }

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kinetic exchange and wealth-distribution workbench", "wealthlab"};
  app.set_version_flag("--version", std::string("wealthlab ") + WEALTHLAB_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  SimOptions sim_opts;
  std::string out_dir, replay;
  std::size_t replicas = 1;
  auto* sim = app.add_subcommand("simulate", "Run a model and write snapshots plus a manifest");
  add_sim_options(*sim, sim_opts);
  sim->add_option("--out", out_dir, "Output directory (default $WEALTHLAB_OUT or .)");
  sim->add_option("--replay", replay, "Re-run the config of a manifest and compare digests");
  sim->add_option("--replicas", replicas, "Independent replicas with derived seeds")
      ->capture_default_str();
  sim->add_option("--config", "Flat key = value file; flags override it");

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "Fit and summarize a sample or binned table");
  analyze->add_option("--input", an.input, "CSV input")->required();
  analyze->add_option("--column", an.column, "Sample column")->capture_default_str();
  analyze->add_flag("--binned", an.binned, "Input is a lower_bound,cum_count table");
  analyze->add_option("--fit", an.fit, "exp, gamma, pareto or two-class")
      ->check(CLI::IsMember({"exp", "gamma", "pareto", "two-class"}));
  analyze->add_option("--xmin", an.xmin, "Pareto threshold (default: 95th percentile)");
  analyze->add_option("--floor", an.floor, "Known exponential floor (default: sample minimum)");
  analyze->add_flag("--lorenz", an.lorenz, "Write lorenz.csv");
  analyze->add_flag("--gini", an.gini, "Report the Gini coefficient");
  analyze->add_option("--out", out_dir, "Output directory (default $WEALTHLAB_OUT or .)");
  analyze->add_option("--config", "Flat key = value file; flags override it");

  LawOptions lw;
  auto* lawcmd = app.add_subcommand("laws", "Tabulate a distribution law");
  lawcmd->add_option("--law", lw.law, "exp, gamma, bm, arctan, family or pareto")
      ->required()
      ->check(CLI::IsMember({"exp", "gamma", "bm", "arctan", "family", "pareto"}));
  lawcmd->add_option("--T", lw.T, "Temperature (T_r for arctan)")->capture_default_str();
  lawcmd->add_option("--floor", lw.floor, "Exponential floor")->capture_default_str();
  lawcmd->add_option("--beta", lw.beta, "Gamma exponent")->capture_default_str();
  lawcmd->add_option("--kappa", lw.kappa, "J / sigma2")->capture_default_str();
  lawcmd->add_option("--r0", lw.r0, "Arctan crossover income")->capture_default_str();
  lawcmd->add_option("--ab", lw.ab, "Arctan a/b")->capture_default_str();
  lawcmd->add_option("--alpha", lw.alpha, "Pareto exponent")->capture_default_str();
  lawcmd->add_option("--xmin", lw.xmin, "Pareto threshold")->capture_default_str();
  lawcmd->add_option("--grid", lw.grid, "lo:hi:n (default: support start, 10 scales, 201)");
  lawcmd->add_option("--out", out_dir, "Output directory (default $WEALTHLAB_OUT or .)");
  lawcmd->add_option("--config", "Flat key = value file; flags override it");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    // CLI11 consumes arguments from the back.
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_opts, out_dir, replay, replicas, out);
    if (analyze->parsed()) return cmd_analyze(an, out_dir, out);
    return cmd_laws(lw, out_dir, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace wealthlab::cli
