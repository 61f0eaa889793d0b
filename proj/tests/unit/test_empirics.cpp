#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "wealthlab/empirics.hpp"
#include "wealthlab/error.hpp"
#include "wealthlab/laws.hpp"
#include "wealthlab/rng.hpp"

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

std::vector<double> exponential_samples(std::size_t n, double T, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = rng.exponential(T);
  return out;
}

// Gamma with integer shape k as a sum of k exponentials.
std::vector<double> gamma_samples(std::size_t n, int shape, double T, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) {
    x = 0.0;
    for (int k = 0; k < shape; ++k) x += rng.exponential(T);
  }
  return out;
}

double pareto_draw(Rng& rng, double alpha, double xmin) {
  return xmin * std::pow(1.0 - rng.uniform(), -1.0 / alpha);
}

std::vector<double> mixture(std::size_t n, double upper_share, double T, double alpha,
                            double xmin, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) {
    x = rng.uniform() < upper_share ? pareto_draw(rng, alpha, xmin) : rng.exponential(T);
  }
  return out;
}

// Crossing of the two component CCDFs of a mixture, by bisection on the log difference.
double component_crossing(double upper_share, double T, double alpha, double xmin) {
  auto diff = [&](double r) {
    return std::log(1 - upper_share) - r / T - std::log(upper_share) + alpha * std::log(r / xmin);
  };
  double lo = xmin, hi = 100 * xmin;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (diff(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Parametric upper-class income share of a mixture.
double mixture_share(double upper_share, double T, double alpha, double xmin) {
  const double tail_mean = alpha * xmin / (alpha - 1.0);
  return upper_share * tail_mean / (upper_share * tail_mean + (1 - upper_share) * T);
}

// Upper population share giving income share f.
double share_for(double f, double T, double alpha, double xmin) {
  const double tail_mean = alpha * xmin / (alpha - 1.0);
  return f * T / (tail_mean * (1 - f) + f * T);
}

}  // namespace

TEST_CASE("histogram examples") {
  const std::vector<double> same = {1.0, 1.0, 1.0};
  const Histogram one = histogram(same, EqualWidth{1});
  CHECK(one.counts == std::vector<std::uint64_t>{3});

  const std::vector<double> two = {0.5, 1.5};
  const Histogram h = histogram(two, Edges{{0.0, 1.0, 2.0}});
  CHECK(h.counts == std::vector<std::uint64_t>{1, 1});
  CHECK(h.total == 2);

  // Right edge of the last bin is closed, others half-open.
  const std::vector<double> edges_hit = {0.0, 1.0, 2.0};
  CHECK(histogram(edges_hit, Edges{{0.0, 1.0, 2.0}}).counts == std::vector<std::uint64_t>{1, 2});

  const std::vector<double> none;
  CHECK(code_of([&] { histogram(none, EqualWidth{4}); }) == ErrorCode::EmptyInput);
  const std::vector<double> negative = {-1.0, 2.0};
  CHECK(code_of([&] { histogram(negative, LogBins{4}); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("log-binned exponential samples match the law bin by bin") {
  const std::size_t n = 1000000;
  const auto x = exponential_samples(n, 1.0, 12);
  const Histogram h = histogram(x, LogBins{20});
  const auto p = h.probabilities();
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const double expect =
        laws::exponential_ccdf(h.edges[k], 1.0) - laws::exponential_ccdf(h.edges[k + 1], 1.0);
    const double sigma = std::sqrt(n * expect * (1 - expect));
    CHECK(std::fabs(static_cast<double>(h.counts[k]) - n * expect) <= 3 * sigma + 1);
  }
}

TEST_CASE("entropy and multiplicity") {
  const std::vector<double> same(10, 4.0);
  CHECK(entropy(histogram(same, EqualWidth{1})) == 0.0);

  std::vector<double> spread;
  for (int k = 0; k < 8; ++k) spread.insert(spread.end(), 5, k + 0.5);
  CHECK(entropy(histogram(spread, EqualWidth{8})) == doctest::Approx(std::log(8.0)).epsilon(1e-14));

  // Exact ln W from summed logarithms of integers.
  auto ln_factorial = [](std::uint64_t n) {
    double s = 0.0;
    for (std::uint64_t i = 2; i <= n; ++i) s += std::log(static_cast<double>(i));
    return s;
  };
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto x = exponential_samples(150 + seed * 5, 1.0, seed);
    const Histogram h = histogram(x, EqualWidth{6});
    double exact = ln_factorial(h.total);
    for (auto c : h.counts) exact -= ln_factorial(c);
    CHECK(ln_multiplicity(h) == doctest::Approx(exact).epsilon(1e-12));
    const double n_s = static_cast<double>(h.total) * entropy(h);
    CHECK(std::fabs(exact - n_s) <= stirling_error_bound(h));
    CHECK(exact <= n_s);
  }
}

TEST_CASE("lorenz and gini on small samples") {
  const std::vector<double> equal(10, 3.0);
  CHECK(gini_empirical(equal) == doctest::Approx(0.0).epsilon(1e-15));

  std::vector<double> rich(100, 0.0);
  rich[37] = 50.0;
  CHECK(gini_empirical(rich) == doctest::Approx(0.99).epsilon(1e-12));

  const LorenzCurve c = lorenz_empirical(std::vector<double>{3.0, 1.0, 2.0});
  CHECK(c.x.front() == 0.0);
  CHECK(c.y.front() == 0.0);
  CHECK(c.x.back() == 1.0);
  CHECK(c.y.back() == 1.0);
  CHECK(c.y[1] == doctest::Approx(1.0 / 6.0));

  const std::vector<double> zeros(5, 0.0);
  CHECK(code_of([&] { gini_empirical(zeros); }) == ErrorCode::ZeroTotal);
}

TEST_CASE("gini of large exponential and family samples") {
  const auto x = exponential_samples(1000000, 3.0, 31);
  const double g = gini_empirical(x);
  CHECK(g == doctest::Approx(0.5).epsilon(0.02));
  const LorenzCurve c = lorenz_empirical(x);
  CHECK(g == doctest::Approx(1.0 - 2.0 * lorenz_area(c)).epsilon(1e-12));
  double gap = 0.0;
  for (std::size_t i = 0; i < c.x.size(); i += 997) {
    gap = std::max(gap, std::fabs(c.y[i] - laws::lorenz_exponential(c.x[i])));
  }
  CHECK(gap < 0.01);

  const auto fam = gamma_samples(1000000, 2, 1.0, 32);
  CHECK(std::fabs(gini_empirical(fam) - 0.375) < 0.01);
}

TEST_CASE("estimators on sampled data") {
  const auto e = exponential_samples(100000, 1000.0, 41);
  CHECK(fit_exponential(e) == doctest::Approx(1000.0).epsilon(0.02));

  // Translation covariance of the location fit.
  std::vector<double> shifted(e);
  for (auto& x : shifted) x -= 800.0;
  const LocationFit a = fit_exponential_location(e), b = fit_exponential_location(shifted);
  CHECK(b.floor == doctest::Approx(a.floor - 800.0).epsilon(1e-12));
  CHECK(b.T == doctest::Approx(a.T).epsilon(1e-9));
  CHECK(fit_exponential(shifted, -800.0) == doctest::Approx(fit_exponential(e)).epsilon(1e-9));

  const auto g = gamma_samples(1000000, 4, 1.0, 42);
  const GammaFit gf = fit_gamma_moments(g);
  CHECK(std::fabs(gf.beta - 3.0) < 0.1);
  CHECK(gf.T == doctest::Approx(1.0).epsilon(0.03));

  Rng rng(43);
  std::vector<double> p(100000);
  for (auto& x : p) x = pareto_draw(rng, 1.9, 5.0);
  CHECK(std::fabs(fit_pareto_hill(p, 5.0) - 1.9) < 0.05);
  const auto tail = ccdf_tail_exponent(p, 5.0, 5000.0);
  CHECK(tail.alpha == doctest::Approx(1.9).epsilon(0.05));
  CHECK(tail.decades > 2.0);

  std::vector<double> few(p.begin(), p.begin() + 40);
  CHECK(code_of([&] { fit_pareto_hill(few, 5.0); }) == ErrorCode::InsufficientTail);
}

TEST_CASE("kolmogorov-smirnov statistic") {
  const laws::DistributionLaw law = laws::Exponential{2.0, 0.0};
  int below = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto x = exponential_samples(1000, 2.0, 1000 + t);
    below += ks_statistic(x, law) < ks_critical(1000, 0.01);
  }
  CHECK(below >= 95);
  CHECK(ks_critical(1000, 0.01) == doctest::Approx(1.63 / std::sqrt(1000.0)).epsilon(0.01));

  const auto x = exponential_samples(1000, 1.0, 7);
  CHECK(ks_statistic(x, laws::Gamma{3.0, 1.0}) > ks_critical(1000, 0.01));

  const std::vector<double> median = {2.0 * std::log(2.0)};
  CHECK(ks_statistic(median, law) == doctest::Approx(0.5).epsilon(1e-12));

  const auto y = exponential_samples(1000, 1.0, 8);
  CHECK(ks_two_sample(x, y) < 1.63 * std::sqrt(2.0 / 1000.0));
  CHECK(ks_two_sample(x, x) == 0.0);
}

TEST_CASE("two-class decomposition of a synthetic mixture") {
  const double T = 40000, alpha = 1.7, xmin = 120000, share = 0.03;
  const auto x = mixture(200000, share, T, alpha, xmin, 51);
  const TwoClassReport r = two_class_decompose(x);
  REQUIRE(r.two_class);
  REQUIRE(r.r_star.has_value());
  CHECK(r.f == doctest::Approx(mixture_share(share, T, alpha, xmin)).epsilon(0.10));
  CHECK(std::fabs(r.alpha - alpha) < 0.2);
  CHECK(*r.r_star == doctest::Approx(component_crossing(share, T, alpha, xmin)).epsilon(0.20));
  CHECK(r.T_r == doctest::Approx(T).epsilon(0.05));
  CHECK(*r.r_star > r.T_r);
  CHECK(r.gini_two_class == doctest::Approx((1 + r.f) / 2));

  // Scale covariance.
  std::vector<double> scaled(x);
  for (auto& v : scaled) v *= 2.5;
  const TwoClassReport s = two_class_decompose(scaled);
  REQUIRE(s.r_star.has_value());
  CHECK(s.T_r == doctest::Approx(2.5 * r.T_r).epsilon(1e-9));
  CHECK(*s.r_star == doctest::Approx(2.5 * *r.r_star).epsilon(1e-9));
  CHECK(s.alpha == doctest::Approx(r.alpha).epsilon(1e-9));
  CHECK(s.f == doctest::Approx(r.f).epsilon(1e-9));
}

TEST_CASE("two-class decomposition of pure exponential samples") {
  const auto x = exponential_samples(100000, 40000.0, 52);
  const TwoClassReport r = two_class_decompose(x);
  CHECK_FALSE(r.two_class);
  CHECK(r.f == 0.0);
  CHECK_FALSE(r.r_star.has_value());
  CHECK(r.T_r == doctest::Approx(40000.0).epsilon(0.05));
}

TEST_CASE("two-class decomposition orders early and late tails") {
  const double T = 40000, xmin = 120000;
  const auto early = mixture(200000, share_for(0.04, T, 1.8, xmin), T, 1.8, xmin, 61);
  const auto late = mixture(200000, share_for(0.20, T, 1.4, xmin), T, 1.4, xmin, 62);
  const TwoClassReport a = two_class_decompose(early), b = two_class_decompose(late);
  REQUIRE(a.two_class);
  REQUIRE(b.two_class);
  CHECK(a.f < b.f);
  CHECK(a.alpha > b.alpha);
}

TEST_CASE("binned tables") {
  const double T = 40000, alpha = 1.7, xmin = 120000, share = 0.03;
  auto x = mixture(200000, share, T, alpha, xmin, 71);
  std::sort(x.begin(), x.end());
  std::vector<CcdfRow> table;
  for (double lb = 0.0; lb < 5e6; lb = lb < 1e4 ? lb + 5000 : lb * 1.25) {
    const auto above = x.end() - std::lower_bound(x.begin(), x.end(), lb);
    if (above == 0) break;
    table.push_back({lb, static_cast<double>(above)});
  }
  REQUIRE(table.size() >= 20);
  const TwoClassReport r = two_class_decompose(table);
  REQUIRE(r.two_class);
  CHECK(std::fabs(r.alpha - alpha) < 0.2);
  CHECK(r.f == doctest::Approx(mixture_share(share, T, alpha, xmin)).epsilon(0.15));

  const LorenzCurve c = lorenz_from_table(table);
  REQUIRE(c.x.size() >= 2);
  CHECK(c.x.front() == 0.0);
  CHECK(c.y.front() == 0.0);
  CHECK(c.x.back() == doctest::Approx(1.0));
  CHECK(c.y.back() == doctest::Approx(1.0));
  const LorenzCurve exact = lorenz_empirical(x);
  for (std::size_t i = 1; i + 1 < c.x.size(); ++i) {
    const auto k = static_cast<std::size_t>(c.x[i] * (exact.x.size() - 1));
    CHECK(c.y[i] == doctest::Approx(exact.y[k]).epsilon(0.03));
  }
}

TEST_CASE("kesten simulation without multiplicative noise is exponential") {
  KestenParams p;
  p.A0 = 1.0;
  p.a = 0.0;
  p.B0 = 2.0;
  p.b = 0.0;
  p.n_walkers = 20000;
  p.n_steps = 20000;
  p.dt = 1e-3;
  p.seed = 81;
  const auto r = income_kesten_simulate(p);
  CHECK(r.size() == p.n_walkers);
  CHECK(*std::min_element(r.begin(), r.end()) >= 0.0);
  CHECK(fit_exponential(r) == doctest::Approx(p.B0 / p.A0).epsilon(0.05));

  KestenParams bad = p;
  bad.A0 = -1.0;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::InvalidParameter);
  bad = p;
  bad.a = 200.0;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::InvalidParameter);
}
