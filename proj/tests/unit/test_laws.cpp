#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "wealthlab/error.hpp"
#include "wealthlab/laws.hpp"
#include "wealthlab/quadrature.hpp"

using namespace wealthlab;
using namespace wealthlab::laws;

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

// Independent oracle: double-exponential quadrature from Boost.
template <class F>
double integrate_from(F f, double a) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate([&](double x) { return f(x); }, a, std::numeric_limits<double>::infinity(),
                     1e-13);
}
template <class F>
double integrate(F f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate([&](double x) { return f(x); }, a, b, 1e-13);
}

double log_slope(auto&& pdf, double r) {
  const double h = 1e-4;
  return (std::log(pdf(r * (1 + h))) - std::log(pdf(r * (1 - h)))) /
         (std::log1p(h) - std::log1p(-h));
}

}  // namespace

TEST_CASE("exponential law examples") {
  CHECK(exponential_pdf(0.0, 1000.0) == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(exponential_ccdf(41.6, 60.0) == doctest::Approx(0.5).epsilon(0.002));
  CHECK(exponential_ccdf(60.0 * std::numbers::ln2, 60.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(exponential_ccdf(-800.0 + 1800.0 * std::numbers::ln2, 1800.0, -800.0) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(support_min(Exponential{1800.0, -800.0}) == -800.0);
  CHECK(exponential_pdf(-801.0, 1800.0, -800.0) == 0.0);
  CHECK(exponential_pdf(-800.0, 1800.0, -800.0) == doctest::Approx(1.0 / 1800.0));
}

TEST_CASE("gamma law examples") {
  for (double m : {0.0, 0.3, 1.0, 4.0, 17.0}) {
    CHECK(gamma_pdf(m, 0.0, 2.5) == doctest::Approx(exponential_pdf(m, 2.5)).epsilon(1e-14));
  }
  CHECK(gamma_pdf(0.0, 0.5, 1.0) == 0.0);
  CHECK(gamma_pdf(0.0, 3.0, 1.0) == 0.0);

  auto p = [](double m) { return gamma_pdf(m, 1.0, 1.0); };
  const double mean = integrate_from([&](double m) { return m * p(m); }, 0.0);
  const double second = integrate_from([&](double m) { return m * m * p(m); }, 0.0);
  CHECK(mean == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(second - mean * mean == doctest::Approx(2.0).epsilon(1e-10));
  const double mode = quad::golden_section_max(p, 1e-6, 10.0);
  CHECK(mode == doctest::Approx(1.0).epsilon(1e-6));
  // Large shape goes through log-gamma without overflow.
  CHECK(std::isfinite(gamma_pdf(300.0, 250.0, 1.0)));
}

TEST_CASE("shape parameters") {
  CHECK(beta_from_gamma(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(beta_from_gamma(1.0 / 3.0) == doctest::Approx(0.7095).epsilon(1e-4));
  for (double g : {0.05, 0.2, 0.45}) CHECK(beta_from_gamma(g) > 0.0);
  CHECK(beta_from_gamma(0.7) < 0.0);
  CHECK(beta_from_lambda(0.0) == 0.0);
  CHECK(beta_from_lambda(0.5) == 3.0);
  CHECK(beta_from_lambda(0.75) == 9.0);
  CHECK(code_of([] { beta_from_gamma(1.0); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { beta_from_lambda(1.0); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("inverse-gamma law of the mean-field model") {
  for (double kappa : {0.7, 2.0, 5.0}) {
    CAPTURE(kappa);
    auto p = [kappa](double w) { return bm_stationary_pdf(w, kappa); };
    CHECK(integrate_from(p, 0.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(integrate_from([&](double w) { return w * p(w); }, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(log_slope(p, 1e6) == doctest::Approx(-(2.0 + kappa)).epsilon(1e-4));
  }
}

TEST_CASE("every law integrates to one") {
  const std::vector<DistributionLaw> all = {
      Exponential{3.0, -2.0}, Gamma{0.7095, 2.0}, Gamma{-0.5, 1.0}, InverseGammaBM{2.0},
      ArctanLaw(5.0, 10.0, 1.5), ArctanLaw(-0.5, 1.0, 2.0), FamilyIncome{4.0},
      Pareto{1.5, 2.0},
  };
  for (const auto& law : all) {
    CAPTURE(name(law));
    const double lo = support_min(law);
    const double total = integrate_from([&](double x) { return pdf(law, x); }, lo);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    // The CDF agrees with the integrated density.
    for (double q : {0.5, 3.0, 20.0}) {
      const double x = lo + q;
      const double direct = integrate([&](double t) { return pdf(law, t); }, lo, x);
      CHECK(cdf(law, x) == doctest::Approx(direct).epsilon(1e-8));
      CHECK(ccdf(law, x) == doctest::Approx(1.0 - direct).epsilon(1e-8));
    }
  }
  CHECK(code_of([] { validate(Gamma{-1.0, 1.0}); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { validate(Exponential{0.0, 0.0}); }) == ErrorCode::InvalidParameter);
  CHECK(code_of([] { ArctanLaw(1.0, 0.0, 1.0); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("arctan law limits") {
  // Exponential regime well below r0.
  const ArctanLaw wide(1.0, 100.0, 1.0);
  const double slope = (std::log(wide.pdf(1.5)) - std::log(wide.pdf(0.5))) / 1.0;
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.01));
  CHECK(arctan_pdf(1.0, 1.0, 100.0, 1.0) == doctest::Approx(wide.pdf(1.0)).epsilon(1e-12));

  // Power-law tail well above r0.
  const ArctanLaw narrow(2.0, 1.0, 1.5);
  CHECK(log_slope([&](double r) { return narrow.pdf(r); }, 1e6) ==
        doctest::Approx(-3.5).epsilon(1e-4));

  // r0 -> 0 with T_r = -r0^2 / kappa approaches the inverse-gamma law.
  for (double kappa : {0.3, 0.5, 2.0}) {
    CAPTURE(kappa);
    const double r0 = 1e-5;
    const ArctanLaw limit(-r0 * r0 / kappa, r0, kappa);
    for (double w : {0.1, 0.5, 1.0, 3.0, 20.0}) {
      CHECK(limit.pdf(w) / bm_stationary_pdf(w, kappa) == doctest::Approx(1.0).epsilon(1e-6));
    }
    // Heavy tails: the CDF far out matches the inverse-gamma one.
    for (double w : {1e3, 1e6}) {
      const double exact = boost::math::gamma_q(1.0 + kappa, kappa / w);
      CHECK(limit.cdf(w) == doctest::Approx(exact).epsilon(1e-6));
    }
  }
}

TEST_CASE("family income is the self-convolution of the exponential") {
  for (double r : {0.5, 2.0, 7.0}) {
    const double conv =
        integrate([&](double x) { return exponential_pdf(x, 1.0) * exponential_pdf(r - x, 1.0); },
                  0.0, r);
    CHECK(family_pdf(r, 1.0) == doctest::Approx(conv).epsilon(1e-8));
  }
  CHECK(family_pdf(0.0, 1.0) == 0.0);
  CHECK(quad::golden_section_max([](double r) { return family_pdf(r, 3.0); }, 1e-9, 30.0) ==
        doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("fp_stationary reproduces the closed forms") {
  SUBCASE("additive diffusion") {
    std::vector<double> grid(2001);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 20.0 * i / 2000.0;
    const auto p = fp_stationary(DriftDiffusionProfile::additive(0.5, 1.0), grid);
    for (std::size_t i = 0; i < grid.size(); i += 50) {
      CHECK(p[i] == doctest::Approx(exponential_pdf(grid[i], 2.0)).epsilon(1e-6));
    }
  }
  SUBCASE("multiplicative diffusion") {
    const double a = 1.5, b = 1.0, rmin = 2.0;
    std::vector<double> grid(2000);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = rmin * std::pow(10.0, 3.0 * i / 1999.0);
    const auto p = fp_stationary(DriftDiffusionProfile::multiplicative(a, b, rmin), grid);
    const double alpha = 1.0 + a / b;
    for (std::size_t i = 100; i + 100 < grid.size(); i += 100) {
      const double s = (std::log(p[i + 1]) - std::log(p[i - 1])) /
                       (std::log(grid[i + 1]) - std::log(grid[i - 1]));
      CHECK(s == doctest::Approx(-(1.0 + alpha)).epsilon(1e-3));
      const double exact = alpha * std::pow(rmin, alpha) * std::pow(grid[i], -1.0 - alpha);
      CHECK(p[i] == doctest::Approx(exact).epsilon(1e-6));
    }
  }
  SUBCASE("mixed diffusion") {
    const double A0 = 1.0, a = 2.0, B0 = 4.0, b = 1.0;
    std::vector<double> grid(3000);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 100.0 * i / 2999.0;
    const auto p = fp_stationary(DriftDiffusionProfile::mixed(A0, a, B0, b), grid);
    const double r0 = std::sqrt(B0 / b);
    for (std::size_t i = 1; i < grid.size(); i += 97) {
      CHECK(p[i] == doctest::Approx(arctan_pdf(grid[i], B0 / A0, r0, a / b)).epsilon(1e-6));
    }
  }
  SUBCASE("failures") {
    std::vector<double> grid(1000);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 10.0 * i / 999.0;
    CHECK(code_of([&] { fp_stationary(DriftDiffusionProfile::additive(-1.0, 1.0), grid); }) ==
          ErrorCode::DivergentSolution);
    std::vector<double> coarse(10, 1.0);
    CHECK(code_of([&] { fp_stationary(DriftDiffusionProfile::additive(1.0, 1.0), coarse); }) ==
          ErrorCode::InvalidParameter);
  }
}

TEST_CASE("lorenz curves and gini values") {
  CHECK(lorenz_exponential(0.0) == 0.0);
  CHECK(lorenz_exponential(1.0) == 1.0);
  CHECK(lorenz_exponential(0.5) == doctest::Approx(0.5 + 0.5 * std::log(0.5)));
  CHECK(lorenz_exponential(0.5) == doctest::Approx(0.1534).epsilon(1e-3));
  CHECK(lorenz_two_class(0.0, 0.2) == 0.0);
  CHECK(lorenz_two_class(1.0 - 1e-12, 0.2) == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(lorenz_two_class(1.0, 0.2) == 1.0);
  double prev = 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double x = i / 1000.0;
    CHECK(lorenz_two_class(x, 0.2) == doctest::Approx(0.8 * lorenz_exponential(x)));
    const double y = lorenz_two_class(x, 0.04);
    CHECK(y >= prev);
    CHECK(y < x);
    prev = y;
  }
  CHECK(gini_exponential() == 0.5);
  CHECK(gini_two_class(0.0) == 0.5);
  CHECK(gini_two_class(1.0) == 1.0);
  CHECK(gini_two_class(0.2) == doctest::Approx(0.6));
  CHECK(gini_family() == 0.375);
  // Gini of the family law from its Lorenz curve: 2 * integral of (x - L(x)).
  const double area = integrate(
      [](double x) {
        // Family law with T = 1: F(r) = 1 - (1 + r) e^-r, share of income below r.
        const double r = -std::log1p(-x);  // starting guess, refined below
        double t = r;
        for (int k = 0; k < 60; ++k) {
          const double f = 1.0 - (1.0 + t) * std::exp(-t) - x;
          t -= f / (t * std::exp(-t));
        }
        const double share = 1.0 - (1.0 + t + 0.5 * t * t) * std::exp(-t);
        return x - share;
      },
      1e-9, 1.0 - 1e-9);
  CHECK(2.0 * area == doctest::Approx(gini_family()).epsilon(1e-6));
}

TEST_CASE("optimal price") {
  CHECK(optimal_price(1000.0) == 1000.0);
  const double best =
      quad::golden_section_max([](double p) { return expected_revenue(p, 1000.0); }, 1e-9, 1e4);
  CHECK(std::fabs(best - 1000.0) < 1e-6 * 1000.0);
  CHECK(expected_revenue(1000.0, 1000.0) == doctest::Approx(1000.0 / std::numbers::e));
}

TEST_CASE("lydall hierarchies") {
  const auto two = lydall_generate(2, 2.0, 10.0, AdditiveStep{5.0});
  std::map<double, int> counts;
  for (double x : two) ++counts[x];
  CHECK(counts.size() == 2);
  CHECK(counts[10.0] == 2);
  CHECK(counts[15.0] == 1);

  // Multiplicative steps: log count linear in log income with slope -ln b / ln q.
  const double b = 3.0, q = 2.0;
  const auto mult = lydall_generate(8, b, 1.0, MultiplicativeStep{q});
  std::map<double, int> mc;
  for (double x : mult) ++mc[x];
  REQUIRE(mc.size() == 8);
  const auto lo = mc.begin();
  const auto hi = std::prev(mc.end());
  const double slope =
      (std::log(hi->second) - std::log(lo->second)) / (std::log(hi->first) - std::log(lo->first));
  CHECK(slope == doctest::Approx(-std::log(b) / std::log(q)).epsilon(1e-12));

  // Additive steps: log count linear in income.
  const auto add = lydall_generate(8, b, 1.0, AdditiveStep{2.0});
  std::map<double, int> ac;
  for (double x : add) ++ac[x];
  std::vector<double> logs;
  for (const auto& [income, n] : ac) logs.push_back(std::log(n));
  for (std::size_t k = 2; k < logs.size(); ++k) {
    CHECK(logs[k] - logs[k - 1] == doctest::Approx(logs[1] - logs[0]).epsilon(1e-12));
  }
  CHECK(code_of([] { lydall_generate(1, 2.0, 1.0, AdditiveStep{}); }) ==
        ErrorCode::InvalidParameter);
  CHECK(code_of([] { lydall_generate(3, 1.0, 1.0, AdditiveStep{}); }) ==
        ErrorCode::InvalidParameter);
}
