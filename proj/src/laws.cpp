#include "wealthlab/laws.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "wealthlab/error.hpp"
#include "wealthlab/quadrature.hpp"

namespace wealthlab::laws {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::size_t kArctanNodes = 1024;

// Integral over [a, inf) by octave panels [x, 2x]. Power-law tails shrink by a
// steady ratio per octave, so the rest is summed as a geometric series.
quad::Result octave_tail(const std::function<double(double)>& f, double a, double tol) {
  double total = 0.0, prev = 0.0;
  for (double x = a; x < 1e300; x *= 2.0) {
    const auto piece = quad::simpson(f, x, 2.0 * x, tol, 40);
    if (!piece.converged) return {total, false};
    total += piece.value;
    const double ratio = prev > 0.0 ? piece.value / prev : 1.0;
    prev = piece.value;
    if (piece.value == 0.0) return {total, true};
    if (ratio < 1.0) {
      const double rest = piece.value * ratio / (1.0 - ratio);
      if (rest <= 1e-15 * total) return {total + rest, true};
    }
  }
  return {total, false};
}

double inverse_gamma_log_pdf(double w, double kappa) {
  return (1.0 + kappa) * std::log(kappa) - std::lgamma(1.0 + kappa) - (2.0 + kappa) * std::log(w) -
         kappa / w;
}

}  // namespace

// ---------------------------------------------------------------------------
// ArctanLaw

ArctanLaw::ArctanLaw(double T_r, double r0, double ab_ratio) : T_r_(T_r), r0_(r0), ab_(ab_ratio) {
  require(std::isfinite(T_r) && T_r != 0.0, ErrorCode::InvalidParameter,
          "arctan law needs a finite non-zero T_r");
  require(r0 > 0 && std::isfinite(r0), ErrorCode::InvalidParameter, "arctan law needs r0 > 0");
  require(ab_ratio > 0 && std::isfinite(ab_ratio), ErrorCode::InvalidParameter,
          "arctan law needs a/b > 0");

  // Locate the bulk of the mass on a log scale: argmax of r P(r).
  const double u = quad::golden_section_max(
      [this](double v) { return v + log_kernel(std::exp(v)); }, -60.0, 60.0, 1e-10);
  scale_ = std::exp(u);
  const double shift = log_kernel(scale_);
  auto kernel = [this, shift](double r) { return std::exp(log_kernel(r) - shift); };

  auto nodes = std::make_shared<std::vector<double>>(kArctanNodes);
  auto cumulative = std::make_shared<std::vector<double>>(kArctanNodes);
  const double tol = 1e-14 * scale_;
  double total = 0.0;
  for (std::size_t k = 0; k < kArctanNodes; ++k) {
    const double t = static_cast<double>(k) / kArctanNodes;
    (*nodes)[k] = scale_ * t / (1.0 - t);
    if (k > 0) total += quad::simpson(kernel, (*nodes)[k - 1], (*nodes)[k], tol, 40).value;
    (*cumulative)[k] = total;
  }
  const auto tail = octave_tail(kernel, nodes->back(), tol);
  require(tail.converged, ErrorCode::DivergentSolution, "arctan law is not normalisable");
  total += tail.value;
  for (auto& c : *cumulative) c /= total;
  log_norm_ = shift + std::log(total);
  nodes_ = std::move(nodes);
  cumulative_ = std::move(cumulative);
}

double ArctanLaw::log_kernel(double r) const {
  // exp(-(r0/T) atan(r/r0)) = const * exp((r0/T) atan(r0/r)) for r > 0; this
  // form keeps the r0 -> 0 limit finite.
  const double angle = r > 0 ? std::atan(r0_ / r) : std::numbers::pi / 2;
  return (r0_ / T_r_) * angle - (1.0 + 0.5 * ab_) * std::log(r0_ * r0_ + r * r);
}

double ArctanLaw::pdf(double r) const {
  if (r < 0) return 0.0;
  return std::exp(log_kernel(r) - log_norm_);
}

double ArctanLaw::cdf(double r) const {
  if (r <= 0) return 0.0;
  if (!std::isfinite(r)) return 1.0;
  const auto& nodes = *nodes_;
  if (r >= nodes.back()) {
    const auto rest = octave_tail([this](double x) { return pdf(x); }, r, 1e-14 * pdf(r) * r);
    return std::clamp(1.0 - rest.value, 0.0, 1.0);
  }
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
  const auto k = static_cast<std::size_t>(it - nodes.begin()) - 1;
  const double piece =
      quad::simpson([this](double x) { return pdf(x); }, nodes[k], r, 1e-14, 40).value;
  return std::min(1.0, (*cumulative_)[k] + piece);
}

// ---------------------------------------------------------------------------
// Variant dispatch

void validate(const DistributionLaw& law) {
  std::visit(Overloaded{
                 [](const Exponential& l) {
                   require(l.T > 0 && std::isfinite(l.floor), ErrorCode::InvalidParameter,
                           "exponential law needs T > 0");
                 },
                 [](const Gamma& l) {
                   require(l.beta > -1 && l.T > 0, ErrorCode::InvalidParameter,
                           "gamma law needs beta > -1 and T > 0");
                 },
                 [](const InverseGammaBM& l) {
                   require(l.kappa > 0, ErrorCode::InvalidParameter, "kappa must be > 0");
                 },
                 [](const ArctanLaw&) {},
                 [](const FamilyIncome& l) {
                   require(l.T > 0, ErrorCode::InvalidParameter, "family law needs T > 0");
                 },
                 [](const Pareto& l) {
                   require(l.alpha > 0 && l.xmin > 0, ErrorCode::InvalidParameter,
                           "Pareto law needs alpha > 0 and xmin > 0");
                 },
             },
             law);
}

double pdf(const DistributionLaw& law, double x) {
  return std::visit(Overloaded{
                        [x](const Exponential& l) { return exponential_pdf(x, l.T, l.floor); },
                        [x](const Gamma& l) { return gamma_pdf(x, l.beta, l.T); },
                        [x](const InverseGammaBM& l) { return bm_stationary_pdf(x, l.kappa); },
                        [x](const ArctanLaw& l) { return l.pdf(x); },
                        [x](const FamilyIncome& l) { return family_pdf(x, l.T); },
                        [x](const Pareto& l) {
                          return x < l.xmin ? 0.0
                                            : l.alpha / l.xmin * std::pow(x / l.xmin, -l.alpha - 1);
                        },
                    },
                    law);
}

double cdf(const DistributionLaw& law, double x) {
  return std::visit(
      Overloaded{
          [x](const Exponential& l) {
            return x <= l.floor ? 0.0 : -std::expm1(-(x - l.floor) / l.T);
          },
          [x](const Gamma& l) {
            return x <= 0 ? 0.0 : boost::math::gamma_p(l.beta + 1.0, x / l.T);
          },
          [x](const InverseGammaBM& l) {
            return x <= 0 ? 0.0 : boost::math::gamma_q(1.0 + l.kappa, l.kappa / x);
          },
          [x](const ArctanLaw& l) { return l.cdf(x); },
          [x](const FamilyIncome& l) { return x <= 0 ? 0.0 : boost::math::gamma_p(2.0, x / l.T); },
          [x](const Pareto& l) { return x <= l.xmin ? 0.0 : 1.0 - std::pow(x / l.xmin, -l.alpha); },
      },
      law);
}

double ccdf(const DistributionLaw& law, double x) {
  return std::visit(
      Overloaded{
          [x](const Exponential& l) { return exponential_ccdf(x, l.T, l.floor); },
          [x](const Gamma& l) {
            return x <= 0 ? 1.0 : boost::math::gamma_q(l.beta + 1.0, x / l.T);
          },
          [x](const InverseGammaBM& l) {
            return x <= 0 ? 1.0 : boost::math::gamma_p(1.0 + l.kappa, l.kappa / x);
          },
          [x](const ArctanLaw& l) { return l.ccdf(x); },
          [x](const FamilyIncome& l) { return x <= 0 ? 1.0 : boost::math::gamma_q(2.0, x / l.T); },
          [x](const Pareto& l) { return x <= l.xmin ? 1.0 : std::pow(x / l.xmin, -l.alpha); },
      },
      law);
}

double support_min(const DistributionLaw& law) {
  return std::visit(Overloaded{
                        [](const Exponential& l) { return l.floor; },
                        [](const Pareto& l) { return l.xmin; },
                        [](const auto&) { return 0.0; },
                    },
                    law);
}

std::string name(const DistributionLaw& law) {
  return std::visit(Overloaded{
                        [](const Exponential&) -> std::string { return "exp"; },
                        [](const Gamma&) -> std::string { return "gamma"; },
                        [](const InverseGammaBM&) -> std::string { return "bm"; },
                        [](const ArctanLaw&) -> std::string { return "arctan"; },
                        [](const FamilyIncome&) -> std::string { return "family"; },
                        [](const Pareto&) -> std::string { return "pareto"; },
                    },
                    law);
}

// ---------------------------------------------------------------------------
// Closed forms

double exponential_pdf(double m, double T, double floor) {
  require(T > 0, ErrorCode::InvalidParameter, "T must be > 0");
  return m < floor ? 0.0 : std::exp(-(m - floor) / T) / T;
}

double exponential_ccdf(double m, double T, double floor) {
  require(T > 0, ErrorCode::InvalidParameter, "T must be > 0");
  return m <= floor ? 1.0 : std::exp(-(m - floor) / T);
}

double gamma_pdf(double m, double beta, double T) {
  require(beta > -1 && T > 0, ErrorCode::InvalidParameter, "gamma law needs beta > -1, T > 0");
  if (m < 0) return 0.0;
  if (m == 0) {
    if (beta > 0) return 0.0;
    if (beta == 0) return 1.0 / T;
    return std::numeric_limits<double>::infinity();
  }
  return std::exp(beta * std::log(m) - m / T - (beta + 1.0) * std::log(T) - std::lgamma(beta + 1.0));
}

double bm_stationary_pdf(double w, double kappa) {
  require(kappa > 0, ErrorCode::InvalidParameter, "kappa must be > 0");
  return w <= 0 ? 0.0 : std::exp(inverse_gamma_log_pdf(w, kappa));
}

double arctan_pdf(double r, double T_r, double r0, double ab_ratio) {
  return ArctanLaw(T_r, r0, ab_ratio).pdf(r);
}

double family_pdf(double r, double T) {
  require(T > 0, ErrorCode::InvalidParameter, "T must be > 0");
  return r < 0 ? 0.0 : r / (T * T) * std::exp(-r / T);
}

double beta_from_gamma(double gamma) {
  require(gamma > 0 && gamma < 1, ErrorCode::InvalidParameter, "gamma must lie in (0, 1)");
  return -1.0 - std::numbers::ln2 / std::log1p(-gamma);
}

double beta_from_lambda(double lambda) {
  require(lambda >= 0 && lambda < 1, ErrorCode::InvalidParameter, "lambda must lie in [0, 1)");
  return 3.0 * lambda / (1.0 - lambda);
}

// ---------------------------------------------------------------------------
// Fokker-Planck stationary solution

DriftDiffusionProfile DriftDiffusionProfile::additive(double A0, double B0) {
  return {[A0](double) { return A0; }, [B0](double) { return B0; }, 0.0,
          std::numeric_limits<double>::infinity()};
}

DriftDiffusionProfile DriftDiffusionProfile::multiplicative(double a, double b, double r_min) {
  return {[a](double r) { return a * r; }, [b](double r) { return b * r * r; }, r_min,
          std::numeric_limits<double>::infinity()};
}

DriftDiffusionProfile DriftDiffusionProfile::mixed(double A0, double a, double B0, double b) {
  return {[A0, a](double r) { return A0 + a * r; }, [B0, b](double r) { return B0 + b * r * r; },
          0.0, std::numeric_limits<double>::infinity()};
}

std::vector<double> fp_stationary(const DriftDiffusionProfile& profile,
                                  std::span<const double> grid) {
  require(profile.A && profile.B, ErrorCode::InvalidParameter, "profile needs A and B");
  require(std::isfinite(profile.r_min) && profile.r_max > profile.r_min,
          ErrorCode::InvalidParameter, "profile support must be [finite, > r_min]");
  require(grid.size() >= 1000, ErrorCode::InvalidParameter, "grid needs at least 1000 points");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    require(grid[k] >= profile.r_min && grid[k] <= profile.r_max, ErrorCode::InvalidParameter,
            "grid point outside the support");
    if (k > 0) {
      require(grid[k] > grid[k - 1], ErrorCode::InvalidParameter, "grid must be increasing");
    }
  }

  auto ratio = [&](double r) { return profile.A(r) / profile.B(r); };
  const double tol = 1e-13;

  // Cached antiderivative Phi(r) = int_{grid[0]}^r A/B at the grid points.
  std::vector<double> phi(grid.size(), 0.0);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const auto step = quad::simpson(ratio, grid[k - 1], grid[k], tol);
    phi[k] = phi[k - 1] + step.value;
    require(step.converged && std::isfinite(phi[k]), ErrorCode::DivergentSolution,
            "A/B is not integrable on the grid");
  }

  auto phi_at = [&](double x) {
    if (x <= grid.front()) return phi.front() - quad::simpson(ratio, x, grid.front(), tol).value;
    if (x >= grid.back()) {
      if (grid.back() > 0) {
        // Log-spaced variable keeps long tails cheap.
        auto in_log = [&](double u) {
          const double r = std::exp(u);
          return ratio(r) * r;
        };
        return phi.back() +
               quad::simpson(in_log, std::log(grid.back()), std::log(x), tol).value;
      }
      return phi.back() + quad::simpson(ratio, grid.back(), x, tol).value;
    }
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const auto k = static_cast<std::size_t>(it - grid.begin()) - 1;
    return phi[k] + quad::simpson(ratio, grid[k], x, tol).value;
  };

  std::vector<double> log_p(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    log_p[k] = -std::log(profile.B(grid[k])) - phi[k];
    require(std::isfinite(log_p[k]) || grid[k] == profile.r_min, ErrorCode::DivergentSolution,
            "stationary density is not finite on the grid");
  }
  double shift = -std::numeric_limits<double>::infinity();
  for (double lp : log_p) {
    if (std::isfinite(lp)) shift = std::max(shift, lp);
  }
  require(std::isfinite(shift), ErrorCode::DivergentSolution, "stationary density vanishes");

  // Density at any point; non-finite values at singular support edges count
  // as zero mass (open-interval truncation).
  auto density = [&](double x) {
    const double v = std::exp(-std::log(profile.B(x)) - phi_at(x) - shift);
    return std::isfinite(v) ? v : 0.0;
  };

  if (std::isinf(profile.r_max)) {
    // Mass per log-interval must fall off far out, or the tail is not normalisable.
    const double far = std::max(grid.back() - grid.front(), std::fabs(grid.back())) * 1e6;
    auto log_mass = [&](double x) { return std::log(x) - std::log(profile.B(x)) - phi_at(x); };
    const double outer = log_mass(grid.back() + far), inner = log_mass(grid.back() + 0.5 * far);
    require(!(outer >= inner), ErrorCode::DivergentSolution, "stationary density does not decay");
  }

  double z = 0.0;
  bool converged = true;
  auto add = [&](quad::Result r) {
    z += r.value;
    converged = converged && r.converged;
  };
  const double span = grid.back() - grid.front();
  if (grid.front() > profile.r_min) add(quad::simpson(density, profile.r_min, grid.front(), 1e-14));
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double lo = grid[k - 1], hi = grid[k];
    const double v = 0.5 * (hi - lo) * (std::exp(log_p[k - 1] - shift) + std::exp(log_p[k] - shift));
    // Cheap trapezoid screen: skip cells carrying no mass at all.
    if (v == 0.0 && log_p[k - 1] - shift < -700 && log_p[k] - shift < -700) continue;
    add(quad::simpson(density, lo, hi, 1e-14 * std::max(span, 1e-300) / grid.size(), 30));
  }
  if (std::isinf(profile.r_max)) {
    add(quad::simpson_to_infinity(density, grid.back(), std::max(span, 1e-12), 1e-14));
  } else if (grid.back() < profile.r_max) {
    add(quad::simpson(density, grid.back(), profile.r_max, 1e-14));
  }
  require(converged && std::isfinite(z) && z > 0, ErrorCode::DivergentSolution,
          "stationary density is not normalisable");

  std::vector<double> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out[k] = std::isfinite(log_p[k]) ? std::exp(log_p[k] - shift) / z : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inequality and misc

double lorenz_exponential(double x) {
  require(x >= 0 && x <= 1, ErrorCode::InvalidParameter, "x must lie in [0, 1]");
  if (x == 1.0) return 1.0;
  return x + (1.0 - x) * std::log1p(-x);
}

double lorenz_two_class(double x, double f) {
  require(f >= 0 && f <= 1, ErrorCode::InvalidParameter, "f must lie in [0, 1]");
  if (x == 1.0) return 1.0;
  return (1.0 - f) * lorenz_exponential(x);
}

double gini_two_class(double f) {
  require(f >= 0 && f <= 1, ErrorCode::InvalidParameter, "f must lie in [0, 1]");
  return 0.5 * (1.0 + f);
}

double optimal_price(double T) {
  require(T > 0, ErrorCode::InvalidParameter, "T must be > 0");
  return T;
}

double expected_revenue(double price, double T) {
  require(T > 0 && price >= 0, ErrorCode::InvalidParameter, "need T > 0 and price >= 0");
  return price * std::exp(-price / T);
}

std::vector<double> lydall_generate(std::size_t n_levels, double branching, double base_income,
                                    HierarchyStep step) {
  require(n_levels >= 2, ErrorCode::InvalidParameter, "hierarchy needs at least two levels");
  require(branching > 1, ErrorCode::InvalidParameter, "branching must exceed 1");
  std::vector<double> incomes;
  for (std::size_t k = 0; k < n_levels; ++k) {
    const double people = std::ceil(std::pow(branching, static_cast<double>(n_levels - 1 - k)));
    require(people < 1e8, ErrorCode::InvalidParameter, "hierarchy too large");
    const double income = std::visit(
        Overloaded{
            [&](const AdditiveStep& s) { return base_income + static_cast<double>(k) * s.d; },
            [&](const MultiplicativeStep& s) {
              return base_income * std::pow(s.q, static_cast<double>(k));
            },
        },
        step);
    incomes.insert(incomes.end(), static_cast<std::size_t>(people), income);
  }
  return incomes;
}

}  // namespace wealthlab::laws
