#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace wealthlab::laws {

/// (1/T) exp(-(m - floor)/T) on [floor, inf).
struct Exponential {
  double T = 1.0;
  double floor = 0.0;
};

/// m^beta exp(-m/T) / (T^(beta+1) Gamma(beta+1)) on [0, inf).
struct Gamma {
  double beta = 0.0;
  double T = 1.0;
};

/// Inverse gamma with shape 1+kappa and scale kappa: the stationary
/// relative-wealth law of the mean-field multiplicative model, mean 1.
struct InverseGammaBM {
  double kappa = 1.0;
};

/// Stationary law of income diffusion with A = A0 + a r, B = b (r0^2 + r^2):
///   P(r) ~ exp(-(r0/T_r) atan(r/r0)) / (1 + (r/r0)^2)^(1 + ab/2),  r >= 0,
/// with T_r = B0/A0. T_r may be negative (A0 < 0), which is the branch whose
/// r0 -> 0 limit is the inverse-gamma law. The normalisation is numeric and
/// computed once at construction, together with a CDF table.
class ArctanLaw {
 public:
  ArctanLaw(double T_r, double r0, double ab_ratio);

  double T_r() const noexcept { return T_r_; }
  double r0() const noexcept { return r0_; }
  double ab_ratio() const noexcept { return ab_; }

  double pdf(double r) const;
  double cdf(double r) const;
  double ccdf(double r) const { return 1.0 - cdf(r); }

 private:
  double log_kernel(double r) const;

  double T_r_, r0_, ab_;
  double log_norm_ = 0.0;
  double scale_ = 1.0;
  // cdf at the nodes r_k = scale * t_k / (1 - t_k), t_k uniform on [0, 1).
  std::shared_ptr<const std::vector<double>> nodes_, cumulative_;
};

/// Income of a two-earner family, Gamma with beta = 1: (r/T^2) exp(-r/T).
struct FamilyIncome {
  double T = 1.0;
};

/// CCDF (x/xmin)^-alpha on [xmin, inf).
struct Pareto {
  double alpha = 1.0;
  double xmin = 1.0;
};

using DistributionLaw =
    std::variant<Exponential, Gamma, InverseGammaBM, ArctanLaw, FamilyIncome, Pareto>;

/// Throws InvalidParameter when the parameters are outside the law's domain.
void validate(const DistributionLaw& law);

double pdf(const DistributionLaw& law, double x);
double cdf(const DistributionLaw& law, double x);
double ccdf(const DistributionLaw& law, double x);
/// Lower end of the support.
double support_min(const DistributionLaw& law);
std::string name(const DistributionLaw& law);

double exponential_pdf(double m, double T, double floor = 0.0);
double exponential_ccdf(double m, double T, double floor = 0.0);
double gamma_pdf(double m, double beta, double T);
double bm_stationary_pdf(double w, double kappa);
double arctan_pdf(double r, double T_r, double r0, double ab_ratio);
double family_pdf(double r, double T);

/// Shape parameter of the proportional rule, beta = -1 - ln 2 / ln(1 - gamma).
double beta_from_gamma(double gamma);
/// Shape parameter of the saving-propensity rule, beta = 3 lambda / (1 - lambda).
double beta_from_lambda(double lambda);

/// Drift A(r) = -<dr>/dt and diffusion B(r) = <dr^2>/2dt on [r_min, r_max].
struct DriftDiffusionProfile {
  std::function<double(double)> A;
  std::function<double(double)> B;
  double r_min = 0.0;
  double r_max = std::numeric_limits<double>::infinity();

  static DriftDiffusionProfile additive(double A0, double B0);
  static DriftDiffusionProfile multiplicative(double a, double b, double r_min);
  static DriftDiffusionProfile mixed(double A0, double a, double B0, double b);
};

/// Stationary density P(r) = c/B(r) exp(-int A/B) at the grid points, with c
/// normalising P over the whole support. Grid points must be increasing,
/// inside the support, and number at least 1000. Throws DivergentSolution
/// when A/B is not integrable or P is not normalisable.
std::vector<double> fp_stationary(const DriftDiffusionProfile& profile,
                                  std::span<const double> grid);

/// y = x + (1 - x) ln(1 - x).
double lorenz_exponential(double x);
/// (1 - f) times the exponential curve below x = 1, and 1 at x = 1.
double lorenz_two_class(double x, double f);

constexpr double gini_exponential() noexcept { return 0.5; }
double gini_two_class(double f);
constexpr double gini_family() noexcept { return 0.375; }

/// Price maximising revenue p exp(-p/T) when buyers hold exponentially
/// distributed money at temperature T.
double optimal_price(double T);
double expected_revenue(double price, double T);

struct AdditiveStep {
  double d = 1.0;
};
struct MultiplicativeStep {
  double q = 2.0;
};
using HierarchyStep = std::variant<AdditiveStep, MultiplicativeStep>;

/// Hierarchy with `n_levels` levels; level k (0 at the bottom) holds
/// ceil(branching^(n_levels - 1 - k)) people earning base + k d or
/// base q^k.
std::vector<double> lydall_generate(std::size_t n_levels, double branching, double base_income,
                                    HierarchyStep step);

}  // namespace wealthlab::laws
