#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "wealthlab/laws.hpp"

namespace wealthlab {

/// k equal-width bins spanning [min, max] of the samples.
struct EqualWidth {
  std::size_t k = 10;
};
/// k logarithmically spaced bins spanning [min, max]; samples must be > 0.
struct LogBins {
  std::size_t k = 10;
};
/// Explicit edges; samples outside [front, back] are dropped.
struct Edges {
  std::vector<double> edges;
};
using Binning = std::variant<EqualWidth, LogBins, Edges>;

struct Histogram {
  std::vector<double> edges;  // size counts.size() + 1
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  std::vector<double> probabilities() const;
  /// Probability per unit length.
  std::vector<double> density() const;
};

/// Bins are half-open [e_i, e_{i+1}) except the last, which is closed.
Histogram histogram(std::span<const double> samples, const Binning& binning);

/// -sum P_k ln P_k over non-empty bins.
double entropy(const Histogram& h);
/// ln( N! / prod N_k! ), exact through log-gamma.
double ln_multiplicity(const Histogram& h);
/// Bound on |ln W - N S| from Stirling's series.
double stirling_error_bound(const Histogram& h);

struct LorenzCurve {
  std::vector<double> x;
  std::vector<double> y;
};

/// Polyline through (i/N, share of the i poorest) for sorted samples.
LorenzCurve lorenz_empirical(std::span<const double> samples);
/// 1 - 2 * trapezoid area under the empirical Lorenz polyline.
double gini_empirical(std::span<const double> samples);
double lorenz_area(const LorenzCurve& curve);

/// MLE T = mean - floor over samples >= floor.
double fit_exponential(std::span<const double> samples, double floor = 0.0);

struct LocationFit {
  double floor = 0.0;
  double T = 0.0;
};
/// Shifted exponential with unknown floor: floor = min, T = mean - min.
LocationFit fit_exponential_location(std::span<const double> samples);

/// Slope fit of ln(density) against m on equal-width bins above `floor`,
/// weighted by counts; uses bins up to the last one holding `min_count`.
double fit_exponential_histogram(std::span<const double> samples, double floor, double bin_width,
                                 std::uint64_t min_count = 10);

struct GammaFit {
  double beta = 0.0;
  double T = 0.0;
};
/// beta = mean^2/var - 1, T = var/mean.
GammaFit fit_gamma_moments(std::span<const double> samples);

/// alpha = 1 / mean(ln(x/xmin)) over x >= xmin; at least 50 tail points.
double fit_pareto_hill(std::span<const double> samples, double xmin);

/// Exponential restricted to [0, upper]: MLE of T by bisection.
double fit_truncated_exponential(std::span<const double> samples, double upper);

struct TailExponentFit {
  double alpha = 0.0;
  double xmin = 0.0;
  double xmax = 0.0;
  double decades = 0.0;
  std::size_t points = 0;
};
/// Least-squares slope of log CCDF against log x between xmin and xmax,
/// on the sorted samples thinned to log-spaced points.
TailExponentFit ccdf_tail_exponent(std::span<const double> samples, double xmin, double xmax);

/// sup |F_n - F| over the sorted samples.
double ks_statistic(std::span<const double> samples, const laws::DistributionLaw& law);
double ks_statistic_cdf(std::span<const double> samples,
                        const std::function<double(double)>& cdf);
double ks_two_sample(std::span<const double> a, std::span<const double> b);
/// Asymptotic one-sample critical value c(level)/sqrt(n) for level 0.01 or
/// 0.05.
double ks_critical(std::size_t n, double level);

struct TwoClassReport {
  bool two_class = false;
  double T_r = 0.0;
  double alpha = 0.0;
  std::optional<double> r_star;
  double f = 0.0;                // parametric upper-class income share
  double f_nonparametric = 0.0;  // sample income share above r_star
  double upper_fraction = 0.0;   // population share above r_star
  double bulk_amplitude = 1.0;   // A in C_bulk(r) = A exp(-r/T_r)
  double xmin = 0.0;
  std::size_t tail_points = 0;
  double ks_bulk = 0.0;
  double ks_tail = 0.0;
  double mean = 0.0;
  double gini_two_class = 0.5;   // (1+f)/2
  double gini_empirical = 0.0;
};

/// Exponential bulk fitted on [0, q90]; Pareto tail with xmin chosen by
/// minimal KS over the top 5% among windows the bulk explains at most 10%
/// of; r* where the fitted CCDFs cross.
/// Reports a single class when no tail window is clear of the bulk or the
/// fitted CCDFs do not cross.
TwoClassReport two_class_decompose(std::span<const double> samples);

/// Binned table row: `cum_count` units have income >= `lower_bound`.
struct CcdfRow {
  double lower_bound = 0.0;
  double cum_count = 0.0;
};
TwoClassReport two_class_decompose(std::span<const CcdfRow> table);
/// Lorenz points at the table's bracket boundaries, with log-linear
/// interpolation of the CCDF inside each bracket.
LorenzCurve lorenz_from_table(std::span<const CcdfRow> table);

struct KestenParams {
  double A0 = 1.0;
  double a = 0.0;
  double B0 = 1.0;
  double b = 0.0;
  std::size_t n_walkers = 10000;
  std::uint64_t n_steps = 10000;
  double dt = 1e-3;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Walkers start at B0/A0 and follow
///   r <- |r - (A0 + a r) dt + sqrt(2 (B0 + b r^2) dt) xi|,
/// the reflection at 0 being the no-flux boundary. Returns the final states.
std::vector<double> income_kesten_simulate(const KestenParams& params);

}  // namespace wealthlab
