#include "wealthlab/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wealthlab/error.hpp"
#include "wealthlab/rng.hpp"

namespace wealthlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<double> sorted_copy(std::span<const double> samples) {
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  return v;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Weighted least squares y = c0 + c1 x.
struct Line {
  double intercept = 0.0;
  double slope = 0.0;
};

Line weighted_fit(std::span<const double> x, std::span<const double> y,
                  std::span<const double> w) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  require(det > 0, ErrorCode::InsufficientTail, "degenerate regression");
  const double slope = (sw * sxy - sx * sy) / det;
  return {(sy - slope * sx) / sw, slope};
}

// Bisection root of a function with g(lo) and g(hi) of opposite sign.
template <class F>
double bisect(F&& g, double lo, double hi) {
  double glo = g(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(std::fabs(lo), std::fabs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Sample KS distance against an arbitrary CDF, samples sorted ascending.
template <class Cdf>
double ks_sorted(std::span<const double> sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Histogram and entropy

std::vector<double> Histogram::probabilities() const {
  std::vector<double> p(counts.size(), 0.0);
  if (total == 0) return p;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return p;
}

std::vector<double> Histogram::density() const {
  auto p = probabilities();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] /= edges[i + 1] - edges[i];
  return p;
}

Histogram histogram(std::span<const double> samples, const Binning& binning) {
  require(!samples.empty(), ErrorCode::EmptyInput, "histogram of no samples");
  const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *min_it;
  double hi = *max_it;

  Histogram h;
  std::visit(Overloaded{
                 [&](const EqualWidth& b) {
                   require(b.k >= 1, ErrorCode::InvalidParameter, "need at least one bin");
                   if (hi == lo) hi = lo + 1.0;
                   h.edges.resize(b.k + 1);
                   for (std::size_t i = 0; i <= b.k; ++i) {
                     h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / b.k;
                   }
                   h.edges.back() = hi;
                 },
                 [&](const LogBins& b) {
                   require(b.k >= 1, ErrorCode::InvalidParameter, "need at least one bin");
                   require(lo > 0, ErrorCode::InvalidParameter, "log bins need positive samples");
                   if (hi == lo) hi = lo * 2.0;
                   h.edges.resize(b.k + 1);
                   const double l0 = std::log(lo), l1 = std::log(hi);
                   for (std::size_t i = 0; i <= b.k; ++i) {
                     h.edges[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / b.k);
                   }
                   h.edges.front() = lo;
                   h.edges.back() = hi;
                 },
                 [&](const Edges& b) {
                   require(b.edges.size() >= 2, ErrorCode::InvalidParameter, "need two edges");
                   for (std::size_t i = 1; i < b.edges.size(); ++i) {
                     require(b.edges[i] > b.edges[i - 1], ErrorCode::InvalidParameter,
                             "edges must increase strictly");
                   }
                   h.edges = b.edges;
                 },
             },
             binning);

  h.counts.assign(h.edges.size() - 1, 0);
  for (double x : samples) {
    if (x < h.edges.front() || x > h.edges.back()) continue;
    auto it = std::upper_bound(h.edges.begin(), h.edges.end(), x);
    auto k = static_cast<std::size_t>(it - h.edges.begin());
    k = std::min(k, h.counts.size()) - 1;
    ++h.counts[k];
    ++h.total;
  }
  return h;
}

double entropy(const Histogram& h) {
  require(h.total >= 1, ErrorCode::EmptyInput, "entropy of an empty histogram");
  double s = 0.0;
  for (double p : h.probabilities()) {
    if (p > 0) s -= p * std::log(p);
  }
  return s;
}

double ln_multiplicity(const Histogram& h) {
  double w = std::lgamma(static_cast<double>(h.total) + 1.0);
  for (auto c : h.counts) w -= std::lgamma(static_cast<double>(c) + 1.0);
  return w;
}

double stirling_error_bound(const Histogram& h) {
  constexpr double two_pi = 6.283185307179586;
  const double n = static_cast<double>(h.total);
  double bound = 0.5 * std::log(two_pi * n) + 1.0 / (12.0 * n);
  for (auto c : h.counts) {
    if (c == 0) continue;
    const double k = static_cast<double>(c);
    bound += 0.5 * std::log(two_pi * k) + 1.0 / (12.0 * k);
  }
  return bound;
}

// ---------------------------------------------------------------------------
// Lorenz and Gini

LorenzCurve lorenz_empirical(std::span<const double> samples) {
  require(!samples.empty(), ErrorCode::EmptyInput, "Lorenz curve of no samples");
  const auto v = sorted_copy(samples);
  require(v.front() >= 0, ErrorCode::InvalidParameter, "Lorenz curve needs non-negative samples");
  double total = 0.0;
  for (double x : v) total += x;
  require(total > 0, ErrorCode::ZeroTotal, "all samples are zero");

  const double n = static_cast<double>(v.size());
  LorenzCurve c;
  c.x.reserve(v.size() + 1);
  c.y.reserve(v.size() + 1);
  c.x.push_back(0.0);
  c.y.push_back(0.0);
  double running = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    running += v[i];
    c.x.push_back(static_cast<double>(i + 1) / n);
    c.y.push_back(running / total);
  }
  c.y.back() = 1.0;
  return c;
}

double lorenz_area(const LorenzCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.x.size(); ++i) {
    area += 0.5 * (curve.y[i - 1] + curve.y[i]) * (curve.x[i] - curve.x[i - 1]);
  }
  return area;
}

double gini_empirical(std::span<const double> samples) {
  require(samples.size() >= 2, ErrorCode::InvalidSize, "Gini needs at least two samples");
  return 1.0 - 2.0 * lorenz_area(lorenz_empirical(samples));
}

// ---------------------------------------------------------------------------
// Estimators

double fit_exponential(std::span<const double> samples, double floor) {
  double s = 0.0;
  std::size_t n = 0;
  for (double x : samples) {
    if (x >= floor) {
      s += x;
      ++n;
    }
  }
  require(n > 0, ErrorCode::EmptyInput, "no samples above the floor");
  return s / static_cast<double>(n) - floor;
}

LocationFit fit_exponential_location(std::span<const double> samples) {
  require(!samples.empty(), ErrorCode::EmptyInput, "no samples");
  const double lo = *std::min_element(samples.begin(), samples.end());
  return {lo, mean_of(samples) - lo};
}

double fit_exponential_histogram(std::span<const double> samples, double floor, double bin_width,
                                 std::uint64_t min_count) {
  require(bin_width > 0, ErrorCode::InvalidParameter, "bin width must be > 0");
  require(!samples.empty(), ErrorCode::EmptyInput, "no samples");
  std::vector<std::uint64_t> counts;
  for (double x : samples) {
    if (x < floor) continue;
    const auto k = static_cast<std::size_t>((x - floor) / bin_width);
    if (k >= counts.size()) counts.resize(k + 1, 0);
    ++counts[k];
  }
  std::vector<double> xs, ys, ws;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < min_count) continue;
    xs.push_back(floor + (static_cast<double>(k) + 0.5) * bin_width);
    ys.push_back(std::log(static_cast<double>(counts[k])));
    ws.push_back(static_cast<double>(counts[k]));
  }
  require(xs.size() >= 3, ErrorCode::InsufficientTail, "too few populated bins");
  const Line line = weighted_fit(xs, ys, ws);
  require(line.slope < 0, ErrorCode::InvalidParameter, "histogram does not decay");
  return -1.0 / line.slope;
}

GammaFit fit_gamma_moments(std::span<const double> samples) {
  require(samples.size() >= 2, ErrorCode::EmptyInput, "need at least two samples");
  const double m = mean_of(samples);
  double var = 0.0;
  for (double x : samples) var += (x - m) * (x - m);
  var /= static_cast<double>(samples.size());
  require(m > 0 && var > 0, ErrorCode::InvalidParameter, "gamma fit needs positive mean and spread");
  return {m * m / var - 1.0, var / m};
}

double fit_pareto_hill(std::span<const double> samples, double xmin) {
  require(xmin > 0, ErrorCode::InvalidParameter, "xmin must be > 0");
  double s = 0.0;
  std::size_t n = 0;
  for (double x : samples) {
    if (x >= xmin) {
      s += std::log(x / xmin);
      ++n;
    }
  }
  require(n >= 50 && s > 0, ErrorCode::InsufficientTail, "fewer than 50 tail samples");
  return static_cast<double>(n) / s;
}

double fit_truncated_exponential(std::span<const double> samples, double upper) {
  require(upper > 0, ErrorCode::InvalidParameter, "upper bound must be > 0");
  double s = 0.0;
  std::size_t n = 0;
  for (double x : samples) {
    if (x >= 0 && x <= upper) {
      s += x;
      ++n;
    }
  }
  require(n >= 2, ErrorCode::EmptyInput, "no samples in the window");
  const double m = s / static_cast<double>(n);
  // E[x] = T - U / (e^{U/T} - 1) rises from 0 to U/2 as T goes from 0 to inf.
  require(m < 0.5 * upper, ErrorCode::InvalidParameter, "window shows no exponential decay");
  auto g = [&](double log_t) {
    const double t = std::exp(log_t);
    return t - upper / std::expm1(upper / t) - m;
  };
  return std::exp(bisect(g, std::log(upper) - 30.0, std::log(upper) + 30.0));
}

TailExponentFit ccdf_tail_exponent(std::span<const double> samples, double xmin, double xmax) {
  require(xmin > 0 && xmax > xmin, ErrorCode::InvalidParameter, "need 0 < xmin < xmax");
  const auto v = sorted_copy(samples);
  const double n = static_cast<double>(v.size());
  constexpr int kPoints = 40;
  std::vector<double> xs, ys, ws;
  for (int i = 0; i <= kPoints; ++i) {
    const double x = xmin * std::pow(xmax / xmin, static_cast<double>(i) / kPoints);
    const auto above = static_cast<double>(v.end() - std::lower_bound(v.begin(), v.end(), x));
    if (above < 1) continue;
    xs.push_back(std::log(x));
    ys.push_back(std::log(above / n));
    ws.push_back(1.0);
  }
  require(xs.size() >= 5, ErrorCode::InsufficientTail, "tail range holds too few samples");
  const Line line = weighted_fit(xs, ys, ws);
  return {-line.slope, xmin, xmax, std::log10(xmax / xmin), xs.size()};
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

double ks_statistic(std::span<const double> samples, const laws::DistributionLaw& law) {
  require(!samples.empty(), ErrorCode::EmptyInput, "KS of no samples");
  const auto v = sorted_copy(samples);
  return ks_sorted(v, [&](double x) { return laws::cdf(law, x); });
}

double ks_statistic_cdf(std::span<const double> samples,
                        const std::function<double(double)>& cdf) {
  require(!samples.empty(), ErrorCode::EmptyInput, "KS of no samples");
  const auto v = sorted_copy(samples);
  return ks_sorted(v, cdf);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), ErrorCode::EmptyInput, "KS of no samples");
  const auto x = sorted_copy(a);
  const auto y = sorted_copy(b);
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical(std::size_t n, double level) {
  require(n > 0 && level > 0 && level < 1, ErrorCode::InvalidParameter, "bad KS level");
  return std::sqrt(-0.5 * std::log(0.5 * level)) / std::sqrt(static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Two-class decomposition

namespace {

struct Crossing {
  bool found = false;
  double r_star = 0.0;
};

// Upper root of ln C_bulk - ln C_tail on [lo, hi]. The difference peaks at
// r = alpha T, so the search starts there when that lies above lo.
Crossing cross(double log_amp, double T, double log_tail_at_1, double alpha, double lo,
               double hi) {
  auto g = [&](double r) { return log_amp - r / T - (log_tail_at_1 - alpha * std::log(r)); };
  lo = std::max(lo, alpha * T);
  if (!(lo < hi) || !(g(lo) > 0) || !(g(hi) < 0)) return {};
  return {true, bisect(g, lo, hi)};
}

}  // namespace

TwoClassReport two_class_decompose(std::span<const double> samples) {
  require(samples.size() >= 1000, ErrorCode::InvalidSize, "two-class fit needs 1000 samples");
  const auto v = sorted_copy(samples);
  require(v.front() >= 0, ErrorCode::InvalidParameter, "incomes must be non-negative");
  const std::size_t n = v.size();
  const double nd = static_cast<double>(n);

  TwoClassReport rep;
  double total = 0.0;
  for (double x : v) total += x;
  require(total > 0, ErrorCode::ZeroTotal, "all incomes are zero");
  rep.mean = total / nd;
  rep.gini_empirical = gini_empirical(v);

  // Bulk: exponential truncated at the 90th percentile.
  const double q90 = v[static_cast<std::size_t>(0.9 * nd)];
  const auto bulk_end = std::upper_bound(v.begin(), v.end(), q90);
  const std::span<const double> bulk(v.begin(), bulk_end);
  rep.T_r = fit_truncated_exponential(bulk, q90);
  const double bulk_share = static_cast<double>(bulk.size()) / nd;
  const double window_mass = -std::expm1(-q90 / rep.T_r);
  rep.bulk_amplitude = bulk_share / window_mass;
  rep.ks_bulk = ks_sorted(bulk, [&](double x) { return -std::expm1(-x / rep.T_r) / window_mass; });

  // Tail: KS-minimising xmin among the top 5%, restricted to windows where
  // the bulk exponential would supply at most kMaxBulkShare of the points.
  std::vector<double> suffix_log(n + 1, 0.0);  // sum of ln x over v[i..n)
  for (std::size_t i = n; i-- > 0;) suffix_log[i] = suffix_log[i + 1] + std::log(std::max(v[i], 1e-300));
  const std::size_t k_lo = 50;
  const auto k_hi = std::max(k_lo, static_cast<std::size_t>(0.05 * nd));
  double best_ks = 2.0;
  std::size_t best_k = 0;
  double best_alpha = 0.0;
  constexpr int kCandidates = 160;
  constexpr double kMaxBulkShare = 0.1;
  std::size_t prev_k = 0;
  for (int c = 0; c <= kCandidates; ++c) {
    const auto k = static_cast<std::size_t>(std::llround(
        static_cast<double>(k_lo) *
        std::pow(static_cast<double>(k_hi) / static_cast<double>(k_lo), double(c) / kCandidates)));
    if (k == prev_k || k > n) continue;
    prev_k = k;
    const double xmin = v[n - k];
    if (!(xmin > 0)) continue;
    // Only windows the exponential bulk cannot account for.
    const double bulk_expected = nd * rep.bulk_amplitude * std::exp(-xmin / rep.T_r);
    if (bulk_expected > kMaxBulkShare * static_cast<double>(k)) continue;
    const double log_sum = suffix_log[n - k] - static_cast<double>(k) * std::log(xmin);
    if (!(log_sum > 0)) continue;
    const double alpha = static_cast<double>(k) / log_sum;
    const std::span<const double> tail(v.begin() + static_cast<std::ptrdiff_t>(n - k), v.end());
    const double d = ks_sorted(tail, [&](double x) { return 1.0 - std::pow(x / xmin, -alpha); });
    if (d < best_ks) {
      best_ks = d;
      best_k = k;
      best_alpha = alpha;
    }
  }
  if (best_k == 0) return rep;
  rep.alpha = best_alpha;
  rep.xmin = v[n - best_k];
  rep.tail_points = best_k;
  rep.ks_tail = best_ks;

  const double observed = static_cast<double>(best_k);
  const double log_tail_at_1 =
      std::log(observed / nd) + rep.alpha * std::log(rep.xmin);
  const auto crossing =
      cross(std::log(rep.bulk_amplitude), rep.T_r, log_tail_at_1, rep.alpha, rep.T_r, v.back());
  if (!crossing.found) return rep;

  rep.two_class = true;
  rep.r_star = crossing.r_star;
  rep.f = std::clamp(1.0 - rep.bulk_amplitude * rep.T_r / rep.mean, 0.0, 1.0);
  const auto above = std::upper_bound(v.begin(), v.end(), crossing.r_star);
  double upper_income = 0.0;
  for (auto it = above; it != v.end(); ++it) upper_income += *it;
  rep.f_nonparametric = upper_income / total;
  rep.upper_fraction = static_cast<double>(v.end() - above) / nd;
  rep.gini_two_class = 0.5 * (1.0 + rep.f);
  return rep;
}

namespace {

struct TableCcdf {
  std::vector<double> r;
  std::vector<double> c;  // fraction with income >= r
  double tail_alpha = 0.0;

  // Integral of C over [r[k], r[k+1]] with C log-linear inside the bracket.
  double bracket(std::size_t k) const {
    const double w = r[k + 1] - r[k];
    const double c1 = c[k], c2 = c[k + 1];
    if (c2 <= 0 || c1 <= 0) return 0.5 * w * (c1 + c2);
    if (std::fabs(c1 - c2) <= 1e-12 * c1) return w * c1;
    return w * (c1 - c2) / std::log(c1 / c2);
  }

  // Integral of C beyond the last row, extrapolated with the tail exponent.
  double beyond() const {
    if (c.back() <= 0 || tail_alpha <= 1) return 0.0;
    return c.back() * r.back() / (tail_alpha - 1.0);
  }

  double at(double x) const {
    if (x <= r.front()) return c.front();
    if (x >= r.back()) {
      return tail_alpha > 0 ? c.back() * std::pow(x / r.back(), -tail_alpha) : c.back();
    }
    const auto k = static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), x) - r.begin()) - 1;
    const double t = (x - r[k]) / (r[k + 1] - r[k]);
    if (c[k] <= 0 || c[k + 1] <= 0) return c[k] + t * (c[k + 1] - c[k]);
    return c[k] * std::pow(c[k + 1] / c[k], t);
  }

  // Per-capita income held by people with income >= r[k].
  std::vector<double> income_above() const {
    std::vector<double> out(r.size());
    double acc = beyond();
    out.back() = acc + r.back() * c.back();
    for (std::size_t k = r.size() - 1; k-- > 0;) {
      acc += bracket(k);
      out[k] = acc + r[k] * c[k];
    }
    return out;
  }
};

TableCcdf make_ccdf(std::span<const CcdfRow> table) {
  require(table.size() >= 2, ErrorCode::InvalidSize, "table needs at least two rows");
  TableCcdf t;
  const double total = table.front().cum_count;
  require(total > 0, ErrorCode::ZeroTotal, "table has no population");
  for (std::size_t k = 0; k < table.size(); ++k) {
    require(table[k].lower_bound >= 0 && table[k].cum_count >= 0, ErrorCode::MalformedInput,
            "table values must be non-negative");
    if (k > 0) {
      require(table[k].lower_bound > table[k - 1].lower_bound, ErrorCode::MalformedInput,
              "lower bounds must increase");
      require(table[k].cum_count <= table[k - 1].cum_count, ErrorCode::MalformedInput,
              "cumulative counts must not increase");
    }
    t.r.push_back(table[k].lower_bound);
    t.c.push_back(table[k].cum_count / total);
  }
  return t;
}

Line tail_line(const TableCcdf& t) {
  std::vector<double> xs, ys, ws;
  for (std::size_t k = 0; k < t.r.size(); ++k) {
    if (t.c[k] > 0 && t.c[k] <= 0.05 && t.r[k] > 0) {
      xs.push_back(std::log(t.r[k]));
      ys.push_back(std::log(t.c[k]));
      ws.push_back(1.0);
    }
  }
  require(xs.size() >= 3, ErrorCode::InsufficientTail, "fewer than three tail rows");
  return weighted_fit(xs, ys, ws);
}

}  // namespace

TwoClassReport two_class_decompose(std::span<const CcdfRow> table) {
  require(table.size() >= 20, ErrorCode::InvalidSize, "two-class fit needs 20 table rows");
  TableCcdf t = make_ccdf(table);

  TwoClassReport rep;
  std::vector<double> xs, ys, ws;
  for (std::size_t k = 0; k < t.r.size(); ++k) {
    if (t.c[k] >= 0.1) {
      xs.push_back(t.r[k]);
      ys.push_back(std::log(t.c[k]));
      ws.push_back(1.0);
    }
  }
  require(xs.size() >= 3, ErrorCode::InsufficientTail, "fewer than three bulk rows");
  const Line bulk = weighted_fit(xs, ys, ws);
  require(bulk.slope < 0, ErrorCode::InvalidParameter, "bulk CCDF does not decay");
  rep.T_r = -1.0 / bulk.slope;
  rep.bulk_amplitude = std::exp(bulk.intercept);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    rep.ks_bulk = std::max(rep.ks_bulk,
                           std::fabs(std::exp(ys[k]) - std::exp(bulk.intercept + bulk.slope * xs[k])));
  }

  Line tail;
  try {
    tail = tail_line(t);
  } catch (const Error&) {
    return rep;
  }
  rep.alpha = -tail.slope;
  t.tail_alpha = rep.alpha;
  const auto income = t.income_above();
  rep.mean = income.front();
  for (std::size_t k = 0; k < t.r.size(); ++k) {
    if (t.c[k] > 0 && t.c[k] <= 0.05 && t.r[k] > 0) {
      rep.ks_tail = std::max(rep.ks_tail, std::fabs(t.c[k] - std::exp(tail.intercept) *
                                                                 std::pow(t.r[k], tail.slope)));
      if (rep.xmin == 0.0) rep.xmin = t.r[k];
      ++rep.tail_points;
    }
  }

  const auto crossing =
      cross(bulk.intercept, rep.T_r, tail.intercept, rep.alpha, rep.T_r, t.r.back());
  if (!crossing.found || rep.alpha <= 0) return rep;
  rep.two_class = true;
  rep.r_star = crossing.r_star;
  rep.f = std::clamp(1.0 - rep.bulk_amplitude * rep.T_r / rep.mean, 0.0, 1.0);
  rep.upper_fraction = t.at(crossing.r_star);

  // Income above r*: integrate the interpolated CCDF from r* on.
  const auto k = static_cast<std::size_t>(
                     std::upper_bound(t.r.begin(), t.r.end(), crossing.r_star) - t.r.begin()) -
                 1;
  const double next = k + 1 < t.r.size() ? t.r[k + 1] : crossing.r_star;
  double above = 0.0;
  if (k + 1 < t.r.size()) {
    // Partial bracket [r*, r[k+1]] by the same log-linear form.
    const double c1 = t.at(crossing.r_star), c2 = t.c[k + 1];
    const double w = next - crossing.r_star;
    above += (c1 > 0 && c2 > 0 && std::fabs(c1 - c2) > 1e-12 * c1) ? w * (c1 - c2) / std::log(c1 / c2)
                                                                    : 0.5 * w * (c1 + c2);
    above += income[k + 1] - t.r[k + 1] * t.c[k + 1];
  } else {
    above = t.beyond();
  }
  rep.f_nonparametric = (above + crossing.r_star * rep.upper_fraction) / rep.mean;
  rep.gini_two_class = 0.5 * (1.0 + rep.f);
  return rep;
}

LorenzCurve lorenz_from_table(std::span<const CcdfRow> table) {
  TableCcdf t = make_ccdf(table);
  try {
    t.tail_alpha = -tail_line(t).slope;
  } catch (const Error&) {
    t.tail_alpha = 0.0;
  }
  const auto income = t.income_above();
  const double total = income.front();
  require(total > 0, ErrorCode::ZeroTotal, "table carries no income");
  LorenzCurve curve;
  if (t.c.front() < 1.0 || t.r.front() > 0) {
    curve.x.push_back(0.0);
    curve.y.push_back(0.0);
  }
  for (std::size_t k = 0; k < t.r.size(); ++k) {
    curve.x.push_back(1.0 - t.c[k]);
    curve.y.push_back(1.0 - income[k] / total);
  }
  if (curve.x.back() < 1.0) {
    curve.x.push_back(1.0);
    curve.y.push_back(1.0);
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Income diffusion

void KestenParams::validate() const {
  require(A0 > 0 && B0 > 0, ErrorCode::InvalidParameter, "A0 and B0 must be > 0");
  require(a >= 0 && b >= 0, ErrorCode::InvalidParameter, "a and b must be >= 0");
  require(n_walkers >= 1 && n_steps >= 1, ErrorCode::InvalidParameter, "need walkers and steps");
  require(dt > 0 && dt * a < 0.1, ErrorCode::InvalidParameter, "dt must satisfy dt a < 0.1");
}

std::vector<double> income_kesten_simulate(const KestenParams& p) {
  p.validate();
  Rng rng(p.seed);
  std::vector<double> r(p.n_walkers, p.B0 / p.A0);
  const double root_dt = std::sqrt(2.0 * p.dt);
  for (std::uint64_t step = 0; step < p.n_steps; ++step) {
    for (double& x : r) {
      const double drift = -(p.A0 + p.a * x) * p.dt;
      const double noise = root_dt * std::sqrt(p.B0 + p.b * x * x) * rng.normal();
      x = std::fabs(x + drift + noise);
    }
  }
  return r;
}

}  // namespace wealthlab
