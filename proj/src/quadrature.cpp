#include "wealthlab/quadrature.hpp"

#include <cmath>

namespace wealthlab::quad {
namespace {

struct Simpson {
  const std::function<double(double)>& f;
  bool converged = true;

  double recurse(double a, double b, double fa, double fm, double fb,
                 double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (!std::isfinite(delta)) {
      converged = false;
      return left + right;
    }
    if (depth <= 0) {
      if (std::fabs(delta) > 15.0 * tol) converged = false;
      return left + right + delta / 15.0;
    }
    // Second clause: refinement below rounding noise cannot improve the sum.
    if (std::fabs(delta) <= 15.0 * tol ||
        std::fabs(delta) <= 1e-14 * (std::fabs(left) + std::fabs(right))) {
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

Result simpson(const std::function<double(double)>& f, double a, double b,
               double tol, int max_depth) {
  if (a == b) return {0.0, true};
  Simpson s{f};
  // Pre-split into a few panels so narrow features are not stepped over
  // by the first coarse estimate.
  constexpr int kPanels = 16;
  const double h = (b - a) / kPanels;
  double total = 0.0;
  for (int k = 0; k < kPanels; ++k) {
    const double lo = a + k * h;
    const double hi = (k + 1 == kPanels) ? b : lo + h;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += s.recurse(lo, hi, flo, fm, fhi, whole, tol / kPanels, max_depth);
  }
  return {total, s.converged && std::isfinite(total)};
}

Result simpson_to_infinity(const std::function<double(double)>& f, double a,
                           double scale, double tol, int max_depth) {
  auto mapped = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double one_minus = 1.0 - t;
    const double x = a + scale * t / one_minus;
    const double value = f(x) * scale / (one_minus * one_minus);
    return std::isfinite(value) ? value : 0.0;
  };
  // The t -> 1 end is approached but never evaluated exactly; a tail that
  // does not decay shows up as a non-converged refinement there.
  auto result = simpson(mapped, 0.0, 1.0, tol, max_depth);
  const double probe_t = 1.0 - 1e-9;
  const double probe = f(a + scale * probe_t / (1.0 - probe_t)) * scale / 1e-18;
  // Mass carried by the last 1e-9 of the mapped interval; negligible for any
  // tail decaying at least as fast as x^-2.
  if (!std::isfinite(probe) || std::fabs(probe) * 1e-9 > 1e-6 * std::fabs(result.value)) {
    result.converged = false;
  }
  return result;
}

double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (std::fabs(b - a) > tol * (std::fabs(a) + std::fabs(b) + 1e-300)) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    if (b - a < 1e-300) break;
  }
  return 0.5 * (a + b);
}

}  // namespace wealthlab::quad
