#pragma once

#include <functional>

namespace wealthlab::quad {

struct Result {
  double value = 0.0;
  bool converged = true;
};

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
Result simpson(const std::function<double(double)>& f, double a, double b,
               double tol = 1e-12, int max_depth = 48);

/// Integral over [a, +inf) through the map x = a + scale * t / (1 - t).
/// `scale` should be of the order of the integrand's decay length.
Result simpson_to_infinity(const std::function<double(double)>& f, double a,
                           double scale, double tol = 1e-12, int max_depth = 48);

/// Golden-section maximisation of a unimodal function on [lo, hi].
double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double tol = 1e-12);

}  // namespace wealthlab::quad
