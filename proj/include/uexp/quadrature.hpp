#pragma once

#include <functional>
#include <span>

namespace uexp {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;   // sum of per-segment error estimates
    double l1 = 0.0;      // integral of |f|
};

using Integrand = std::function<double(double)>;

/// Double-exponential (tanh-sinh) quadrature on [a, b]; tolerates integrable
/// endpoint singularities. `rel_tol` is relative to the L1 norm of the segment.
/// A segment that misses the tolerance is bisected, up to `max_bisections` deep.
QuadratureResult integrate_finite(const Integrand& f, double a, double b, double rel_tol,
                                  int max_refinements, int max_bisections = 6);

/// exp-sinh quadrature on [a, infinity).
QuadratureResult integrate_to_infinity(const Integrand& f, double a, double rel_tol,
                                       int max_refinements);

/// Integrates over [breaks.front(), breaks.back()] segment by segment, then adds
/// [breaks.back(), infinity) when `to_infinity` is set. `breaks` must be sorted.
QuadratureResult integrate_piecewise(const Integrand& f, std::span<const double> breaks,
                                     bool to_infinity, double rel_tol, int max_refinements);

}  // namespace uexp
