#include "uexp/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <exception>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "uexp/errors.hpp"

namespace uexp {

namespace {

// Integrators precompute abscissa tables; keep one per thread and refinement depth.
boost::math::quadrature::tanh_sinh<double>& tanh_sinh_for(int levels) {
    thread_local std::map<int, std::unique_ptr<boost::math::quadrature::tanh_sinh<double>>> cache;
    auto& slot = cache[levels];
    if (!slot) slot = std::make_unique<boost::math::quadrature::tanh_sinh<double>>(levels);
    return *slot;
}

boost::math::quadrature::exp_sinh<double>& exp_sinh_for(int levels) {
    thread_local std::map<int, std::unique_ptr<boost::math::quadrature::exp_sinh<double>>> cache;
    auto& slot = cache[levels];
    if (!slot) slot = std::make_unique<boost::math::quadrature::exp_sinh<double>>(levels);
    return *slot;
}

void check_levels(int max_refinements) {
    if (max_refinements < 1 || max_refinements > 20) {
        throw ConfigError("quadrature refinement levels must lie in [1, 20]");
    }
}

}  // namespace

QuadratureResult integrate_finite(const Integrand& f, double a, double b, double rel_tol,
                                  int max_refinements, int max_bisections) {
    check_levels(max_refinements);
    QuadratureResult r;
    if (a == b) return r;
    try {
        r.value = tanh_sinh_for(max_refinements).integrate(f, a, b, rel_tol, &r.error, &r.l1);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw QuadratureError(std::string("tanh-sinh evaluation failed: ") + e.what(), std::nan(""),
                              std::nan(""));
    }
    // tanh-sinh sometimes stalls short of the tolerance on long smooth segments
    if (r.error <= rel_tol * r.l1 || max_bisections == 0) return r;
    const double mid = a + 0.5 * (b - a);
    if (!(mid > a && mid < b)) return r;
    const QuadratureResult left = integrate_finite(f, a, mid, rel_tol, max_refinements, max_bisections - 1);
    const QuadratureResult right = integrate_finite(f, mid, b, rel_tol, max_refinements, max_bisections - 1);
    if (left.error + right.error >= r.error) return r;
    return {left.value + right.value, left.error + right.error, left.l1 + right.l1};
}

QuadratureResult integrate_to_infinity(const Integrand& f, double a, double rel_tol,
                                       int max_refinements) {
    check_levels(max_refinements);
    QuadratureResult r;
    const auto shifted = [&](double u) { return f(a + u); };
    try {
        r.value = exp_sinh_for(max_refinements).integrate(shifted, rel_tol, &r.error, &r.l1);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw QuadratureError(std::string("exp-sinh evaluation failed: ") + e.what(), std::nan(""),
                              std::nan(""));
    }
    return r;
}

QuadratureResult integrate_piecewise(const Integrand& f, std::span<const double> breaks,
                                     bool to_infinity, double rel_tol, int max_refinements) {
    std::vector<QuadratureResult> parts;
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        parts.push_back(integrate_finite(f, breaks[i - 1], breaks[i], rel_tol, max_refinements, 0));
    }
    const auto total_of = [&] {
        QuadratureResult t;
        for (const auto& p : parts) {
            t.value += p.value;
            t.error += p.error;
            t.l1 += p.l1;
        }
        return t;
    };
    QuadratureResult total = total_of();
    // bisect only the segments that matter for the global error budget
    if (total.error > rel_tol * total.l1 && !parts.empty()) {
        const double share = rel_tol * total.l1 / static_cast<double>(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (parts[i].error <= share) continue;
            const QuadratureResult refined =
                integrate_finite(f, breaks[i], breaks[i + 1], rel_tol, max_refinements);
            if (refined.error < parts[i].error) parts[i] = refined;
        }
        total = total_of();
    }
    if (to_infinity && !breaks.empty()) {
        const QuadratureResult tail = integrate_to_infinity(f, breaks.back(), rel_tol, max_refinements);
        total.value += tail.value;
        total.error += tail.error;
        total.l1 += tail.l1;
    }
    return total;
}

}  // namespace uexp
