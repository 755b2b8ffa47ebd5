#ifndef SQUEEZELIM_MINIMIZE_HPP
#define SQUEEZELIM_MINIMIZE_HPP

#include <cmath>
#include <cstddef>
#include <utility>

#include "squeezelim/model_core.hpp"

namespace squeezelim::numeric
{

struct MinimumResult
{
    double x = 0.0;
    double fx = 0.0;
    std::size_t n_evals = 0;
    bool converged = false;
};

// Golden-section search for the minimum of a unimodal f on [a, b]. Stops when
// the bracket is narrower than abs_tol. Never evaluates f at the endpoints.
template <typename F>
MinimumResult golden_section_minimize(F&& f, double a, double b, double abs_tol, std::size_t max_iter = 500)
{
    if (a > b) std::swap(a, b);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    MinimumResult r;
    r.n_evals = 2;

    std::size_t it = 0;
    while (b - a > abs_tol && it < max_iter) {
        if (fc <= fd) {
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
        ++r.n_evals;
        ++it;
    }
    r.converged = b - a <= abs_tol;
    if (fc <= fd) {
        r.x = c;
        r.fx = fc;
    } else {
        r.x = d;
        r.fx = fd;
    }
    return r;
}

// Bisection for a sign change of f on [lo, hi]. Terminates when the bracket is
// below rel_tol relative to its upper end (or abs_floor).
template <typename F>
double bisect_root(F&& f, double lo, double hi, double rel_tol, std::size_t max_iter = 400, double abs_floor = 0.0)
{
    double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo < 0.0) == (f_hi < 0.0)) throw BracketError("bisection endpoints do not bracket a root");

    for (std::size_t it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= std::max(rel_tol * std::abs(hi), abs_floor)) return mid;
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    throw NonConvergence("bisection did not converge");
}

}  // namespace squeezelim::numeric

#endif
