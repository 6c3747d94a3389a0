#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "rsle/errors.hpp"

namespace rsle::special {

using Complex = std::complex<double>;

/// Principal branch W0 of the Lambert W function, analytic on
/// C \ (-inf, -1/e).  The branch-point z = -1/e itself maps to -1.
/// Throws BranchCutError for real z < -1/e and ConvergenceError if the
/// Halley refinement stalls.
Complex lambert_w0(Complex z);

/// Root of a monotone function bracketed by [lo, hi]: bisection down to
/// a coarse bracket, then Newton-free secant/bisection polish until
/// |f(x)| <= tol or the bracket collapses.
double bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-12);

/// Extents of the hull-boundary parameter interval at hydrodynamic time t:
/// x_max solves (x/2) tanh(x/2) = t for all t > 0, and for t > 1 x_min
/// solves (x/2) coth(x/2) = t.  r_min = exp(-x_max), r_max = exp(-x_min).
struct TimeExtents {
    double t = 0.0;
    std::optional<double> x_min; // present iff t > 1
    double x_max = 0.0;
    double r_min = 1.0;
    std::optional<double> r_max; // present iff t > 1
};

TimeExtents solve_extents(double t);

} // namespace rsle::special
