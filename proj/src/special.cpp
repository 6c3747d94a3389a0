#include "rsle/special.hpp"

#include <cmath>
#include <limits>

namespace rsle::special {

namespace {

constexpr double kInvE = 0.36787944117144232160; // 1/e

// Series around the branch point z = -1/e: W0 = -1 + p - p^2/3 + 11 p^3/72 - ...
// with p = sqrt(2 (e z + 1)).
Complex branch_point_seed(Complex z) {
    const Complex p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
}

// Taylor series at the origin, radius of convergence 1/e.
Complex origin_series(Complex z) {
    // W0(z) = z - z^2 + 3/2 z^3 - 8/3 z^4 + 125/24 z^5 - ...
    return z * (1.0 + z * (-1.0 + z * (1.5 + z * (-8.0 / 3.0 + z * (125.0 / 24.0)))));
}

Complex seed(Complex z) {
    const double az = std::abs(z);
    if (az < 0.2 * kInvE) return origin_series(z);
    if (std::abs(z + kInvE) < 0.25 * kInvE) return branch_point_seed(z);
    if (az > 3.0) {
        const Complex lz = std::log(z);
        return lz - std::log(lz);
    }
    // Intermediate annulus; log(1+z) tracks the principal branch well
    // enough for Halley away from the cut.
    return std::log(1.0 + z);
}

// Halley iteration from a given start; returns nullopt if it stalls or
// leaves the principal strip |Im w| <= pi.
std::optional<Complex> halley(Complex z, Complex w) {
    const double tol = 1e-14 * std::max(1.0, std::abs(z));
    for (int iter = 0; iter < 64; ++iter) {
        const Complex ew = std::exp(w);
        const Complex f = w * ew - z;
        if (std::abs(f) <= tol) {
            if (std::abs(w.imag()) > M_PI + 1e-12) return std::nullopt;
            return w;
        }
        const Complex wp1 = w + 1.0;
        const Complex denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        w -= f / denom;
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return std::nullopt;
    }
    return std::nullopt;
}

} // namespace

Complex lambert_w0(Complex z) {
    if (z.imag() == 0.0 && z.real() < -kInvE) {
        throw BranchCutError("lambert_w0: input on the branch cut (-inf, -1/e)");
    }
    if (z == Complex(0.0, 0.0)) return {0.0, 0.0};

    if (auto w = halley(z, seed(z))) return *w;

    // Fallback: continuation along the ray s*z from the series region.
    // The ray never crosses the cut (the cut is a subset of the ray only
    // for rejected real inputs), so branch tracking is preserved.
    const double az = std::abs(z);
    const Complex dir = z / az;
    double s = 0.1 * kInvE;
    Complex w = origin_series(s * dir);
    const int n_steps = 64;
    const double ratio = std::pow(az / s, 1.0 / n_steps);
    for (int k = 1; k <= n_steps; ++k) {
        s = (k == n_steps) ? az : s * ratio;
        auto next = halley(s * dir, w);
        if (!next) throw ConvergenceError("lambert_w0: continuation stalled");
        w = *next;
    }
    return w;
}

double bracketed_root(const std::function<double(double)>& f, double lo, double hi,
                      double tol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) {
        throw BracketError("bracketed_root: f(lo) and f(hi) have the same sign");
    }
    // Bisection to a coarse bracket, then continue bisecting with a secant
    // candidate when it falls inside; terminates on |f| or bracket width.
    double a = lo, b = hi, fa = flo, fb = fhi;
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (a + b);
        // Secant candidate once the bracket is tight.
        if (b - a < 1e-6 * (std::abs(a) + std::abs(b) + 1.0)) {
            const double sec = a - fa * (b - a) / (fb - fa);
            if (sec > a && sec < b) mid = sec;
        }
        const double fm = f(mid);
        if (std::abs(fm) <= tol || 0.5 * (b - a) <= tol * 1e-4) {
            return mid;
        }
        if (fa * fm <= 0.0) {
            b = mid;
            fb = fm;
        } else {
            a = mid;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

TimeExtents solve_extents(double t) {
    if (t <= 0.0) throw DomainError("solve_extents: t must be positive");

    TimeExtents ext;
    ext.t = t;

    // (x/2) tanh(x/2) = t.  Left side ~ x^2/4 near 0 and ~ x/2 at infinity,
    // so bracket by [0, 2t + 2sqrt(t) + 2].
    const auto f_max = [t](double x) { return 0.5 * x * std::tanh(0.5 * x) - t; };
    const double hi = 2.0 * t + 2.0 * std::sqrt(t) + 2.0;
    ext.x_max = bracketed_root(f_max, 0.0, hi, 1e-14);
    ext.r_min = std::exp(-ext.x_max);

    if (t > 1.0) {
        // (x/2) coth(x/2) = t, left side decreasing to 1 as x -> 0.
        const auto f_min = [t](double x) { return 0.5 * x / std::tanh(0.5 * x) - t; };
        const double lo = std::numeric_limits<double>::min();
        ext.x_min = bracketed_root(f_min, lo, 2.0 * t + 2.0, 1e-14);
        ext.r_max = std::exp(-*ext.x_min);
    }
    return ext;
}

} // namespace rsle::special
