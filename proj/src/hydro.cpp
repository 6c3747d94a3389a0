#include "rsle/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsle::hydro {

namespace {

constexpr double kPi = 3.14159265358979323846;

Complex lambda_t(double t, Complex z) {
    Complex om = 1.0 - z;
    return 4.0 * t * z / (om * om);
}

// F(M) = e^{2tM} (M-1)/(M+1) - z and its M-derivative.
Complex char_eq(double t, Complex m, Complex z) {
    return std::exp(2.0 * t * m) * (m - 1.0) / (m + 1.0) - z;
}

Complex char_eq_prime(double t, Complex m) {
    Complex mp1 = m + 1.0;
    return std::exp(2.0 * t * m) * (2.0 * t * (m - 1.0) / mp1 + 2.0 / (mp1 * mp1));
}

// Newton solve of char_eq for fixed (t, z) from a seed; empty on failure.
std::optional<Complex> newton_char(double t, Complex z, Complex seed) {
    Complex m = seed;
    for (int it = 0; it < 60; ++it) {
        Complex f = char_eq(t, m, z);
        // residual acceptance keeps near-double roots (support edges)
        // reachable, where |dm| plateaus at sqrt(eps)
        if (std::abs(f) <= 1e-13 * (1.0 + std::abs(z))) return m;
        Complex fp = char_eq_prime(t, m);
        if (std::abs(fp) < 1e-300) return std::nullopt;
        Complex dm = f / fp;
        m -= dm;
        if (!std::isfinite(m.real()) || !std::isfinite(m.imag())) return std::nullopt;
        if (std::abs(dm) <= 1e-14 * (1.0 + std::abs(m))) return m;
    }
    return std::nullopt;
}

double char_residual(double t, Complex m, Complex z) {
    return std::abs(char_eq(t, m, z)) / (1.0 + std::abs(z));
}

// Real root M > 1 of e^{2tM}(M-1)/(M+1) = 1, i.e. the boundary value of
// M_t at phi = 0 where the transform is real.
double real_root_phi0(double t) {
    auto f = [t](double m) { return 2.0 * t * m + std::log((m - 1.0) / (m + 1.0)); };
    double hi = 2.0 + 2.0 / t;
    while (f(hi) <= 0.0) hi *= 2.0;
    return special::bracketed_root(f, 1.0 + 1e-13, hi, 1e-15);
}

struct PolySeg {
    Complex a, b;
};

double seg_distance(Complex p, Complex a, Complex b) {
    Complex ab = b - a;
    double den = std::norm(ab);
    if (den == 0.0) return std::abs(p - a);
    double s = ((p - a).real() * ab.real() + (p - a).imag() * ab.imag()) / den;
    s = std::clamp(s, 0.0, 1.0);
    return std::abs(p - (a + s * ab));
}

// Even-odd crossing test with a horizontal ray to the right.
bool point_in_polygon(Complex p, const std::vector<Complex>& poly) {
    bool inside = false;
    std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        double yi = poly[i].imag(), yj = poly[j].imag();
        double xi = poly[i].real(), xj = poly[j].real();
        if ((yi > p.imag()) != (yj > p.imag())) {
            double xc = xi + (p.imag() - yi) / (yj - yi) * (xj - xi);
            if (p.real() < xc) inside = !inside;
        }
    }
    return inside;
}

double poly_distance(Complex p, const std::vector<Complex>& poly) {
    double d = std::numeric_limits<double>::infinity();
    std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        d = std::min(d, seg_distance(p, poly[j], poly[i]));
    return d;
}

// x / sinh x, stable through x = 0.
double u_of_x(double x) {
    if (std::abs(x) < 1e-4) {
        double x2 = x * x;
        return 1.0 - x2 / 6.0 + 7.0 * x2 * x2 / 360.0;
    }
    return x / std::sinh(x);
}

// psi_t(x) = (1/2) arccos((x/2t) sinh x - cosh x), evaluated through the
// endpoints where the arccos argument grazes +-1.  Near the lower end the
// argument approaches -1 (psi -> pi/2); near x_max it approaches +1
// (psi -> 0).  Both are rewritten with exact cancellations.
double psi_of_x(double t, double x, double x_lo, double x_hi) {
    if (x <= 0.5 * (x_lo + x_hi)) {
        // 1 + arg = (x/2t) sinh x - (cosh x - 1) = delta, psi = pi/2 - asin(sqrt(delta/2))
        double sh = std::sinh(x);
        double delta = (x / (2.0 * t)) * sh - 2.0 * std::pow(std::sinh(0.5 * x), 2);
        delta = std::max(delta, 0.0);
        double s = std::min(1.0, std::sqrt(0.5 * delta));
        return 0.5 * kPi - std::asin(s);
    }
    // 1 - arg = cosh x + 1 - (x/2t) sinh x = 2 cosh^2(x/2) (1 - (x/2t) tanh(x/2))
    double c = std::cosh(0.5 * x);
    double eps = 1.0 - (x / (2.0 * t)) * std::tanh(0.5 * x);
    eps = std::max(eps, 0.0);
    double s = std::min(1.0, c * std::sqrt(eps));
    return std::asin(s);
}

Complex gamma_point(double t, double x, double x_lo, double x_hi) {
    double u = u_of_x(x);
    double psi = psi_of_x(t, x, x_lo, x_hi);
    Complex iexp = std::exp(Complex(0.0, -psi) - 0.5 * u * std::exp(Complex(0.0, 2.0 * psi)));
    Complex w = -std::sqrt(t * std::exp(-t) / u) * iexp;
    Complex phi = 2.0 * std::asinh(w);
    return std::exp(phi);
}

// Sample grid on [lo, hi]: Chebyshev nodes plus a 4x subdivision of the
// panels lying in the outer 10% at each end, where the curves bend
// sharply.
std::vector<double> end_weighted_grid(double lo, double hi, int n) {
    std::vector<double> base(static_cast<std::size_t>(n));
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int k = 0; k < n; ++k)
        base[static_cast<std::size_t>(k)] = mid - half * std::cos(kPi * k / (n - 1));
    base.front() = lo;
    base.back() = hi;
    std::vector<double> out;
    out.reserve(base.size() * 2);
    double cut_lo = lo + 0.1 * (hi - lo);
    double cut_hi = hi - 0.1 * (hi - lo);
    for (std::size_t k = 0; k + 1 < base.size(); ++k) {
        double a = base[k], b = base[k + 1];
        out.push_back(a);
        if (b <= cut_lo || a >= cut_hi)
            for (int j = 1; j < 4; ++j) out.push_back(a + (b - a) * j / 4.0);
    }
    out.push_back(hi);
    return out;
}

double simpson(const std::vector<double>& f, double h) {
    // composite Simpson; f.size() must be odd
    double s = f.front() + f.back();
    for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k] * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

Complex m0(Complex z) {
    if (z == Complex(1.0, 0.0)) throw SingularEvaluation("m0: pole at z = 1");
    return (1.0 + z) / (1.0 - z);
}

Complex stieltjes_limit(double t, Complex z, std::optional<Complex> seed_guess) {
    if (t < 0.0) throw DomainError("stieltjes_limit: t must be nonnegative");
    if (std::abs(z - 1.0) < 1e-12 && t == 0.0)
        throw SingularEvaluation("stieltjes_limit: pole at z = 1, t = 0");
    if (std::abs(z) < 1e-300) return Complex(1.0, 0.0);

    Complex m;
    double t0;
    if (seed_guess) {
        m = *seed_guess;
        t0 = t;
    } else {
        m = m0(z);
        t0 = 0.0;
    }

    double tau = t0;
    double step = std::min(0.05, std::max(t - t0, 1e-3));
    while (tau < t) {
        double next = std::min(t, tau + step);
        auto sol = newton_char(next, z, m);
        if (!sol) {
            step *= 0.5;
            if (step < 1e-9)
                throw ConvergenceError("stieltjes_limit: continuation stalled");
            continue;
        }
        m = *sol;
        tau = next;
        step = std::min(step * 2.0, 0.05);
    }
    if (seed_guess) {
        auto sol = newton_char(t, z, m);
        if (!sol) throw ConvergenceError("stieltjes_limit: seeded Newton failed");
        m = *sol;
    }
    if (char_residual(t, m, z) > 1e-10)
        throw ConvergenceError("stieltjes_limit: residual above tolerance");
    return m;
}

Complex map_h(double t, Complex z) {
    if (t <= 0.0) throw DomainError("map_h: t must be positive");
    Complex w = special::lambert_w0(lambda_t(t, z) * std::exp(-t));
    Complex x = w / t;
    Complex h;
    if (std::abs(x) < 1e-4) {
        h = x * (0.25 + x * (-0.125 + x * (5.0 / 64.0 - x * 7.0 / 128.0)));
    } else {
        h = 1.0 + (2.0 / x) * (1.0 - std::sqrt(1.0 + x));
    }
    if (std::abs(h) > 1.0 + 1e-9)
        throw DomainError("map_h: point maps outside the closed disk");
    return h;
}

Complex map_omega(double t, Complex z) {
    if (std::abs(z - 1.0) < 1e-14)
        throw SingularEvaluation("map_omega: pole at z = 1");
    return z * std::exp(2.0 * t * (1.0 + z) / (1.0 - z));
}

Complex g_inf(double t, Complex z) {
    if (t == 0.0) return z;
    if (std::abs(z) < 1e-300) return z;
    return map_omega(t, map_h(t, z));
}

Complex g_inf_direct(double t, Complex z) {
    if (t == 0.0) return z;
    if (std::abs(z) < 1e-300) return z;
    Complex w = special::lambert_w0(lambda_t(t, z) * std::exp(-t));
    Complex s = std::sqrt(1.0 + w / t);
    Complex h = 1.0 + (2.0 * t / w) * (1.0 - s);
    return h * std::exp(2.0 * t * s);
}

std::vector<Complex> boundary_stieltjes_sweep(double t, const std::vector<double>& phis) {
    if (t <= 0.0) throw DomainError("boundary_stieltjes_sweep: t must be positive");
    std::vector<Complex> out;
    out.reserve(phis.size());
    Complex m(real_root_phi0(t), 0.0);
    double phi = 0.0;
    for (double target : phis) {
        if (target < phi - 1e-15)
            throw DomainError("boundary_stieltjes_sweep: grid must ascend");
        double step = std::max(target - phi, 1e-4);
        while (phi < target - 1e-15) {
            double next = std::min(target, phi + step);
            auto sol = newton_char(t, Complex(std::cos(next), std::sin(next)), m);
            if (sol && char_residual(t, *sol, std::polar(1.0, next)) <= 1e-9) {
                m = *sol;
                phi = next;
                step = std::min(step * 2.0, 0.02);
            } else {
                step *= 0.5;
                if (step < 1e-12)
                    throw ConvergenceError("boundary_stieltjes_sweep: stalled");
            }
        }
        out.push_back(m);
    }
    return out;
}

double density(double t, double phi, double edge_tol) {
    if (t <= 0.0) throw DomainError("density: t must be positive");
    phi = std::remainder(phi, 2.0 * kPi);
    double aphi = std::abs(phi);
    double edge = kPi;
    if (t < 1.0) {
        edge = std::acos(1.0 - 2.0 * t) + 2.0 * std::sqrt(t * (1.0 - t));
        if (aphi >= edge - edge_tol) return 0.0;
    }
    try {
        Complex m = boundary_stieltjes_sweep(t, {aphi}).front();
        return std::max(0.0, m.real() / (2.0 * kPi));
    } catch (const ConvergenceError&) {
        if (edge - aphi < 1e-4) return 0.0; // degenerate Newton at a support edge
        throw;
    }
}

double density_mass(double t, int n_panels) {
    if (n_panels % 2) ++n_panels;
    double edge = (t < 1.0) ? std::acos(1.0 - 2.0 * t) + 2.0 * std::sqrt(t * (1.0 - t)) : kPi;
    // substitute phi = edge - u^2: the sqrt edge vanishing becomes linear in u
    double ulim = std::sqrt(edge);
    std::vector<double> phis(static_cast<std::size_t>(n_panels + 1));
    for (int k = 0; k <= n_panels; ++k) {
        double u = ulim * k / n_panels;
        phis[static_cast<std::size_t>(k)] = std::max(0.0, edge - u * u);
    }
    std::reverse(phis.begin(), phis.end()); // ascending in phi for the sweep
    auto ms = boundary_stieltjes_sweep(t, phis);
    std::vector<double> f(phis.size());
    for (std::size_t k = 0; k < phis.size(); ++k) {
        double u = ulim * static_cast<double>(n_panels - static_cast<int>(k)) / n_panels;
        double rho = std::max(0.0, ms[k].real() / (2.0 * kPi));
        f[phis.size() - 1 - k] = 2.0 * u * rho; // back in u order
    }
    return 2.0 * simpson(f, ulim / n_panels); // both half-arcs by symmetry
}

HullCurve boundary_gamma(double t, int n_samples) {
    if (t <= 0.0) throw DomainError("boundary_gamma: t must be positive");
    if (n_samples < 16) throw DomainError("boundary_gamma: too few samples");
    auto ext = special::solve_extents(t);
    double x_lo = (t > 1.0) ? *ext.x_min : 0.0;
    double x_hi = ext.x_max;

    HullCurve c;
    c.kind = CurveKind::Gamma;
    c.t = t;
    for (double x : end_weighted_grid(x_lo, x_hi, n_samples))
        c.samples.emplace_back(x, gamma_point(t, x, x_lo, x_hi));
    c.endpoint_out = c.samples.front().second;
    c.endpoint_in = c.samples.back().second;
    if (t <= 1.0) {
        // exact limit at x = 0: psi = pi/2, u = 1, Phi = 2 asinh(i sqrt(t) e^{(1-t)/2})
        double s = std::sqrt(t) * std::exp(0.5 * (1.0 - t));
        c.endpoint_out = std::exp(Complex(0.0, 2.0 * std::asin(std::min(1.0, s))));
        c.samples.front().second = c.endpoint_out;
    }
    // inner endpoint is real: psi(x_max) = 0 exactly
    c.endpoint_in = Complex(c.endpoint_in.real(), 0.0);
    c.samples.back().second = c.endpoint_in;
    return c;
}

HullCurve boundary_gamma_tilde(double t, int n_samples) {
    if (t <= 0.0) throw DomainError("boundary_gamma_tilde: t must be positive");
    if (n_samples < 16) throw DomainError("boundary_gamma_tilde: too few samples");
    auto ext = special::solve_extents(t);
    double r_lo = ext.r_min;
    double r_hi = (t > 1.0) ? *ext.r_max : 1.0;

    HullCurve c;
    c.kind = CurveKind::GammaTilde;
    c.t = t;
    auto ft = [t](double r) {
        return t * (1.0 - r * r) / (r * std::log(r)) + (1.0 + r * r) / (2.0 * r);
    };
    for (double r : end_weighted_grid(r_lo, r_hi, n_samples)) {
        double f;
        if (t <= 1.0 && r >= 1.0 - 1e-12) {
            f = 1.0 - 2.0 * t; // limit of F_t(r) as r -> 1
            r = 1.0;
        } else {
            f = std::clamp(ft(r), -1.0, 1.0);
        }
        double th = std::acos(f);
        c.samples.emplace_back(r, std::polar(r, th));
    }
    c.endpoint_in = Complex(r_lo, 0.0); // F_t(r_min) = 1 exactly
    c.samples.front().second = c.endpoint_in;
    if (t <= 1.0) {
        c.endpoint_out = std::polar(1.0, std::acos(1.0 - 2.0 * t));
    } else {
        c.endpoint_out = Complex(-r_hi, 0.0); // F_t(r_max) = -1 exactly
    }
    c.samples.back().second = c.endpoint_out;
    // orient from outer endpoint inwards, matching boundary_gamma
    std::reverse(c.samples.begin(), c.samples.end());
    return c;
}

double gamma_angle_parameter(double t, double x) {
    auto ext = special::solve_extents(t);
    double x_lo = (t > 1.0) ? *ext.x_min : 0.0;
    if (x < x_lo - 1e-12 || x > ext.x_max + 1e-12)
        throw DomainError("gamma_angle_parameter: x outside the curve interval");
    return psi_of_x(t, std::clamp(x, x_lo, ext.x_max), x_lo, ext.x_max);
}

Complex short_time_cardioid(double t, double theta) {
    if (t <= 0.0) throw DomainError("short_time_cardioid: t must be positive");
    Complex e = std::exp(Complex(0.0, -theta) - 0.5 * std::exp(Complex(0.0, 2.0 * theta)));
    return 1.0 - 2.0 * std::sqrt(t) * e;
}

CriticalAngles critical_angles(double t) {
    if (t <= 0.0) throw DomainError("critical_angles: t must be positive");
    CriticalAngles a;
    if (t > 1.0) return a;
    a.theta_c = std::acos(std::clamp(1.0 - 2.0 * t, -1.0, 1.0));
    a.varphi_c = std::acos(std::clamp(1.0 - 2.0 * t * std::exp(1.0 - t), -1.0, 1.0));
    a.phi_c = *a.theta_c + 2.0 * std::sqrt(std::max(0.0, t * (1.0 - t)));
    return a;
}

Membership domain_membership(double t, Complex z, double geom_tol, int n_samples) {
    if (t <= 0.0) throw DomainError("domain_membership: t must be positive");
    if (std::abs(z) > 1.0 + 1e-12)
        throw DomainError("domain_membership: point outside the closed disk");
    auto g = boundary_gamma(t, n_samples);

    std::vector<Complex> poly;
    poly.reserve(g.samples.size() * 2 + 128);
    if (t <= 1.0) {
        // circle arc through z = 1 from -varphi_c to +varphi_c, then the
        // curve inwards, then its mirror back out
        double vc = std::arg(g.endpoint_out);
        int arc_n = 128;
        for (int k = 0; k <= arc_n; ++k)
            poly.push_back(std::polar(1.0, -vc + 2.0 * vc * k / arc_n));
        for (std::size_t k = 1; k < g.samples.size(); ++k)
            poly.push_back(g.samples[k].second);
        for (std::size_t k = g.samples.size(); k-- > 1;)
            poly.push_back(std::conj(g.samples[k].second));
    } else {
        for (auto& s : g.samples) poly.push_back(s.second);
        for (std::size_t k = g.samples.size(); k-- > 1;)
            poly.push_back(std::conj(g.samples[k - 1].second));
    }

    if (poly_distance(z, poly) < geom_tol) return Membership::Boundary;
    bool in_hull_region = point_in_polygon(z, poly);
    if (t > 1.0) {
        // the polygon encloses the inner component around the origin
        return in_hull_region ? Membership::Inside : Membership::Outside;
    }
    return in_hull_region ? Membership::Outside : Membership::Inside;
}

Topology topology(double t) {
    if (t <= 0.0) throw DomainError("topology: t must be positive");
    if (std::abs(t - 1.0) < 1e-12) return Topology::Critical;
    return t < 1.0 ? Topology::Disk : Topology::Annulus;
}

EdgeFit edge_fit(const HullCurve& curve, double angle_c, double window, double window_lo) {
    if (!(window > 0.0 && window < angle_c))
        throw DomainError("edge_fit: window must lie in (0, angle_c)");
    double lo = (window_lo > 0.0) ? window_lo : window * (0.02 / 0.15);
    std::vector<double> xs, ys;
    for (auto& [param, p] : curve.samples) {
        double ang = std::abs(std::arg(p));
        double delta = angle_c - ang;
        if (delta < lo || delta > window) continue;
        double d = 1.0 - std::abs(p);
        if (d <= 0.0) continue;
        xs.push_back(std::log(delta));
        ys.push_back(std::log(d));
    }
    if (xs.size() < 8) throw FitError("edge_fit: fewer than 8 samples in window");
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icept = (sy - slope * sx) / n;
    double rss = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        double r = ys[k] - (icept + slope * xs[k]);
        rss += r * r;
    }
    EdgeFit fit;
    fit.exponent = slope;
    fit.coefficient = std::exp(icept);
    fit.window_lo = lo;
    fit.window_hi = window;
    fit.residual = std::sqrt(rss / n);
    return fit;
}

double hydro_invariant(double t, Complex z, int n_panels) {
    if (t < 0.0) throw DomainError("hydro_invariant: t must be nonnegative");
    if (std::abs(z) >= 1.0) throw DomainError("hydro_invariant: point must be interior");
    if (std::abs(z) < 1e-300) throw SingularEvaluation("hydro_invariant: arg g undefined at 0");
    if (t < 1e-12) return -2.0 * std::arg(z - 1.0) + std::arg(z);
    if (n_panels % 2) ++n_panels;

    // Continue arg g_tau(z) and arg(g_tau(z) - 1) in tau from the principal
    // values at tau = 0, so the branch matches the t = 0 convention.
    int m = std::max(64, static_cast<int>(std::ceil(t / 0.005)));
    double arg_g = std::arg(z);
    double arg_g1 = std::arg(z - 1.0);
    Complex prev_g = z, prev_g1 = z - 1.0;
    for (int k = 1; k <= m; ++k) {
        Complex g = g_inf(t * k / m, z);
        arg_g += std::arg(g / prev_g);
        arg_g1 += std::arg((g - 1.0) / prev_g1);
        prev_g = g;
        prev_g1 = g - 1.0;
    }
    Complex gt = prev_g;

    double edge = (t < 1.0) ? std::acos(1.0 - 2.0 * t) + 2.0 * std::sqrt(t * (1.0 - t)) : kPi;
    double ulim = std::sqrt(edge);
    // nodes phi_k = edge - u^2 ascending from 0 (u descending)
    std::vector<double> phis(static_cast<std::size_t>(n_panels + 1));
    for (int k = 0; k <= n_panels; ++k) {
        double u = ulim * (n_panels - k) / static_cast<double>(n_panels);
        phis[static_cast<std::size_t>(k)] = std::max(0.0, edge - u * u);
    }
    auto ms = boundary_stieltjes_sweep(t, phis);

    // arg(g - e^{i phi}) continued in phi from the tau-continued anchor at
    // phi = 0, separately towards each support edge.
    std::vector<double> f_pos(phis.size()), f_neg(phis.size());
    double a_pos = arg_g1, a_neg = arg_g1;
    Complex prev_pos = gt - 1.0, prev_neg = gt - 1.0;
    for (std::size_t k = 0; k < phis.size(); ++k) {
        double u = ulim * static_cast<double>(n_panels - static_cast<int>(k)) / n_panels;
        double rho = std::max(0.0, ms[k].real() / (2.0 * kPi));
        Complex cur = gt - std::polar(1.0, phis[k]);
        a_pos += std::arg(cur / prev_pos);
        prev_pos = cur;
        Complex curn = gt - std::polar(1.0, -phis[k]);
        a_neg += std::arg(curn / prev_neg);
        prev_neg = curn;
        // integrand in the u variable, ascending in u after re-indexing
        std::size_t j = phis.size() - 1 - k;
        f_pos[j] = 2.0 * u * a_pos * rho;
        f_neg[j] = 2.0 * u * a_neg * rho;
    }
    double integral = simpson(f_pos, ulim / n_panels) + simpson(f_neg, ulim / n_panels);
    return -2.0 * integral + arg_g;
}

} // namespace rsle::hydro
