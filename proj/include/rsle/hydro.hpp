#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "rsle/errors.hpp"
#include "rsle/special.hpp"

namespace rsle::hydro {

using Complex = std::complex<double>;

enum class CurveKind { Gamma, GammaTilde };
enum class Membership { Inside, Outside, Boundary };
enum class Topology { Disk, Critical, Annulus };

/// Discretized hull-boundary curve (upper half); param is x for gamma and
/// r for gamma-tilde.
struct HullCurve {
    std::vector<std::pair<double, Complex>> samples;
    Complex endpoint_out;
    Complex endpoint_in;
    CurveKind kind = CurveKind::Gamma;
    double t = 0.0;
};

/// theta_c = arccos(1-2t), varphi_c = arccos(1-2t e^{1-t}),
/// phi_c = arccos(1-2t) + 2 sqrt(t(1-t)); all defined for t <= 1 only.
struct CriticalAngles {
    std::optional<double> theta_c;
    std::optional<double> varphi_c;
    std::optional<double> phi_c;
};

struct EdgeFit {
    double exponent = 0.0;
    double coefficient = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    double residual = 0.0;
};

/// Stieltjes transform of the point mass at 1: (1+z)/(1-z).
Complex m0(Complex z);

/// Hydrodynamic Stieltjes transform M_t(z) on the characteristics branch,
/// solved from z = e^{2tM}(M-1)/(M+1) by Newton continuation in t from
/// M_0(z) (or from seed_guess when provided).
Complex stieltjes_limit(double t, Complex z, std::optional<Complex> seed_guess = std::nullopt);

/// h_t(z) = 1 + (2t/W)(1 - sqrt(1 + W/t)) with W = W0(Lambda_t(z) e^{-t}),
/// Lambda_t(z) = 4 t z/(1-z)^2; removable singularity at z = 0.
Complex map_h(double t, Complex z);

/// Omega_t(z) = z exp(2t (1+z)/(1-z)).
Complex map_omega(double t, Complex z);

/// Hydrodynamic Loewner map g_t = Omega_t o h_t.
Complex g_inf(double t, Complex z);

/// Direct (un-factorized) expression of the same map; used for cross-checks.
Complex g_inf_direct(double t, Complex z);

/// Boundary density rho_t(e^{i phi}) of the limit measure; 0 outside the
/// support arc for t < 1.  edge_tol widens the zero fallback window at the
/// support edges where the boundary Newton iteration degenerates.
double density(double t, double phi, double edge_tol = 1e-9);

/// Boundary values of M_t on an ascending grid of angles in [0, pi],
/// computed by one Newton continuation sweep in phi from phi = 0.
std::vector<Complex> boundary_stieltjes_sweep(double t, const std::vector<double>& phis);

/// Total mass of rho_t by quadrature (edge-desingularized Simpson).
double density_mass(double t, int n_panels = 4096);

/// Hull-boundary curve gamma_t^+ sampled over x in [x_lo, x_max].
HullCurve boundary_gamma(double t, int n_samples);

/// Pre-image curve gamma-tilde_t (upper half), sampled over r.
HullCurve boundary_gamma_tilde(double t, int n_samples);

CriticalAngles critical_angles(double t);

/// Interior angle parameter psi_t(x) of the boundary curve (stable form).
double gamma_angle_parameter(double t, double x);

/// Short-time cardioid approximation 1 - 2 sqrt(t) exp(-i theta - e^{2 i theta}/2)
/// of the hull boundary, parametrized by theta = psi_t(x).
Complex short_time_cardioid(double t, double theta);

Membership domain_membership(double t, Complex z, double geom_tol = 1e-6,
                             int n_samples = 512);

Topology topology(double t);

/// Log-log power-law fit of 1-R against (angle_c - angle) near the outer
/// endpoint; samples with angle_c - angle in [lo_frac, hi_frac] * angle_c.
EdgeFit edge_fit(const HullCurve& curve, double angle_c, double window,
                 double window_lo = -1.0);

/// Hydrodynamic integral of motion
///   hbar_t(z) = -2 int arg(g_t(z) - x) mu_t(dx) + arg g_t(z)
/// with branches continued from t = 0; constancy in t is the tested
/// property.
double hydro_invariant(double t, Complex z, int n_panels = 512);

} // namespace rsle::hydro
