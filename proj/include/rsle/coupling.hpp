#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rsle/dyson.hpp"
#include "rsle/errors.hpp"
#include "rsle/loewner.hpp"

namespace rsle::coupling {

using Complex = std::complex<double>;

/// Coupling-constant triple for the boundary field at parameter kappa:
///   xi_n = (n+2)/sqrt(kappa) - sqrt(kappa)/2,
///   chi  = 2/sqrt(kappa)     - sqrt(kappa)/2,
///   zeta = 1/sqrt(kappa).
struct CouplingConstants {
    double kappa = 0.0;
    int n = 0;
    double xi_n = 0.0;
    double chi = 0.0;
    double zeta = 0.0;
    /// offset added to xi_n; nonzero values are negative controls
    double xi_offset = 0.0;
};

CouplingConstants coupling_constants(int n, double kappa, double xi_offset = 0.0);

/// Green's function of the unit disk, log |(z conj(w) - 1)/(z - w)|.
double green_disk(Complex z, Complex w);

/// The pre-exponential field
///   h(z) = -(2/sqrt(kappa)) sum arg(g - X_i) + xi arg g - chi arg g' + zeta sum Theta_i
/// evaluated from a flow point carrying continuously tracked branches.
double observable(const CouplingConstants& c, const loewner::FlowPoint& fp,
                  const dyson::AngleVector& angles);

struct MartingalePointStats {
    Complex z;
    double mean_drift = 0.0;     // mean of h_tau - h_0 across paths
    double se = 0.0;             // batch-means standard error
    int paths_used = 0;
    int paths_excluded = 0;      // swallowed before the early-time cutoff
    double exclusion_rate = 0.0;
};

/// Monte Carlo check that h(z) is a (stopped) martingale under the
/// Dyson-driven flow: simulates `paths` drivers at inverse temperature
/// 8/kappa and reports the mean drift of h at each grid point.
std::vector<MartingalePointStats> martingale_test(
    int n, double kappa, const std::vector<Complex>& z_grid, double horizon,
    int paths, double dt, std::uint64_t seed, double xi_offset = 0.0,
    int threads = 0, int batches = 20);

struct QuadVariationStats {
    Complex z, w;
    double dt = 0.0;
    double mean_abs_defect = 0.0; // |realized covariation + G_{D_t} - G_D|
    double se = 0.0;
    int paths_used = 0;
};

/// Monte Carlo check of the quadratic-covariation balance
///   <h(z), h(w)>_t + G_{D_t}(g z, g w) = G_D(z, w).
QuadVariationStats quad_variation_test(int n, double kappa, Complex z, Complex w,
                                       double horizon, int paths, double dt,
                                       std::uint64_t seed, int threads = 0);

struct HadamardCheck {
    double lhs = 0.0; // finite-difference d/dt G_{D_t}(g z, g w) at t = 0
    double rhs = 0.0; // -Re((z+x)/(z-x)) Re((w+x)/(w-x))
    double defect = 0.0;
};

/// Hadamard derivative identity for a single constant driving point x on
/// the unit circle.
HadamardCheck hadamard_check(Complex z, Complex w, Complex x, double delta = 1e-4);

/// Deterministic integral of motion
///   F = -2 sum arg(g - X_i) + (n+2) arg g - 2 arg g'
/// evaluated at time t along a deterministic driving path.
double classical_invariant(const dyson::DrivingPath& path, Complex z, double t);

} // namespace rsle::coupling
