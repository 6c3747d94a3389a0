#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "rsle/dyson.hpp"
#include "rsle/errors.hpp"

namespace rsle::loewner {

using Complex = std::complex<double>;
using dyson::AngleVector;
using dyson::DrivingPath;

/// Loewner state of one tracked interior point.  The log fields carry
/// continuous branches accumulated from the ODE increments; they are never
/// recomputed from principal values after t = 0.
struct FlowPoint {
    Complex z0;
    Complex g;
    Complex log_dg{0.0, 0.0};         // log g'_t(z0)
    Complex log_g;                    // log g_t(z0)
    std::vector<Complex> log_diffs;   // log(g_t(z0) - X_t^(i))
    std::optional<double> swallowed_at;

    bool swallowed() const { return swallowed_at.has_value(); }
};

struct EvolveOptions {
    double swallow_eps = 1e-4;
    /// Per sub-step, |dg| may not exceed this fraction of min_i |g - X_i|.
    double max_step_fraction = 0.1;
    int max_halvings = 48;
    /// Force RK4 even for stochastic paths (default: RK4 iff deterministic).
    std::optional<bool> use_rk4;
};

/// Radial multiple Loewner vector field, Psi(z, x) = -z (z + x)/(z - x).
Complex loewner_field(Complex g, const AngleVector& state);

/// Initial FlowPoint at t = 0 (principal-branch seeds for the logs).
FlowPoint make_flow_point(Complex z0, const AngleVector& state0);

/// Integrate all tracked points through the whole driving path, recording a
/// snapshot at every saved path time.  Driving is interpolated piecewise
/// constant (left endpoint); swallowed points are frozen.
std::vector<std::vector<FlowPoint>> evolve(const std::vector<Complex>& points,
                                           const DrivingPath& path,
                                           const EvolveOptions& opts = {});

/// Same integration but keeping only the state at the final time (or at the
/// swallow time) per point.
std::vector<FlowPoint> evolve_final(const std::vector<Complex>& points,
                                    const DrivingPath& path,
                                    const EvolveOptions& opts = {});

/// Inverse map g_t^{-1}(target) by integrating the time-reversed field
/// dh/ds = +sum_i h (h + X_{t-s})/(h - X_{t-s}) from h(0) = target.
Complex reverse_flow(Complex target, const DrivingPath& path, double t,
                     const EvolveOptions& opts = {});

/// Trace-tip estimate eta^(i)(t) ~ g_t^{-1}(r X_t^(i)).
Complex trace_tip(const DrivingPath& path, double t, std::size_t i, double r,
                  const EvolveOptions& opts = {});

/// Grid classification of D_t vs the hull K_t.
struct HullMask {
    int resolution = 0;
    double lo = -1.0, hi = 1.0;
    std::vector<Complex> points;                      // grid points inside D
    std::vector<std::optional<double>> swallow_time;  // empty = interior at t

    Complex grid_point(int ix, int iy) const;
};

HullMask hull_mask(int resolution, const DrivingPath& path, double t,
                   const EvolveOptions& opts = {}, int threads = 0);

} // namespace rsle::loewner
