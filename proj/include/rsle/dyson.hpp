#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "rsle/errors.hpp"

namespace rsle::dyson {

using Complex = std::complex<double>;

/// Unwrapped angles Theta_i of the driving points X_i = exp(i Theta_i).
/// Valid states keep the cyclic order of the particles.
struct AngleVector {
    std::vector<double> angles;

    std::size_t size() const { return angles.size(); }
    Complex point(std::size_t i) const {
        return std::polar(1.0, angles[i]);
    }
    /// Smallest cyclic gap between consecutive particles (2*pi for N = 1).
    double min_cyclic_gap() const;
};

struct MomentumVector {
    std::vector<double> momenta;
};

/// One realization of the driving processes (or a deterministic flow),
/// saved on a strictly increasing time grid starting at 0.
struct DrivingPath {
    std::vector<double> times;
    std::vector<AngleVector> states;
    std::optional<double> beta;  // absent for deterministic flows
    std::optional<std::uint64_t> seed;

    std::size_t n_particles() const { return states.empty() ? 0 : states.front().size(); }
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
    /// State index for the piecewise-constant (left endpoint) interpolation at time t.
    std::size_t index_at(double t) const;
};

struct SdeOptions {
    double gap_floor = 1e-9;
    bool allow_collisions = false; // permits beta < 1
    int max_halvings = 30;
    /// Save every k-th top-level step (1 = save all).
    int save_stride = 1;
};

/// Euler--Maruyama simulation of the circular beta-Dyson system
///   dTheta_i = sqrt(8/beta) dB_i + 2 sum_{j != i} cot((Theta_i - Theta_j)/2) dt
/// with recursive step-halving (Brownian-bridge refinement) whenever a
/// proposed step would drop the minimum cyclic gap below half its current
/// value.  Deterministic given (seed, dt, parameters).
DrivingPath simulate_dyson(std::size_t n, double beta, const AngleVector& init,
                           double horizon, double dt, std::uint64_t seed,
                           const SdeOptions& opts = {});

/// Deterministic kappa -> 0 flow dTheta_i/dt = 2 sum cot((Theta_i-Theta_j)/2),
/// integrated with classical RK4.  A coincident start is spread uniformly
/// over [-1e-6, 1e-6] before the first step.
DrivingPath calogero_flow(const AngleVector& init, double horizon, double dt,
                          const SdeOptions& opts = {});

/// Empirical circular Stieltjes transform (1/N) sum (x_i + z)/(x_i - z).
Complex empirical_stieltjes(const AngleVector& state, Complex z, double eps = 1e-12);

/// Calogero--Sutherland energy sum p_i^2/2 - sum_{i<j} 4/sin^2((th_i-th_j)/2).
double hamiltonian(const MomentumVector& p, const AngleVector& theta);

/// Pairwise cot drift, 2 sum_{j != i} cot((Theta_i - Theta_j)/2) for each i.
void cot_drift(const std::vector<double>& angles, std::vector<double>& out);

/// Equispaced initial condition used when approximating the single-source
/// start: N angles uniform over [-eps0, eps0].
AngleVector spread_start(std::size_t n, double eps0 = 1e-6);

/// Deterministic 64-bit stream splitting (seed, index) -> substream seed.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

/// Small self-contained normal generator so that paths are bit-identical
/// across standard libraries.
class NormalRng {
  public:
    explicit NormalRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    double next();

  private:
    std::uint64_t next_u64();
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace rsle::dyson
