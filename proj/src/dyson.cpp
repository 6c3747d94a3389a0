#include "rsle/dyson.hpp"

#include <algorithm>
#include <cmath>

namespace rsle::dyson {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
} // namespace

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed ^ (0xd1342543de82ef95ull * (index + 1));
    return splitmix64(x);
}

std::uint64_t NormalRng::next_u64() { return splitmix64(state_); }

double NormalRng::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box--Muller on (0,1) uniforms.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    const double u2 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

double AngleVector::min_cyclic_gap() const {
    const std::size_t n = angles.size();
    if (n <= 1) return kTwoPi;
    double gmin = kTwoPi - (angles[n - 1] - angles[0]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        gmin = std::min(gmin, angles[i + 1] - angles[i]);
    }
    return gmin;
}

std::size_t DrivingPath::index_at(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 0;
    return static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
}

void cot_drift(const std::vector<double>& angles, std::vector<double>& out) {
    const std::size_t n = angles.size();
    out.assign(n, 0.0);
    if (n < 2) return;
    // cot((a-b)/2) through half-angle sines/cosines: one transcendental pair
    // per particle instead of per pair.
    static thread_local std::vector<double> s, c;
    s.resize(n);
    c.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::sin(0.5 * angles[i]);
        c[i] = std::cos(0.5 * angles[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double num = c[i] * c[j] + s[i] * s[j];
            const double den = s[i] * c[j] - c[i] * s[j];
            const double cot = num / den;
            out[i] += cot;
            out[j] -= cot;
        }
    }
    for (std::size_t i = 0; i < n; ++i) out[i] *= 2.0;
}

AngleVector spread_start(std::size_t n, double eps0) {
    AngleVector v;
    v.angles.resize(n);
    if (n == 1) {
        v.angles[0] = 0.0;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) {
        v.angles[i] = -eps0 + 2.0 * eps0 * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

namespace {

struct Stepper {
    double sigma; // noise scale, 0 for deterministic flow
    double gap_floor;
    int max_halvings;
    std::vector<NormalRng>* rngs = nullptr; // per-particle bridge streams

    std::vector<double> drift, stage, k1, k2, k3, k4;

    // Euler--Maruyama sub-step with recursive Brownian-bridge halving.
    void em_step(std::vector<double>& theta, double h, std::vector<double>& db, int depth) {
        const std::size_t n = theta.size();
        const double gap0 = AngleVector{theta}.min_cyclic_gap();
        cot_drift(theta, drift);
        stage.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            stage[i] = theta[i] + drift[i] * h + sigma * db[i];
        }
        const double gap1 = AngleVector{stage}.min_cyclic_gap();
        if (gap1 >= 0.5 * gap0 && gap1 > gap_floor) {
            theta.swap(stage);
            return;
        }
        if (depth >= max_halvings) {
            throw CollisionError("simulate_dyson: minimum gap fell below gap_floor despite sub-stepping");
        }
        // Bridge refinement: db = db1 + db2 with the midpoint conditionally
        // Gaussian given the endpoint increment.
        std::vector<double> db1(n), db2(n);
        const double half_sd = std::sqrt(0.25 * h);
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = rngs ? (*rngs)[i].next() : 0.0;
            db1[i] = 0.5 * db[i] + half_sd * xi;
            db2[i] = db[i] - db1[i];
        }
        em_step(theta, 0.5 * h, db1, depth + 1);
        em_step(theta, 0.5 * h, db2, depth + 1);
    }

    // RK4 step with the same recursive gap guard (deterministic flow).
    void rk4_step(std::vector<double>& theta, double h, int depth) {
        const std::size_t n = theta.size();
        const double gap0 = AngleVector{theta}.min_cyclic_gap();
        stage.resize(n);
        cot_drift(theta, k1);
        for (std::size_t i = 0; i < n; ++i) stage[i] = theta[i] + 0.5 * h * k1[i];
        cot_drift(stage, k2);
        for (std::size_t i = 0; i < n; ++i) stage[i] = theta[i] + 0.5 * h * k2[i];
        cot_drift(stage, k3);
        for (std::size_t i = 0; i < n; ++i) stage[i] = theta[i] + h * k3[i];
        cot_drift(stage, k4);
        for (std::size_t i = 0; i < n; ++i) {
            stage[i] = theta[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        const double gap1 = AngleVector{stage}.min_cyclic_gap();
        if (gap1 >= 0.5 * gap0 && gap1 > gap_floor) {
            theta.swap(stage);
            return;
        }
        if (depth >= max_halvings) {
            throw CollisionError("calogero_flow: minimum gap fell below gap_floor despite sub-stepping");
        }
        rk4_step(theta, 0.5 * h, depth + 1);
        rk4_step(theta, 0.5 * h, depth + 1);
    }
};

void validate_state(const AngleVector& init) {
    if (init.size() == 0) throw DomainError("dyson: N must be >= 1");
    if (init.size() >= 2 && init.min_cyclic_gap() <= 0.0) {
        throw DomainError("dyson: initial angles must be strictly ordered on the circle");
    }
}

} // namespace

DrivingPath simulate_dyson(std::size_t n, double beta, const AngleVector& init,
                           double horizon, double dt, std::uint64_t seed,
                           const SdeOptions& opts) {
    if (n != init.size()) throw DomainError("simulate_dyson: n does not match init");
    if (beta < 1.0 && !opts.allow_collisions) {
        throw DomainError("simulate_dyson: beta < 1 requires the collision override");
    }
    if (beta <= 0.0) throw DomainError("simulate_dyson: beta must be positive");
    if (horizon <= 0.0 || dt <= 0.0) throw DomainError("simulate_dyson: horizon and dt must be positive");
    validate_state(init);

    std::vector<NormalRng> rngs;
    rngs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) rngs.emplace_back(split_seed(seed, i));

    Stepper st;
    st.sigma = std::sqrt(8.0 / beta);
    st.gap_floor = opts.gap_floor;
    st.max_halvings = opts.max_halvings;
    st.rngs = &rngs;

    DrivingPath path;
    path.beta = beta;
    path.seed = seed;
    path.times.push_back(0.0);
    path.states.push_back(init);

    std::vector<double> theta = init.angles;
    std::vector<double> db(n);
    const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-12));
    double t = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double h = std::min(dt, horizon - t);
        const double sd = std::sqrt(h);
        for (std::size_t i = 0; i < n; ++i) db[i] = sd * rngs[i].next();
        st.em_step(theta, h, db, 0);
        t = (k + 1 == n_steps) ? horizon : t + h;
        if ((k + 1) % static_cast<std::size_t>(opts.save_stride) == 0 || k + 1 == n_steps) {
            path.times.push_back(t);
            path.states.push_back(AngleVector{theta});
        }
    }
    return path;
}

DrivingPath calogero_flow(const AngleVector& init, double horizon, double dt,
                          const SdeOptions& opts) {
    if (init.size() == 0) throw DomainError("calogero_flow: N must be >= 1");
    if (horizon <= 0.0 || dt <= 0.0) throw DomainError("calogero_flow: horizon and dt must be positive");

    AngleVector start = init;
    if (init.size() >= 2 && init.min_cyclic_gap() < 1e-12) {
        // Single-source start: regularize before the first step.
        const double center = init.angles[0];
        start = spread_start(init.size());
        for (auto& a : start.angles) a += center;
    }

    Stepper st;
    st.sigma = 0.0;
    st.gap_floor = opts.gap_floor;
    st.max_halvings = opts.max_halvings;

    DrivingPath path;
    path.times.push_back(0.0);
    path.states.push_back(start);

    std::vector<double> theta = start.angles;
    const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-12));
    double t = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double h = std::min(dt, horizon - t);
        st.rk4_step(theta, h, 0);
        t = (k + 1 == n_steps) ? horizon : t + h;
        if ((k + 1) % static_cast<std::size_t>(opts.save_stride) == 0 || k + 1 == n_steps) {
            path.times.push_back(t);
            path.states.push_back(AngleVector{theta});
        }
    }
    return path;
}

Complex empirical_stieltjes(const AngleVector& state, Complex z, double eps) {
    const std::size_t n = state.size();
    Complex sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Complex x = state.point(i);
        if (std::abs(x - z) < eps) {
            throw SingularEvaluation("empirical_stieltjes: z coincides with a driving point");
        }
        sum += (x + z) / (x - z);
    }
    return sum / static_cast<double>(n);
}

double hamiltonian(const MomentumVector& p, const AngleVector& theta) {
    const std::size_t n = theta.size();
    if (p.momenta.size() != n) throw DomainError("hamiltonian: mismatched lengths");
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += 0.5 * p.momenta[i] * p.momenta[i];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = std::sin(0.5 * (theta.angles[i] - theta.angles[j]));
            if (s == 0.0) throw SingularEvaluation("hamiltonian: coincident angles");
            e -= 4.0 / (s * s);
        }
    }
    return e;
}

} // namespace rsle::dyson
