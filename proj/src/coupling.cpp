#include "rsle/coupling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

namespace rsle::coupling {

namespace {

double sum_angles(const dyson::AngleVector& a) {
    double s = 0.0;
    for (double th : a.angles) s += th;
    return s;
}

dyson::DrivingPath truncate_path(const dyson::DrivingPath& path, double t) {
    dyson::DrivingPath out;
    out.beta = path.beta;
    out.seed = path.seed;
    const std::size_t k = path.index_at(t);
    out.times.assign(path.times.begin(), path.times.begin() + k + 1);
    out.states.assign(path.states.begin(), path.states.begin() + k + 1);
    if (out.times.back() < t) {
        out.times.push_back(t);
        out.states.push_back(path.states[k]);
    }
    return out;
}

struct BatchStats {
    double mean = 0.0;
    double se = 0.0;
};

BatchStats batch_means(const std::vector<double>& xs, int batches) {
    BatchStats st;
    if (xs.empty()) return st;
    for (double x : xs) st.mean += x;
    st.mean /= static_cast<double>(xs.size());
    const int nb = std::min<int>(batches, static_cast<int>(xs.size()));
    if (nb < 2) return st;
    std::vector<double> bm(static_cast<std::size_t>(nb), 0.0);
    std::vector<int> cnt(static_cast<std::size_t>(nb), 0);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        std::size_t b = k * static_cast<std::size_t>(nb) / xs.size();
        bm[b] += xs[k];
        ++cnt[b];
    }
    double var = 0.0;
    for (int b = 0; b < nb; ++b) {
        bm[static_cast<std::size_t>(b)] /= std::max(1, cnt[static_cast<std::size_t>(b)]);
        double d = bm[static_cast<std::size_t>(b)] - st.mean;
        var += d * d;
    }
    var /= (nb - 1);
    st.se = std::sqrt(var / nb);
    return st;
}

void parallel_for_paths(int paths, int threads, const std::function<void(int)>& body) {
    const int n_threads = threads > 0
                              ? threads
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::atomic<int> cursor{0};
    auto work = [&]() {
        for (;;) {
            int p = cursor.fetch_add(1);
            if (p >= paths) return;
            body(p);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

} // namespace

CouplingConstants coupling_constants(int n, double kappa, double xi_offset) {
    if (kappa <= 0.0) throw DomainError("coupling_constants: kappa must be positive");
    if (n < 1) throw DomainError("coupling_constants: n must be >= 1");
    CouplingConstants c;
    c.kappa = kappa;
    c.n = n;
    const double sk = std::sqrt(kappa);
    c.xi_n = (n + 2.0) / sk - sk / 2.0;
    c.chi = 2.0 / sk - sk / 2.0;
    c.zeta = 1.0 / sk;
    c.xi_offset = xi_offset;
    return c;
}

double green_disk(Complex z, Complex w) {
    if (std::abs(z - w) < 1e-300) throw SingularEvaluation("green_disk: coincident points");
    return std::log(std::abs((z * std::conj(w) - 1.0) / (z - w)));
}

double observable(const CouplingConstants& c, const loewner::FlowPoint& fp,
                  const dyson::AngleVector& angles) {
    if (fp.log_diffs.size() != static_cast<std::size_t>(c.n))
        throw DomainError("observable: constants and flow point disagree on n");
    const double sk = std::sqrt(c.kappa);
    double s = 0.0;
    for (const Complex& ld : fp.log_diffs) s += ld.imag();
    return -(2.0 / sk) * s + (c.xi_n + c.xi_offset) * fp.log_g.imag() -
           c.chi * fp.log_dg.imag() + c.zeta * sum_angles(angles);
}

std::vector<MartingalePointStats> martingale_test(
    int n, double kappa, const std::vector<Complex>& z_grid, double horizon,
    int paths, double dt, std::uint64_t seed, double xi_offset, int threads,
    int batches) {
    if (paths < batches) throw DomainError("martingale_test: need at least one path per batch");
    const auto consts = coupling_constants(n, kappa, xi_offset);
    const double beta = 8.0 / kappa;

    // Start on a half-circle arc rather than equispaced: a rotationally
    // symmetric configuration makes E[d arg g] vanish, which would blind the
    // test to perturbations of xi.
    dyson::AngleVector init;
    init.angles.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        init.angles[static_cast<std::size_t>(i)] = 3.14159265358979323846 * i / n;

    std::vector<double> h0(z_grid.size());
    for (std::size_t q = 0; q < z_grid.size(); ++q)
        h0[q] = observable(consts, loewner::make_flow_point(z_grid[q], init), init);

    const double cutoff = 0.1 * horizon;
    // drift[q][p]: NaN marks an excluded (early-swallowed) path
    std::vector<std::vector<double>> drift(z_grid.size(),
                                           std::vector<double>(static_cast<std::size_t>(paths)));

    parallel_for_paths(paths, threads, [&](int p) {
        auto path = dyson::simulate_dyson(static_cast<std::size_t>(n), beta, init, horizon,
                                          dt, dyson::split_seed(seed, static_cast<std::uint64_t>(p)));
        auto finals = loewner::evolve_final(z_grid, path);
        for (std::size_t q = 0; q < z_grid.size(); ++q) {
            const auto& fp = finals[q];
            double tau = fp.swallowed_at.value_or(horizon);
            if (fp.swallowed() && tau < cutoff) {
                drift[q][static_cast<std::size_t>(p)] = std::nan("");
                continue;
            }
            const auto& angles = path.states[path.index_at(tau)];
            drift[q][static_cast<std::size_t>(p)] = observable(consts, fp, angles) - h0[q];
        }
    });

    std::vector<MartingalePointStats> out;
    out.reserve(z_grid.size());
    for (std::size_t q = 0; q < z_grid.size(); ++q) {
        MartingalePointStats st;
        st.z = z_grid[q];
        std::vector<double> kept;
        kept.reserve(drift[q].size());
        for (double d : drift[q]) {
            if (std::isnan(d))
                ++st.paths_excluded;
            else
                kept.push_back(d);
        }
        auto bs = batch_means(kept, batches);
        st.mean_drift = bs.mean;
        st.se = bs.se;
        st.paths_used = static_cast<int>(kept.size());
        st.exclusion_rate = static_cast<double>(st.paths_excluded) / paths;
        out.push_back(st);
    }
    return out;
}

QuadVariationStats quad_variation_test(int n, double kappa, Complex z, Complex w,
                                       double horizon, int paths, double dt,
                                       std::uint64_t seed, int threads) {
    const auto consts = coupling_constants(n, kappa);
    const double beta = 8.0 / kappa;
    const double g0 = green_disk(z, w);

    dyson::AngleVector init;
    init.angles.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        init.angles[static_cast<std::size_t>(i)] = 2.0 * 3.14159265358979323846 * i / n;

    std::vector<double> defects(static_cast<std::size_t>(paths));
    parallel_for_paths(paths, threads, [&](int p) {
        auto path = dyson::simulate_dyson(static_cast<std::size_t>(n), beta, init, horizon,
                                          dt, dyson::split_seed(seed, static_cast<std::uint64_t>(p)));
        auto snaps = loewner::evolve({z, w}, path);
        const auto& sz = snaps[0];
        const auto& sw = snaps[1];
        // covariation up to the last snapshot where both points survive
        std::size_t last = path.times.size() - 1;
        for (std::size_t k = 0; k < path.times.size(); ++k) {
            if (sz[k].swallowed() || sw[k].swallowed()) {
                last = k > 0 ? k - 1 : 0;
                break;
            }
        }
        double cov = 0.0;
        double hz_prev = observable(consts, sz[0], path.states[0]);
        double hw_prev = observable(consts, sw[0], path.states[0]);
        for (std::size_t k = 1; k <= last; ++k) {
            double hz = observable(consts, sz[k], path.states[k]);
            double hw = observable(consts, sw[k], path.states[k]);
            cov += (hz - hz_prev) * (hw - hw_prev);
            hz_prev = hz;
            hw_prev = hw;
        }
        double g_end = green_disk(sz[last].g, sw[last].g);
        defects[static_cast<std::size_t>(p)] = std::abs(cov + g_end - g0);
    });

    QuadVariationStats st;
    st.z = z;
    st.w = w;
    st.dt = dt;
    auto bs = batch_means(defects, 20);
    st.mean_abs_defect = bs.mean;
    st.se = bs.se;
    st.paths_used = paths;
    return st;
}

HadamardCheck hadamard_check(Complex z, Complex w, Complex x, double delta) {
    if (std::abs(std::abs(x) - 1.0) > 1e-12)
        throw DomainError("hadamard_check: driving point must lie on the unit circle");
    dyson::AngleVector st;
    st.angles = {std::arg(x)};
    dyson::DrivingPath path;
    path.times = {0.0, delta, 2.0 * delta};
    path.states = {st, st, st};

    auto snaps = loewner::evolve({z, w}, path);
    double g0 = green_disk(z, w);
    double g1 = green_disk(snaps[0][1].g, snaps[1][1].g);
    double g2 = green_disk(snaps[0][2].g, snaps[1][2].g);

    HadamardCheck out;
    out.lhs = (4.0 * g1 - g2 - 3.0 * g0) / (2.0 * delta);
    out.rhs = -(((z + x) / (z - x)).real()) * (((w + x) / (w - x)).real());
    out.defect = out.lhs - out.rhs;
    return out;
}

double classical_invariant(const dyson::DrivingPath& path, Complex z, double t) {
    if (path.beta)
        throw DomainError("classical_invariant: expects a deterministic driving path");
    auto truncated = truncate_path(path, t);
    auto fp = loewner::evolve_final({z}, truncated).front();
    if (fp.swallowed()) throw SwallowedError("classical_invariant: point was swallowed");
    double s = 0.0;
    for (const Complex& ld : fp.log_diffs) s += ld.imag();
    const double n = static_cast<double>(path.n_particles());
    return -2.0 * s + (n + 2.0) * fp.log_g.imag() - 2.0 * fp.log_dg.imag();
}

} // namespace rsle::coupling
