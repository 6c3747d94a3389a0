// End-to-end acceptance gate: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "rsle/coupling.hpp"
#include "rsle/dyson.hpp"
#include "rsle/hydro.hpp"
#include "rsle/io.hpp"
#include "rsle/loewner.hpp"
#include "rsle/special.hpp"

using namespace rsle;
using C = std::complex<double>;
constexpr double PI = std::numbers::pi;

namespace {

int g_failures = 0;

void report(int idx, const char* what, bool ok, const std::string& detail) {
    std::printf("%s  criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", idx, what, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------- 1
void criterion_lambert_residuals() {
    double worst_w = 0.0;
    for (int ir = 0; ir < 64; ++ir) {
        double r = std::pow(10.0, -8.0 + 16.0 * ir / 63.0);
        for (int ia = 0; ia < 64; ++ia) {
            double th = -PI + 2.0 * PI * (ia + 0.5) / 64.0;
            C z = std::polar(r, th);
            C w = special::lambert_w0(z);
            worst_w = std::max(worst_w,
                               std::abs(w * std::exp(w) - z) / std::max(1.0, std::abs(z)));
        }
    }

    double worst_h = 0.0;
    int defined = 0;
    for (double t : {0.2, 0.7, 1.3}) {
        for (int ir = 0; ir < 20; ++ir) {
            double r = 0.03 + 0.77 * ir / 19.0;
            for (int ia = 0; ia < 20; ++ia) {
                C z = std::polar(r, 2.0 * PI * (ia + 0.5) / 20.0);
                C h;
                try {
                    h = hydro::map_h(t, z);
                } catch (const DomainError&) {
                    continue; // z already swallowed by the limit hull at this t
                }
                ++defined;
                auto lam = [&](C y) { return 4.0 * t * y / ((1.0 - y) * (1.0 - y)); };
                C lh = lam(h);
                worst_h = std::max(worst_h, std::abs(lh * std::exp(lh) - lam(z) * std::exp(-t)));
            }
        }
    }
    bool ok = worst_w <= 1e-12 && worst_h <= 1e-10 && defined >= 600;
    report(1, "Lambert and implicit-map residuals", ok,
           fmt("max W residual %.2e, max map residual %.2e over %d grid points", worst_w,
               worst_h, defined));
}

// ---------------------------------------------------------------- 2
void criterion_critical_geometry() {
    bool ok = hydro::topology(0.5) == hydro::Topology::Disk &&
              hydro::topology(1.0) == hydro::Topology::Critical &&
              hydro::topology(1.5) == hydro::Topology::Annulus;

    auto g1 = hydro::boundary_gamma(1.0, 200);
    double de = std::abs(g1.endpoint_out - C(-1.0, 0.0));
    ok = ok && de <= 1e-8;

    auto a1 = hydro::critical_angles(1.0);
    double dang = std::max({std::abs(*a1.theta_c - PI), std::abs(*a1.varphi_c - PI),
                            std::abs(*a1.phi_c - PI)});
    ok = ok && dang <= 1e-10;

    double dphi = std::abs(*hydro::critical_angles(0.5).phi_c - (PI / 2.0 + 1.0));
    ok = ok && dphi <= 1e-10;
    report(2, "critical geometry and topology", ok,
           fmt("endpoint dev %.2e, angle dev %.2e, phi_c dev %.2e", de, dang, dphi));
}

// ---------------------------------------------------------------- 3
void criterion_edge_exponents() {
    auto half = hydro::critical_angles(0.5);

    auto g = hydro::boundary_gamma(0.5, 2000);
    auto fg = hydro::edge_fit(g, *half.varphi_c, 0.005);
    double b_half = 0.6405451899342005;
    bool ok = fg.exponent >= 1.4 && fg.exponent <= 1.6 &&
              std::abs(fg.coefficient - b_half) <= 0.05 * b_half;

    auto gt = hydro::boundary_gamma_tilde(0.5, 800);
    auto fgt = hydro::edge_fit(gt, *half.theta_c, 3e-5);
    double a_half = std::sqrt(3.0);
    ok = ok && fgt.exponent >= 0.45 && fgt.exponent <= 0.55 &&
         std::abs(fgt.coefficient - a_half) <= 0.05 * a_half;

    auto g1 = hydro::edge_fit(hydro::boundary_gamma(1.0, 2000), PI, 0.01);
    auto gt1 = hydro::edge_fit(hydro::boundary_gamma_tilde(1.0, 2000), PI, 0.001);
    double s1 = 1.0 / std::sqrt(3.0), s2 = std::sqrt(3.0);
    ok = ok && std::abs(g1.coefficient - s1) <= 0.05 * s1 &&
         std::abs(gt1.coefficient - s2) <= 0.05 * s2;

    report(3, "hull-boundary edge exponents", ok,
           fmt("nu %.3f coef %.4f | nu' %.3f coef %.4f | slopes %.4f %.4f", fg.exponent,
               fg.coefficient, fgt.exponent, fgt.coefficient, g1.coefficient,
               gt1.coefficient));
}

// ---------------------------------------------------------------- 4
void criterion_consistency_web() {
    double worst_fact = 0.0, worst_lemma = 0.0;
    int web_points = 0;
    for (double t : {0.25, 0.6, 1.1}) {
        for (C z : {C(0.2, 0.3), C(-0.45, 0.1), C(0.0, -0.4), C(-0.15, -0.3), C(0.35, 0.0)}) {
            if (hydro::domain_membership(t, z) != hydro::Membership::Inside) continue;
            ++web_points;
            C a = hydro::g_inf(t, z);
            C b = hydro::g_inf_direct(t, z);
            worst_fact = std::max(worst_fact, std::abs(a - b) / (1.0 + std::abs(a)));
            C lhs = hydro::stieltjes_limit(t, a);
            C rhs = hydro::m0(hydro::map_h(t, z));
            worst_lemma = std::max(worst_lemma, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
        }
    }

    double worst_fd = 0.0;
    const double dt = 1e-4;
    for (double t : {0.3, 0.8}) {
        for (C z : {C(0.2, 0.1), C(-0.3, 0.25)}) {
            C dg = (hydro::g_inf(t + dt, z) - hydro::g_inf(t - dt, z)) / (2.0 * dt);
            C g = hydro::g_inf(t, z);
            C rhs = g * hydro::stieltjes_limit(t, g);
            worst_fd = std::max(worst_fd, std::abs(dg - rhs) / (1.0 + std::abs(rhs)));
        }
    }

    double worst_mod = 0.0, worst_arg = 0.0;
    for (double t : {0.25, 0.5, 0.75}) {
        auto gt = hydro::boundary_gamma_tilde(t, 300);
        for (const auto& [r, p] : gt.samples) {
            worst_mod = std::max(worst_mod, std::abs(std::abs(hydro::map_omega(t, p)) - 1.0));
        }
        auto ang = hydro::critical_angles(t);
        C img = hydro::map_omega(t, std::polar(1.0, *ang.theta_c));
        worst_arg = std::max(worst_arg, std::abs(std::arg(img) - *ang.phi_c));
    }

    bool ok = web_points >= 10 && worst_fact <= 1e-12 && worst_lemma <= 1e-9 &&
              worst_fd <= 1e-5 && worst_mod <= 1e-9 && worst_arg <= 1e-8;
    report(4, "limit-map consistency web", ok,
           fmt("factorization %.1e, transported transform %.1e, evolution FD %.1e, "
               "pushforward modulus %.1e, endpoint angle %.1e",
               worst_fact, worst_lemma, worst_fd, worst_mod, worst_arg));
}

// ---------------------------------------------------------------- 5
void criterion_density() {
    double worst_mass = 0.0;
    for (double t : {0.25, 1.0, 2.0}) {
        worst_mass = std::max(worst_mass, std::abs(hydro::density_mass(t) - 1.0));
    }

    double edge = *hydro::critical_angles(0.25).phi_c;
    double worst_out = 0.0;
    for (int k = 0; k <= 16; ++k) {
        double phi = edge + 1e-3 + (PI - edge - 1e-3) * k / 16.0;
        worst_out = std::max(worst_out, std::abs(hydro::density(0.25, phi)));
    }

    double rho1_pi = hydro::density(1.0, PI);
    double rho2_min = 1e300;
    for (int k = 0; k <= 128; ++k) rho2_min = std::min(rho2_min, hydro::density(2.0, PI * k / 128.0));

    bool ok = worst_mass <= 1e-6 && worst_out <= 1e-10 && rho1_pi <= 1e-4 && rho2_min > 0.0;
    report(5, "limit density mass and support", ok,
           fmt("mass dev %.1e, exterior %.1e, rho_1(-1) %.1e, min rho_2 %.3f", worst_mass,
               worst_out, rho1_pi, rho2_min));
}

// ---------------------------------------------------------------- 6
void criterion_cardioid() {
    double t = 1e-3;
    auto g = hydro::boundary_gamma(t, 400);
    double sup = 0.0;
    for (const auto& [x, p] : g.samples) {
        double theta = hydro::gamma_angle_parameter(t, x);
        sup = std::max(sup, std::abs(p - hydro::short_time_cardioid(t, theta)));
    }
    report(6, "short-time cardioid approximation", sup <= 10.0 * t,
           fmt("sup distance %.2e vs bound %.2e", sup, 10.0 * t));
}

// ---------------------------------------------------------------- 7
dyson::AngleVector quantile_start(std::size_t n, double t0) {
    const double edge = *hydro::critical_angles(t0).phi_c;
    const int m = 4000;
    std::vector<double> phis(m + 1), rho(m + 1), cdf(m + 1, 0.0);
    for (int k = 0; k <= m; ++k) phis[k] = edge * k / m;
    auto ms = hydro::boundary_stieltjes_sweep(t0, phis);
    for (int k = 0; k <= m; ++k) rho[k] = std::max(0.0, ms[k].real()) / (2.0 * PI);
    for (int k = 1; k <= m; ++k) {
        cdf[k] = cdf[k - 1] + 0.5 * (rho[k] + rho[k - 1]) * (phis[k] - phis[k - 1]);
    }
    const double half = cdf[m];
    dyson::AngleVector v;
    v.angles.resize(n);
    int j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        double q = ((i + 0.5) / n - 0.5) * 2.0 * half;
        double a = std::abs(q), sgn = q < 0 ? -1.0 : 1.0;
        while (j < m && cdf[j] < a) ++j;
        while (j > 1 && cdf[j - 1] > a) --j;
        double w = (a - cdf[j - 1]) / std::max(1e-300, cdf[j] - cdf[j - 1]);
        v.angles[i] = sgn * (phis[j - 1] + w * (phis[j] - phis[j - 1]));
    }
    std::sort(v.angles.begin(), v.angles.end());
    return v;
}

void criterion_convergence() {
    const double t0 = 0.15, t1 = 0.5, beta = 8.0;
    const int paths = 200, steps = 50;
    std::vector<C> zs(32);
    for (int k = 0; k < 32; ++k) zs[k] = std::polar(2.0, 2.0 * PI * k / 32.0);
    std::vector<C> ref(32);
    for (int k = 0; k < 32; ++k) ref[k] = hydro::stieltjes_limit(t1, zs[k]);

    std::vector<double> sup_err;
    std::string detail;
    for (int n : {50, 200, 800}) {
        auto init = quantile_start(n, t0);
        const double horizon = (t1 - t0) / n;
        dyson::SdeOptions opts;
        opts.save_stride = steps;
        std::vector<C> mean(32, 0.0);
        for (int p = 0; p < paths; ++p) {
            auto path = dyson::simulate_dyson(n, beta, init, horizon, horizon / steps,
                                              dyson::split_seed(20260826, p), opts);
            const auto& last = path.states.back();
            for (int k = 0; k < 32; ++k) mean[k] += dyson::empirical_stieltjes(last, zs[k]);
        }
        double sup = 0.0;
        for (int k = 0; k < 32; ++k) {
            sup = std::max(sup, std::abs(mean[k] / static_cast<double>(paths) - ref[k]));
        }
        sup_err.push_back(sup);
        detail += fmt("N=%d: %.4f  ", n, sup);
    }
    bool ok = sup_err[0] > sup_err[1] && sup_err[1] > sup_err[2] && sup_err[2] <= 0.05;
    report(7, "finite-N convergence of the empirical transform", ok, detail);
}

// ---------------------------------------------------------------- 8
void criterion_martingale() {
    const std::vector<C> grid = {std::polar(0.30, 0.5), std::polar(0.45, 1.3),
                                 std::polar(0.35, 2.2), std::polar(0.50, 3.4),
                                 std::polar(0.25, 4.3), std::polar(0.40, 5.5)};
    const std::pair<int, double> combos[] = {{1, 4.0}, {2, 4.0}, {3, 8.0 / 3.0}, {5, 2.0}};
    bool ok = true;
    std::string detail;
    for (auto [n, kappa] : combos) {
        auto stats = coupling::martingale_test(n, kappa, grid, 0.2, 10000, 2e-4,
                                               9001 + n, 0.0);
        double worst_ratio = 0.0;
        for (const auto& s : stats) worst_ratio = std::max(worst_ratio, std::abs(s.mean_drift) / s.se);
        ok = ok && worst_ratio <= 3.0;

        auto control = coupling::martingale_test(n, kappa, grid, 0.2, 10000, 2e-4,
                                                 9001 + n, 0.5);
        int rejected = 0;
        for (const auto& s : control) {
            if (std::abs(s.mean_drift) > 3.0 * s.se) ++rejected;
        }
        ok = ok && rejected >= 3;
        detail += fmt("(N=%d k=%.2f: drift %.1f se, control %d/6)  ", n, kappa, worst_ratio,
                      rejected);
    }
    report(8, "martingale property of the coupling field", ok, detail);
}

// ---------------------------------------------------------------- 9
void criterion_quadratic_variation() {
    const C z(0.2, 0.2), w(-0.3, 0.1);
    std::vector<double> defects;
    for (double dt : {4e-4, 2e-4, 1e-4}) {
        auto s = coupling::quad_variation_test(2, 4.0, z, w, 0.05, 500, dt, 5150);
        defects.push_back(s.mean_abs_defect);
    }
    double order = std::log(defects[0] / defects[2]) / std::log(4.0);
    bool ok = defects[0] > defects[1] && defects[1] > defects[2] && order >= 0.5;

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int done = 0;
    while (done < 100) {
        C zr = std::polar(0.15 + 0.5 * u(rng), 2.0 * PI * u(rng));
        C wr = std::polar(0.15 + 0.5 * u(rng), 2.0 * PI * u(rng));
        C xr = std::polar(1.0, 2.0 * PI * u(rng));
        if (std::abs(zr - wr) < 0.05) continue;
        auto hc = coupling::hadamard_check(zr, wr, xr, 1e-5);
        worst = std::max(worst, hc.defect / std::max(1.0, std::abs(hc.rhs)));
        ++done;
    }
    ok = ok && worst <= 1e-6;
    report(9, "quadratic-variation balance", ok,
           fmt("defects %.2e/%.2e/%.2e order %.2f, Green derivative defect %.1e", defects[0],
               defects[1], defects[2], order, worst));
}

// ---------------------------------------------------------------- 10
void criterion_determinism() {
    // origin fixed point and capacity parametrization on a stochastic path
    auto init = dyson::AngleVector{{0.0, 1.6, 3.1, 4.7}};
    auto path = dyson::simulate_dyson(4, 2.0, init, 0.1, 2e-4, 31415);
    auto fp = loewner::evolve_final({C(0.0, 0.0)}, path).front();
    bool origin_ok = fp.g == C(0.0, 0.0);
    double cap_dev = std::abs(fp.log_dg.real() - 4.0 * 0.1) / (4.0 * 0.1);

    // bit-identical rerun, in memory and through CSV hashes
    auto rerun = dyson::simulate_dyson(4, 2.0, init, 0.1, 2e-4, 31415);
    bool bits_ok = rerun.times == path.times;
    for (std::size_t k = 0; bits_ok && k < path.states.size(); ++k) {
        bits_ok = rerun.states[k].angles == path.states[k].angles;
    }
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "rsle_acceptance";
    fs::create_directories(dir);
    io::write_driving_csv((dir / "a.csv").string(), path);
    io::write_driving_csv((dir / "b.csv").string(), rerun);
    bits_ok = bits_ok && io::file_hash((dir / "a.csv").string()) ==
                             io::file_hash((dir / "b.csv").string());

    // deterministic flow conserves its energy
    dyson::AngleVector cal{{0.3, 1.1, 2.0, 3.9, 5.2}};
    auto flow = dyson::calogero_flow(cal, 1.0, 1e-4);
    std::vector<double> d0, d1;
    dyson::cot_drift(flow.states.front().angles, d0);
    dyson::cot_drift(flow.states.back().angles, d1);
    double e0 = dyson::hamiltonian(dyson::MomentumVector{d0}, flow.states.front());
    double e1 = dyson::hamiltonian(dyson::MomentumVector{d1}, flow.states.back());
    double energy_dev = std::abs(e1 - e0) / std::abs(e0);

    // integrals of motion, finite-N and limit
    dyson::AngleVector sym{{-1.1, 1.1}};
    auto det = dyson::calogero_flow(sym, 0.3, 1e-5);
    C zc(0.0, 0.5);
    double classical_dev = std::abs(coupling::classical_invariant(det, zc, 0.3) -
                                    coupling::classical_invariant(det, zc, 0.0));
    double hydro_dev = 0.0;
    for (C z : {C(0.1, 0.2), C(-0.3, 0.25)}) {
        double base = hydro::hydro_invariant(0.0, z);
        for (double t : {0.25, 0.7}) {
            hydro_dev = std::max(hydro_dev, std::abs(hydro::hydro_invariant(t, z) - base));
        }
    }

    bool ok = origin_ok && cap_dev <= 1e-6 && bits_ok && energy_dev <= 1e-6 &&
              classical_dev <= 1e-5 && hydro_dev <= 1e-4;
    report(10, "determinism and structural invariants", ok,
           fmt("capacity dev %.1e, rerun %s, energy drift %.1e, invariants %.1e / %.1e",
               cap_dev, bits_ok ? "identical" : "DIFFERS", energy_dev, classical_dev,
               hydro_dev));
}

} // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion_lambert_residuals();
    criterion_critical_geometry();
    criterion_edge_exponents();
    criterion_consistency_web();
    criterion_density();
    criterion_cardioid();
    criterion_convergence();
    criterion_martingale();
    criterion_quadratic_variation();
    criterion_determinism();
    auto t1 = std::chrono::steady_clock::now();
    std::printf("%d of 10 criteria passed in %.1fs\n", 10 - g_failures,
                std::chrono::duration<double>(t1 - t0).count());
    return g_failures == 0 ? 0 : 1;
}
