// Command-line front end: wires configs to the library modules and emits
// reproducible CSV/JSON/SVG artifacts plus a hashed manifest.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "rsle/coupling.hpp"
#include "rsle/dyson.hpp"
#include "rsle/hydro.hpp"
#include "rsle/io.hpp"
#include "rsle/loewner.hpp"
#include "rsle/special.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace rsle;
using C = std::complex<double>;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitNumerical = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// flag > config file > RSLE_OUT > current directory
std::string resolve_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("RSLE_OUT"); env && *env) return env;
    return ".";
}

struct Manifest {
    fs::path dir;
    json files = json::object();
    json config = json::object();

    void add(const fs::path& p) { files[p.filename().string()] = io::file_hash(p.string()); }
    void write(const std::string& command) const {
        json m;
        m["command"] = command;
        m["config"] = config;
        m["files"] = files;
        std::ofstream out(dir / "manifest.json");
        out << m.dump(2) << "\n";
    }
};

fs::path prepare_dir(const std::string& flag_value) {
    fs::path dir = resolve_out_dir(flag_value);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("out: cannot create directory " + dir.string());
    return dir;
}

std::vector<C> parse_points(const std::vector<std::string>& specs) {
    std::vector<C> pts;
    for (const auto& s : specs) {
        double re = 0, im = 0;
        if (std::sscanf(s.c_str(), "%lf,%lf", &re, &im) != 2)
            throw ConfigError("track: expected 're,im', got '" + s + "'");
        pts.emplace_back(re, im);
    }
    return pts;
}

json complex_json(C z) { return json::array({z.real(), z.imag()}); }

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    int n = 1;
    double beta = 2.0;
    double horizon = 0.1;
    double dt = 1e-4;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool allow_collisions = false;
    std::string init = "equispaced";
    double spread_eps = 1e-6;
    int save_stride = 1;
    std::vector<std::string> track;
    int mask_resolution = 0;
    bool svg = false;
    int threads = 0;
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    if (a.n < 1) throw ConfigError("n: must be >= 1");
    if (a.dt <= 0) throw ConfigError("dt: must be positive");
    if (a.horizon <= 0) throw ConfigError("horizon: must be positive");
    if (!a.seed_set) throw ConfigError("seed: mandatory for stochastic commands");
    if (a.beta < 1.0 && !a.allow_collisions)
        throw ConfigError("beta: < 1 requires --allow-collisions");

    dyson::AngleVector init;
    if (a.init == "equispaced") {
        init.angles.resize(static_cast<std::size_t>(a.n));
        for (int i = 0; i < a.n; ++i)
            init.angles[static_cast<std::size_t>(i)] = 2.0 * M_PI * i / a.n;
    } else if (a.init == "spread") {
        init = dyson::spread_start(static_cast<std::size_t>(a.n), a.spread_eps);
    } else {
        throw ConfigError("init: must be 'equispaced' or 'spread'");
    }

    dyson::SdeOptions opts;
    opts.allow_collisions = a.allow_collisions;
    opts.save_stride = a.save_stride;
    auto path = dyson::simulate_dyson(static_cast<std::size_t>(a.n), a.beta, init,
                                      a.horizon, a.dt, a.seed, opts);

    Manifest man;
    man.dir = prepare_dir(a.out);
    man.config = {{"n", a.n},        {"beta", a.beta},   {"horizon", a.horizon},
                  {"dt", a.dt},      {"seed", a.seed},   {"init", a.init},
                  {"spread_eps", a.spread_eps},          {"save_stride", a.save_stride},
                  {"mask_resolution", a.mask_resolution}, {"threads", a.threads}};

    io::write_driving_csv((man.dir / "driving.csv").string(), path);
    man.add(man.dir / "driving.csv");

    auto points = parse_points(a.track);
    if (!points.empty()) {
        auto snaps = loewner::evolve(points, path);
        for (std::size_t p = 0; p < points.size(); ++p) {
            auto name = "trajectory_" + std::to_string(p + 1) + ".csv";
            io::write_trajectory_csv((man.dir / name).string(), path.times, snaps[p]);
            man.add(man.dir / name);
        }
    }
    if (a.mask_resolution > 0) {
        auto mask = loewner::hull_mask(a.mask_resolution, path, a.horizon, {}, a.threads);
        io::write_mask_csv((man.dir / "mask.csv").string(), mask);
        man.add(man.dir / "mask.csv");
        if (a.svg) {
            auto curve = hydro::boundary_gamma(std::min(1.0, a.horizon * a.n), 256);
            io::write_hull_svg((man.dir / "mask.svg").string(), curve, &mask);
            man.add(man.dir / "mask.svg");
        }
    }
    man.write("simulate");
    return kExitOk;
}

// -------------------------------------------------------------------- hydro

struct HydroArgs {
    double t = 0.5;
    int samples = 400;
    int density_samples = 256;
    bool fit_edges = false;
    bool svg = false;
    std::string out;
};

int run_hydro(const HydroArgs& a) {
    if (a.t <= 0) throw ConfigError("t: must be positive");
    if (a.samples < 16) throw ConfigError("samples: must be >= 16");

    Manifest man;
    man.dir = prepare_dir(a.out);
    man.config = {{"t", a.t}, {"samples", a.samples}, {"density_samples", a.density_samples}};

    auto gamma = hydro::boundary_gamma(a.t, a.samples);
    auto gamma_tilde = hydro::boundary_gamma_tilde(a.t, a.samples);
    io::write_curve_csv((man.dir / "gamma.csv").string(), gamma);
    io::write_curve_csv((man.dir / "gamma_tilde.csv").string(), gamma_tilde);
    man.add(man.dir / "gamma.csv");
    man.add(man.dir / "gamma_tilde.csv");

    const double edge = (a.t < 1.0) ? *hydro::critical_angles(a.t).phi_c : M_PI;
    std::vector<double> phis, rhos;
    for (int k = 0; k <= a.density_samples; ++k) {
        phis.push_back(edge * k / a.density_samples);
    }
    auto ms = hydro::boundary_stieltjes_sweep(a.t, phis);
    for (auto& m : ms) rhos.push_back(std::max(0.0, m.real() / (2.0 * M_PI)));
    io::write_density_csv((man.dir / "density.csv").string(), phis, rhos);
    man.add(man.dir / "density.csv");

    json rep;
    auto topo = hydro::topology(a.t);
    rep["topology"] = topo == hydro::Topology::Disk       ? "Disk"
                      : topo == hydro::Topology::Critical ? "Critical"
                                                          : "Annulus";
    auto angles = hydro::critical_angles(a.t);
    if (angles.theta_c) {
        rep["theta_c"] = *angles.theta_c;
        rep["varphi_c"] = *angles.varphi_c;
        rep["phi_c"] = *angles.phi_c;
    }
    rep["endpoint_out"] = complex_json(gamma.endpoint_out);
    rep["endpoint_in"] = complex_json(gamma.endpoint_in);
    if (a.fit_edges) {
        auto anchors = hydro::critical_angles(std::min(a.t, 1.0));
        double vc = a.t <= 1.0 ? *anchors.varphi_c : M_PI;
        double tc = a.t <= 1.0 ? *anchors.theta_c : M_PI;
        auto f1 = hydro::edge_fit(gamma, vc, 0.15 * vc);
        auto f2 = hydro::edge_fit(gamma_tilde, tc, 0.15 * tc);
        rep["gamma_fit"] = {{"exponent", f1.exponent}, {"coefficient", f1.coefficient}};
        rep["gamma_tilde_fit"] = {{"exponent", f2.exponent}, {"coefficient", f2.coefficient}};
    }
    {
        std::ofstream outf(man.dir / "geometry.json");
        outf << rep.dump(2) << "\n";
    }
    man.add(man.dir / "geometry.json");

    if (a.svg) {
        io::write_hull_svg((man.dir / "hull.svg").string(), gamma);
        man.add(man.dir / "hull.svg");
    }
    man.write("hydro");
    return kExitOk;
}

// ------------------------------------------------------------------- verify

struct VerifyArgs {
    std::string suite;
    int n = 1;
    double kappa = 4.0;
    double horizon = 0.2;
    int paths = 10000;
    double dt = 2e-4;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double xi_offset = 0.0;
    int threads = 0;
    std::string out;
};

int run_verify(const VerifyArgs& a) {
    Manifest man;
    man.dir = prepare_dir(a.out);
    man.config = {{"suite", a.suite}, {"n", a.n},       {"kappa", a.kappa},
                  {"horizon", a.horizon}, {"paths", a.paths}, {"dt", a.dt},
                  {"seed", a.seed},   {"xi_offset", a.xi_offset}};

    json rep;
    rep["suite"] = a.suite;
    bool pass = true;

    if (a.suite == "hydro-residuals") {
        json checks = json::array();
        for (double t : {0.2, 0.7, 1.3}) {
            double worst_fact = 0, worst_th2 = 0, worst_lemma = 0;
            for (int i = 1; i <= 10; ++i) {
                for (int j = 0; j < 10; ++j) {
                    C z = std::polar(0.08 * i, 2.0 * M_PI * j / 10 + 0.05);
                    C g, h;
                    try {
                        g = hydro::g_inf(t, z);
                        h = hydro::map_h(t, z);
                    } catch (const rsle::DomainError&) {
                        continue; // z inside the hull at this t
                    } catch (const rsle::BranchCutError&) {
                        continue;
                    }
                    worst_fact = std::max(worst_fact,
                                          std::abs(g - hydro::map_omega(t, h)) / (1.0 + std::abs(g)));
                    C lam_h = 4.0 * t * h / ((1.0 - h) * (1.0 - h));
                    C lam_z = 4.0 * t * z / ((1.0 - z) * (1.0 - z));
                    worst_th2 = std::max(worst_th2,
                                         std::abs(lam_h * std::exp(lam_h) - lam_z * std::exp(-t)));
                    C lhs = hydro::stieltjes_limit(t, g);
                    worst_lemma = std::max(worst_lemma, std::abs(lhs - hydro::m0(h)));
                }
            }
            bool ok = worst_fact <= 1e-12 && worst_th2 <= 1e-10 && worst_lemma <= 1e-9;
            pass = pass && ok;
            checks.push_back({{"t", t},
                              {"factorization", worst_fact},
                              {"implicit_residual", worst_th2},
                              {"transform_identity", worst_lemma},
                              {"pass", ok}});
        }
        rep["checks"] = checks;
    } else if (a.suite == "martingale") {
        if (!a.seed_set) throw ConfigError("seed: mandatory for stochastic commands");
        std::vector<C> grid;
        for (int k = 0; k < 6; ++k) grid.push_back(std::polar(0.25 + 0.05 * k, 0.4 + 0.9 * k));
        auto stats = coupling::martingale_test(a.n, a.kappa, grid, a.horizon, a.paths,
                                               a.dt, a.seed, a.xi_offset, a.threads);
        json pts = json::array();
        for (auto& s : stats) {
            bool ok = std::abs(s.mean_drift) <= 3.0 * s.se;
            pass = pass && ok;
            pts.push_back({{"z", complex_json(s.z)},
                           {"mean", s.mean_drift},
                           {"se", s.se},
                           {"n_paths", s.paths_used},
                           {"excluded", s.paths_excluded},
                           {"pass", ok}});
        }
        rep["points"] = pts;
    } else if (a.suite == "quadvar") {
        if (!a.seed_set) throw ConfigError("seed: mandatory for stochastic commands");
        auto st = coupling::quad_variation_test(a.n, a.kappa, C(0.0, 0.3), C(-0.2, 0.0),
                                                a.horizon, a.paths, a.dt, a.seed, a.threads);
        rep["mean_abs_defect"] = st.mean_abs_defect;
        rep["se"] = st.se;
        pass = st.mean_abs_defect < 0.05;
    } else if (a.suite == "hadamard") {
        double worst = 0;
        dyson::NormalRng rng(a.seed_set ? a.seed : 2024);
        for (int k = 0; k < 100; ++k) {
            C z(0.35 * std::tanh(rng.next()), 0.35 * std::tanh(rng.next()));
            C w(0.35 * std::tanh(rng.next()), 0.35 * std::tanh(rng.next()));
            C x = std::polar(1.0, rng.next());
            if (std::abs(z - w) < 0.05) continue;
            auto hc = coupling::hadamard_check(z, w, x, 1e-5);
            worst = std::max(worst, std::abs(hc.defect));
        }
        rep["worst_defect"] = worst;
        pass = worst <= 1e-6;
    } else if (a.suite == "classical") {
        dyson::AngleVector init;
        init.angles = {0.0, 2.0 * M_PI / 3.0, 4.0 * M_PI / 3.0};
        auto flow = dyson::calogero_flow(init, 0.3, 1e-5);
        double f0 = coupling::classical_invariant(flow, C(0.2, 0.3), 0.0);
        double f1 = coupling::classical_invariant(flow, C(0.2, 0.3), 0.3);
        rep["drift"] = std::abs(f1 - f0);
        pass = std::abs(f1 - f0) <= 1e-5;
    } else {
        throw ConfigError("suite: unknown suite '" + a.suite + "'");
    }

    rep["pass"] = pass;
    {
        std::ofstream outf(man.dir / "report.json");
        outf << rep.dump(2) << "\n";
    }
    man.add(man.dir / "report.json");
    man.write("verify");
    std::cout << (pass ? "PASS" : "FAIL") << " " << a.suite << "\n";
    return pass ? kExitOk : kExitVerifyFail;
}

// ----------------------------------------------------------------- converge

struct ConvergeArgs {
    std::vector<int> n_list{50, 200};
    double t = 0.5;
    double beta = 2.0;
    int paths = 50;
    int steps = 100;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double spread_eps = 1e-4;
    int threads = 0;
    std::string out;
};

int run_converge(const ConvergeArgs& a) {
    if (!a.seed_set) throw ConfigError("seed: mandatory for stochastic commands");
    if (a.t <= 0) throw ConfigError("t: must be positive");

    Manifest man;
    man.dir = prepare_dir(a.out);
    man.config = {{"n_list", a.n_list}, {"t", a.t},       {"beta", a.beta},
                  {"paths", a.paths},   {"steps", a.steps}, {"seed", a.seed},
                  {"spread_eps", a.spread_eps}};

    const int n_z = 32;
    std::vector<C> zs;
    std::vector<C> limits;
    for (int k = 0; k < n_z; ++k) {
        C z = std::polar(2.0, 2.0 * M_PI * (k + 0.5) / n_z);
        zs.push_back(z);
        limits.push_back(hydro::stieltjes_limit(a.t, z));
    }

    std::ofstream table(man.dir / "convergence.csv");
    table << std::setprecision(17) << "n,sup_error\n";
    json rows = json::array();
    for (int n : a.n_list) {
        const double horizon = a.t / n; // hydrodynamic -> particle time
        const double dt = horizon / a.steps;
        auto init = dyson::spread_start(static_cast<std::size_t>(n), a.spread_eps);
        std::vector<C> mean(n_z, 0.0);
        std::atomic<int> cursor{0};
        std::mutex mu;
        int n_threads = a.threads > 0 ? a.threads
                                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back([&]() {
                std::vector<C> local(n_z, 0.0);
                for (;;) {
                    int p = cursor.fetch_add(1);
                    if (p >= a.paths) break;
                    dyson::SdeOptions opts;
                    opts.save_stride = a.steps; // only the endpoint is needed
                    auto path = dyson::simulate_dyson(
                        static_cast<std::size_t>(n), a.beta, init, horizon, dt,
                        dyson::split_seed(a.seed, static_cast<std::uint64_t>(p)), opts);
                    for (int k = 0; k < n_z; ++k)
                        local[static_cast<std::size_t>(k)] +=
                            dyson::empirical_stieltjes(path.states.back(), zs[static_cast<std::size_t>(k)]);
                }
                std::lock_guard<std::mutex> lock(mu);
                for (int k = 0; k < n_z; ++k) mean[static_cast<std::size_t>(k)] += local[static_cast<std::size_t>(k)];
            });
        for (auto& th : pool) th.join();
        double sup = 0;
        for (int k = 0; k < n_z; ++k)
            sup = std::max(sup, std::abs(mean[static_cast<std::size_t>(k)] / static_cast<double>(a.paths) -
                                         limits[static_cast<std::size_t>(k)]));
        table << n << "," << sup << "\n";
        rows.push_back({{"n", n}, {"sup_error", sup}});
    }
    table.close();
    man.add(man.dir / "convergence.csv");
    man.files["rows"] = rows;
    man.write("converge");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial multiple Loewner chain laboratory"};
    app.set_config("--config", "", "flat key=value config file");
    app.require_subcommand(1);

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "simulate circular Dyson drivers and the Loewner flow");
    sim->add_option("--n", sa.n, "number of driving points");
    sim->add_option("--beta", sa.beta, "inverse temperature");
    sim->add_option("--horizon", sa.horizon, "simulation horizon (particle time)");
    sim->add_option("--dt", sa.dt, "top-level step size");
    sim->add_option("--seed", sa.seed, "RNG seed")->each([&](const std::string&) { sa.seed_set = true; });
    sim->add_flag("--allow-collisions", sa.allow_collisions, "permit beta < 1");
    sim->add_option("--init", sa.init, "initial condition: equispaced | spread");
    sim->add_option("--spread-eps", sa.spread_eps, "half-width of the spread start");
    sim->add_option("--save-stride", sa.save_stride, "save every k-th step");
    sim->add_option("--track", sa.track, "tracked interior point 're,im' (repeatable)");
    sim->add_option("--mask-resolution", sa.mask_resolution, "hull mask grid resolution (0 = off)");
    sim->add_flag("--svg", sa.svg, "emit SVG figures");
    sim->add_option("--threads", sa.threads, "worker cap (0 = hardware)");
    sim->add_option("--out", sa.out, "output directory");

    HydroArgs ha;
    auto* hyd = app.add_subcommand("hydro", "closed-form hydrodynamic-limit geometry");
    hyd->add_option("--t", ha.t, "hydrodynamic time");
    hyd->add_option("--samples", ha.samples, "curve samples");
    hyd->add_option("--density-samples", ha.density_samples, "density grid size");
    hyd->add_flag("--fit-edges", ha.fit_edges, "report edge power-law fits");
    hyd->add_flag("--svg", ha.svg, "emit SVG figure");
    hyd->add_option("--out", ha.out, "output directory");

    VerifyArgs va;
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("--suite", va.suite, "hydro-residuals | martingale | quadvar | hadamard | classical")
        ->required();
    ver->add_option("--n", va.n, "number of driving points");
    ver->add_option("--kappa", va.kappa, "SLE parameter");
    ver->add_option("--horizon", va.horizon, "particle-time horizon");
    ver->add_option("--paths", va.paths, "Monte Carlo paths");
    ver->add_option("--dt", va.dt, "top-level step size");
    ver->add_option("--seed", va.seed, "RNG seed")->each([&](const std::string&) { va.seed_set = true; });
    ver->add_option("--xi-offset", va.xi_offset, "perturb xi (negative control)");
    ver->add_option("--threads", va.threads, "worker cap (0 = hardware)");
    ver->add_option("--out", va.out, "output directory");

    ConvergeArgs ca;
    auto* con = app.add_subcommand("converge", "finite-N to hydrodynamic-limit error table");
    con->add_option("--n-list", ca.n_list, "particle counts");
    con->add_option("--t", ca.t, "hydrodynamic time");
    con->add_option("--beta", ca.beta, "inverse temperature");
    con->add_option("--paths", ca.paths, "Monte Carlo paths per N");
    con->add_option("--steps", ca.steps, "top-level steps per path");
    con->add_option("--seed", ca.seed, "RNG seed")->each([&](const std::string&) { ca.seed_set = true; });
    con->add_option("--spread-eps", ca.spread_eps, "half-width of the spread start");
    con->add_option("--threads", ca.threads, "worker cap (0 = hardware)");
    con->add_option("--out", ca.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitBadConfig;
    }

    try {
        if (sim->parsed()) return run_simulate(sa);
        if (hyd->parsed()) return run_hydro(ha);
        if (ver->parsed()) return run_verify(va);
        if (con->parsed()) return run_converge(ca);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const rsle::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitBadConfig;
}
