#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rsle/hydro.hpp"
#include "rsle/special.hpp"

using namespace rsle;
using C = std::complex<double>;
constexpr double PI = std::numbers::pi;

TEST_CASE("m0 pinned values") {
    CHECK(hydro::m0(C(0.0, 0.0)) == C(1.0, 0.0));
    CHECK(std::abs(hydro::m0(C(-1.0, 0.0))) == 0.0);
    CHECK(std::abs(hydro::m0(C(0.0, 1.0)) - C(0.0, 1.0)) <= 1e-15);
    CHECK_THROWS_AS((void)hydro::m0(C(1.0, 0.0)), SingularEvaluation);
}

TEST_CASE("limit transform solves its characteristic equation") {
    CHECK(std::abs(hydro::stieltjes_limit(0.0, C(0.3, -0.2)) - hydro::m0(C(0.3, -0.2))) <= 1e-14);
    CHECK(std::abs(hydro::stieltjes_limit(0.7, C(0.0, 0.0)) - 1.0) <= 1e-14);
    for (double t : {0.2, 0.7, 1.3}) {
        for (C z : {C(0.3, 0.4), C(-0.5, 0.1), C(0.0, -0.8), C(0.85, 0.0)}) {
            C m = hydro::stieltjes_limit(t, z);
            C res = z - std::exp(2.0 * t * m) * (m - 1.0) / (m + 1.0);
            CHECK(std::abs(res) <= 1e-10 * (1.0 + std::abs(z)));
        }
    }
}

TEST_CASE("map_h: fixed point, branch identity, small-z series region") {
    for (double t : {0.2, 0.7, 1.3}) {
        CHECK(hydro::map_h(t, C(0.0, 0.0)) == C(0.0, 0.0));
        for (C z : {C(0.3, 0.4), C(-0.5, 0.1), C(1e-6, 2e-6), C(0.0, -0.8)}) {
            C h = hydro::map_h(t, z);
            C lam = 4.0 * t * z / ((1.0 - z) * (1.0 - z));
            C w = special::lambert_w0(lam * std::exp(-t));
            C lam_h = 4.0 * t * h / ((1.0 - h) * (1.0 - h));
            CHECK(std::abs(lam_h - w) <= 1e-10 * (1.0 + std::abs(w)));
        }
    }
}

TEST_CASE("map_omega pinned behavior") {
    CHECK(hydro::map_omega(0.4, C(0.0, 0.0)) == C(0.0, 0.0));
    // modulus preserved on the unit circle (pure imaginary exponent)
    for (double th : {0.3, 1.1, 2.9}) {
        CHECK(std::abs(std::abs(hydro::map_omega(0.6, std::polar(1.0, th))) - 1.0) <= 1e-12);
    }
    // Omega'(0) = e^{2t}, via finite differences
    double t = 0.35, eps = 1e-7;
    C d = (hydro::map_omega(t, C(eps, 0.0)) - hydro::map_omega(t, C(-eps, 0.0))) / (2.0 * eps);
    CHECK(std::abs(d - std::exp(2.0 * t)) <= 1e-5);
}

TEST_CASE("limit Loewner map: factorization and basic structure") {
    for (double t : {0.1, 0.5, 0.9, 1.4}) {
        for (C z : {C(0.3, 0.4), C(-0.6, 0.2), C(0.05, -0.7), C(-0.1, -0.1)}) {
            C a = hydro::g_inf(t, z);
            C b = hydro::g_inf_direct(t, z);
            CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
            // conjugation symmetry
            CHECK(std::abs(std::conj(hydro::g_inf(t, std::conj(z))) - a) <= 1e-12);
        }
        CHECK(std::abs(hydro::g_inf(t, C(0.0, 0.0))) == 0.0);
        // g'(0) = e^t via finite differences
        double eps = 1e-7;
        C d = (hydro::g_inf(t, C(eps, 0.0)) - hydro::g_inf(t, C(-eps, 0.0))) / (2.0 * eps);
        CHECK(std::abs(d - std::exp(t)) <= 1e-5);
    }
}

TEST_CASE("transported transform identity M_t(g_t(z)) = m0(h_t(z))") {
    int checked = 0;
    for (double t : {0.2, 0.6, 1.1}) {
        for (C z : {C(0.2, 0.3), C(-0.4, 0.1), C(0.0, -0.5)}) {
            // the identity only makes sense while z is still in the domain
            if (hydro::domain_membership(t, z) != hydro::Membership::Inside) continue;
            ++checked;
            C g = hydro::g_inf(t, z);
            C lhs = hydro::stieltjes_limit(t, g);
            C rhs = hydro::m0(hydro::map_h(t, z));
            CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(rhs)));
        }
    }
    CHECK(checked >= 7);
}

TEST_CASE("limit map satisfies the measure-driven Loewner equation") {
    double t = 0.3, dt = 1e-4;
    C z(0.2, 0.1);
    C dgdt = (hydro::g_inf(t + dt, z) - hydro::g_inf(t - dt, z)) / (2.0 * dt);
    C g = hydro::g_inf(t, z);
    C rhs = g * hydro::stieltjes_limit(t, g);
    CHECK(std::abs(dgdt - rhs) <= 1e-5 * (1.0 + std::abs(rhs)));
}

TEST_CASE("critical angles") {
    auto one = hydro::critical_angles(1.0);
    CHECK(std::abs(*one.theta_c - PI) <= 1e-10);
    CHECK(std::abs(*one.varphi_c - PI) <= 1e-10);
    CHECK(std::abs(*one.phi_c - PI) <= 1e-10);

    auto half = hydro::critical_angles(0.5);
    CHECK(std::abs(*half.theta_c - PI / 2.0) <= 1e-12);
    CHECK(std::abs(*half.varphi_c - 2.0 * std::asin(std::sqrt(0.5) * std::exp(0.25))) <= 1e-12);
    CHECK(std::abs(*half.phi_c - (PI / 2.0 + 1.0)) <= 1e-10);
    CHECK(*half.theta_c < *half.varphi_c);
    // ordering of the image angles (reported, not required by any closed form)
    CHECK(*half.varphi_c < *half.phi_c);

    auto late = hydro::critical_angles(1.5);
    CHECK_FALSE(late.theta_c.has_value());
    CHECK_FALSE(late.varphi_c.has_value());
    CHECK_FALSE(late.phi_c.has_value());
}

TEST_CASE("density: support, mass, endpoint decay") {
    auto ang = hydro::critical_angles(0.25);
    // identically zero outside the support arc, which ends at phi_c
    for (double phi : {*ang.phi_c + 1e-3, *ang.phi_c + 0.3, PI}) {
        CHECK(std::abs(hydro::density(0.25, phi)) <= 1e-10);
    }
    CHECK(hydro::density(0.25, 0.0) > 0.0);
    CHECK(hydro::density(0.25, *ang.phi_c - 0.05) > 0.0);
    CHECK(hydro::density(1.0, PI) <= 1e-4);
    // strictly positive everywhere once the support wraps around
    double rho_min = 1e300;
    for (int k = 0; k <= 64; ++k) rho_min = std::min(rho_min, hydro::density(2.0, PI * k / 64.0));
    CHECK(rho_min > 0.0);
    for (double t : {0.25, 1.0, 2.0}) {
        CHECK(std::abs(hydro::density_mass(t) - 1.0) <= 1e-6);
    }
}

TEST_CASE("hull boundary curves: endpoints and pushforward") {
    // outer endpoint sits at angle varphi_c on the circle; inner endpoint real
    for (double t : {0.25, 0.5, 0.75}) {
        auto g = hydro::boundary_gamma(t, 200);
        auto ang = hydro::critical_angles(t);
        CHECK(std::abs(std::abs(g.endpoint_out) - 1.0) <= 1e-12);
        CHECK(std::abs(std::arg(g.endpoint_out) - *ang.varphi_c) <= 1e-8);
        CHECK(std::abs(g.endpoint_in.imag()) <= 1e-12);
        CHECK(g.endpoint_in.real() > 0.0);

        auto gt = hydro::boundary_gamma_tilde(t, 200);
        CHECK(std::abs(std::arg(gt.endpoint_out) - *ang.theta_c) <= 1e-8);
        // the image curve maps onto the unit circle, outer endpoint to phi_c
        for (const auto& [r, p] : gt.samples) {
            CHECK(std::abs(std::abs(hydro::map_omega(t, p)) - 1.0) <= 1e-9);
        }
        C image = hydro::map_omega(t, std::polar(1.0, *ang.theta_c));
        CHECK(std::abs(std::arg(image) - *ang.phi_c) <= 1e-8);
    }
    // critical time: both curves close at -1
    auto g1 = hydro::boundary_gamma(1.0, 200);
    CHECK(std::abs(g1.endpoint_out - C(-1.0, 0.0)) <= 1e-8);
}

TEST_CASE("hull boundary against its preimage") {
    double t = 0.5;
    auto g = hydro::boundary_gamma(t, 400);
    for (std::size_t k = 40; k < g.samples.size() - 40; k += 40) {
        C z = g.samples[k].second;
        // points of the hull boundary map to the unit circle under g_t
        CHECK(std::abs(std::abs(hydro::g_inf(t, z)) - 1.0) <= 1e-7);
    }
}

TEST_CASE("membership and topology") {
    CHECK(hydro::topology(0.5) == hydro::Topology::Disk);
    CHECK(hydro::topology(1.0) == hydro::Topology::Critical);
    CHECK(hydro::topology(1.5) == hydro::Topology::Annulus);

    CHECK(hydro::domain_membership(0.5, C(0.0, 0.0)) == hydro::Membership::Inside);
    CHECK(hydro::domain_membership(0.5, C(-0.9, 0.0)) == hydro::Membership::Inside);
    CHECK(hydro::domain_membership(0.5, C(0.95, 0.0)) == hydro::Membership::Outside);
    CHECK(hydro::domain_membership(2.0, C(0.99, 0.0)) == hydro::Membership::Outside);
    CHECK(hydro::domain_membership(2.0, C(0.0, 0.0)) == hydro::Membership::Inside);
    CHECK_THROWS_AS((void)hydro::domain_membership(0.5, C(1.5, 0.0)), DomainError);

    // the hull only grows: a point outside at t1 stays outside at t2 > t1
    for (C z : {C(0.9, 0.1), C(0.5, -0.6), C(-0.7, 0.3)}) {
        bool was_outside = false;
        for (double t : {0.2, 0.5, 0.8, 1.2}) {
            bool outside = hydro::domain_membership(t, z) == hydro::Membership::Outside;
            if (was_outside) CHECK(outside);
            was_outside = was_outside || outside;
        }
    }
}

TEST_CASE("edge exponents of the boundary curves") {
    auto angles_half = hydro::critical_angles(0.5);

    auto g = hydro::boundary_gamma(0.5, 2000);
    auto fit_g = hydro::edge_fit(g, *angles_half.varphi_c, 0.005);
    CHECK(fit_g.exponent > 1.4);
    CHECK(fit_g.exponent < 1.6);
    double b_half = 0.6405451899342005; // sqrt(2)/(3 t^{1/4} (1-t)) ((1-t e^{1-t}) e^{t-1})^{1/4} at t = 1/2
    CHECK(std::abs(fit_g.coefficient - b_half) <= 0.05 * b_half);

    auto gt = hydro::boundary_gamma_tilde(0.5, 800);
    auto fit_gt = hydro::edge_fit(gt, *angles_half.theta_c, 3e-5);
    CHECK(fit_gt.exponent > 0.45);
    CHECK(fit_gt.exponent < 0.55);
    double a_half = std::sqrt(3.0); // 2 (t(1-t))^{1/4} / sqrt(1 - 2t/3) at t = 1/2
    CHECK(std::abs(fit_gt.coefficient - a_half) <= 0.05 * a_half);

    // critical time: both curves hit -1 at 45/60 degrees (slopes 1/sqrt3, sqrt3)
    auto g1 = hydro::boundary_gamma(1.0, 2000);
    auto fit_g1 = hydro::edge_fit(g1, PI, 0.01);
    CHECK(std::abs(fit_g1.exponent - 1.0) <= 0.1);
    CHECK(std::abs(fit_g1.coefficient - 1.0 / std::sqrt(3.0)) <= 0.05 / std::sqrt(3.0));
    auto gt1 = hydro::boundary_gamma_tilde(1.0, 2000);
    auto fit_gt1 = hydro::edge_fit(gt1, PI, 0.001);
    CHECK(std::abs(fit_gt1.exponent - 1.0) <= 0.1);
    CHECK(std::abs(fit_gt1.coefficient - std::sqrt(3.0)) <= 0.05 * std::sqrt(3.0));

    hydro::HullCurve empty;
    empty.t = 0.5;
    CHECK_THROWS_AS((void)hydro::edge_fit(empty, PI, 0.1), FitError);
}

TEST_CASE("short-time boundary is close to the cardioid") {
    double t = 1e-3;
    auto g = hydro::boundary_gamma(t, 400);
    double sup = 0.0;
    for (const auto& [x, p] : g.samples) {
        double theta = hydro::gamma_angle_parameter(t, x);
        sup = std::max(sup, std::abs(p - hydro::short_time_cardioid(t, theta)));
    }
    CHECK(sup <= 10.0 * t);
}

TEST_CASE("integral of motion is constant along the flow") {
    // points that stay inside the shrinking domain through t = 0.9
    for (C z : {C(0.1, 0.2), C(-0.3, 0.25), C(-0.2, -0.35)}) {
        double base = hydro::hydro_invariant(0.0, z);
        CHECK(std::abs(base - (-2.0 * std::arg(z - 1.0) + std::arg(z))) <= 1e-12);
        for (double t : {0.1, 0.5, 0.9}) {
            CHECK(std::abs(hydro::hydro_invariant(t, z) - base) <= 1e-4);
        }
    }
}
