#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "solwave/physical.hpp"

using namespace solwave;

namespace {

PhysicalConfig base_config() {
    PhysicalConfig cfg;
    cfg.p = 3.0;
    cfg.N = 1;
    cfg.r0 = 2.0;
    cfg.T0 = 1.0;
    cfg.eps0 = 0.1;
    cfg.d0 = 0.0;
    cfg.nu0 = 0.0;
    cfg.dr = 2e-3;
    return cfg;
}

}  // namespace

TEST_CASE("physical config validation") {
    PhysicalConfig cfg = base_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.r0 = 1.0;  // r_min = 1 - 1 - 0.29 < 0
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = base_config();
    cfg.dt_factor = 1.2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = base_config();
    cfg.d0 = 0.5;
    cfg.nu0 = -0.6;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("cutoff_chi plateau, support, and ramp midpoint") {
    const PhysicalConfig cfg = base_config();
    CHECK(cutoff_chi(cfg.r0, cfg) == 1.0);
    CHECK(cutoff_chi(cfg.r0 + cfg.T0 + cfg.eps0, cfg) == 1.0);
    CHECK(cutoff_chi(cfg.r0 + cfg.T0 + 2.0 * cfg.eps0 + 0.1, cfg) == 0.0);
    CHECK(cutoff_chi(cfg.r0 - cfg.T0 - 2.0 * cfg.eps0 - 0.1, cfg) == 0.0);
    // midpoint of each transition band: sigma(1/2) = 1/2
    CHECK(cutoff_chi(cfg.r0 + cfg.T0 + 1.5 * cfg.eps0, cfg) == Catch::Approx(0.5).margin(1e-12));
    CHECK(cutoff_chi(cfg.r0 - cfg.T0 - 1.5 * cfg.eps0, cfg) == Catch::Approx(0.5).margin(1e-12));
    // monotone on the ramps
    double prev = 0.0;
    for (int k = 0; k <= 20; ++k) {
        const double r = cfg.r0 - cfg.T0 - 2.0 * cfg.eps0 + k * (cfg.eps0 / 20.0);
        const double c = cutoff_chi(r, cfg);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("build_initial_data matches the soliton on the plateau") {
    PhysicalConfig cfg = base_config();
    cfg.d0 = 0.3;
    cfg.nu0 = 0.1;
    auto [u0, u1] = build_initial_data(cfg);
    auto g = build_grid(24, 3.0);
    const StatePair ks = kappa_star({cfg.d0, cfg.nu0}, g);
    // sample where chi == 1: u0 = T0^{-2/(p-1)} kappa*_1((r-r0)/T0)
    for (int i = 0; i < g->n; ++i) {
        const double r = cfg.r0 + g->nodes[i] * cfg.T0;
        const int j = static_cast<int>(std::floor((r - cfg.r_min()) / cfg.dr + 0.5));
        const double rj = cfg.r(j);
        const double uh = u_hat(cfg.d0, cfg.nu0, cfg.r0, cfg.T0, rj, 0.0, cfg.p);
        CHECK(u0[j] == Catch::Approx(uh).margin(1e-12));
        const double denom = (1.0 + cfg.nu0) * cfg.T0 + cfg.d0 * (rj - cfg.r0);
        CHECK(u1[j] == Catch::Approx(uh / denom).margin(1e-12));  // (2/(p-1)) = 1
    }
    (void)ks;
}

TEST_CASE("build_initial_data constant case d0=nu0=0") {
    PhysicalConfig cfg = base_config();
    auto [u0, u1] = build_initial_data(cfg);
    const double k0 = std::sqrt(2.0);
    const int j0 = cfg.num_nodes() / 2;
    CHECK(u0[j0] == Catch::Approx(k0 / cfg.T0).margin(1e-12));
    CHECK(u1[j0] == Catch::Approx(k0 / (cfg.T0 * cfg.T0)).margin(1e-12));
}

TEST_CASE("build_initial_data rejects a singular profile") {
    PhysicalConfig cfg = base_config();
    cfg.d0 = 0.9;  // denominator hits zero inside the support
    CHECK_THROWS_AS(build_initial_data(cfg), std::invalid_argument);
}

TEST_CASE("zero initial data stays zero") {
    PhysicalConfig cfg = base_config();
    cfg.dr = 5e-3;
    cfg.t_max = 0.2;
    cfg.blowup_threshold = 100.0;
    const int m = cfg.num_nodes();
    const PhysicalHistory h =
        evolve_physical(std::vector<double>(m, 0.0), std::vector<double>(m, 0.0), cfg);
    CHECK_FALSE(h.scheme_failure);
    CHECK_FALSE(h.threshold_reached);
}

TEST_CASE("finite propagation speed: far perturbation leaves the cone unchanged") {
    PhysicalConfig cfg = base_config();
    cfg.dr = 2.5e-3;
    cfg.t_max = 0.5;
    cfg.snapshot_times = {0.45};
    auto [u0, u1] = build_initial_data(cfg);
    const PhysicalHistory a = evolve_physical(u0, u1, cfg);

    // bump outside [r0-T0-2eps0-Delta, r0+T0+2eps0+Delta], Delta = pad/2
    auto u0b = u0;
    const double rb = cfg.r_max() - 0.25 * cfg.pad();
    for (int j = 0; j < cfg.num_nodes(); ++j) {
        const double x = (cfg.r(j) - rb) / (0.2 * cfg.pad());
        u0b[j] += 0.5 * std::exp(-x * x);
    }
    const PhysicalHistory b = evolve_physical(u0b, u1, cfg);

    // inside the backward light cone of r0 at t = 0.45 the fields agree
    const double t = 0.45;
    double max_diff = 0.0;
    for (int j = 0; j < cfg.num_nodes(); ++j) {
        if (std::fabs(cfg.r(j) - cfg.r0) < cfg.T0 - t) {
            max_diff = std::max(max_diff, std::fabs(a.snap_u[0][j] - b.snap_u[0][j]));
        }
    }
    CHECK(max_diff < 1e-10);
}

TEST_CASE("ODE-regime solution reproduced on the plateau (any N)") {
    PhysicalConfig cfg = base_config();
    cfg.N = 3;
    cfg.dr = 2.5e-3;
    cfg.t_max = 0.6;
    cfg.snapshot_times = {0.3, 0.6};
    auto [u0, u1] = build_initial_data(cfg);
    const PhysicalHistory h = evolve_physical(u0, u1, cfg);
    const double k0 = std::sqrt(2.0);
    for (std::size_t k = 0; k < h.snapshot_t.size(); ++k) {
        const double t = h.snapshot_t[k];
        const double want = k0 / (cfg.T0 - t);
        for (int j = 0; j < cfg.num_nodes(); ++j) {
            if (std::fabs(cfg.r(j) - cfg.r0) < 0.9 * (cfg.T0 - t)) {
                CHECK(h.snap_u[k][j] == Catch::Approx(want).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("N=1 traveling soliton: second-order convergence inside the cone") {
    auto error_at = [](double dr) {
        PhysicalConfig cfg = base_config();
        cfg.d0 = 0.3;
        cfg.dr = dr;
        cfg.t_max = 0.5;
        cfg.snapshot_times = {0.5};
        auto [u0, u1] = build_initial_data(cfg);
        const PhysicalHistory h = evolve_physical(u0, u1, cfg);
        double err = 0.0;
        const double t = 0.5;
        for (int j = 0; j < cfg.num_nodes(); ++j) {
            const double r = cfg.r(j);
            if (std::fabs(r - cfg.r0) < 0.8 * (cfg.T0 - t)) {
                const double want = u_hat(cfg.d0, 0.0, cfg.r0, cfg.T0, r, t, cfg.p);
                err = std::max(err, std::fabs(h.snap_u[0][j] - want));
            }
        }
        return err;
    };
    const double e1 = error_at(4e-3);
    const double e2 = error_at(2e-3);
    const double order = std::log2(e1 / e2);
    CHECK(order > 1.7);
    CHECK(order < 2.3);
}

TEST_CASE("estimate_blowup_time on synthetic power laws") {
    // u(t) = (1-t)^{-1} for p = 3: T = 1 recovered sharply
    PointSeries s;
    s.r = 1.0;
    for (int k = 0; k < 400; ++k) {
        const double t = 0.9 + 0.000249 * k;  // amplitudes 10 .. ~2500
        s.t.push_back(t);
        s.u.push_back(1.0 / (1.0 - t));
    }
    const BlowupFit f = estimate_blowup_time(s, 3.0, 1000.0);
    REQUIRE(f.detected);
    CHECK(f.T == Catch::Approx(1.0).margin(1e-6));
    CHECK(f.fit_quality > 0.999999);

    // 0.1% multiplicative noise: T still within 1e-3
    std::mt19937 rng(53);
    std::normal_distribution<double> noise(0.0, 1e-3);
    PointSeries sn = s;
    for (auto& u : sn.u) u *= 1.0 + noise(rng);
    const BlowupFit fn = estimate_blowup_time(sn, 3.0, 1000.0);
    REQUIRE(fn.detected);
    CHECK(fn.T == Catch::Approx(1.0).margin(1e-3));

    // band never crossed -> no detection
    PointSeries flat;
    for (int k = 0; k < 50; ++k) {
        flat.t.push_back(0.01 * k);
        flat.u.push_back(5.0);
    }
    CHECK_FALSE(estimate_blowup_time(flat, 3.0, 1000.0).detected);
}

TEST_CASE("deeper fitting band does not move the blow-up time") {
    PointSeries s;
    for (int k = 0; k < 3000; ++k) {
        const double t = 0.9 + 3.32e-5 * k;
        s.t.push_back(t);
        s.u.push_back(1.0 / (1.0 - t));
    }
    const BlowupFit shallow = estimate_blowup_time(s, 3.0, 300.0);
    const BlowupFit deep = estimate_blowup_time(s, 3.0, 3000.0);
    REQUIRE(shallow.detected);
    REQUIRE(deep.detected);
    CHECK(std::fabs(shallow.T - deep.T) < 1e-6);
}

TEST_CASE("to_selfsim recovers the soliton pair from the initial snapshot") {
    PhysicalConfig cfg = base_config();
    cfg.d0 = 0.3;
    cfg.nu0 = 0.05;
    cfg.dr = 1e-3;
    cfg.t_max = 0.05;
    cfg.snapshot_times = {0.0};
    auto [u0, u1] = build_initial_data(cfg);
    const PhysicalHistory h = evolve_physical(u0, u1, cfg);
    auto g = build_grid(32, 3.0);
    const double s0 = -std::log(cfg.T0);  // t = 0
    const StatePair w = to_selfsim(h, cfg.r0, cfg.T0, s0, g);
    const StatePair ks = kappa_star({cfg.d0, cfg.nu0}, g);
    CHECK(norm_H(w - ks) < 1e-6);
}

TEST_CASE("cone_average basics and ODE growth exponent") {
    PhysicalConfig cfg = base_config();
    cfg.N = 3;
    cfg.dr = 2.5e-3;
    cfg.t_max = 0.95;
    cfg.snapshot_times = {0.5, 0.75, 0.875, 0.9375};
    auto [u0, u1] = build_initial_data(cfg);
    const PhysicalHistory h = evolve_physical(u0, u1, cfg);

    std::vector<double> logmu, logavg;
    for (double t : cfg.snapshot_times) {
        const double avg = cone_average(h, t, cfg.r0, cfg.T0);
        // exact: 2 kappa0^2 (T0-t)^{-2}, up to the trapezoid end cells
        CHECK(avg == Catch::Approx(2.0 * 2.0 / ((cfg.T0 - t) * (cfg.T0 - t))).epsilon(0.02));
        logmu.push_back(std::log(cfg.T0 - t));
        logavg.push_back(std::log(avg));
    }
    const LinearFit lf = fit_line(logmu, logavg);
    CHECK(lf.slope == Catch::Approx(-2.0).epsilon(0.05));  // -4/(p-1)

    // zero field
    PhysicalHistory hz;
    hz.m = 101;
    hz.r_min = 1.0;
    hz.dr = 0.01;
    hz.dt = 0.01;
    hz.snapshot_t = {0.1};
    hz.snap_u = {std::vector<double>(101, 0.0)};
    hz.snap_ut = {std::vector<double>(101, 0.0)};
    CHECK(cone_average(hz, 0.1, 1.5, 0.6) == 0.0);
}
