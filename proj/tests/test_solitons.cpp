#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "helpers.hpp"
#include "solwave/solitons.hpp"

using namespace solwave;

TEST_CASE("kappa0 closed form") {
    CHECK(kappa0(3.0) == Catch::Approx(std::sqrt(2.0)).margin(1e-14));
    CHECK(kappa0(2.0) == Catch::Approx(6.0).margin(1e-12));
    CHECK_THROWS_AS(kappa0(1.0), std::invalid_argument);
    CHECK_THROWS_AS(kappa0(0.3), std::invalid_argument);
}

TEST_CASE("kappa nodal values against the closed form") {
    auto g = build_grid(24, 3.0);
    const Field k0field = kappa(0.0, g);
    for (int i = 0; i < g->n; ++i)
        CHECK(k0field[i] == Catch::Approx(std::sqrt(2.0)).margin(1e-14));

    const double d = 0.5;
    const Field kd = kappa(d, g);
    for (int i = 0; i < g->n; ++i) {
        const double want = std::sqrt(2.0) * std::sqrt(1.0 - d * d) / (1.0 + d * g->nodes[i]);
        CHECK(kd[i] == Catch::Approx(want).margin(1e-13));
    }
    CHECK_THROWS_AS(kappa(1.0, g), std::invalid_argument);
}

TEST_CASE("kappa mirror symmetry in d") {
    auto g = build_grid(24, 3.0);
    const Field kp = kappa(0.4, g), km = kappa(-0.4, g);
    for (int i = 0; i < g->n; ++i)
        CHECK(kp[i] == Catch::Approx(km[g->n - 1 - i]).margin(1e-12));
}

TEST_CASE("kappa_star at nu=0 reduces to (kappa(d), 0)") {
    auto g = build_grid(24, 3.0);
    const StatePair ks = kappa_star({0.3, 0.0}, g);
    const Field kd = kappa(0.3, g);
    for (int i = 0; i < g->n; ++i) {
        CHECK(ks.first[i] == Catch::Approx(kd[i]).margin(1e-14));
        CHECK(ks.second[i] == 0.0);
    }
}

TEST_CASE("kappa_star frozen values at (d,nu)=(0,1), p=3") {
    auto g = build_grid(16, 3.0);
    const StatePair ks = kappa_star({0.0, 1.0}, g);
    for (int i = 0; i < g->n; ++i) {
        CHECK(ks.first[i] == Catch::Approx(0.70710678118654752).margin(1e-14));
        CHECK(ks.second[i] == Catch::Approx(-0.35355339059327376).margin(1e-14));
    }
}

TEST_CASE("kappa_star rejects inadmissible parameters") {
    auto g = build_grid(16, 3.0);
    CHECK_THROWS_AS(kappa_star({1.2, 0.0}, g), std::invalid_argument);
    CHECK_THROWS_AS(kappa_star({0.5, -0.6}, g), std::invalid_argument);
}

TEST_CASE("kappa*_2 = nu d_nu kappa*_1 nodally") {
    auto g = build_grid(32, 3.0);
    for (auto prm : {SolitonParams{0.3, 0.05}, {-0.5, 0.2}, {0.7, -0.1}}) {
        const StatePair ks = kappa_star(prm, g);
        const StatePair dn = dkappa_star_dnu(prm, g);
        for (int i = 0; i < g->n; ++i)
            CHECK(ks.second[i] == Catch::Approx(prm.nu * dn.first[i]).margin(1e-12));
    }
}

TEST_CASE("parameter derivatives match central finite differences") {
    auto g = build_grid(32, 3.0);
    const SolitonParams prm{0.3, 0.1};
    const double h = 1e-6;
    const StatePair dd = dkappa_star_dd(prm, g);
    const StatePair dn = dkappa_star_dnu(prm, g);
    const StatePair kdp = kappa_star({prm.d + h, prm.nu}, g);
    const StatePair kdm = kappa_star({prm.d - h, prm.nu}, g);
    const StatePair knp = kappa_star({prm.d, prm.nu + h}, g);
    const StatePair knm = kappa_star({prm.d, prm.nu - h}, g);
    for (int i = 0; i < g->n; ++i) {
        const double fd_d1 = (kdp.first[i] - kdm.first[i]) / (2.0 * h);
        const double fd_d2 = (kdp.second[i] - kdm.second[i]) / (2.0 * h);
        const double fd_n1 = (knp.first[i] - knm.first[i]) / (2.0 * h);
        const double fd_n2 = (knp.second[i] - knm.second[i]) / (2.0 * h);
        CHECK(dd.first[i] == Catch::Approx(fd_d1).epsilon(1e-6));
        CHECK(dd.second[i] == Catch::Approx(fd_d2).epsilon(1e-6).margin(1e-9));
        CHECK(dn.first[i] == Catch::Approx(fd_n1).epsilon(1e-6));
        CHECK(dn.second[i] == Catch::Approx(fd_n2).epsilon(1e-6));
    }
}

TEST_CASE("d_nu kappa*_2 at nu=0 equals d_nu kappa*_1") {
    // at nu = 0 the second derivative term drops out
    auto g = build_grid(24, 3.0);
    const StatePair dn = dkappa_star_dnu({0.4, 0.0}, g);
    for (int i = 0; i < g->n; ++i)
        CHECK(dn.second[i] == Catch::Approx(dn.first[i]).margin(1e-14));
}

TEST_CASE("d_d kappa*_1 antisymmetric in y at d=0") {
    auto g = build_grid(24, 3.0);
    const StatePair dd = dkappa_star_dd({0.0, 0.2}, g);
    for (int i = 0; i < g->n; ++i)
        CHECK(dd.first[i] == Catch::Approx(-dd.first[g->n - 1 - i]).margin(1e-12));
}

TEST_CASE("u_hat basics") {
    const double p = 3.0, k0 = std::sqrt(2.0);
    // d = nu = 0 is the ODE solution
    CHECK(u_hat(0.0, 0.0, 1.0, 0.5, 1.2, 0.25, p) ==
          Catch::Approx(k0 / 0.25).margin(1e-12));
    // homogeneity: doubling (T-t) and (r-r0) scales by 2^{-2/(p-1)}
    const double a = u_hat(0.4, 0.1, 1.0, 0.3, 1.1, 0.0, p);
    const double b = u_hat(0.4, 0.1, 1.0, 0.6, 1.2, 0.0, p);
    CHECK(b == Catch::Approx(a / 2.0).margin(1e-12));
    CHECK_THROWS_AS(u_hat(0.9, 0.0, 1.0, 0.1, 0.5, 0.0, p), std::domain_error);
}

TEST_CASE("u_hat at t=0 matches kappa*_1 in the similarity variable") {
    auto g = build_grid(24, 3.0);
    const SolitonParams prm{0.3, 0.1};
    const double r0 = 1.0, T0 = 0.5;
    const StatePair ks = kappa_star(prm, g);
    for (int i = 0; i < g->n; ++i) {
        const double r = r0 + g->nodes[i] * T0;
        const double uh = u_hat(prm.d, prm.nu, r0, T0, r, 0.0, 3.0);
        CHECK(uh * T0 == Catch::Approx(ks.first[i]).margin(1e-12));  // T0^{2/(p-1)} = T0
    }
}

TEST_CASE("lambda_dn values and identities") {
    CHECK(lambda_dn({0.5, 0.0}, 3.0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(lambda_dn({0.0, 1.0}, 3.0) == Catch::Approx(0.5).margin(1e-14));
    CHECK_THROWS_AS(lambda_dn({0.5, -0.6}, 3.0), std::domain_error);

    // exact identity: lambda(d,nu)^{1-p} = (1+nu/(1-|d|)) (1+nu/(1+|d|))
    for (auto prm : {SolitonParams{0.5, 0.1}, {-0.3, 0.05}, {0.8, -0.01}}) {
        const double p = 3.0;
        const double lhs = std::pow(lambda_dn(prm, p), 1.0 - p);
        const double ad = std::fabs(prm.d);
        const double rhs = (1.0 + prm.nu / (1.0 - ad)) * (1.0 + prm.nu / (1.0 + ad));
        CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
    }

    // |lambda(d*,nu)^{1-p} - 1| <= C |nu|/(1-|d|) with a modest fitted C
    double cfit = 0.0;
    for (double d : {-0.6, -0.3, 0.0, 0.3, 0.6}) {
        for (double m : {-0.08, -0.04, 0.04, 0.08}) {
            const double nu = m * (1.0 - std::fabs(d));
            const double ds = d / (1.0 + nu);
            const double val = std::fabs(std::pow(lambda_dn({ds, nu}, 3.0), -2.0) - 1.0);
            cfit = std::max(cfit, val / std::fabs(m));
        }
    }
    CHECK(cfit < 3.0);
}

TEST_CASE("kappa* H-norm bounded by lambda (fitted constant)") {
    auto g = build_grid(48, 3.0);
    double cfit = 0.0;
    for (double d : {-0.6, -0.2, 0.0, 0.4, 0.7}) {
        for (double nu : {-0.05, 0.0, 0.1, 0.5}) {
            const SolitonParams prm{d, nu * (1.0 - std::fabs(d))};
            if (!admissible(prm)) continue;
            const double bound =
                lambda_dn(prm, 3.0) +
                (prm.nu < 0.0 ? std::fabs(prm.nu) / std::sqrt(1.0 - d * d) *
                                    std::pow(lambda_dn(prm, 3.0), 2.0)
                              : 0.0);
            cfit = std::max(cfit, norm_H(kappa_star(prm, g)) / bound);
        }
    }
    CHECK(cfit > 0.0);
    CHECK(cfit < 10.0);  // O(1) constant, as in the soliton norm estimate
}

TEST_CASE("residual_selfsim_1d: stationary and orbit cases") {
    auto g48 = build_grid(48, 3.0);
    // mu = 0: kappa(d) is a stationary solution
    CHECK(residual_selfsim_1d(0.3, 0.0, 0.0, g48) < 1e-8);
    CHECK(residual_selfsim_1d(-0.6, 0.0, 0.0, g48) < 1e-8);
    // generalized-soliton orbit
    CHECK(residual_selfsim_1d(0.3, 0.05, 0.0, g48) < 1e-7);
}

TEST_CASE("residual_selfsim_1d decays spectrally with n") {
    const double d = 0.3, mu = 0.05, s = 0.0;
    const double r16 = residual_selfsim_1d(d, mu, s, build_grid(16, 3.0));
    const double r32 = residual_selfsim_1d(d, mu, s, build_grid(32, 3.0));
    CHECK(r32 < 0.1 * r16 + 1e-12);
}

TEST_CASE("residual_selfsim_1d grows smoothly toward the domain boundary") {
    auto g = build_grid(24, 3.0);
    // nu = mu e^s approaching -1+|d|: finite values, then a parameter error
    const double d = 0.3;
    double last = 0.0;
    for (double nu : {-0.3, -0.5, -0.65}) {
        const double r = residual_selfsim_1d(d, nu, 0.0, g);
        CHECK(std::isfinite(r));
        CHECK(r > last);
        last = r;
    }
    CHECK_THROWS_AS(residual_selfsim_1d(0.3, -0.7 + 1e-12, 0.0, g), std::invalid_argument);
}
