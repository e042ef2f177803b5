#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "solwave/grid.hpp"

using namespace solwave;
using testutil::jacobi_moment;
using testutil::monomial;

TEST_CASE("build_grid rejects bad parameters") {
    CHECK_THROWS_AS(build_grid(4, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(16, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(16, 0.5), std::invalid_argument);
}

TEST_CASE("nodes interior, weights positive, weight sums match moments") {
    for (auto [n, p, total] : {std::tuple{16, 3.0, 4.0 / 3.0}, {24, 2.0, 16.0 / 15.0}}) {
        auto g = build_grid(n, p);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            CHECK(g->nodes[i] > -1.0);
            CHECK(g->nodes[i] < 1.0);
            CHECK(g->quad_weights[i] > 0.0);
            sum += g->quad_weights[i];
            if (i) CHECK(g->nodes[i] > g->nodes[i - 1]);
        }
        CHECK(sum == Catch::Approx(total).margin(1e-12));
    }
}

TEST_CASE("odd moments vanish by symmetry") {
    auto g = build_grid(16, 3.0);
    CHECK(std::fabs(integrate_rho(monomial(1, g))) < 1e-13);
    CHECK(std::fabs(integrate_rho(monomial(7, g))) < 1e-13);
}

TEST_CASE("Gauss exactness up to degree 2n-1") {
    for (double p : {3.0, 2.0, 4.5}) {
        auto g = build_grid(20, p);
        for (int k = 0; k <= 2 * g->n - 1; ++k) {
            const double got = integrate_rho(monomial(k, g));
            CHECK(std::fabs(got - jacobi_moment(k, g->alpha)) < 1e-10);
        }
    }
}

TEST_CASE("differentiation exact on monomials up to n/2") {
    auto g = build_grid(32, 3.0);
    for (int k = 1; k <= g->n / 2; ++k) {
        const Field dk = derivative(monomial(k, g));
        for (int i = 0; i < g->n; ++i) {
            const double want = k * std::pow(g->nodes[i], k - 1);
            CHECK(std::fabs(dk[i] - want) < 1e-10);
        }
    }
}

TEST_CASE("inner_phi values and symmetry") {
    auto g = build_grid(16, 3.0);
    const StatePair zero(g);
    CHECK(inner_phi(zero, zero) == 0.0);

    StatePair ones(g);
    for (int i = 0; i < g->n; ++i) ones.first[i] = 1.0;
    CHECK(inner_phi(ones, ones) == Catch::Approx(4.0 / 3.0).margin(1e-12));

    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto fa = testutil::SmoothFunc::random(rng);
        const auto fb = testutil::SmoothFunc::random(rng);
        StatePair a(testutil::sample(fa, g), testutil::sample(fb, g));
        StatePair b(testutil::sample(fb, g), testutil::sample(fa, g));
        CHECK(inner_phi(a, b) == inner_phi(b, a));  // bitwise: fixed summation order
    }
}

TEST_CASE("inner_phi rejects grid mismatch") {
    auto g16 = build_grid(16, 3.0);
    auto g24 = build_grid(24, 3.0);
    CHECK_THROWS_AS(inner_phi(StatePair(g16), StatePair(g24)), std::invalid_argument);
}

TEST_CASE("norm_H basics") {
    auto g = build_grid(16, 3.0);
    CHECK(norm_H(StatePair(g)) == 0.0);
    StatePair ones(g);
    for (int i = 0; i < g->n; ++i) ones.first[i] = 1.0;
    CHECK(norm_H(ones) == Catch::Approx(std::sqrt(4.0 / 3.0)).margin(1e-12));

    std::mt19937 rng(11);
    const auto f = testutil::SmoothFunc::random(rng);
    StatePair a(testutil::sample(f, g), testutil::sample(f, g));
    CHECK(norm_H(-2.5 * a) == Catch::Approx(2.5 * norm_H(a)).margin(1e-12));
}

TEST_CASE("norm_H0 frozen values") {
    auto g = build_grid(24, 3.0);
    CHECK(norm_H0(Field(g)) == 0.0);
    CHECK(norm_H0(Field(g, 1.0)) == Catch::Approx(std::sqrt(4.0 / 3.0)).margin(1e-12));
    // ||y||_{H0}^2 = \int y^2 rho + \int (1-y^2) rho = 4/15 + 16/15 = 4/3
    CHECK(norm_H0(monomial(1, g)) == Catch::Approx(1.1547005383792515).margin(1e-12));
}

TEST_CASE("apply_L annihilates constants and is rho-self-adjoint") {
    auto g = build_grid(24, 3.0);
    const Field lc = apply_L(Field(g, 2.5));
    for (int i = 0; i < g->n; ++i) CHECK(std::fabs(lc[i]) < 1e-11);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        Field f(g), h(g);
        for (int k = 0; k <= 6; ++k) {
            const double cf = uni(rng), ch = uni(rng);
            for (int i = 0; i < g->n; ++i) {
                f[i] += cf * std::pow(g->nodes[i], k);
                h[i] += ch * std::pow(g->nodes[i], k);
            }
        }
        const Field lf = apply_L(f), lh = apply_L(h);
        Field flh(g), lfh(g);
        for (int i = 0; i < g->n; ++i) {
            flh[i] = f[i] * lh[i];
            lfh[i] = lf[i] * h[i];
        }
        CHECK(integrate_rho(flh) == Catch::Approx(integrate_rho(lfh)).margin(1e-9));

        // phi((f,0),(h,0)) = \int f (-L h + h) rho
        StatePair fp(f, Field(g)), hp(h, Field(g));
        Field fLh(g);
        for (int i = 0; i < g->n; ++i) fLh[i] = f[i] * (-lh[i] + h[i]);
        CHECK(inner_phi(fp, hp) == Catch::Approx(integrate_rho(fLh)).margin(1e-9));
    }
}

TEST_CASE("Rayleigh quotient of -L + I at least 1") {
    auto g = build_grid(24, 3.0);
    std::mt19937 rng(17);
    for (int trial = 0; trial < 8; ++trial) {
        const Field f = testutil::sample(testutil::SmoothFunc::random(rng), g);
        const Field lf = apply_L(f);
        Field num(g), den(g);
        for (int i = 0; i < g->n; ++i) {
            num[i] = f[i] * (-lf[i] + f[i]);
            den[i] = f[i] * f[i];
        }
        CHECK(integrate_rho(num) / integrate_rho(den) >= 1.0 - 1e-9);
    }
}

TEST_CASE("weighted_norms values") {
    auto g = build_grid(24, 3.0);
    const auto zero = weighted_norms(Field(g));
    CHECK(zero.l2_singular == 0.0);
    CHECK(zero.lp1 == 0.0);
    CHECK(zero.sup_weighted == 0.0);

    // f = 1, p = 3: rho/(1-y^2) = 1, so the singular L2 norm is sqrt(2)
    const auto one = weighted_norms(Field(g, 1.0));
    CHECK(one.l2_singular == Catch::Approx(std::sqrt(2.0)).margin(1e-10));
}

TEST_CASE("Hardy-Sobolev constant stable under refinement") {
    // C_n = max over 20 smooth fields of (sum of the three norms)/|f|_H0
    std::mt19937 rng(23);
    std::vector<testutil::SmoothFunc> fs;
    for (int i = 0; i < 20; ++i) fs.push_back(testutil::SmoothFunc::random(rng));
    std::vector<double> cs;
    for (int n : {16, 32, 64}) {
        auto g = build_grid(n, 3.0);
        double c = 0.0;
        for (const auto& f : fs) {
            const Field fd = testutil::sample(f, g);
            const auto wn = weighted_norms(fd);
            c = std::max(c, (wn.l2_singular + wn.lp1 + wn.sup_weighted) / norm_H0(fd));
        }
        cs.push_back(c);
    }
    for (double c : cs) {
        CHECK(std::fabs(c - cs.back()) / cs.back() < 0.2);
    }
}
