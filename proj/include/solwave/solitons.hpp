// Closed-form soliton families of the self-similar wave equation:
// the stationary one-parameter family kappa(d), its two-parameter
// extension kappa*(d,nu) = (kappa*_1, kappa*_2) with
//   kappa*_1 = kappa_0 (1-d^2)^{1/(p-1)} / (1+dy+nu)^{2/(p-1)},
//   kappa*_2 = nu d_nu kappa*_1,
// the physical-space family u_hat, and analytic parameter derivatives.
#pragma once

#include <cmath>
#include <stdexcept>

#include "solwave/grid.hpp"
#include "solwave/numerics.hpp"

namespace solwave {

struct SolitonParams {
    double d = 0.0;
    double nu = 0.0;
};

/// Margin below which 1+dy+nu is considered to touch zero on [-1,1].
inline constexpr double kSolitonMargin = 1e-8;

inline bool admissible(const SolitonParams& s) {
    return std::fabs(s.d) < 1.0 && 1.0 - std::fabs(s.d) + s.nu >= kSolitonMargin;
}

inline void require_admissible(const SolitonParams& s) {
    if (!admissible(s))
        throw std::invalid_argument("soliton parameters out of range: d=" +
                                    std::to_string(s.d) + " nu=" + std::to_string(s.nu));
}

inline double kappa0(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("kappa0: need p > 1");
    return pos_pow(2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0)), 1.0 / (p - 1.0));
}

inline Field kappa(double d, const GridPtr& grid) {
    if (!(std::fabs(d) < 1.0)) throw std::invalid_argument("kappa: need |d| < 1");
    const double p = grid->p;
    const double k0 = kappa0(p);
    const double beta = 1.0 / (p - 1.0);
    Field f(grid);
    for (int i = 0; i < grid->n; ++i) {
        const double e = 1.0 + d * grid->nodes[i];
        f[i] = k0 * pos_pow((1.0 - d * d) / (e * e), beta);
    }
    return f;
}

namespace detail {

struct SolitonEval {
    double k0, beta, amp;  // amp = kappa0 (1-d^2)^beta
    double d, nu;

    SolitonEval(const SolitonParams& s, double p)
        : k0(kappa0(p)), beta(1.0 / (p - 1.0)), d(s.d), nu(s.nu) {
        amp = k0 * pos_pow(1.0 - d * d, beta);
    }
    double denom(double y) const { return 1.0 + d * y + nu; }
    double k1(double y) const { return amp * pos_pow(denom(y), -2.0 * beta); }
    double dnu_k1(double y) const {
        return -2.0 * beta * amp * pos_pow(denom(y), -2.0 * beta - 1.0);
    }
    double k2(double y) const { return nu * dnu_k1(y); }
};

}  // namespace detail

inline StatePair kappa_star(const SolitonParams& s, const GridPtr& grid) {
    require_admissible(s);
    detail::SolitonEval ev(s, grid->p);
    StatePair out(grid);
    for (int i = 0; i < grid->n; ++i) {
        out.first[i] = ev.k1(grid->nodes[i]);
        out.second[i] = ev.k2(grid->nodes[i]);
    }
    return out;
}

/// (d_d kappa*_1, d_d kappa*_2), analytic.
inline StatePair dkappa_star_dd(const SolitonParams& s, const GridPtr& grid) {
    require_admissible(s);
    detail::SolitonEval ev(s, grid->p);
    const double b = ev.beta;
    StatePair out(grid);
    for (int i = 0; i < grid->n; ++i) {
        const double y = grid->nodes[i];
        const double e = ev.denom(y);
        out.first[i] = -2.0 * b * ev.k1(y) * (s.d / (1.0 - s.d * s.d) + y / e);
        // log kappa*_2 = const + beta log(1-d^2) - (2beta+1) log E
        out.second[i] = ev.k2(y) * (-2.0 * b * s.d / (1.0 - s.d * s.d) - (2.0 * b + 1.0) * y / e);
    }
    return out;
}

/// (d_nu kappa*_1, d_nu kappa*_2), analytic.
inline StatePair dkappa_star_dnu(const SolitonParams& s, const GridPtr& grid) {
    require_admissible(s);
    detail::SolitonEval ev(s, grid->p);
    const double b = ev.beta;
    StatePair out(grid);
    for (int i = 0; i < grid->n; ++i) {
        const double y = grid->nodes[i];
        const double e = ev.denom(y);
        const double dnu1 = ev.dnu_k1(y);
        out.first[i] = dnu1;
        out.second[i] = dnu1 + s.nu * 2.0 * b * (2.0 * b + 1.0) * ev.amp *
                                    pos_pow(e, -2.0 * b - 2.0);
    }
    return out;
}

/// u_hat(d,nu,r0,T,r,t) = kappa0 (1-d^2)^{1/(p-1)} / ((1+nu)(T-t)+d(r-r0))^{2/(p-1)}.
inline double u_hat(double d, double nu, double r0, double T, double r, double t, double p) {
    if (!(std::fabs(d) < 1.0)) throw std::invalid_argument("u_hat: need |d| < 1");
    const double beta = 1.0 / (p - 1.0);
    const double denom = (1.0 + nu) * (T - t) + d * (r - r0);
    if (!(denom > 0.0)) throw std::domain_error("u_hat: nonpositive denominator");
    return kappa0(p) * pos_pow(1.0 - d * d, beta) * pos_pow(denom, -2.0 * beta);
}

/// lambda(d,nu) = ((1-d^2)/((1+nu)^2-d^2))^{1/(p-1)}.
inline double lambda_dn(const SolitonParams& s, double p) {
    const double denom = (1.0 + s.nu) * (1.0 + s.nu) - s.d * s.d;
    if (!(denom > 0.0) || !(std::fabs(s.d) < 1.0))
        throw std::domain_error("lambda_dn: need (1+nu)^2 > d^2 and |d| < 1");
    return pos_pow((1.0 - s.d * s.d) / denom, 1.0 / (p - 1.0));
}

/// H-norm residual of the orbit kappa*(d, mu e^s) in the N=1 first-order
/// system; zero at the continuum since nu d_nu kappa* = d_s kappa*-bar.
inline double residual_selfsim_1d(double d, double mu, double s, const GridPtr& grid) {
    const double p = grid->p;
    const SolitonParams prm{d, mu * std::exp(s)};
    require_admissible(prm);
    const StatePair k = kappa_star(prm, grid);
    const StatePair dnu = dkappa_star_dnu(prm, grid);
    const Field lk1 = apply_L(k.first);
    const Field dk2 = derivative(k.second);
    const double cp = 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0));
    StatePair res(grid);
    for (int i = 0; i < grid->n; ++i) {
        const double y = grid->nodes[i];
        res.first[i] = prm.nu * dnu.first[i] - k.second[i];
        const double rhs2 = lk1[i] - cp * k.first[i] + odd_pow(k.first[i], p) -
                            (p + 3.0) / (p - 1.0) * k.second[i] - 2.0 * y * dk2[i];
        res.second[i] = prm.nu * dnu.second[i] - rhs2;
    }
    return norm_H(res);
}

}  // namespace solwave
