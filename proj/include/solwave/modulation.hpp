// Modulation: given v in H near the soliton manifold, find (d,nu) with
//   pi^{d*}_l(v - kappa*(d,nu)) = 0,  l = 0,1,  d* = d/(1+nu).
//
// The root find is a damped Newton iteration in the conditioned coordinates
// (xi, m) = (artanh d, nu/(1-|d|)); admissibility is then simply m > -1,
// and distances in these coordinates are the ones the continuity estimates
// are stated in.
#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "solwave/grid.hpp"
#include "solwave/projections.hpp"
#include "solwave/solitons.hpp"

namespace solwave {

inline double dstar(double d, double nu) {
    if (!(1.0 + nu > 0.0)) throw std::domain_error("dstar: need 1 + nu > 0");
    return d / (1.0 + nu);
}

/// (1-d*^2)/(1-d^2); the modulation regime keeps this in [1/2, 2].
inline double dstar_equiv_ratio(double d, double nu) {
    const double ds = dstar(d, nu);
    return (1.0 - ds * ds) / (1.0 - d * d);
}

struct ModulationResult {
    SolitonParams params;
    StatePair q;                        // v - kappa*(d,nu)
    std::array<double, 2> residuals{};  // pi^{d*}_0(q), pi^{d*}_1(q)
    int iterations = 0;
    bool converged = false;

    double q_norm = std::numeric_limits<double>::quiet_NaN();
    double init_mismatch = std::numeric_limits<double>::quiet_NaN();  // ||v-kappa*(init)||
    bool size_certificate = false;  // q_norm <= init_mismatch (1+slack)
    double dstar_value = std::numeric_limits<double>::quiet_NaN();
    double xi_star = std::numeric_limits<double>::quiet_NaN();  // -artanh d*
    bool band_violation = false;  // nu/(1-|d|) outside [-1+1/(2B), B+1], B=2
};

namespace detail {

struct ModCoords {
    double xi, m;  // d = tanh(xi), nu = m (1-|d|)

    static ModCoords from_params(const SolitonParams& s) {
        return {std::atanh(s.d), s.nu / (1.0 - std::fabs(s.d))};
    }
    SolitonParams to_params() const {
        const double d = std::tanh(xi);
        return {d, m * (1.0 - std::fabs(d))};
    }
    bool admissible() const { return m > -1.0 + 1e-12 && std::isfinite(xi); }
};

}  // namespace detail

inline ModulationResult modulate(const StatePair& v, const SolitonParams& init,
                                 double tol = 1e-10, int max_iter = 50) {
    if (!(tol > 0.0)) throw std::invalid_argument("modulate: need tol > 0");
    require_admissible(init);
    const GridPtr& grid = v.grid();

    auto eval = [&](const detail::ModCoords& c, SolitonParams& prm, StatePair& q,
                    std::array<double, 2>& F) -> bool {
        if (!c.admissible()) return false;
        prm = c.to_params();
        if (!admissible(prm)) return false;
        q = v - kappa_star(prm, grid);
        const ProjectorSet ps = make_projectors(dstar(prm.d, prm.nu), grid);
        F = {pi(ps, 0, q), pi(ps, 1, q)};
        return true;
    };

    ModulationResult out;
    out.init_mismatch = norm_H(v - kappa_star(init, grid));

    detail::ModCoords x = detail::ModCoords::from_params(init);
    SolitonParams prm;
    StatePair q;
    std::array<double, 2> F;
    if (!eval(x, prm, q, F)) {
        out.params = init;
        out.q = v - kappa_star(init, grid);
        return out;
    }

    auto fnorm = [](const std::array<double, 2>& f) {
        return std::max(std::fabs(f[0]), std::fabs(f[1]));
    };

    detail::ModCoords best = x;
    SolitonParams best_prm = prm;
    StatePair best_q = q;
    std::array<double, 2> best_F = F;

    const double h = 1e-7;  // FD step in the conditioned coordinates
    int it = 0;
    for (; it < max_iter && fnorm(F) > tol; ++it) {
        // forward-difference Jacobian
        SolitonParams prm_h;
        StatePair q_h;
        std::array<double, 2> F_xi, F_m;
        detail::ModCoords cx{x.xi + h, x.m}, cm{x.xi, x.m + h};
        if (!eval(cx, prm_h, q_h, F_xi) || !eval(cm, prm_h, q_h, F_m)) break;
        const double J00 = (F_xi[0] - F[0]) / h, J01 = (F_m[0] - F[0]) / h;
        const double J10 = (F_xi[1] - F[1]) / h, J11 = (F_m[1] - F[1]) / h;
        const double det = J00 * J11 - J01 * J10;
        if (!std::isfinite(det) || std::fabs(det) < 1e-300) break;
        double dxi = -(J11 * F[0] - J01 * F[1]) / det;
        double dm = -(-J10 * F[0] + J00 * F[1]) / det;

        // damping: halve until the residual decreases and stays admissible
        bool accepted = false;
        for (int half = 0; half <= 10; ++half) {
            detail::ModCoords trial{x.xi + dxi, x.m + dm};
            SolitonParams t_prm;
            StatePair t_q;
            std::array<double, 2> t_F;
            if (eval(trial, t_prm, t_q, t_F) && fnorm(t_F) < fnorm(F)) {
                x = trial;
                prm = t_prm;
                q = t_q;
                F = t_F;
                accepted = true;
                break;
            }
            dxi *= 0.5;
            dm *= 0.5;
        }
        if (!accepted) break;
        if (fnorm(F) < fnorm(best_F)) {
            best = x;
            best_prm = prm;
            best_q = q;
            best_F = F;
        }
    }

    if (fnorm(F) <= fnorm(best_F)) {
        best = x;
        best_prm = prm;
        best_q = q;
        best_F = F;
    }

    out.params = best_prm;
    out.q = best_q;
    out.residuals = best_F;
    out.iterations = it;
    out.converged = fnorm(best_F) <= tol;
    out.q_norm = norm_H(best_q);
    out.size_certificate = out.q_norm <= out.init_mismatch * 1.2 + 1e-12;
    out.dstar_value = dstar(best_prm.d, best_prm.nu);
    out.xi_star = -std::atanh(out.dstar_value);
    const double band = best_prm.nu / (1.0 - std::fabs(best_prm.d));
    out.band_violation = band < -1.0 + 0.25 || band > 3.0;  // B = 2 band of Prop-type hypotheses
    return out;
}

}  // namespace solwave
