// Method-of-lines integration of the similarity-variable wave equation
//   ds w1 = w2
//   ds w2 = L w1 - 2(p+1)/(p-1)^2 w1 + |w1|^{p-1} w1 - (p+3)/(p-1) w2
//           - 2y dy w2 + e^{-s} (N-1)/(r0 + y e^{-s}) dy w1,
// with classical RK4 in s and per-sample modulation of (d, nu).
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "solwave/diagnostics.hpp"
#include "solwave/grid.hpp"
#include "solwave/modulation.hpp"
#include "solwave/solitons.hpp"
#include "solwave/trace.hpp"

namespace solwave {

struct SelfSimConfig {
    double p = 3.0;
    int N = 3;          // spatial dimension, >= 1
    double r0 = 1.0;    // > 0
    double s0 = 3.0;    // > -log r0 so the cone stays in {r > 0}
    double s_end = 8.0;
    double ds = 1e-3;   // capped at 0.5/n^2 (spectral stiffness)
    int n = 48;
    int sample_every = 100;

    double d_hat0 = 0.0;  // retry seed for modulation
    double eta = -1.0;    // h-functional knob; < 0 means 0.1/(p-1)
    bool spectral_filter = false;  // zero the top third of the modal spectrum

    double mod_tol = 1e-10;
    int mod_max_iter = 50;

    double effective_ds() const { return std::min(ds, 0.5 / (double(n) * double(n))); }
    double effective_eta() const { return eta < 0.0 ? default_eta(p) : eta; }

    void validate() const {
        if (!(p > 1.0)) throw std::invalid_argument("SelfSimConfig: need p > 1");
        if (N < 1) throw std::invalid_argument("SelfSimConfig: need N >= 1");
        if (!(r0 > 0.0)) throw std::invalid_argument("SelfSimConfig: need r0 > 0");
        if (!(s0 > -std::log(r0)))
            throw std::invalid_argument("SelfSimConfig: need s0 > -log r0");
        if (!(s_end > s0)) throw std::invalid_argument("SelfSimConfig: need s_end > s0");
        if (!(ds > 0.0)) throw std::invalid_argument("SelfSimConfig: need ds > 0");
        if (n < 8) throw std::invalid_argument("SelfSimConfig: need n >= 8");
        if (sample_every < 1) throw std::invalid_argument("SelfSimConfig: sample_every >= 1");
    }
};

/// Right side of the first-order system. The radial term is present only
/// for N > 1; for N = 1 it is not merely small, it is never formed.
inline StatePair rhs(const StatePair& state, double s, const SelfSimConfig& cfg) {
    const GridPtr& grid = state.grid();
    const Grid& g = *grid;
    const double p = cfg.p;
    const double cp = 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0));
    const Field lw1 = apply_L(state.first);
    const Field dw2 = derivative(state.second);
    StatePair out(grid);
    for (int i = 0; i < g.n; ++i) {
        out.first[i] = state.second[i];
        out.second[i] = lw1[i] - cp * state.first[i] + odd_pow(state.first[i], p) -
                        (p + 3.0) / (p - 1.0) * state.second[i] -
                        2.0 * g.nodes[i] * dw2[i];
    }
    if (cfg.N > 1) {
        const Field dw1 = derivative(state.first);
        const double es = std::exp(-s);
        for (int i = 0; i < g.n; ++i)
            out.second[i] += es * (cfg.N - 1) / (cfg.r0 + g.nodes[i] * es) * dw1[i];
    }
    return out;
}

/// One classical RK4 step; the caller checks finiteness.
inline StatePair step(const StatePair& state, double s, double ds, const SelfSimConfig& cfg) {
    const StatePair k1 = rhs(state, s, cfg);
    const StatePair k2 = rhs(state + 0.5 * ds * k1, s + 0.5 * ds, cfg);
    const StatePair k3 = rhs(state + 0.5 * ds * k2, s + 0.5 * ds, cfg);
    const StatePair k4 = rhs(state + ds * k3, s + ds, cfg);
    return state + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline bool finite(const StatePair& st) {
    return all_finite(st.first.v) && all_finite(st.second.v);
}

namespace detail {

// Modal cutoff matrix zeroing the top third of the Jacobi spectrum.
// V holds the rho-orthonormal polynomials at the nodes; V^{-1} = V^T diag(w).
inline Eigen::MatrixXd filter_matrix(const Grid& g) {
    const int n = g.n;
    Eigen::MatrixXd V(n, n);
    const double a = g.alpha;
    for (int i = 0; i < n; ++i) {
        const double y = g.nodes[i];
        double pkm1 = 0.0, pk = 1.0 / std::sqrt(g.mu0);
        V(i, 0) = pk;
        for (int k = 1; k < n; ++k) {
            const double t = 2.0 * (k - 1) + 2.0 * a + 2.0;
            const double bk = std::sqrt(k * (k + 2.0 * a) / (t * t - 1.0));
            double bkm1 = 0.0;
            if (k >= 2) {
                const double tm = 2.0 * (k - 1) + 2.0 * a;
                bkm1 = std::sqrt((k - 1) * (k - 1 + 2.0 * a) / (tm * tm - 1.0));
            }
            const double pkp1 = (y * pk - bkm1 * pkm1) / bk;
            pkm1 = pk;
            pk = pkp1;
            V(i, k) = pk;
        }
    }
    Eigen::VectorXd z = Eigen::VectorXd::Ones(n);
    for (int k = 2 * n / 3; k < n; ++k) z(k) = 0.0;
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(g.quad_weights.data(), n);
    return V * z.asDiagonal() * V.transpose() * w.asDiagonal();
}

}  // namespace detail

struct ShootResult {
    SolitonParams init;     // tuned (d0, nu0)
    int iterations = 0;
    double nu_end = 0.0;            // modulated nu at s_end for the tuned data
    double d_end_offset = 0.0;      // d(s_end) - d_hat0
    Trace trace;                    // final run with the tuned data
    bool within_ball = false;       // |d0-d_hat0|, |nu0| <= A e^{-s0}
};

using StateObserver = std::function<void(double s, const StatePair& state)>;

inline Trace evolve(const StatePair& init, const SelfSimConfig& cfg,
                    const StateObserver& observer = {});

/// Pick (d0, nu0) so the trajectory converges to kappa(d_hat0): secant-style
/// corrections kill the unstable nu mode at s_end and center the neutral d
/// drift, the discrete counterpart of the topological shooting argument.
inline ShootResult shoot_initial_params(const SelfSimConfig& cfg, int iters = 3,
                                        double ball_A = 10.0) {
    cfg.validate();
    auto grid = build_grid(cfg.n, cfg.p);
    ShootResult out;
    SolitonParams prm{cfg.d_hat0, 0.0};
    for (int it = 0; it < iters; ++it) {
        out.trace = evolve(kappa_star(prm, grid), cfg);
        out.iterations = it + 1;
        if (!out.trace.completed() || out.trace.samples.empty()) break;
        const TraceSample& last = out.trace.samples.back();
        out.nu_end = last.nu;
        out.d_end_offset = last.d - cfg.d_hat0;
        if (std::fabs(out.nu_end) < 1e-9 && std::fabs(out.d_end_offset) < 1e-9) break;
        prm.d -= out.d_end_offset;
        prm.nu -= out.nu_end * std::exp(-(last.s - cfg.s0));
        if (!admissible(prm)) break;
    }
    out.init = prm;
    const double ball = ball_A * std::exp(-cfg.s0);
    out.within_ball =
        std::fabs(prm.d - cfg.d_hat0) <= ball && std::fabs(prm.nu) <= ball;
    return out;
}

/// Integrate from s0 to s_end, modulating every sample_every steps.
inline Trace evolve(const StatePair& init, const SelfSimConfig& cfg,
                    const StateObserver& observer) {
    cfg.validate();
    if (!finite(init)) throw std::invalid_argument("evolve: nonfinite initial state");

    const GridPtr& grid = init.grid();
    if (grid->n != cfg.n || grid->p != cfg.p)
        throw std::invalid_argument("evolve: state grid does not match config");

    Trace trace;
    trace.s0 = cfg.s0;
    const double ds = cfg.effective_ds();
    const long nsteps = static_cast<long>(std::ceil((cfg.s_end - cfg.s0) / ds - 1e-12));
    const double q_cap = std::pow(cfg.s0, -0.5);
    const double band_cap = std::pow(cfg.s0, -0.25);

    Eigen::MatrixXd filt;
    if (cfg.spectral_filter) filt = detail::filter_matrix(*grid);
    auto apply_filter = [&](StatePair& st) {
        Eigen::Map<Eigen::VectorXd> v1(st.first.v.data(), st.first.n());
        Eigen::Map<Eigen::VectorXd> v2(st.second.v.data(), st.second.n());
        v1 = (filt * v1).eval();
        v2 = (filt * v2).eval();
    };

    SolitonParams warm{cfg.d_hat0, 0.0};
    auto sample = [&](const StatePair& st, double s) -> bool {
        ModulationResult mr = modulate(st, warm, cfg.mod_tol, cfg.mod_max_iter);
        if (!mr.converged) {
            mr = modulate(st, SolitonParams{cfg.d_hat0, 0.0}, cfg.mod_tol, cfg.mod_max_iter);
            if (!mr.converged) {
                trace.status = TraceStatus::modulation_failure;
                trace.failure_reason = "modulation did not converge";
                trace.failure_s = s;
                return false;
            }
        }
        warm = mr.params;
        TraceSample smp;
        smp.s = s;
        smp.d = mr.params.d;
        smp.nu = mr.params.nu;
        smp.q_norm_H = mr.q_norm;
        const EnergyReport er = h_functional(mr.q, mr.params, cfg.effective_eta());
        smp.phi_qq = er.phi_qq;
        smp.h_value = er.h;
        smp.orth0 = mr.residuals[0];
        smp.orth1 = mr.residuals[1];
        trace.samples.push_back(smp);
        if (!trace.constraint_violated) {
            const double band = std::fabs(mr.params.nu) / (1.0 - std::fabs(mr.params.d));
            if (mr.q_norm > q_cap || band > band_cap) {
                trace.constraint_violated = true;
                trace.constraint_violation_s = s;
                trace.violated_constraint = mr.q_norm > q_cap ? "q_norm" : "nu_band";
            }
        }
        return true;
    };

    StatePair state = init;
    if (!sample(state, cfg.s0)) return trace;
    if (observer) observer(cfg.s0, state);
    double s = cfg.s0;
    for (long k = 0; k < nsteps; ++k) {
        state = step(state, s, ds, cfg);
        if (cfg.spectral_filter) apply_filter(state);
        s = cfg.s0 + (k + 1) * ds;
        if (!finite(state)) {
            trace.status = TraceStatus::scheme_blowup;
            trace.failure_reason = "nonfinite state (scheme blow-up)";
            trace.failure_s = s;
            return trace;
        }
        if (observer) observer(s, state);
        if ((k + 1) % cfg.sample_every == 0 || k + 1 == nsteps) {
            if (!sample(state, s)) return trace;
        }
    }
    return trace;
}

}  // namespace solwave
