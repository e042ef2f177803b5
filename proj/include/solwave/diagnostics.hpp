// Energy-functional diagnostics for the modulated remainder q:
// the quadratic form varphi with potential psi_{d,nu}, the cubic remainder
// R = -\int F(q_1) rho, the Lyapunov functional h, exponential decay fits,
// the shrinking-set membership check, and the parameter-dynamics audit.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "solwave/grid.hpp"
#include "solwave/solitons.hpp"
#include "solwave/trace.hpp"

namespace solwave {

/// varphi(q,q) = \int [ (q1')^2 (1-y^2) - psi_{d,nu} q1^2 + q2^2 ] rho dy,
/// psi_{d,nu} = p kappa*_1^{p-1} - 2(p+1)/(p-1)^2.
inline double varphi(const StatePair& q, const SolitonParams& params) {
    require_admissible(params);
    const Grid& g = *q.grid();
    const double p = g.p;
    const Field k1 = kappa_star(params, q.grid()).first;
    const Field qp = derivative(q.first);
    const double cp = 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0));
    std::vector<double> t(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double psi = p * pos_pow(k1[i], p - 1.0) - cp;
        t[i] = g.quad_weights[i] *
               (qp[i] * qp[i] * g.one_minus_y2[i] - psi * q.first[i] * q.first[i] +
                q.second[i] * q.second[i]);
    }
    return pairwise_sum(t);
}

/// F(a) = |k+a|^{p+1}/(p+1) - k^{p+1}/(p+1) - k^p a - (p/2) k^{p-1} a^2,
/// the antiderivative of f_{d,nu}; cubic order at a = 0.
inline double nonlinear_F(double a, double k, double p) {
    return std::pow(std::fabs(k + a), p + 1.0) / (p + 1.0) -
           std::pow(k, p + 1.0) / (p + 1.0) - std::pow(k, p) * a -
           0.5 * p * std::pow(k, p - 1.0) * a * a;
}

/// R = -\int F(q1) rho dy (the rho-weighted remainder used inside h).
inline double nonlinear_R(const Field& q1, const SolitonParams& params) {
    require_admissible(params);
    const Grid& g = *q1.grid;
    const Field k1 = kappa_star(params, q1.grid).first;
    std::vector<double> t(g.n);
    for (int i = 0; i < g.n; ++i)
        t[i] = -g.quad_weights[i] * nonlinear_F(q1[i], k1[i], g.p);
    return pairwise_sum(t);
}

struct EnergyReport {
    double phi_qq = 0.0;  // varphi(q,q)
    double R = 0.0;
    double h = 0.0;  // h = varphi/2 + R + eta \int q1 q2 rho
    double eta = 0.0;
    double ratio_H = 0.0;  // varphi(q,q) / ||q||_H^2
};

inline EnergyReport h_functional(const StatePair& q, const SolitonParams& params, double eta) {
    EnergyReport rep;
    rep.eta = eta;
    rep.phi_qq = varphi(q, params);
    rep.R = nonlinear_R(q.first, params);
    const Grid& g = *q.grid();
    std::vector<double> t(g.n);
    for (int i = 0; i < g.n; ++i)
        t[i] = g.quad_weights[i] * q.first[i] * q.second[i];
    rep.h = 0.5 * rep.phi_qq + rep.R + eta * pairwise_sum(t);
    const double nq = inner_phi(q, q);
    rep.ratio_H = nq > 0.0 ? rep.phi_qq / nq : 0.0;
    return rep;
}

inline double default_eta(double p) { return 0.1 / (p - 1.0); }

// ---------------------------------------------------------------------------
// Trace analysis
// ---------------------------------------------------------------------------

enum class DecayField { q_norm_sq, h };

struct DecayFit {
    double delta_est = 0.0;  // decay rate: positive means the value decays
    double A_est = 0.0;      // fitted value at s = s0
    double r2 = 0.0;
    std::size_t n_used = 0;
};

/// Least-squares exponential fit value ~ A exp(-delta (s-s0)) on the
/// positive samples of the chosen trace column.
inline DecayFit fit_decay(const Trace& trace, DecayField field) {
    std::vector<double> xs, ys;
    for (const auto& smp : trace.samples) {
        const double v = field == DecayField::q_norm_sq ? smp.q_norm_H * smp.q_norm_H
                                                        : smp.h_value;
        if (v > 0.0 && std::isfinite(v)) {
            xs.push_back(smp.s - trace.s0);
            ys.push_back(std::log(v));
        }
    }
    if (xs.size() < 10)
        throw std::invalid_argument("fit_decay: need >= 10 positive samples");
    const LinearFit lf = fit_line(xs, ys);
    DecayFit out;
    out.delta_est = -lf.slope;
    out.A_est = std::exp(lf.intercept);
    out.r2 = lf.r2;
    out.n_used = lf.n;
    return out;
}

struct ShrinkingSetSpec {
    double A = 1.0;       // > 0
    double delta = 0.5;   // in (0,1)
    double s0 = 0.0;
    double d_hat0 = 0.0;
};

struct ShrinkCheck {
    bool inside = true;
    double first_exit_s = std::numeric_limits<double>::quiet_NaN();
    std::string which_constraint;  // "nu" | "d" | "q"
    double max_normalized = 0.0;   // max over samples/constraints of value/envelope
};

/// Pointwise check of |nu|, |d-d_hat0|, ||q||^2 <= A exp(-delta(s-s0)-s0).
inline ShrinkCheck shrinking_set_check(const Trace& trace, const ShrinkingSetSpec& spec) {
    if (!(spec.A > 0.0) || !(spec.delta > 0.0 && spec.delta < 1.0))
        throw std::invalid_argument("shrinking_set_check: need A > 0, delta in (0,1)");
    if (trace.samples.empty())
        throw std::invalid_argument("shrinking_set_check: empty trace");
    ShrinkCheck out;
    for (const auto& smp : trace.samples) {
        const double env = spec.A * std::exp(-spec.delta * (smp.s - spec.s0) - spec.s0);
        const double vals[3] = {std::fabs(smp.nu), std::fabs(smp.d - spec.d_hat0),
                                smp.q_norm_H * smp.q_norm_H};
        static const char* names[3] = {"nu", "d", "q"};
        for (int k = 0; k < 3; ++k) {
            out.max_normalized = std::max(out.max_normalized, vals[k] / env);
            if (out.inside && vals[k] > env) {
                out.inside = false;
                out.first_exit_s = smp.s;
                out.which_constraint = names[k];
            }
        }
    }
    return out;
}

struct DerivAudit {
    std::vector<double> s;
    std::vector<double> lhs;     // (|d'| + |nu' - nu|)/(1 - d*^2)
    std::vector<double> rhs;     // ||q||^2 + ||q|| |nu|/(1 - d*^2) + e^{-s}
    std::vector<double> ratios;  // lhs/rhs per sample
    double max_ratio = 0.0;      // empirical C-bar
};

/// Finite-difference audit of the parameter-dynamics inequality.
inline DerivAudit parameter_derivative_audit(const Trace& trace) {
    const auto& sm = trace.samples;
    if (sm.size() < 3)
        throw std::invalid_argument("parameter_derivative_audit: need >= 3 samples");
    DerivAudit out;
    const std::size_t n = sm.size();
    for (std::size_t i = 0; i < n; ++i) {
        double dp, nup;
        if (i == 0) {
            const double h = sm[1].s - sm[0].s;
            dp = (sm[1].d - sm[0].d) / h;
            nup = (sm[1].nu - sm[0].nu) / h;
        } else if (i == n - 1) {
            const double h = sm[i].s - sm[i - 1].s;
            dp = (sm[i].d - sm[i - 1].d) / h;
            nup = (sm[i].nu - sm[i - 1].nu) / h;
        } else {
            const double h = sm[i + 1].s - sm[i - 1].s;
            dp = (sm[i + 1].d - sm[i - 1].d) / h;
            nup = (sm[i + 1].nu - sm[i - 1].nu) / h;
        }
        const double ds = sm[i].d / (1.0 + sm[i].nu);
        const double omd = 1.0 - ds * ds;
        const double lhs = (std::fabs(dp) + std::fabs(nup - sm[i].nu)) / omd;
        const double q = sm[i].q_norm_H;
        const double rhs = q * q + q * std::fabs(sm[i].nu) / omd + std::exp(-sm[i].s);
        out.s.push_back(sm[i].s);
        out.lhs.push_back(lhs);
        out.rhs.push_back(rhs);
        out.ratios.push_back(lhs / rhs);
        out.max_ratio = std::max(out.max_ratio, lhs / rhs);
    }
    return out;
}

}  // namespace solwave
