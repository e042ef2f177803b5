// Finite-difference solver for the radial semilinear wave equation
//   dtt u = drr u + (N-1)/r dr u + |u|^{p-1} u
// on [r_min, r_max] with r_min > 0, from the cutoff soliton initial data;
// blow-up time extrapolation, the blow-up curve T(r), the map back to
// similarity variables, and the cone average.
//
// Space: second-order centered differences (one-sided at the two boundary
// nodes; by finite propagation speed their influence cannot reach the
// backward light cone of interest before the fit completes).  Time: RK4
// with dt = dt_factor * dr.  Nodes past blow-up are frozen at a cap well
// above the fitting band; the 1-Lipschitz property of T(r) keeps frozen
// data outside the domain of dependence of any still-fitting node.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "solwave/grid.hpp"
#include "solwave/numerics.hpp"
#include "solwave/solitons.hpp"

namespace solwave {

struct PhysicalConfig {
    double p = 3.0;
    int N = 1;
    double r0 = 2.0;
    double T0 = 1.0;
    double eps0 = 0.1;  // cutoff margin
    double d0 = 0.0;
    double nu0 = 0.0;

    double dr = 1e-3;
    double dt_factor = 0.9;  // dt = dt_factor * dr (CFL for unit speed)
    double domain_pad = -1.0;  // < 0: 0.9 * eps0
    double blowup_threshold = -1.0;   // explicit M; < 0: threshold_factor * sup |u0|
    double threshold_factor = 1e3;    // used when blowup_threshold is not explicit
    double cap_factor = 50.0;         // freeze amplitude at cap_factor * threshold
    double t_max = -1.0;             // < 0: 1.5 * T0

    std::vector<double> monitor_radii;   // time series for blow-up fitting
    std::vector<double> snapshot_times;  // (u, dt u) snapshots

    double pad() const { return domain_pad < 0.0 ? 0.9 * eps0 : domain_pad; }
    double r_min() const { return r0 - T0 - 2.0 * eps0 - pad(); }
    double r_max() const { return r0 + T0 + 2.0 * eps0 + pad(); }
    int num_nodes() const {
        return static_cast<int>(std::floor((r_max() - r_min()) / dr + 0.5)) + 1;
    }
    double r(int j) const { return r_min() + j * dr; }
    double dt() const { return dt_factor * dr; }
    double effective_t_max() const { return t_max < 0.0 ? 1.5 * T0 : t_max; }

    void validate() const {
        if (!(p > 1.0) || N < 1) throw std::invalid_argument("PhysicalConfig: bad p or N");
        if (!(T0 > 0.0) || !(eps0 > 0.0)) throw std::invalid_argument("PhysicalConfig: bad T0/eps0");
        if (!(r_min() > 0.0))
            throw std::invalid_argument("PhysicalConfig: domain touches r = 0; need r0-T0-3eps0 > 0");
        if (pad() > eps0)
            throw std::invalid_argument("PhysicalConfig: pad must stay within eps0 of the support");
        if (!(dr > 0.0) || num_nodes() < 16) throw std::invalid_argument("PhysicalConfig: bad dr");
        if (!(dt_factor > 0.0) || dt_factor > 0.9)
            throw std::invalid_argument("PhysicalConfig: need 0 < dt_factor <= 0.9 (CFL)");
        if (!(std::fabs(d0) < 1.0) || !(nu0 > -1.0 + std::fabs(d0)))
            throw std::invalid_argument("PhysicalConfig: inadmissible (d0, nu0)");
    }
};

/// Smooth bump: 1 on [r0-T0-eps0, r0+T0+eps0], 0 outside the 2eps0 band,
/// glued with the standard C^infinity ramp f(x)/(f(x)+f(1-x)), f = e^{-1/x}.
inline double cutoff_chi(double r, const PhysicalConfig& cfg) {
    auto f = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    auto ramp = [&](double x) {  // 0 at x<=0, 1 at x>=1, monotone
        const double a = f(x), b = f(1.0 - x);
        return a / (a + b);
    };
    const double lo1 = cfg.r0 - cfg.T0 - 2.0 * cfg.eps0, lo2 = cfg.r0 - cfg.T0 - cfg.eps0;
    const double hi1 = cfg.r0 + cfg.T0 + cfg.eps0, hi2 = cfg.r0 + cfg.T0 + 2.0 * cfg.eps0;
    if (r <= lo1 || r >= hi2) return 0.0;
    if (r < lo2) return ramp((r - lo1) / cfg.eps0);
    if (r > hi1) return ramp((hi2 - r) / cfg.eps0);
    return 1.0;
}

/// Initial data chi(r) (u_hat, (1/(1+nu0)) dt u_hat) at t = 0.
inline std::pair<std::vector<double>, std::vector<double>> build_initial_data(
    const PhysicalConfig& cfg) {
    cfg.validate();
    // u_hat must be regular on the support of chi
    const double lo = cfg.r0 - cfg.T0 - 2.0 * cfg.eps0, hi = cfg.r0 + cfg.T0 + 2.0 * cfg.eps0;
    const double den_lo = (1.0 + cfg.nu0) * cfg.T0 + cfg.d0 * (lo - cfg.r0);
    const double den_hi = (1.0 + cfg.nu0) * cfg.T0 + cfg.d0 * (hi - cfg.r0);
    if (std::min(den_lo, den_hi) < 1e-6)
        throw std::invalid_argument(
            "build_initial_data: u_hat singular on the cutoff support; reduce eps0");

    const int m = cfg.num_nodes();
    std::vector<double> u0(m), u1(m);
    const double beta = 1.0 / (cfg.p - 1.0);
    for (int j = 0; j < m; ++j) {
        const double r = cfg.r(j);
        const double chi = cutoff_chi(r, cfg);
        if (chi == 0.0) { u0[j] = u1[j] = 0.0; continue; }
        const double uh = u_hat(cfg.d0, cfg.nu0, cfg.r0, cfg.T0, r, 0.0, cfg.p);
        const double denom = (1.0 + cfg.nu0) * cfg.T0 + cfg.d0 * (r - cfg.r0);
        // (1/(1+nu0)) dt u_hat = (2/(p-1)) u_hat / denom
        u0[j] = chi * uh;
        u1[j] = chi * 2.0 * beta * uh / denom;
    }
    return {std::move(u0), std::move(u1)};
}

struct PointSeries {
    double r = 0.0;
    int index = -1;
    std::vector<double> t, u;
    bool reached_threshold = false;
};

struct PhysicalHistory {
    int m = 0;
    double r_min = 0.0, dr = 0.0, dt = 0.0;
    double threshold = 0.0, sup_initial = 0.0;

    std::vector<double> snapshot_t;
    std::vector<std::vector<double>> snap_u, snap_ut;
    std::vector<PointSeries> monitors;

    bool scheme_failure = false;
    double failure_t = std::numeric_limits<double>::quiet_NaN();
    bool threshold_reached = false;
    double first_threshold_t = std::numeric_limits<double>::quiet_NaN();
    long steps = 0;
    double t_end = 0.0;

    double r_of(int j) const { return r_min + j * dr; }
    int index_of(double r) const {
        return static_cast<int>(std::floor((r - r_min) / dr + 0.5));
    }
};

using StepObserver = std::function<void(double t, const std::vector<double>& u,
                                        const std::vector<double>& ut)>;

inline PhysicalHistory evolve_physical(const std::vector<double>& u0,
                                       const std::vector<double>& u1,
                                       const PhysicalConfig& cfg,
                                       const StepObserver& observer = {}) {
    cfg.validate();
    const int m = cfg.num_nodes();
    if (static_cast<int>(u0.size()) != m || static_cast<int>(u1.size()) != m)
        throw std::invalid_argument("evolve_physical: initial data size mismatch");

    PhysicalHistory hist;
    hist.m = m;
    hist.r_min = cfg.r_min();
    hist.dr = cfg.dr;
    hist.dt = cfg.dt();
    for (double v : u0) hist.sup_initial = std::max(hist.sup_initial, std::fabs(v));
    hist.threshold = cfg.blowup_threshold > 0.0 ? cfg.blowup_threshold
                                                 : cfg.threshold_factor * hist.sup_initial;
    if (hist.threshold < 10.0 * hist.sup_initial)
        throw std::invalid_argument("evolve_physical: threshold not well above initial sup");
    const double cap = cfg.cap_factor * hist.threshold;
    const double record_from = hist.threshold / 100.0;

    for (double rm : cfg.monitor_radii) {
        PointSeries ms;
        ms.r = rm;
        ms.index = hist.index_of(rm);
        if (ms.index < 2 || ms.index > m - 3)
            throw std::invalid_argument("evolve_physical: monitor radius outside the domain");
        hist.monitors.push_back(std::move(ms));
    }
    std::vector<double> snap_targets = cfg.snapshot_times;
    std::sort(snap_targets.begin(), snap_targets.end());
    std::size_t next_snap = 0;

    std::vector<double> u = u0, v = u1, ku(m), kv(m);
    std::vector<double> u2(m), v2(m), u3(m), v3(m), u4(m), v4(m);
    std::vector<double> du1(m), dv1(m), du2(m), dv2(m), du3(m), dv3(m), du4(m), dv4(m);
    std::vector<char> frozen(m, 0);

    const double idr2 = 1.0 / (cfg.dr * cfg.dr);
    const double i2dr = 0.5 / cfg.dr;
    auto deriv = [&](const std::vector<double>& uu, const std::vector<double>& vv,
                     std::vector<double>& du, std::vector<double>& dv) {
        for (int j = 0; j < m; ++j) {
            if (frozen[j]) { du[j] = 0.0; dv[j] = 0.0; continue; }
            double urr, ur;
            if (j == 0) {
                urr = (2.0 * uu[0] - 5.0 * uu[1] + 4.0 * uu[2] - uu[3]) * idr2;
                ur = (-3.0 * uu[0] + 4.0 * uu[1] - uu[2]) * i2dr;
            } else if (j == m - 1) {
                urr = (2.0 * uu[m - 1] - 5.0 * uu[m - 2] + 4.0 * uu[m - 3] - uu[m - 4]) * idr2;
                ur = (3.0 * uu[m - 1] - 4.0 * uu[m - 2] + uu[m - 3]) * i2dr;
            } else {
                urr = (uu[j - 1] - 2.0 * uu[j] + uu[j + 1]) * idr2;
                ur = (uu[j + 1] - uu[j - 1]) * i2dr;
            }
            du[j] = vv[j];
            dv[j] = urr + odd_pow(uu[j], cfg.p);
            if (cfg.N > 1) dv[j] += (cfg.N - 1) / cfg.r(j) * ur;
        }
    };

    const double dt = cfg.dt();
    const double t_stop = cfg.effective_t_max();
    double t = 0.0;
    std::vector<double> u_prev, v_prev;

    auto record = [&](double tnow) {
        for (auto& mon : hist.monitors) {
            const double val = u[mon.index];
            if (std::fabs(val) >= record_from && !frozen[mon.index]) {
                mon.t.push_back(tnow);
                mon.u.push_back(val);
            }
            if (std::fabs(val) >= hist.threshold) mon.reached_threshold = true;
        }
        if (!hist.threshold_reached) {
            for (int j = 0; j < m; ++j) {
                if (std::fabs(u[j]) >= hist.threshold) {
                    hist.threshold_reached = true;
                    hist.first_threshold_t = tnow;
                    break;
                }
            }
        }
    };
    record(0.0);
    if (observer) observer(0.0, u, v);

    while (t < t_stop) {
        u_prev = u;
        v_prev = v;
        // RK4
        deriv(u, v, du1, dv1);
        for (int j = 0; j < m; ++j) { u2[j] = u[j] + 0.5 * dt * du1[j]; v2[j] = v[j] + 0.5 * dt * dv1[j]; }
        deriv(u2, v2, du2, dv2);
        for (int j = 0; j < m; ++j) { u3[j] = u[j] + 0.5 * dt * du2[j]; v3[j] = v[j] + 0.5 * dt * dv2[j]; }
        deriv(u3, v3, du3, dv3);
        for (int j = 0; j < m; ++j) { u4[j] = u[j] + dt * du3[j]; v4[j] = v[j] + dt * dv3[j]; }
        deriv(u4, v4, du4, dv4);
        for (int j = 0; j < m; ++j) {
            u[j] += dt / 6.0 * (du1[j] + 2.0 * du2[j] + 2.0 * du3[j] + du4[j]);
            v[j] += dt / 6.0 * (dv1[j] + 2.0 * dv2[j] + 2.0 * dv3[j] + dv4[j]);
        }
        const double t_new = t + dt;

        for (int j = 0; j < m; ++j) {
            if (frozen[j]) continue;
            if (!std::isfinite(u[j]) || !std::isfinite(v[j])) {
                hist.scheme_failure = true;
                hist.failure_t = t_new;
                hist.steps++;
                hist.t_end = t_new;
                return hist;
            }
            if (std::fabs(u[j]) > cap) {  // past blow-up; freeze
                u[j] = std::copysign(cap, u[j]);
                v[j] = 0.0;
                frozen[j] = 1;
            }
        }

        // snapshots: cubic Hermite in t for u (dt u is known at both ends),
        // linear blend for dt u itself
        while (next_snap < snap_targets.size() && snap_targets[next_snap] <= t_new + 1e-15) {
            const double ts = snap_targets[next_snap];
            const double x = (ts - t) / dt;
            const double h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
            const double h10 = x * (1.0 - x) * (1.0 - x);
            const double h01 = x * x * (3.0 - 2.0 * x);
            const double h11 = x * x * (x - 1.0);
            std::vector<double> su(m), sv(m);
            for (int j = 0; j < m; ++j) {
                su[j] = h00 * u_prev[j] + h10 * dt * v_prev[j] + h01 * u[j] + h11 * dt * v[j];
                sv[j] = (1.0 - x) * v_prev[j] + x * v[j];
            }
            hist.snapshot_t.push_back(ts);
            hist.snap_u.push_back(std::move(su));
            hist.snap_ut.push_back(std::move(sv));
            ++next_snap;
        }

        t = t_new;
        hist.steps++;
        record(t);
        if (observer) observer(t, u, v);

        if (!hist.monitors.empty() && next_snap >= snap_targets.size()) {
            bool all_done = true;
            for (const auto& mon : hist.monitors)
                if (!mon.reached_threshold) { all_done = false; break; }
            if (all_done) break;
        }
    }
    hist.t_end = t;
    return hist;
}

// ---------------------------------------------------------------------------
// Blow-up time extrapolation and the blow-up curve
// ---------------------------------------------------------------------------

struct BlowupFit {
    bool detected = false;
    double T = std::numeric_limits<double>::quiet_NaN();
    double fit_quality = 0.0;  // r^2 of the linearized fit
    double c = 0.0;            // amplitude of c (T-t)^{-2/(p-1)}
    std::size_t n_points = 0;
};

/// Fit u(t) ~ c (T-t)^{-2/(p-1)} on the band [M/10, M]:
/// z = u^{-(p-1)/2} is linear in t with root T.
inline BlowupFit estimate_blowup_time(const PointSeries& series, double p, double threshold) {
    BlowupFit out;
    std::vector<double> ts, zs;
    for (std::size_t i = 0; i < series.u.size(); ++i) {
        const double a = std::fabs(series.u[i]);
        if (a >= threshold / 10.0 && a <= threshold) {
            ts.push_back(series.t[i]);
            zs.push_back(std::pow(a, -(p - 1.0) / 2.0));
        }
    }
    if (ts.size() < 5) return out;  // no blow-up detected in the band
    const LinearFit lf = fit_line(ts, zs);
    if (!(lf.slope < 0.0)) return out;
    out.detected = true;
    out.T = -lf.intercept / lf.slope;
    out.fit_quality = lf.r2;
    out.c = std::pow(-lf.slope, -2.0 / (p - 1.0));
    out.n_points = ts.size();
    return out;
}

struct BlowupCurve {
    struct Sample {
        double r = 0.0;
        double T = std::numeric_limits<double>::quiet_NaN();
        double fit_quality = 0.0;
        bool detected = false;
    };
    std::vector<Sample> samples;
    double slope_at_r0 = std::numeric_limits<double>::quiet_NaN();
    double T_at_r0 = std::numeric_limits<double>::quiet_NaN();
    double noncharacteristic_margin = 0.0;  // 1 - max |T_j - T(r0)|/|r_j - r0|
    bool lipschitz_ok = true;
    double lipschitz_tol = 0.0;
};

/// Run the configured simulation and extrapolate T(r) at the given radii.
inline BlowupCurve blowup_curve(PhysicalConfig cfg, const std::vector<double>& r_samples,
                                double lipschitz_tol = -1.0) {
    if (r_samples.size() < 3)
        throw std::invalid_argument("blowup_curve: need at least 3 radii");
    cfg.monitor_radii = r_samples;
    auto [u0, u1] = build_initial_data(cfg);
    const PhysicalHistory hist = evolve_physical(u0, u1, cfg);
    if (hist.scheme_failure)
        throw std::runtime_error("blowup_curve: scheme failure before fitting completed");

    BlowupCurve curve;
    curve.lipschitz_tol = lipschitz_tol < 0.0 ? 5e-3 * cfg.T0 : lipschitz_tol;
    for (const auto& mon : hist.monitors) {
        const BlowupFit f = estimate_blowup_time(mon, cfg.p, hist.threshold);
        curve.samples.push_back({hist.r_of(mon.index), f.T, f.fit_quality, f.detected});
    }
    std::sort(curve.samples.begin(), curve.samples.end(),
              [](const auto& a, const auto& b) { return a.r < b.r; });

    // nearest sample gives T(r0); slope from its two neighbours
    int i0 = 0;
    for (std::size_t i = 1; i < curve.samples.size(); ++i)
        if (std::fabs(curve.samples[i].r - cfg.r0) < std::fabs(curve.samples[i0].r - cfg.r0))
            i0 = static_cast<int>(i);
    curve.T_at_r0 = curve.samples[i0].T;
    const int il = std::max(0, i0 - 1);
    const int ir = std::min<int>(curve.samples.size() - 1, i0 + 1);
    if (ir > il && curve.samples[il].detected && curve.samples[ir].detected)
        curve.slope_at_r0 = (curve.samples[ir].T - curve.samples[il].T) /
                            (curve.samples[ir].r - curve.samples[il].r);

    for (std::size_t i = 0; i < curve.samples.size(); ++i) {
        const auto& s = curve.samples[i];
        if (!s.detected) continue;
        if (static_cast<int>(i) != i0 && std::fabs(s.r - cfg.r0) > 0.0) {
            const double ratio = std::fabs(s.T - curve.T_at_r0) / std::fabs(s.r - cfg.r0);
            curve.noncharacteristic_margin =
                std::max(curve.noncharacteristic_margin, ratio);
        }
        if (i > 0 && curve.samples[i - 1].detected) {
            const double dT = std::fabs(s.T - curve.samples[i - 1].T);
            const double drr = std::fabs(s.r - curve.samples[i - 1].r);
            if (dT > drr + curve.lipschitz_tol) curve.lipschitz_ok = false;
        }
    }
    curve.noncharacteristic_margin = 1.0 - curve.noncharacteristic_margin;
    return curve;
}

// ---------------------------------------------------------------------------
// Map back to similarity variables, cone average
// ---------------------------------------------------------------------------

namespace detail {

/// 4-point Lagrange (cubic) interpolation on the uniform r grid.
inline double cubic_interp(const std::vector<double>& f, double r_min, double dr, double x) {
    const int m = static_cast<int>(f.size());
    int j = static_cast<int>(std::floor((x - r_min) / dr));
    j = std::clamp(j, 1, m - 3);
    const double s = (x - (r_min + j * dr)) / dr;  // in [0,1] away from edges
    const double c0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    const double c1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    const double c2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    const double c3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return c0 * f[j - 1] + c1 * f[j] + c2 * f[j + 1] + c3 * f[j + 2];
}

}  // namespace detail

/// w(y,s) = (T0-t)^{2/(p-1)} u(r,t), t = T0 - e^{-s}, r = r0 + y e^{-s};
/// ds w = (T0-t)^{(p+1)/(p-1)} dt u - (2/(p-1)) w - y dy w.
inline StatePair to_selfsim(const PhysicalHistory& hist, double r0, double T0, double s,
                            const GridPtr& grid) {
    const double mu = std::exp(-s);
    if (!(mu <= T0)) throw std::invalid_argument("to_selfsim: need e^{-s} <= T0");
    const double t = T0 - mu;
    int snap = -1;
    for (std::size_t i = 0; i < hist.snapshot_t.size(); ++i)
        if (std::fabs(hist.snapshot_t[i] - t) <= hist.dt)
            { snap = static_cast<int>(i); break; }
    if (snap < 0) throw std::invalid_argument("to_selfsim: no snapshot near requested s");

    const double r_lo = r0 - mu, r_hi = r0 + mu;
    if (r_lo < hist.r_min + 2.0 * hist.dr || r_hi > hist.r_of(hist.m - 3))
        throw std::invalid_argument("to_selfsim: cone exits the r grid");

    const auto& u = hist.snap_u[snap];
    const auto& ut = hist.snap_ut[snap];
    std::vector<double> ur(hist.m, 0.0);
    for (int j = 1; j < hist.m - 1; ++j) ur[j] = (u[j + 1] - u[j - 1]) / (2.0 * hist.dr);

    const double p = grid->p;
    const double beta = 1.0 / (p - 1.0);
    const double mu2b = pos_pow(mu, 2.0 * beta);
    const double mu2b1 = pos_pow(mu, 2.0 * beta + 1.0);
    StatePair out(grid);
    for (int i = 0; i < grid->n; ++i) {
        const double y = grid->nodes[i];
        const double r = r0 + y * mu;
        const double ui = detail::cubic_interp(u, hist.r_min, hist.dr, r);
        const double uti = detail::cubic_interp(ut, hist.r_min, hist.dr, r);
        const double uri = detail::cubic_interp(ur, hist.r_min, hist.dr, r);
        out.first[i] = mu2b * ui;
        out.second[i] = mu2b1 * uti - 2.0 * beta * out.first[i] - y * mu2b1 * uri;
    }
    return out;
}

/// (1/(T0-t)) \int_{|r-r0|<T0-t} u^2 dr by the trapezoid rule.
inline double cone_average(const PhysicalHistory& hist, double t, double r0, double T0) {
    if (!(t < T0)) throw std::invalid_argument("cone_average: need t < T0");
    int snap = -1;
    for (std::size_t i = 0; i < hist.snapshot_t.size(); ++i)
        if (std::fabs(hist.snapshot_t[i] - t) <= hist.dt)
            { snap = static_cast<int>(i); break; }
    if (snap < 0) throw std::invalid_argument("cone_average: no snapshot near requested t");
    const auto& u = hist.snap_u[snap];
    const double half = T0 - t;
    const int jl = std::max(0, static_cast<int>(std::ceil((r0 - half - hist.r_min) / hist.dr)));
    const int jr = std::min(hist.m - 1,
                            static_cast<int>(std::floor((r0 + half - hist.r_min) / hist.dr)));
    if (jr <= jl) return 0.0;
    std::vector<double> terms;
    terms.reserve(jr - jl);
    for (int j = jl; j < jr; ++j)
        terms.push_back(0.5 * (u[j] * u[j] + u[j + 1] * u[j + 1]) * hist.dr);
    return pairwise_sum(terms) / half;
}

}  // namespace solwave
