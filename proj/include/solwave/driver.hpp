// Scenario orchestration for the command-line driver: flat key=value
// configs with [sections], deterministic CSV/SVG/JSON outputs, the
// run/sweep/check entry points, and the pass/fail manifest.
//
// A scenario wires the pipeline together: pick initial data (optionally by
// shooting), evolve in similarity variables with per-sample modulation,
// run the physical solver on the matching cutoff data, and evaluate the
// configured diagnostics.
#pragma once

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "solwave/diagnostics.hpp"
#include "solwave/physical.hpp"
#include "solwave/selfsim.hpp"

namespace solwave {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Config parsing: flat key = value lines grouped by [section]
// ---------------------------------------------------------------------------

class KeyValueConfig {
  public:
    static KeyValueConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    static KeyValueConfig parse(const std::string& text, const std::string& origin = "<string>") {
        KeyValueConfig cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
            cfg.values_[section + "." + key] = val;
        }
        return cfg;
    }

    bool has(const std::string& sec, const std::string& key) const {
        return values_.count(sec + "." + key) > 0;
    }
    std::string get_str(const std::string& sec, const std::string& key,
                        const std::string& fallback) const {
        auto it = values_.find(sec + "." + key);
        return it == values_.end() ? fallback : it->second;
    }
    double get_num(const std::string& sec, const std::string& key, double fallback) const {
        auto it = values_.find(sec + "." + key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (...) {
            throw ConfigError("bad number for " + sec + "." + key + ": " + it->second);
        }
    }
    int get_int(const std::string& sec, const std::string& key, int fallback) const {
        const double v = get_num(sec, key, fallback);
        return static_cast<int>(v);
    }
    bool get_bool(const std::string& sec, const std::string& key, bool fallback) const {
        auto it = values_.find(sec + "." + key);
        if (it == values_.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError("bad bool for " + sec + "." + key + ": " + it->second);
    }
    std::vector<double> get_list(const std::string& sec, const std::string& key) const {
        std::vector<double> out;
        auto it = values_.find(sec + "." + key);
        if (it == values_.end()) return out;
        std::istringstream in(it->second);
        double v;
        while (in >> v) out.push_back(v);
        if (!in.eof()) throw ConfigError("bad list for " + sec + "." + key + ": " + it->second);
        return out;
    }
    void set(const std::string& sec, const std::string& key, const std::string& val) {
        values_[sec + "." + key] = val;
    }
    const std::map<std::string, std::string>& raw() const { return values_; }

  private:
    static std::string trim(std::string s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }
    std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------------------
// Deterministic serialization helpers
// ---------------------------------------------------------------------------

/// 17 significant digits: round-trips doubles and diffs stably.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_trace_csv(const std::string& path, const Trace& tr) {
    std::ofstream out(path);
    out << "s,d,nu,q_norm_H,phi_qq,h,orth0,orth1\n";
    for (const auto& s : tr.samples) {
        out << fmt17(s.s) << ',' << fmt17(s.d) << ',' << fmt17(s.nu) << ','
            << fmt17(s.q_norm_H) << ',' << fmt17(s.phi_qq) << ',' << fmt17(s.h_value) << ','
            << fmt17(s.orth0) << ',' << fmt17(s.orth1) << '\n';
    }
}

inline Trace read_trace_csv(const std::string& path, double s0) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace csv: " + path);
    Trace tr;
    tr.s0 = s0;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TraceSample smp;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &smp.s, &smp.d,
                        &smp.nu, &smp.q_norm_H, &smp.phi_qq, &smp.h_value, &smp.orth0,
                        &smp.orth1) != 8)
            throw ConfigError("bad trace csv row: " + line);
        tr.samples.push_back(smp);
    }
    return tr;
}

inline void write_curve_csv(const std::string& path, const BlowupCurve& c) {
    std::ofstream out(path);
    out << "r,T,fit_quality\n";
    for (const auto& s : c.samples)
        out << fmt17(s.r) << ',' << fmt17(s.T) << ',' << fmt17(s.fit_quality) << '\n';
}

inline BlowupCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open curve csv: " + path);
    BlowupCurve c;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        BlowupCurve::Sample s;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &s.r, &s.T, &s.fit_quality) != 3)
            throw ConfigError("bad curve csv row: " + line);
        s.detected = std::isfinite(s.T);
        c.samples.push_back(s);
    }
    return c;
}

/// Minimal line plot: axes, ticks, one polyline. No external renderer.
inline void write_svg_plot(const std::string& path, const std::vector<double>& x,
                           const std::vector<double>& y, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel) {
    const int W = 640, H = 420, ML = 70, MR = 20, MT = 40, MB = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
        xmin = std::min(xmin, x[i]);
        xmax = std::max(xmax, x[i]);
        ymin = std::min(ymin, y[i]);
        ymax = std::max(ymax, y[i]);
    }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double v) { return ML + (v - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double v) { return H - MB - (v - ymin) / (ymax - ymin) * (H - MT - MB); };

    std::ofstream out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << title << "</text>\n";
    out << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
        << H - MB << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
        << "\" stroke=\"black\"/>\n";
    char buf[64];
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmin + (xmax - xmin) * k / 4.0;
        const double yv = ymin + (ymax - ymin) * k / 4.0;
        std::snprintf(buf, sizeof buf, "%.3g", xv);
        out << "<line x1=\"" << px(xv) << "\" y1=\"" << H - MB << "\" x2=\"" << px(xv)
            << "\" y2=\"" << H - MB + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(xv) << "\" y=\"" << H - MB + 20
            << "\" text-anchor=\"middle\" font-size=\"11\">" << buf << "</text>\n";
        std::snprintf(buf, sizeof buf, "%.3g", yv);
        out << "<line x1=\"" << ML - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ML << "\" y2=\""
            << py(yv) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ML - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << buf << "</text>\n";
    }
    out << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
    out << "<text x=\"16\" y=\"" << (MT + H - MB) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << (MT + H - MB) / 2 << ")\">" << ylabel << "</text>\n";
    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
        out << px(x[i]) << ',' << py(y[i]) << ' ';
    }
    out << "\"/>\n</svg>\n";
}

// ---------------------------------------------------------------------------
// Scenario runner
// ---------------------------------------------------------------------------

struct CheckResult {
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

struct RunManifest {
    std::string scenario;
    std::string version = kVersion;
    std::map<std::string, std::string> config;
    std::vector<std::string> outputs;
    std::vector<std::pair<std::string, CheckResult>> checks;
    bool all_passed = true;

    void add_check(const std::string& name, bool pass, double value,
                   const std::string& detail = "") {
        checks.emplace_back(name, CheckResult{pass, value, detail});
        all_passed = all_passed && pass;
    }
};

inline void write_manifest(const std::string& path, const RunManifest& m) {
    nlohmann::ordered_json j;
    j["scenario"] = m.scenario;
    j["version"] = m.version;
    j["config"] = m.config;
    j["outputs"] = m.outputs;
    nlohmann::ordered_json checks;
    for (const auto& [name, c] : m.checks) {
        checks[name] = {{"pass", c.pass}, {"value", c.value}, {"detail", c.detail}};
    }
    j["checks"] = checks;
    j["all_passed"] = m.all_passed;
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

namespace detail {

inline Trace settled_window(const Trace& tr, double offset) {
    Trace out = tr;
    out.samples.clear();
    for (const auto& s : tr.samples)
        if (s.s >= tr.s0 + offset) out.samples.push_back(s);
    return out;
}

}  // namespace detail

inline RunManifest run_scenario(const std::string& config_path, std::ostream& log = std::cout) {
    const KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
    const std::string name = cfg.get_str("", "name", "unnamed");
    const std::string out_dir = cfg.get_str("", "out_dir", "runs/" + name);
    const unsigned long seed = static_cast<unsigned long>(cfg.get_num("", "seed", 0));

    const bool selfsim_on = cfg.get_bool("selfsim", "enabled", false);
    const bool physical_on = cfg.get_bool("physical", "enabled", false);
    if (!selfsim_on && !physical_on)
        throw ConfigError("scenario enables neither [selfsim] nor [physical]");

    // resolve and validate everything before touching the filesystem
    SelfSimConfig scfg;
    bool shoot = false;
    int shoot_iters = 3;
    double perturb_amp = 0.0;
    SolitonParams init_params{0.0, 0.0};
    if (selfsim_on) {
        scfg.p = cfg.get_num("selfsim", "p", 3.0);
        scfg.N = cfg.get_int("selfsim", "N", 3);
        scfg.r0 = cfg.get_num("selfsim", "r0", 1.0);
        scfg.d_hat0 = cfg.get_num("selfsim", "d_hat0", 0.3);
        scfg.s0 = cfg.get_num("selfsim", "s0", 3.0);
        scfg.s_end = cfg.get_num("selfsim", "s_end", 8.0);
        scfg.ds = cfg.get_num("selfsim", "ds", 1e-3);
        scfg.n = cfg.get_int("selfsim", "n", 48);
        scfg.sample_every = cfg.get_int("selfsim", "sample_every", 100);
        scfg.eta = cfg.get_num("selfsim", "eta", -1.0);
        scfg.spectral_filter = cfg.get_bool("selfsim", "filter", false);
        scfg.validate();
        shoot = cfg.get_bool("selfsim", "shoot", true);
        shoot_iters = cfg.get_int("selfsim", "shoot_iters", 3);
        perturb_amp = cfg.get_num("selfsim", "perturb_amp", 0.0);
        init_params = {cfg.get_num("selfsim", "d0", scfg.d_hat0),
                       cfg.get_num("selfsim", "nu0", 0.0)};
        require_admissible(init_params);
    }

    PhysicalConfig pcfg;
    std::vector<double> curve_offsets, compare_s;
    bool cone_check = false;
    if (physical_on) {
        pcfg.p = cfg.get_num("physical", "p", selfsim_on ? scfg.p : 3.0);
        pcfg.N = cfg.get_int("physical", "N", selfsim_on ? scfg.N : 1);
        pcfg.r0 = cfg.get_num("physical", "r0", selfsim_on ? scfg.r0 : 2.0);
        const double t0 = cfg.get_num("physical", "T0", -1.0);
        pcfg.T0 = t0 > 0.0 ? t0 : (selfsim_on ? std::exp(-scfg.s0) : 1.0);
        pcfg.eps0 = cfg.get_num("physical", "eps0", 0.1 * pcfg.T0);
        pcfg.d0 = cfg.get_num("physical", "d0", selfsim_on ? scfg.d_hat0 : 0.0);
        pcfg.nu0 = cfg.get_num("physical", "nu0", 0.0);
        pcfg.dr = cfg.get_num("physical", "dr", pcfg.T0 / 2500.0);
        pcfg.dt_factor = cfg.get_num("physical", "dt_factor", 0.9);
        pcfg.threshold_factor = cfg.get_num("physical", "threshold_factor", 1e3);
        pcfg.t_max = cfg.get_num("physical", "t_max", -1.0);
        curve_offsets = cfg.get_list("physical", "curve_offsets");
        compare_s = cfg.get_list("physical", "compare_s");
        cone_check = cfg.get_bool("physical", "cone_check", false);
        pcfg.validate();
    }

    std::filesystem::create_directories(out_dir);
    RunManifest manifest;
    manifest.scenario = name;
    manifest.config = cfg.raw();
    manifest.config["resolved.version"] = kVersion;

    auto grid = selfsim_on ? build_grid(scfg.n, scfg.p) : GridPtr{};
    Trace trace;
    std::vector<StatePair> captured;
    std::vector<double> capture_s;

    if (selfsim_on) {
        if (shoot) {
            const ShootResult sr = shoot_initial_params(scfg, shoot_iters);
            init_params = sr.init;
            manifest.config["resolved.d0"] = fmt17(init_params.d);
            manifest.config["resolved.nu0"] = fmt17(init_params.nu);
            manifest.add_check("shoot_within_ball", sr.within_ball,
                               std::max(std::fabs(init_params.d - scfg.d_hat0),
                                        std::fabs(init_params.nu)),
                               "|d0-d_hat0|, |nu0| <= 10 e^{-s0}");
        }
        StatePair init = kappa_star(init_params, grid);
        if (perturb_amp > 0.0) {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> gauss(0.0, 1.0);
            // smooth seeded perturbation: low-order Chebyshev combination
            for (int comp = 0; comp < 2; ++comp) {
                Field& f = comp == 0 ? init.first : init.second;
                for (int k = 0; k <= 6; ++k) {
                    const double a = gauss(rng) * std::exp(-0.5 * k);
                    for (int i = 0; i < grid->n; ++i)
                        f[i] += perturb_amp * a * std::cos(k * std::acos(grid->nodes[i]));
                }
            }
        }

        if (physical_on && !compare_s.empty()) {
            const double ds_eff = scfg.effective_ds();
            for (double starget : compare_s)
                capture_s.push_back(scfg.s0 + std::lround((starget - scfg.s0) / ds_eff) * ds_eff);
            captured.assign(capture_s.size(), StatePair(grid));
            trace = evolve(init, scfg, [&](double s, const StatePair& st) {
                for (std::size_t i = 0; i < capture_s.size(); ++i)
                    if (std::fabs(s - capture_s[i]) < ds_eff / 4.0) captured[i] = st;
            });
        } else {
            trace = evolve(init, scfg);
        }

        const std::string trace_path = out_dir + "/trace.csv";
        write_trace_csv(trace_path, trace);
        manifest.outputs.push_back(trace_path);

        manifest.add_check("trace_completed", trace.completed(),
                           static_cast<double>(trace.samples.size()), trace.failure_reason);
        manifest.add_check("constraints_held", !trace.constraint_violated,
                           trace.constraint_violation_s, trace.violated_constraint);
        double max_orth = 0.0;
        for (const auto& s : trace.samples)
            max_orth = std::max({max_orth, std::fabs(s.orth0), std::fabs(s.orth1)});
        manifest.add_check("orthogonality", max_orth <= 1e-8, max_orth,
                           "max |pi_l(q)| over samples");

        const double q_ceiling = cfg.get_num("checks", "q_ceiling", -1.0);
        if (q_ceiling > 0.0) {
            double max_q = 0.0;
            for (const auto& s : trace.samples) max_q = std::max(max_q, s.q_norm_H);
            manifest.add_check("q_ceiling", max_q <= q_ceiling, max_q,
                               "max |q|_H vs ceiling " + fmt17(q_ceiling));
        }
        const double settle = cfg.get_num("checks", "settle_offset", 0.5);
        const double min_r2 = cfg.get_num("checks", "min_r2", 0.95);
        if (cfg.get_bool("checks", "decay", true)) try {
            const Trace settled = detail::settled_window(trace, settle);
            const DecayFit fq = fit_decay(settled, DecayField::q_norm_sq);
            const DecayFit fh = fit_decay(settled, DecayField::h);
            manifest.add_check("delta_positive", fq.delta_est > 0.0, fq.delta_est,
                               "fit window s >= s0 + " + fmt17(settle));
            manifest.add_check("fit_r2", fq.r2 >= min_r2, fq.r2, "q_norm_sq settled fit");
            manifest.add_check("h_decay", fh.delta_est > 0.0, fh.delta_est, "h settled fit");
            manifest.config["resolved.delta_est"] = fmt17(fq.delta_est);
            manifest.config["resolved.fit_r2"] = fmt17(fq.r2);

            ShrinkingSetSpec sspec;
            sspec.s0 = scfg.s0;
            sspec.d_hat0 = scfg.d_hat0;
            sspec.delta = std::min(0.95, std::max(0.05, fq.delta_est));
            sspec.A = cfg.get_num("checks", "A_fixed", 10.0);
            const ShrinkCheck fixed = shrinking_set_check(trace, sspec);
            manifest.add_check("shrink_fixed_A", fixed.inside, fixed.max_normalized,
                               "A = " + fmt17(sspec.A) + ", delta = " + fmt17(sspec.delta) +
                                   (fixed.inside ? "" : ", exit: " + fixed.which_constraint));
            const double a_factor = cfg.get_num("checks", "A_factor", 2.0);
            ShrinkingSetSpec espec = sspec;
            espec.A = a_factor * sspec.A * fixed.max_normalized;
            const ShrinkCheck env = shrinking_set_check(trace, espec);
            manifest.add_check("shrink_envelope", env.inside, espec.A,
                               "A = " + fmt17(a_factor) + " x observed envelope");

            const DerivAudit audit = parameter_derivative_audit(trace);
            manifest.add_check("parameter_audit", std::isfinite(audit.max_ratio),
                               audit.max_ratio, "empirical C-bar");
        } catch (const std::exception& e) {
            manifest.add_check("decay_analysis", false, 0.0, e.what());
        }

        // log10 q_norm vs s plot
        std::vector<double> xs, ys;
        for (const auto& s : trace.samples) {
            if (s.q_norm_H > 0.0) {
                xs.push_back(s.s);
                ys.push_back(std::log10(s.q_norm_H));
            }
        }
        const std::string svg_path = out_dir + "/logq_vs_s.svg";
        write_svg_plot(svg_path, xs, ys, "remainder decay: " + name, "s", "log10 |q|_H");
        manifest.outputs.push_back(svg_path);
    }

    if (physical_on) {
        if (selfsim_on) {  // dual mode inherits the tuned initial data
            pcfg.d0 = init_params.d;
            pcfg.nu0 = init_params.nu;
        }
        if (!curve_offsets.empty()) {
            std::vector<double> radii;
            for (double off : curve_offsets) radii.push_back(pcfg.r0 + off);
            const BlowupCurve curve = blowup_curve(pcfg, radii);
            const std::string curve_path = out_dir + "/blowup_curve.csv";
            write_curve_csv(curve_path, curve);
            manifest.outputs.push_back(curve_path);

            manifest.add_check("T_r0_match",
                               std::fabs(curve.T_at_r0 - pcfg.T0) <= 0.01 * pcfg.T0,
                               curve.T_at_r0, "vs configured T0 = " + fmt17(pcfg.T0));
            // analytic slope of the u_hat singular set: T(r) = T0 + d0 (r - r0)
            manifest.add_check("slope_match", std::fabs(curve.slope_at_r0 - pcfg.d0) <= 0.05,
                               curve.slope_at_r0, "target d0 = " + fmt17(pcfg.d0));
            manifest.add_check("noncharacteristic", std::fabs(curve.slope_at_r0) < 1.0,
                               curve.slope_at_r0, "|T'(r0)| < 1");
            manifest.add_check("lipschitz", curve.lipschitz_ok, curve.lipschitz_tol,
                               "|dT| <= |dr| + tol along the curve");
            manifest.config["resolved.slope_at_r0"] = fmt17(curve.slope_at_r0);
            manifest.config["resolved.T_at_r0"] = fmt17(curve.T_at_r0);

            std::vector<double> xs, ys;
            for (const auto& s : curve.samples) {
                xs.push_back(s.r);
                ys.push_back(s.T);
            }
            const std::string svg_path = out_dir + "/blowup_curve.svg";
            write_svg_plot(svg_path, xs, ys, "blow-up curve: " + name, "r", "T(r)");
            manifest.outputs.push_back(svg_path);
        }

        if (!compare_s.empty() || cone_check) {
            PhysicalConfig dcfg = pcfg;
            dcfg.monitor_radii.clear();
            dcfg.blowup_threshold = 1e9;  // observe, do not cap, in this window
            double latest = 0.0;
            std::vector<double> cone_times;
            if (!capture_s.empty()) {
                for (double se : capture_s)
                    dcfg.snapshot_times.push_back(dcfg.T0 - std::exp(-se));
            }
            if (cone_check) {
                for (int k = 1; k <= 5; ++k)
                    cone_times.push_back(dcfg.T0 * (1.0 - std::pow(2.0, -k)));
                dcfg.snapshot_times.insert(dcfg.snapshot_times.end(), cone_times.begin(),
                                           cone_times.end());
            }
            std::sort(dcfg.snapshot_times.begin(), dcfg.snapshot_times.end());
            for (double t : dcfg.snapshot_times) latest = std::max(latest, t);
            if (dcfg.t_max < 0.0) dcfg.t_max = latest + 10.0 * dcfg.dt();
            auto [u0, u1] = build_initial_data(dcfg);
            const PhysicalHistory hist = evolve_physical(u0, u1, dcfg);
            manifest.add_check("physical_completed", !hist.scheme_failure,
                               static_cast<double>(hist.steps), "");

            if (!capture_s.empty() && !hist.scheme_failure) {
                double worst = 0.0;
                for (std::size_t i = 0; i < capture_s.size(); ++i) {
                    const StatePair w = to_selfsim(hist, dcfg.r0, dcfg.T0, capture_s[i], grid);
                    worst = std::max(worst, norm_H(w - captured[i]));
                }
                manifest.add_check("dual_solver_consistency", worst <= 1e-3, worst,
                                   "max H-distance over compared s");
            }
            if (cone_check && !hist.scheme_failure) {
                std::vector<double> lx, ly;
                double first = 0.0, last = 0.0;
                for (double t : cone_times) {
                    const double avg = cone_average(hist, t, dcfg.r0, dcfg.T0);
                    if (avg > 0.0) {
                        lx.push_back(std::log(dcfg.T0 - t));
                        ly.push_back(std::log(avg));
                        if (first == 0.0) first = avg;
                        last = avg;
                    }
                }
                const LinearFit lf = fit_line(lx, ly);
                const double target = -4.0 / (dcfg.p - 1.0);
                manifest.add_check("cone_exponent",
                                   std::fabs(lf.slope - target) <= 0.05 * std::fabs(target),
                                   lf.slope, "target " + fmt17(target));
                manifest.add_check("cone_divergence", last > 50.0 * first, last / first,
                                   "growth across sampled times");
            }
        }
    }

    const std::string manifest_path = out_dir + "/summary.json";
    manifest.outputs.push_back(manifest_path);
    write_manifest(manifest_path, manifest);

    log << "scenario " << name << ": " << (manifest.all_passed ? "PASS" : "FAIL") << "\n";
    for (const auto& [cname, c] : manifest.checks)
        log << "  [" << (c.pass ? "ok" : "FAIL") << "] " << cname << " = " << fmt17(c.value)
            << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
    return manifest;
}

// ---------------------------------------------------------------------------
// Parameter sweep
// ---------------------------------------------------------------------------

struct SweepRow {
    std::string id;
    bool pass = false;
    double delta_est = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
    double slope_at_r0 = std::numeric_limits<double>::quiet_NaN();
};

inline int sweep_workers() {
    if (const char* env = std::getenv("SOLWAVE_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 2 : static_cast<int>(hc);
}

/// Cartesian sweep over the [sweep] lists (d_hat0, s0, n, ds); each combo
/// runs the base scenario with those keys overridden.
inline std::vector<SweepRow> sweep(const std::string& config_path,
                                   std::ostream& log = std::cout) {
    const KeyValueConfig base = KeyValueConfig::parse_file(config_path);
    const std::string name = base.get_str("", "name", "sweep");
    const std::string out_root = base.get_str("", "out_dir", "runs/" + name);

    struct Axis {
        std::string key;
        std::vector<double> values;
    };
    std::vector<Axis> axes;
    for (const std::string key : {"d_hat0", "s0", "n", "ds"}) {
        const auto vals = base.get_list("sweep", key);
        if (!vals.empty()) axes.push_back({key, vals});
    }
    if (axes.empty()) throw ConfigError("[sweep] lists none of d_hat0, s0, n, ds");

    std::vector<std::vector<double>> combos{{}};
    for (const auto& ax : axes) {
        std::vector<std::vector<double>> next;
        for (const auto& c : combos)
            for (double v : ax.values) {
                auto cc = c;
                cc.push_back(v);
                next.push_back(cc);
            }
        combos = next;
    }

    std::filesystem::create_directories(out_root);
    std::vector<SweepRow> rows(combos.size());
    std::atomic<std::size_t> cursor{0};
    const int workers = std::min<int>(sweep_workers(), static_cast<int>(combos.size()));

    auto work = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= combos.size()) return;
            KeyValueConfig cfg = base;
            std::string id = "combo";
            for (std::size_t a = 0; a < axes.size(); ++a) {
                const double v = combos[i][a];
                std::string sval =
                    axes[a].key == "n" ? std::to_string(static_cast<int>(v)) : fmt17(v);
                cfg.set("selfsim", axes[a].key, sval);
                if (axes[a].key == "d_hat0") cfg.set("physical", "d0", sval);
                id += "_" + axes[a].key + "=" + sval;
            }
            const std::string dir = out_root + "/" + id;
            cfg.set("", "out_dir", dir);
            cfg.set("", "name", name + "/" + id);
            std::filesystem::create_directories(dir);
            const std::string cfg_path = dir + "/config.cfg";
            {
                std::ofstream out(cfg_path);
                std::string section;
                for (const auto& [k, v] : cfg.raw()) {
                    const auto dot = k.find('.');
                    const std::string sec = k.substr(0, dot);
                    if (sec != section) {
                        if (!sec.empty()) out << "[" << sec << "]\n";
                        section = sec;
                    }
                    out << k.substr(dot + 1) << " = " << v << "\n";
                }
            }
            SweepRow row;
            row.id = id;
            try {
                std::ostringstream quiet;
                const RunManifest m = run_scenario(cfg_path, quiet);
                row.pass = m.all_passed;
                if (m.config.count("resolved.delta_est"))
                    row.delta_est = std::stod(m.config.at("resolved.delta_est"));
                if (m.config.count("resolved.fit_r2"))
                    row.r2 = std::stod(m.config.at("resolved.fit_r2"));
                if (m.config.count("resolved.slope_at_r0"))
                    row.slope_at_r0 = std::stod(m.config.at("resolved.slope_at_r0"));
            } catch (const std::exception& e) {
                row.pass = false;
            }
            rows[i] = row;
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    const std::string summary_path = out_root + "/sweep_summary.csv";
    std::ofstream out(summary_path);
    out << "id,status,delta_est,r2,slope_at_r0\n";
    for (const auto& r : rows)
        out << r.id << ',' << (r.pass ? "pass" : "fail") << ',' << fmt17(r.delta_est) << ','
            << fmt17(r.r2) << ',' << fmt17(r.slope_at_r0) << '\n';

    log << "sweep " << name << ": " << rows.size() << " runs, workers = " << workers << "\n";
    for (const auto& r : rows)
        log << "  " << (r.pass ? "pass" : "FAIL") << "  " << r.id
            << "  delta=" << fmt17(r.delta_est) << "  slope=" << fmt17(r.slope_at_r0) << "\n";
    return rows;
}

// ---------------------------------------------------------------------------
// Re-verification of a finished run directory
// ---------------------------------------------------------------------------

/// Re-evaluates the persisted predicates from the CSVs; returns 0 when every
/// recorded check that can be recomputed still passes, 1 otherwise.
inline int check_run_dir(const std::string& dir, std::ostream& log = std::cout) {
    const std::string manifest_path = dir + "/summary.json";
    std::ifstream in(manifest_path);
    if (!in) {
        log << "check: missing " << manifest_path << "\n";
        return 2;
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        log << "check: bad manifest: " << e.what() << "\n";
        return 2;
    }
    bool ok = true;
    const auto cfgval = [&](const std::string& key, double fallback) {
        if (j["config"].contains(key))
            return std::stod(j["config"][key].get<std::string>());
        return fallback;
    };

    if (std::filesystem::exists(dir + "/trace.csv")) {
        const double s0 = cfgval("selfsim.s0", 3.0);
        const double settle = cfgval("checks.settle_offset", 0.5);
        const double min_r2 = cfgval("checks.min_r2", 0.95);
        const Trace tr = read_trace_csv(dir + "/trace.csv", s0);
        try {
            const DecayFit fq = fit_decay(detail::settled_window(tr, settle),
                                          DecayField::q_norm_sq);
            const bool dpos = fq.delta_est > 0.0;
            const bool r2ok = fq.r2 >= min_r2;
            log << "  [" << (dpos ? "ok" : "FAIL") << "] delta_positive = " << fmt17(fq.delta_est)
                << "\n  [" << (r2ok ? "ok" : "FAIL") << "] fit_r2 = " << fmt17(fq.r2) << "\n";
            ok = ok && dpos && r2ok;

            ShrinkingSetSpec spec;
            spec.s0 = s0;
            spec.d_hat0 = cfgval("selfsim.d_hat0", 0.3);
            spec.delta = std::min(0.95, std::max(0.05, fq.delta_est));
            spec.A = cfgval("checks.A_fixed", 10.0);
            const ShrinkCheck sc = shrinking_set_check(tr, spec);
            log << "  [" << (sc.inside ? "ok" : "FAIL")
                << "] shrink_fixed_A, max_normalized = " << fmt17(sc.max_normalized) << "\n";
            ok = ok && sc.inside;
        } catch (const std::exception& e) {
            log << "  [FAIL] trace analysis: " << e.what() << "\n";
            ok = false;
        }
    }

    if (std::filesystem::exists(dir + "/blowup_curve.csv")) {
        const BlowupCurve c = read_curve_csv(dir + "/blowup_curve.csv");
        const double r0 = cfgval("physical.r0", cfgval("selfsim.r0", 2.0));
        const double T0 = cfgval("physical.T0", 1.0);
        const double d0 = j["config"].contains("resolved.d0")
                              ? std::stod(j["config"]["resolved.d0"].get<std::string>())
                              : cfgval("physical.d0", 0.0);
        int i0 = 0;
        for (std::size_t i = 1; i < c.samples.size(); ++i)
            if (std::fabs(c.samples[i].r - r0) < std::fabs(c.samples[i0].r - r0))
                i0 = static_cast<int>(i);
        const double T_r0 = c.samples[i0].T;
        double slope = std::numeric_limits<double>::quiet_NaN();
        if (i0 > 0 && i0 + 1 < static_cast<int>(c.samples.size()))
            slope = (c.samples[i0 + 1].T - c.samples[i0 - 1].T) /
                    (c.samples[i0 + 1].r - c.samples[i0 - 1].r);
        const bool t_ok = std::fabs(T_r0 - T0) <= 0.01 * T0;
        const bool s_ok = std::fabs(slope - d0) <= 0.05;
        const bool nc_ok = std::fabs(slope) < 1.0;
        bool lip = true;
        for (std::size_t i = 1; i < c.samples.size(); ++i) {
            const double dT = std::fabs(c.samples[i].T - c.samples[i - 1].T);
            const double drr = std::fabs(c.samples[i].r - c.samples[i - 1].r);
            if (dT > drr + 5e-3 * T0) lip = false;
        }
        log << "  [" << (t_ok ? "ok" : "FAIL") << "] T_r0_match = " << fmt17(T_r0) << "\n  ["
            << (s_ok ? "ok" : "FAIL") << "] slope_match = " << fmt17(slope) << "\n  ["
            << (nc_ok ? "ok" : "FAIL") << "] noncharacteristic\n  [" << (lip ? "ok" : "FAIL")
            << "] lipschitz\n";
        ok = ok && t_ok && s_ok && nc_ok && lip;
    }

    log << "check " << dir << ": " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

}  // namespace solwave
