// Time series recorded along a modulated evolution run.
#pragma once

#include <limits>
#include <string>
#include <vector>

namespace solwave {

struct TraceSample {
    double s = 0.0;
    double d = 0.0;
    double nu = 0.0;
    double q_norm_H = 0.0;
    double phi_qq = 0.0;   // varphi(q,q), the modulated quadratic form
    double h_value = 0.0;  // energy functional h
    double orth0 = 0.0;    // pi^{d*}_0(q) after modulation
    double orth1 = 0.0;    // pi^{d*}_1(q)
};

enum class TraceStatus { ok, modulation_failure, scheme_blowup };

struct Trace {
    double s0 = 0.0;
    std::vector<TraceSample> samples;

    TraceStatus status = TraceStatus::ok;
    std::string failure_reason;
    double failure_s = std::numeric_limits<double>::quiet_NaN();

    // first violation of the modulated-existence constraints
    // ||q|| <= s0^{-1/2}, |nu|/(1-|d|) <= s0^{-1/4} (the paper's s-bar)
    bool constraint_violated = false;
    double constraint_violation_s = std::numeric_limits<double>::quiet_NaN();
    std::string violated_constraint;

    bool completed() const { return status == TraceStatus::ok; }
};

}  // namespace solwave
