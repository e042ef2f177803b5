// Small numerical helpers shared across the library.
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace solwave {

inline constexpr const char* kVersion = "0.1.0";

/// Pairwise (cascade) summation; deterministic and O(eps log n) error.
inline double pairwise_sum(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n <= 16) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(x.first(h)) + pairwise_sum(x.subspan(h));
}

inline double pairwise_sum(const std::vector<double>& x) {
    return pairwise_sum(std::span<const double>(x));
}

/// x^e for x > 0 via exp/log; rejects nonpositive bases.
inline double pos_pow(double x, double e) {
    if (!(x > 0.0))
        throw std::domain_error("pos_pow: nonpositive base " + std::to_string(x));
    return std::exp(e * std::log(x));
}

/// |x|^{p-1} x, the odd power nonlinearity (defined for all reals).
inline double odd_pow(double x, double p) {
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(std::fabs(x), p), x);
}

inline bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

/// Ordinary least squares line through (x, y).
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 matching samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0)
        throw std::invalid_argument("fit_line: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    f.n = x.size();
    return f;
}

}  // namespace solwave
