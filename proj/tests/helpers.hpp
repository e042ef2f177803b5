// Shared helpers for the test suites: seeded random smooth fields and
// closed-form Jacobi moments used as quadrature oracles.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "solwave/grid.hpp"

namespace testutil {

/// Chebyshev series with geometrically decaying random coefficients;
/// analytic on [-1,1] and independent of the grid resolution.
struct SmoothFunc {
    std::vector<double> coef;

    static SmoothFunc random(std::mt19937& rng, int degree = 8, double decay = 0.4) {
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        SmoothFunc f;
        f.coef.resize(degree + 1);
        for (int k = 0; k <= degree; ++k) f.coef[k] = uni(rng) * std::exp(-decay * k);
        return f;
    }

    double operator()(double y) const {
        double tkm1 = 1.0, tk = y, s = coef[0];
        if (coef.size() > 1) s += coef[1] * y;
        for (std::size_t k = 2; k < coef.size(); ++k) {
            const double tkp1 = 2.0 * y * tk - tkm1;
            s += coef[k] * tkp1;
            tkm1 = tk;
            tk = tkp1;
        }
        return s;
    }
};

inline solwave::Field sample(const SmoothFunc& f, const solwave::GridPtr& g) {
    solwave::Field out(g);
    for (int i = 0; i < g->n; ++i) out[i] = f(g->nodes[i]);
    return out;
}

/// \int_{-1}^{1} y^k (1-y^2)^a dy = B((k+1)/2, a+1) for even k, 0 for odd k.
inline double jacobi_moment(int k, double a) {
    if (k % 2 == 1) return 0.0;
    return std::beta((k + 1) / 2.0, a + 1.0);
}

inline solwave::Field monomial(int k, const solwave::GridPtr& g) {
    solwave::Field out(g);
    for (int i = 0; i < g->n; ++i) out[i] = std::pow(g->nodes[i], k);
    return out;
}

}  // namespace testutil
