// Gauss-Jacobi collocation grid for the weight rho(y) = (1-y^2)^{2/(p-1)}
// on (-1,1), with the weighted norms and the degenerate operator
//   L f = (1-y^2) f'' - 2y (2/(p-1)+1) f'.
//
// Nodes and quadrature weights come from the Golub-Welsch eigenvalue method
// applied to the Jacobi recurrence; differentiation is barycentric
// (Berrut & Trefethen, SIAM Review 46 (2004)).
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "solwave/numerics.hpp"

namespace solwave {

struct Grid;
using GridPtr = std::shared_ptr<const Grid>;

struct Grid {
    int n = 0;
    double p = 0.0;
    double alpha = 0.0;  // Jacobi exponent 2/(p-1)
    double mu0 = 0.0;    // \int rho dy

    std::vector<double> nodes;         // ascending, strictly inside (-1,1)
    std::vector<double> quad_weights;  // positive; sum f(y_i) w_i ~ \int f rho dy
    std::vector<double> one_minus_y2;

    Eigen::MatrixXd diff;  // nodal values -> nodal values of d/dy
    Eigen::MatrixXd lap;   // nodal values of L

    // Auxiliary rule absorbing (1-y^2)^{alpha-1}; used for integrands that
    // carry an explicit 1/(1-y^2) factor (the weight stays integrable there).
    std::vector<double> aux_nodes, aux_weights;
    Eigen::MatrixXd aux_interp;  // barycentric interpolation, main -> aux nodes

    // Cholesky factor of the H0 Gram matrix  D^T diag(w (1-y^2)) D + diag(w);
    // this is the discrete bilinear form  a(u,v) = \int [u'v'(1-y^2) + uv] rho.
    Eigen::LLT<Eigen::MatrixXd> h0_form;

    bool compatible(const Grid& other) const {
        return n == other.n && p == other.p;
    }
};

namespace detail {

// Gauss rule for the symmetric Jacobi weight (1-y^2)^a via Golub-Welsch.
inline void gauss_jacobi_symmetric(int n, double a, std::vector<double>& x,
                                   std::vector<double>& w) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double t = 2.0 * k + 2.0 * a;
        const double bk = std::sqrt(k * (k + 2.0 * a) / (t * t - 1.0));
        J(k, k - 1) = J(k - 1, k) = bk;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_jacobi: eigensolver failed");
    const double mu0 = std::exp((2.0 * a + 1.0) * std::log(2.0) +
                                2.0 * std::lgamma(a + 1.0) - std::lgamma(2.0 * a + 2.0));
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        x[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        w[i] = mu0 * v0 * v0;
    }
}

// Barycentric weights; pairwise differences doubled so products stay O(1)
// (the logarithmic capacity of [-1,1] is 1/4 of its length).
inline std::vector<double> bary_weights(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> bw(n, 1.0);
    for (int i = 0; i < n; ++i) {
        double prod = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) prod *= 2.0 * (x[i] - x[j]);
        bw[i] = 1.0 / prod;
    }
    return bw;
}

inline Eigen::MatrixXd diff_matrix(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    const auto bw = bary_weights(x);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            D(i, j) = (bw[j] / bw[i]) / (x[i] - x[j]);
            rowsum += D(i, j);
        }
        D(i, i) = -rowsum;  // negative sum trick
    }
    return D;
}

inline Eigen::MatrixXd interp_matrix(const std::vector<double>& xs,
                                     const std::vector<double>& xt) {
    const auto bw = bary_weights(xs);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(xt.size(), xs.size());
    for (std::size_t k = 0; k < xt.size(); ++k) {
        int hit = -1;
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (xt[k] == xs[j]) { hit = static_cast<int>(j); break; }
        if (hit >= 0) {
            P(k, hit) = 1.0;
            continue;
        }
        double denom = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j)
            denom += bw[j] / (xt[k] - xs[j]);
        for (std::size_t j = 0; j < xs.size(); ++j)
            P(k, j) = (bw[j] / (xt[k] - xs[j])) / denom;
    }
    return P;
}

}  // namespace detail

inline GridPtr build_grid(int n, double p) {
    if (n < 8) throw std::invalid_argument("build_grid: need n >= 8");
    if (!(p > 1.0)) throw std::invalid_argument("build_grid: need p > 1");
    auto g = std::make_shared<Grid>();
    g->n = n;
    g->p = p;
    g->alpha = 2.0 / (p - 1.0);
    detail::gauss_jacobi_symmetric(n, g->alpha, g->nodes, g->quad_weights);
    g->mu0 = std::exp((2.0 * g->alpha + 1.0) * std::log(2.0) +
                      2.0 * std::lgamma(g->alpha + 1.0) - std::lgamma(2.0 * g->alpha + 2.0));
    g->one_minus_y2.resize(n);
    for (int i = 0; i < n; ++i) g->one_minus_y2[i] = 1.0 - g->nodes[i] * g->nodes[i];

    g->diff = detail::diff_matrix(g->nodes);
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(g->nodes.data(), n);
    Eigen::VectorXd omy2 = Eigen::Map<const Eigen::VectorXd>(g->one_minus_y2.data(), n);
    g->lap = omy2.asDiagonal() * (g->diff * g->diff) -
             (2.0 * (g->alpha + 1.0) * y).asDiagonal() * g->diff;

    detail::gauss_jacobi_symmetric(n + 8, g->alpha - 1.0, g->aux_nodes, g->aux_weights);
    g->aux_interp = detail::interp_matrix(g->nodes, g->aux_nodes);

    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(g->quad_weights.data(), n);
    Eigen::MatrixXd A = g->diff.transpose() *
                            (w.array() * omy2.array()).matrix().asDiagonal() * g->diff;
    A += Eigen::MatrixXd(w.asDiagonal());
    g->h0_form.compute(A);
    if (g->h0_form.info() != Eigen::Success)
        throw std::runtime_error("build_grid: H0 form not positive definite");
    return g;
}

// ---------------------------------------------------------------------------
// Fields and state pairs
// ---------------------------------------------------------------------------

struct Field {
    GridPtr grid;
    std::vector<double> v;

    Field() = default;
    explicit Field(GridPtr g, double fill = 0.0)
        : grid(std::move(g)), v(grid->n, fill) {}
    Field(GridPtr g, std::vector<double> values) : grid(std::move(g)), v(std::move(values)) {
        if (static_cast<int>(v.size()) != grid->n)
            throw std::invalid_argument("Field: value count does not match grid");
    }

    int n() const { return grid->n; }
    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }
};

inline void require_same_grid(const Field& a, const Field& b) {
    if (!a.grid || !b.grid || !a.grid->compatible(*b.grid))
        throw std::invalid_argument("grid mismatch between fields");
}

struct StatePair {
    Field first;   // position component (w or q1)
    Field second;  // velocity component (ds w or q2)

    StatePair() = default;
    StatePair(Field f, Field s) : first(std::move(f)), second(std::move(s)) {
        require_same_grid(first, second);
    }
    explicit StatePair(const GridPtr& g) : first(g), second(g) {}

    const GridPtr& grid() const { return first.grid; }
};

inline Field operator+(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field r = a;
    for (int i = 0; i < r.n(); ++i) r.v[i] += b.v[i];
    return r;
}
inline Field operator-(const Field& a, const Field& b) {
    require_same_grid(a, b);
    Field r = a;
    for (int i = 0; i < r.n(); ++i) r.v[i] -= b.v[i];
    return r;
}
inline Field operator*(double c, const Field& a) {
    Field r = a;
    for (double& x : r.v) x *= c;
    return r;
}
inline StatePair operator+(const StatePair& a, const StatePair& b) {
    return {a.first + b.first, a.second + b.second};
}
inline StatePair operator-(const StatePair& a, const StatePair& b) {
    return {a.first - b.first, a.second - b.second};
}
inline StatePair operator*(double c, const StatePair& a) {
    return {c * a.first, c * a.second};
}

inline Field derivative(const Field& f) {
    Field r(f.grid);
    Eigen::Map<Eigen::VectorXd>(r.v.data(), r.n()) =
        f.grid->diff * Eigen::Map<const Eigen::VectorXd>(f.v.data(), f.n());
    return r;
}

/// \int f rho dy by the Gauss rule (pairwise summation, fixed order).
inline double integrate_rho(const Field& f) {
    std::vector<double> t(f.n());
    for (int i = 0; i < f.n(); ++i) t[i] = f.grid->quad_weights[i] * f.v[i];
    return pairwise_sum(t);
}

/// \int f (1-y^2)^{alpha-1} dy via the auxiliary rule (f interpolated).
inline double integrate_singular(const Field& f) {
    const Grid& g = *f.grid;
    Eigen::VectorXd fa = g.aux_interp * Eigen::Map<const Eigen::VectorXd>(f.v.data(), f.n());
    std::vector<double> t(fa.size());
    for (int i = 0; i < fa.size(); ++i) t[i] = g.aux_weights[i] * fa(i);
    return pairwise_sum(t);
}

// ---------------------------------------------------------------------------
// Weighted inner products and norms
// ---------------------------------------------------------------------------

/// phi(a,b) = \int [a1 b1 + a1' b1' (1-y^2) + a2 b2] rho dy.
inline double inner_phi(const StatePair& a, const StatePair& b) {
    require_same_grid(a.first, b.first);
    const Grid& g = *a.grid();
    const Field ap = derivative(a.first);
    const Field bp = derivative(b.first);
    std::vector<double> t(g.n);
    for (int i = 0; i < g.n; ++i) {
        t[i] = g.quad_weights[i] *
               (a.first[i] * b.first[i] +
                ap[i] * bp[i] * g.one_minus_y2[i] +
                a.second[i] * b.second[i]);
    }
    return pairwise_sum(t);
}

inline double norm_H(const StatePair& a) {
    const double q = inner_phi(a, a);
    return q > 0.0 ? std::sqrt(q) : 0.0;
}

inline double norm_H0(const Field& f) {
    const Grid& g = *f.grid;
    const Field fp = derivative(f);
    std::vector<double> t(g.n);
    for (int i = 0; i < g.n; ++i)
        t[i] = g.quad_weights[i] * (f[i] * f[i] + fp[i] * fp[i] * g.one_minus_y2[i]);
    const double q = pairwise_sum(t);
    return q > 0.0 ? std::sqrt(q) : 0.0;
}

/// L f = (1-y^2) f'' - 2y (2/(p-1)+1) f'; rho'/rho is used analytically,
/// so rho itself is never differentiated near the endpoints.
inline Field apply_L(const Field& f) {
    Field r(f.grid);
    Eigen::Map<Eigen::VectorXd>(r.v.data(), r.n()) =
        f.grid->lap * Eigen::Map<const Eigen::VectorXd>(f.v.data(), f.n());
    return r;
}

struct WeightedNorms {
    double l2_singular = 0.0;   // ||f||_{L^2_{rho/(1-y^2)}}
    double lp1 = 0.0;           // ||f||_{L^{p+1}_rho}
    double sup_weighted = 0.0;  // sup |f| (1-y^2)^{1/(p-1)} over nodes
};

inline WeightedNorms weighted_norms(const Field& f) {
    const Grid& g = *f.grid;
    WeightedNorms r;
    // square after interpolating so the singular-weight integral stays >= 0
    Eigen::VectorXd fa = g.aux_interp * Eigen::Map<const Eigen::VectorXd>(f.v.data(), f.n());
    std::vector<double> ts(fa.size());
    for (int i = 0; i < fa.size(); ++i) ts[i] = g.aux_weights[i] * fa(i) * fa(i);
    const double s = pairwise_sum(ts);
    r.l2_singular = s > 0.0 ? std::sqrt(s) : 0.0;
    std::vector<double> t(g.n);
    for (int i = 0; i < g.n; ++i)
        t[i] = g.quad_weights[i] * std::pow(std::fabs(f[i]), g.p + 1.0);
    r.lp1 = std::pow(pairwise_sum(t), 1.0 / (g.p + 1.0));
    for (int i = 0; i < g.n; ++i) {
        const double m = std::fabs(f[i]) * std::pow(g.one_minus_y2[i], 1.0 / (g.p - 1.0));
        r.sup_weighted = std::max(r.sup_weighted, m);
    }
    return r;
}

}  // namespace solwave
