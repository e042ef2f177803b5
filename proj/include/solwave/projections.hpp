// Null/unstable-direction functions W^d_lambda (lambda = 0, 1) and the
// projectors pi^d_lambda(v) = phi(W^d_lambda, v) used to impose the
// modulation orthogonality conditions.
//
// W_{lambda,2} has the closed form
//   W_{1,2}^d = c_1(d) (1-y^2) / (1+dy)^{2/(p-1)+1},
//   W_{0,2}^d = c_0(d) (y+d)   / (1+dy)^{2/(p-1)+1},
// with c_lambda(d) = c_lambda (1-d^2)^{1/(p-1)} and
//   1/c_lambda = 2 (lambda + 2/(p-1)) \int (y^2/(1-y^2))^{1-lambda} rho dy.
//
// W_{lambda,1} solves  -L r + r = (lambda-(p+3)/(p-1)) W2 - 2y W2' +
// (8/(p-1)) W2/(1-y^2).  The solve is done in weak (Galerkin) form: the
// stiffness matrix is the discrete H0 inner product, and the singular part
// of the right side is integrated with the auxiliary (1-y^2)^{alpha-1}
// rule, which keeps phi-pairings against smooth fields spectrally accurate
// even though the lambda=0 solution has endpoint log singularities.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "solwave/grid.hpp"
#include "solwave/solitons.hpp"

namespace solwave {

namespace detail {

struct W2Eval {
    int lambda;
    double cd;  // c_lambda(d)
    double d, m;

    double value(double y) const {
        const double base = pos_pow(1.0 + d * y, -m);
        return lambda == 1 ? cd * (1.0 - y * y) * base : cd * (y + d) * base;
    }
    double deriv(double y) const {
        const double b0 = pos_pow(1.0 + d * y, -m);
        const double b1 = pos_pow(1.0 + d * y, -m - 1.0);
        return lambda == 1 ? cd * (-2.0 * y * b0 - m * d * (1.0 - y * y) * b1)
                           : cd * (b0 - m * d * (y + d) * b1);
    }
};

}  // namespace detail

/// Base constant c_lambda (the d-independent factor), by quadrature.
inline double base_c_lambda(int lambda, const GridPtr& grid) {
    if (lambda != 0 && lambda != 1) throw std::invalid_argument("lambda must be 0 or 1");
    const Grid& g = *grid;
    double integral;
    if (lambda == 1) {
        integral = g.mu0;  // \int rho
    } else {
        // \int y^2 (1-y^2)^{alpha-1} dy, exact under the auxiliary rule
        std::vector<double> t(g.aux_nodes.size());
        for (std::size_t i = 0; i < g.aux_nodes.size(); ++i)
            t[i] = g.aux_weights[i] * g.aux_nodes[i] * g.aux_nodes[i];
        integral = pairwise_sum(t);
    }
    return 1.0 / (2.0 * (lambda + g.alpha) * integral);
}

/// c_lambda(d) = c_lambda (1-d^2)^{1/(p-1)}.
inline double c_lambda(int lambda, double d, double p, const GridPtr& grid) {
    if (!(std::fabs(d) < 1.0)) throw std::invalid_argument("c_lambda: need |d| < 1");
    if (p != grid->p) throw std::invalid_argument("c_lambda: p does not match grid");
    return base_c_lambda(lambda, grid) * pos_pow(1.0 - d * d, 1.0 / (p - 1.0));
}

inline Field w_lambda2(int lambda, double d, const GridPtr& grid) {
    if (!(std::fabs(d) < 1.0)) throw std::invalid_argument("w_lambda2: need |d| < 1");
    detail::W2Eval w2{lambda, c_lambda(lambda, d, grid->p, grid), d, grid->alpha + 1.0};
    Field f(grid);
    for (int i = 0; i < grid->n; ++i) f[i] = w2.value(grid->nodes[i]);
    return f;
}

inline Field w_lambda1(int lambda, double d, const GridPtr& grid) {
    if (!(std::fabs(d) < 1.0)) throw std::invalid_argument("w_lambda1: need |d| < 1");
    const Grid& g = *grid;
    const double p = g.p;
    detail::W2Eval w2{lambda, c_lambda(lambda, d, p, grid), d, g.alpha + 1.0};

    Eigen::VectorXd b(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double y = g.nodes[i];
        b(i) = g.quad_weights[i] *
               ((lambda - (p + 3.0) / (p - 1.0)) * w2.value(y) - 2.0 * y * w2.deriv(y));
    }
    // singular part (8/(p-1)) \int W2 phi_j rho/(1-y^2): auxiliary rule,
    // W2 evaluated in closed form at the auxiliary nodes
    Eigen::VectorXd wa(g.aux_nodes.size());
    for (std::size_t i = 0; i < g.aux_nodes.size(); ++i)
        wa(i) = g.aux_weights[i] * w2.value(g.aux_nodes[i]);
    b += (8.0 / (p - 1.0)) * (g.aux_interp.transpose() * wa);

    Eigen::VectorXd r = g.h0_form.solve(b);
    Field f(grid);
    Eigen::Map<Eigen::VectorXd>(f.v.data(), g.n) = r;
    return f;
}

struct ProjectorSet {
    double d = 0.0;
    double c0 = 0.0, c1 = 0.0;
    StatePair W0, W1;  // (W_{lambda,1}, W_{lambda,2})
};

inline ProjectorSet make_projectors(double d, const GridPtr& grid) {
    ProjectorSet ps;
    ps.d = d;
    ps.c0 = c_lambda(0, d, grid->p, grid);
    ps.c1 = c_lambda(1, d, grid->p, grid);
    ps.W0 = StatePair(w_lambda1(0, d, grid), w_lambda2(0, d, grid));
    ps.W1 = StatePair(w_lambda1(1, d, grid), w_lambda2(1, d, grid));
    return ps;
}

inline double pi(const ProjectorSet& ps, int lambda, const StatePair& v) {
    if (lambda != 0 && lambda != 1) throw std::invalid_argument("lambda must be 0 or 1");
    return inner_phi(lambda == 0 ? ps.W0 : ps.W1, v);
}

/// pi^d_lambda(v) = phi(W^d_lambda, v), constructing W on the fly.
inline double pi(int lambda, double d, const StatePair& v) {
    return inner_phi(StatePair(w_lambda1(lambda, d, v.grid()), w_lambda2(lambda, d, v.grid())), v);
}

}  // namespace solwave
