#pragma once

// Solve the Brinkman potential equation (I - nu Lap_h) w = p on the grid.
// 1D: direct tridiagonal (Sherman-Morrison correction for periodic wrap).
// 2D: conjugate gradient with diagonal preconditioning. nu = 0 returns p,
// so the same stepper code runs the Darcy comparison arm.

#include <cmath>
#include <vector>

#include "brinkman/grid.hpp"

namespace brinkman {

struct HelmholtzOptions {
    double rtol = 1e-10;   // ||(I - nu Lap)w - p||_inf <= rtol ||p||_inf
    int max_iterations = 20000;
};

namespace detail {

/// Thomas algorithm for a tridiagonal system; diag/upper/lower are the
/// nonzero bands, rhs is overwritten with the solution.
inline void solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                              std::vector<double> upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

inline ScalarField apply_operator(const ScalarField& w, double nu) {
    ScalarField lap = laplacian(w);
    ScalarField out(w.grid);
    for (std::size_t k = 0; k < w.size(); ++k) out.v[k] = w.v[k] - nu * lap.v[k];
    return out;
}

inline ScalarField solve_1d(const ScalarField& p, double nu) {
    const Grid& g = p.grid;
    const int n = g.n;
    const double c = nu / (g.h() * g.h());
    std::vector<double> lower(n, -c), diag(n), upper(n, -c), rhs = p.v;
    for (int i = 0; i < n; ++i) diag[i] = 1.0 + 2.0 * c;
    if (g.boundary == Boundary::neumann) {
        diag[0] = 1.0 + c;
        diag[n - 1] = 1.0 + c;
        solve_tridiagonal(lower, diag, upper, rhs);
        ScalarField w(g);
        w.v = std::move(rhs);
        return w;
    }
    // periodic: A = T + u v^T with u = -c e_0 - c e_{n-1}, v = e_{n-1} + e_0
    // handled by the Sherman-Morrison correction of two tridiagonal solves.
    std::vector<double> diag2 = diag;
    diag2[0] += c;        // absorb corner entries into the rank-one update
    diag2[n - 1] += c;
    std::vector<double> u(n, 0.0);
    u[0] = -c;
    u[n - 1] = -c;
    std::vector<double> y = rhs, q = u;
    solve_tridiagonal(lower, diag2, upper, y);
    solve_tridiagonal(lower, diag2, upper, q);
    double vty = y[0] + y[n - 1];
    double vtq = q[0] + q[n - 1];
    double factor = vty / (1.0 + vtq);
    ScalarField w(g);
    w.v.resize(n);
    for (int i = 0; i < n; ++i) w.v[i] = y[i] - factor * q[i];
    return w;
}

inline ScalarField solve_cg(const ScalarField& p, double nu, const HelmholtzOptions& opt) {
    const Grid& g = p.grid;
    ScalarField w(g);  // start from zero
    ScalarField r = p;
    const double c = nu / (g.h() * g.h());
    // diagonal of (I - nu Lap) for Jacobi preconditioning; Neumann corner
    // cells have smaller degree but 1/(1+2dc) is a fine uniform scale.
    const double dinv = 1.0 / (1.0 + 2.0 * g.dim * c);
    ScalarField z(g), q(g), d(g);
    for (std::size_t k = 0; k < r.size(); ++k) z.v[k] = r.v[k] * dinv;
    d = z;
    double rz = inner(r, z);
    const double target = opt.rtol * std::max(max_abs(p), 1e-300);
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (max_abs(r) <= target) return w;
        q = apply_operator(d, nu);
        double alpha = rz / inner(d, q);
        for (std::size_t k = 0; k < w.size(); ++k) {
            w.v[k] += alpha * d.v[k];
            r.v[k] -= alpha * q.v[k];
        }
        for (std::size_t k = 0; k < r.size(); ++k) z.v[k] = r.v[k] * dinv;
        double rz_new = inner(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < d.size(); ++k) d.v[k] = z.v[k] + beta * d.v[k];
    }
    throw Error("helmholtz: CG exceeded max iterations, residual=" +
                std::to_string(max_abs(r)));
}

}  // namespace detail

/// Solve (I - nu Lap_h) w = p. Satisfies the discrete maximum principle
/// min p <= w <= max p (M-matrix) and self-adjointness to solver tolerance.
inline ScalarField solve_w(const ScalarField& p, double nu,
                           const HelmholtzOptions& opt = {}) {
    if (nu < 0.0) throw Error("solve_w: nu must be nonnegative");
    if (nu == 0.0) return p;
    if (p.grid.dim == 1) return detail::solve_1d(p, nu);
    return detail::solve_cg(p, nu, opt);
}

}  // namespace brinkman
