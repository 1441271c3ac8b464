#pragma once

// Uniform Cartesian grids (1D/2D) with cell-centered scalar fields and
// face-staggered vector fields, the discrete differential operators, norms
// and masked integrals used by the identity checks, and field serialization.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <istream>
#include <ostream>
#include <vector>

#include "brinkman/common.hpp"

namespace brinkman {

enum class Boundary { neumann, periodic };

struct Grid {
    int dim = 1;        // 1 or 2
    int n = 8;          // cells per axis
    double length = 1.0;
    Boundary boundary = Boundary::neumann;

    Grid() = default;
    Grid(int dim_, int n_, double length_, Boundary b)
        : dim(dim_), n(n_), length(length_), boundary(b) {
        if (dim != 1 && dim != 2) throw Error("grid: dim must be 1 or 2");
        if (n < 8) throw Error("grid: need at least 8 cells per axis");
        if (!(length > 0.0)) throw Error("grid: length must be positive");
    }

    double h() const { return length / n; }
    std::size_t cells() const {
        return dim == 1 ? static_cast<std::size_t>(n)
                        : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    }
    double cell_volume() const { return dim == 1 ? h() : h() * h(); }
    /// Cell center coordinate along one axis.
    double x(int i) const { return (i + 0.5) * h(); }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && length == o.length && boundary == o.boundary;
    }
};

/// Cell-centered values. Value-semantic; operators below are pure.
struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), v(g.cells(), fill) {}

    double& at(int i) { return v[static_cast<std::size_t>(i)]; }
    double at(int i) const { return v[static_cast<std::size_t>(i)]; }
    double& at(int i, int j) { return v[static_cast<std::size_t>(j) * grid.n + i]; }
    double at(int i, int j) const { return v[static_cast<std::size_t>(j) * grid.n + i]; }
    std::size_t size() const { return v.size(); }

    ScalarField map(const std::function<double(double)>& f) const {
        ScalarField out(grid);
        for (std::size_t k = 0; k < v.size(); ++k) out.v[k] = f(v[k]);
        return out;
    }
};

/// Face-staggered values: one value per face per axis. In 1D the x faces
/// are indexed 0..n (n+1 values); for periodic grids face 0 and face n are
/// the same physical face and always carry the same value.
struct VectorField {
    Grid grid;
    std::vector<double> fx;  // (n+1) in 1D, (n+1) x n in 2D, index j*(n+1)+i
    std::vector<double> fy;  // empty in 1D, n x (n+1) in 2D, index j*n+i

    VectorField() = default;
    explicit VectorField(const Grid& g) : grid(g) {
        int n = g.n;
        fx.assign(g.dim == 1 ? static_cast<std::size_t>(n + 1)
                             : static_cast<std::size_t>(n + 1) * n,
                  0.0);
        if (g.dim == 2) fy.assign(static_cast<std::size_t>(n) * (n + 1), 0.0);
    }

    double& x(int i) { return fx[static_cast<std::size_t>(i)]; }
    double x(int i) const { return fx[static_cast<std::size_t>(i)]; }
    double& x(int i, int j) { return fx[static_cast<std::size_t>(j) * (grid.n + 1) + i]; }
    double x(int i, int j) const { return fx[static_cast<std::size_t>(j) * (grid.n + 1) + i]; }
    double& y(int i, int j) { return fy[static_cast<std::size_t>(j) * grid.n + i]; }
    double y(int i, int j) const { return fy[static_cast<std::size_t>(j) * grid.n + i]; }

    double max_abs() const {
        double m = 0.0;
        for (double a : fx) m = std::max(m, std::fabs(a));
        for (double a : fy) m = std::max(m, std::fabs(a));
        return m;
    }
};

/// Face differences (u_{i+1} - u_i)/h. Neumann boundary faces carry zero
/// flux; periodic faces wrap (and faces 0 and n coincide).
inline VectorField gradient(const ScalarField& u) {
    const Grid& g = u.grid;
    VectorField out(g);
    const double inv_h = 1.0 / g.h();
    const int n = g.n;
    if (g.dim == 1) {
        for (int i = 1; i < n; ++i) out.x(i) = (u.at(i) - u.at(i - 1)) * inv_h;
        if (g.boundary == Boundary::periodic) {
            double w = (u.at(0) - u.at(n - 1)) * inv_h;
            out.x(0) = w;
            out.x(n) = w;
        }
        return out;
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 1; i < n; ++i) out.x(i, j) = (u.at(i, j) - u.at(i - 1, j)) * inv_h;
        if (g.boundary == Boundary::periodic) {
            double w = (u.at(0, j) - u.at(n - 1, j)) * inv_h;
            out.x(0, j) = w;
            out.x(n, j) = w;
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 1; j < n; ++j) out.y(i, j) = (u.at(i, j) - u.at(i, j - 1)) * inv_h;
        if (g.boundary == Boundary::periodic) {
            double w = (u.at(i, 0) - u.at(i, n - 1)) * inv_h;
            out.y(i, 0) = w;
            out.y(i, n) = w;
        }
    }
    return out;
}

/// (F_{i+1/2} - F_{i-1/2})/h per cell; adjoint of gradient up to sign.
inline ScalarField divergence(const VectorField& F) {
    const Grid& g = F.grid;
    ScalarField out(g);
    const double inv_h = 1.0 / g.h();
    const int n = g.n;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) out.at(i) = (F.x(i + 1) - F.x(i)) * inv_h;
        return out;
    }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out.at(i, j) = (F.x(i + 1, j) - F.x(i, j) + F.y(i, j + 1) - F.y(i, j)) * inv_h;
    return out;
}

/// Standard 3-point / 5-point stencil; equals divergence(gradient(u)).
inline ScalarField laplacian(const ScalarField& u) { return divergence(gradient(u)); }

/// h^dim * sum of u over cells where mask(field value) holds.
inline double masked_integral(const ScalarField& u, const ScalarField& field,
                              const std::function<bool(double)>& mask) {
    if (!(u.grid == field.grid)) throw Error("masked_integral: grid mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k)
        if (mask(field.v[k])) s += u.v[k];
    return s * u.grid.cell_volume();
}

inline double integral(const ScalarField& u) {
    double s = 0.0;
    for (double a : u.v) s += a;
    return s * u.grid.cell_volume();
}

inline double inner(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a.v[k] * b.v[k];
    return s * a.grid.cell_volume();
}

/// Face inner product over unique faces (periodic grids count the wrapped
/// face once; Neumann boundary faces carry zero flux anyway).
inline double inner(const VectorField& A, const VectorField& B) {
    const Grid& g = A.grid;
    const int n = g.n;
    double s = 0.0;
    if (g.dim == 1) {
        int i0 = (g.boundary == Boundary::periodic) ? 1 : 0;
        for (int i = i0; i <= n; ++i) s += A.x(i) * B.x(i);
        return s * g.cell_volume();
    }
    int i0 = (g.boundary == Boundary::periodic) ? 1 : 0;
    for (int j = 0; j < n; ++j)
        for (int i = i0; i <= n; ++i) s += A.x(i, j) * B.x(i, j);
    for (int i = 0; i < n; ++i)
        for (int j = i0; j <= n; ++j) s += A.y(i, j) * B.y(i, j);
    return s * g.cell_volume();
}

inline double max_abs(const ScalarField& u) {
    double m = 0.0;
    for (double a : u.v) m = std::max(m, std::fabs(a));
    return m;
}

inline double max_value(const ScalarField& u) {
    double m = -kInf;
    for (double a : u.v) m = std::max(m, a);
    return m;
}

inline double min_value(const ScalarField& u) {
    double m = kInf;
    for (double a : u.v) m = std::min(m, a);
    return m;
}

inline double l1_norm(const ScalarField& u) {
    double s = 0.0;
    for (double a : u.v) s += std::fabs(a);
    return s * u.grid.cell_volume();
}

inline double l2_norm(const ScalarField& u) { return std::sqrt(inner(u, u)); }
inline double l2_norm(const VectorField& F) { return std::sqrt(inner(F, F)); }

/// Cell-centered |F|^2: per axis the mean of the squared adjacent faces.
inline ScalarField face_magnitude_squared(const VectorField& F) {
    const Grid& g = F.grid;
    ScalarField out(g);
    const int n = g.n;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i)
            out.at(i) = 0.5 * (F.x(i) * F.x(i) + F.x(i + 1) * F.x(i + 1));
        return out;
    }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out.at(i, j) = 0.5 * (F.x(i, j) * F.x(i, j) + F.x(i + 1, j) * F.x(i + 1, j)) +
                           0.5 * (F.y(i, j) * F.y(i, j) + F.y(i, j + 1) * F.y(i, j + 1));
    return out;
}

/// Arithmetic mean of u on faces (simple O(h^2) face quadrature weight).
inline VectorField to_faces(const ScalarField& u) {
    const Grid& g = u.grid;
    VectorField out(g);
    const int n = g.n;
    if (g.dim == 1) {
        for (int i = 1; i < n; ++i) out.x(i) = 0.5 * (u.at(i) + u.at(i - 1));
        if (g.boundary == Boundary::periodic) {
            double w = 0.5 * (u.at(0) + u.at(n - 1));
            out.x(0) = w;
            out.x(n) = w;
        } else {
            out.x(0) = u.at(0);
            out.x(n) = u.at(n - 1);
        }
        return out;
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 1; i < n; ++i) out.x(i, j) = 0.5 * (u.at(i, j) + u.at(i - 1, j));
        if (g.boundary == Boundary::periodic) {
            double w = 0.5 * (u.at(0, j) + u.at(n - 1, j));
            out.x(0, j) = w;
            out.x(n, j) = w;
        } else {
            out.x(0, j) = u.at(0, j);
            out.x(n, j) = u.at(n - 1, j);
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 1; j < n; ++j) out.y(i, j) = 0.5 * (u.at(i, j) + u.at(i, j - 1));
        if (g.boundary == Boundary::periodic) {
            double w = 0.5 * (u.at(i, 0) + u.at(i, n - 1));
            out.y(i, 0) = w;
            out.y(i, n) = w;
        } else {
            out.y(i, 0) = u.at(i, 0);
            out.y(i, n) = u.at(i, n - 1);
        }
    }
    return out;
}

/// Largest density within `margin` cells of a Neumann boundary (domain-
/// too-small monitor; periodic grids have no boundary and return 0).
inline double boundary_contamination(const ScalarField& u, int margin = 5) {
    const Grid& g = u.grid;
    if (g.boundary == Boundary::periodic) return 0.0;
    const int n = g.n;
    double m = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i)
            if (i < margin || i >= n - margin) m = std::max(m, std::fabs(u.at(i)));
        return m;
    }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i < margin || i >= n - margin || j < margin || j >= n - margin)
                m = std::max(m, std::fabs(u.at(i, j)));
    return m;
}

// --- serialization ---------------------------------------------------------

/// CSV snapshot: "x,value" rows in 1D, "x,y,value" in 2D.
inline void write_csv(const ScalarField& u, std::ostream& os) {
    const Grid& g = u.grid;
    if (g.dim == 1) {
        os << "x,value\n";
        for (int i = 0; i < g.n; ++i) os << g.x(i) << ',' << u.at(i) << '\n';
        return;
    }
    os << "x,y,value\n";
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i)
            os << g.x(i) << ',' << g.x(j) << ',' << u.at(i, j) << '\n';
}

/// Simple binary dump: header (dim, n, length, boundary) + raw doubles.
inline void write_binary(const ScalarField& u, std::ostream& os) {
    const Grid& g = u.grid;
    std::int32_t hdr[3] = {static_cast<std::int32_t>(g.dim), static_cast<std::int32_t>(g.n),
                           static_cast<std::int32_t>(g.boundary)};
    os.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    os.write(reinterpret_cast<const char*>(&g.length), sizeof(double));
    os.write(reinterpret_cast<const char*>(u.v.data()),
             static_cast<std::streamsize>(u.v.size() * sizeof(double)));
}

inline ScalarField read_binary(std::istream& is) {
    std::int32_t hdr[3];
    double length;
    is.read(reinterpret_cast<char*>(hdr), sizeof hdr);
    is.read(reinterpret_cast<char*>(&length), sizeof(double));
    if (!is) throw Error("read_binary: truncated header");
    Grid g(hdr[0], hdr[1], length, static_cast<Boundary>(hdr[2]));
    ScalarField u(g);
    is.read(reinterpret_cast<char*>(u.v.data()),
            static_cast<std::streamsize>(u.v.size() * sizeof(double)));
    if (!is) throw Error("read_binary: truncated payload");
    return u;
}

}  // namespace brinkman
