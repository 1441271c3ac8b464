#pragma once

// Identity and bound diagnostics evaluated on stored trajectories: the
// energy evolution equation in weak form, its internal-energy / H^{-1} /
// derivative-control / power / entropy specializations, the a-priori bound
// monitors, the non-concentration masked integral, the density/flux swap
// error and the inviscid-limit velocity gap. Each check returns a signed
// residual ledger; nothing here mutates a trajectory.

#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "brinkman/darcy.hpp"
#include "brinkman/stepper.hpp"

namespace brinkman {

struct DissipationReport {
    std::string identity;
    std::vector<std::pair<std::string, double>> terms;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;             // lhs - rhs
    double normalized_residual = 0.0;  // residual / max |term|
    // cellwise minima of the two dissipation integrands over the whole run
    double min_diffusive = 0.0;        // z''(w) |grad w|^2
    double min_frictional = 0.0;       // (z'(w) - z'(p)) (w - p) / nu
    // resolution metadata
    int grid_n = 0;
    double mean_dt = 0.0;
    std::size_t steps = 0;

    void finalize() {
        residual = lhs - rhs;
        double m = 0.0;
        for (const auto& [name, v] : terms) m = std::max(m, std::fabs(v));
        normalized_residual = m > 0.0 ? residual / m : residual;
    }

    void write_csv(std::ostream& os) const {
        os << "term,value\n";
        for (const auto& [name, v] : terms) os << name << ',' << v << '\n';
        os << "lhs," << lhs << "\nrhs," << rhs << "\nresidual," << residual
           << "\nnormalized_residual," << normalized_residual
           << "\nmin_diffusive," << min_diffusive
           << "\nmin_frictional," << min_frictional << "\ngrid_n," << grid_n
           << "\nmean_dt," << mean_dt << "\nsteps," << steps << '\n';
    }

    std::string summary() const {
        std::ostringstream os;
        os << identity << ": residual=" << residual
           << " (normalized " << normalized_residual << "), min dissipation terms ["
           << min_diffusive << ", " << min_frictional << "]";
        return os.str();
    }
};

/// An (e, z) pair satisfying the coupling relation a c - e(a) = z'(b) for
/// b in df(a), c in de(a). Only what each report needs must be present
/// (z itself is required only by the space-time-test form).
struct EnergyPair {
    std::string name;
    std::function<double(double)> e;         // density energy, e(0) = 0
    std::function<double(double)> e_prime;   // a selection of de
    std::function<double(double)> z;         // pressure function (optional)
    std::function<double(double)> z_prime;
    std::function<double(double)> z_second;
    // integrand of the growth term, defaults to (e(rho) + z'(p)) G(p)
    std::function<double(double rho, double p, double Gp)> growth_term;

    double growth_integrand(double rho, double p, double Gp) const {
        if (growth_term) return growth_term(rho, p, Gp);
        return (e(rho) + z_prime(p)) * Gp;
    }
};

inline void check_coupling(const EnergyPair& pair, const PressureLaw& law,
                           double a_hi, double tol = 1e-5) {
    double lo = std::max(1e-3, 1e-3 * a_hi);
    double hi = std::min(a_hi, law.energy.domain_hi() * (1.0 - 1e-6));
    for (int k = 0; k <= 32; ++k) {
        double a = lo + (hi - lo) * k / 32.0;
        double b = law.pressure(a);
        double lhs = a * pair.e_prime(a) - pair.e(a);
        double rhs = pair.z_prime(b);
        if (std::fabs(lhs - rhs) > tol * (1.0 + std::fabs(rhs)))
            throw Error("coupling relation fails for pair '" + pair.name +
                        "' at a=" + std::to_string(a) + ": " + std::to_string(lhs) +
                        " vs " + std::to_string(rhs));
    }
}

// --- canonical pairs for the shipped identities -----------------------------

/// e = f, z' = f* (internal energy; growth term simplifies to rho p G(p)).
inline EnergyPair internal_energy_pair(const PressureLaw& law) {
    EnergyPair pair;
    pair.name = "internal_energy";
    const auto f = law.energy;
    const auto fstar = law.energy_dual;
    pair.e = [f](double a) { return f(a); };
    pair.e_prime = [f](double a) { return f.derivative(a); };
    pair.z_prime = [fstar](double b) { return fstar(b); };
    pair.z_second = law.dual_deriv;
    if (law.family == LawFamily::power) {
        const double g = law.gamma;
        const double q = (2.0 * g + 1.0) / g;
        pair.z = [g, q](double b) {
            return b <= 0.0 ? 0.0 : (g / (g + 1.0)) * (g / (2.0 * g + 1.0)) * std::pow(b, q);
        };
    }
    pair.growth_term = [](double rho, double p, double Gp) { return rho * p * Gp; };
    return pair;
}

/// e = h, z' = h* o f* (H^{-1} dissipation; growth term rho f*(p) G(p)).
inline EnergyPair h1_energy_pair(const PressureLaw& law) {
    EnergyPair pair;
    pair.name = "h1_energy";
    ConvexScalarFunction h = h_energy_closed_form(law);
    ConvexScalarFunction hstar = conjugate_by_inversion(h);
    const auto fstar = law.energy_dual;
    const auto fstar_deriv = law.dual_deriv;
    pair.e = [h](double a) { return h(a); };
    pair.e_prime = [h](double a) { return h.derivative(a); };
    pair.z_prime = [hstar, fstar](double b) { return hstar(fstar(b)); };
    pair.z_second = [fstar_deriv](double b) {
        double d = fstar_deriv(b);
        return d * d;  // (h* o f*)'' = f*'(b)^2 through h*' o f* = f*'
    };
    const auto fs = law.energy_dual;
    pair.growth_term = [fs](double rho, double p, double Gp) { return rho * fs(p) * Gp; };
    return pair;
}

/// z' = identity (derivative control): e(a) = a int_{a_ref}^a f'/alpha^2.
inline EnergyPair derivative_control_pair(const PressureLaw& law, double a_ref = 0.25) {
    EnergyPair pair;
    pair.name = "derivative_control";
    pair.z = [](double b) { return 0.5 * b * b; };
    pair.z_prime = [](double b) { return b; };
    pair.z_second = [](double) { return 1.0; };
    if (law.family == LawFamily::power) {
        const double g = law.gamma;
        const double c = a_ref;
        if (g == 1.0) {
            pair.e = [c](double a) { return a <= 0.0 ? 0.0 : a * std::log(a / c); };
            pair.e_prime = [c](double a) { return std::log(a / c) + 1.0; };
        } else {
            pair.e = [g, c](double a) {
                if (a <= 0.0) return 0.0;
                return a * (std::pow(a, g - 1.0) - std::pow(c, g - 1.0)) / (g - 1.0);
            };
            pair.e_prime = [g, c](double a) {
                return (g * std::pow(a, g - 1.0) - std::pow(c, g - 1.0)) / (g - 1.0);
            };
        }
    } else if (law.family == LawFamily::logarithmic) {
        const double nu = law.gamma;
        const double c = a_ref;
        // int f'/alpha^2 = nu ln(alpha/(1-alpha)) for f' = nu a/(1-a)
        pair.e = [nu, c](double a) {
            if (a <= 0.0) return 0.0;
            return a * nu * (std::log(a / (1.0 - a)) - std::log(c / (1.0 - c)));
        };
        pair.e_prime = [nu, c](double a) {
            return nu * (std::log(a / (1.0 - a)) - std::log(c / (1.0 - c))) +
                   nu / (1.0 - a);
        };
    } else {
        throw Error("derivative_control_pair: unsupported family");
    }
    return pair;
}

/// e = (a^m - a)/(m-1), z' = f*'(b)^m (powers of the density).
inline EnergyPair power_pair(const PressureLaw& law, double m) {
    if (!(m > 1.0)) throw Error("power_pair: need m > 1");
    EnergyPair pair;
    pair.name = "power_m";
    const auto fd = law.dual_deriv;
    const auto fc = law.dual_curvature;
    pair.e = [m](double a) { return a <= 0.0 ? 0.0 : (std::pow(a, m) - a) / (m - 1.0); };
    pair.e_prime = [m](double a) {
        return a <= 0.0 ? -1.0 / (m - 1.0) : (m * std::pow(a, m - 1.0) - 1.0) / (m - 1.0);
    };
    pair.z_prime = [fd, m](double b) { return std::pow(fd(b), m); };
    pair.z_second = [fd, fc, m](double b) {
        return m * std::pow(fd(b), m - 1.0) * fc(b);
    };
    pair.growth_term = [m](double rho, double /*p*/, double Gp) {
        double e = rho <= 0.0 ? 0.0 : (std::pow(rho, m) - rho) / (m - 1.0);
        double zp = rho <= 0.0 ? 0.0 : std::pow(rho, m);  // z'(p) = rho^m on the graph
        return (e + zp) * Gp;
    };
    return pair;
}

/// e = a ln a - a, z' = f*' (Boltzmann entropy).
inline EnergyPair entropy_pair(const PressureLaw& law) {
    EnergyPair pair;
    pair.name = "entropy";
    pair.e = [](double a) { return a <= 0.0 ? 0.0 : a * std::log(a) - a; };
    pair.e_prime = [](double a) { return a <= 0.0 ? -kInf : std::log(a); };
    pair.z_prime = law.dual_deriv;
    pair.z_second = law.dual_curvature;
    pair.growth_term = [](double rho, double /*p*/, double Gp) {
        return rho <= 0.0 ? 0.0 : rho * std::log(rho) * Gp;
    };
    return pair;
}

namespace detail {

/// Cellwise dot product of two face fields (mean of the per-axis face
/// products adjacent to each cell).
inline ScalarField face_dot_to_cells(const VectorField& A, const VectorField& B) {
    const Grid& g = A.grid;
    ScalarField out(g);
    const int n = g.n;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i)
            out.at(i) = 0.5 * (A.x(i) * B.x(i) + A.x(i + 1) * B.x(i + 1));
        return out;
    }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out.at(i, j) =
                0.5 * (A.x(i, j) * B.x(i, j) + A.x(i + 1, j) * B.x(i + 1, j)) +
                0.5 * (A.y(i, j) * B.y(i, j) + A.y(i, j + 1) * B.y(i, j + 1));
    return out;
}

struct LzAccumulator {
    double diffusive = 0.0;   // time-integrated z''(w)|grad w|^2
    double frictional = 0.0;  // time-integrated (z'(w)-z'(p))(w-p)/nu
    double min_diffusive = kInf;
    double min_frictional = kInf;

    /// Adds dt * integral of both dissipation terms weighted cellwise.
    void add(const SolverState& st, double nu, const EnergyPair& pair, double dt,
             const ScalarField* weight) {
        ScalarField grad2 = face_magnitude_squared(st.velocity);
        const double vol = st.total.grid.cell_volume();
        double sd = 0.0, sf = 0.0;
        for (std::size_t k = 0; k < st.total.size(); ++k) {
            double w = st.potential.v[k];
            double p = st.pressure.v[k];
            double cw = weight ? weight->v[k] : 1.0;
            double d = pair.z_second(w) * grad2.v[k];
            double f = nu > 0.0
                           ? (pair.z_prime(w) - pair.z_prime(p)) * (w - p) / nu
                           : 0.0;
            min_diffusive = std::min(min_diffusive, d);
            min_frictional = std::min(min_frictional, f);
            sd += cw * d;
            sf += cw * f;
        }
        diffusive += dt * vol * sd;
        frictional += dt * vol * sf;
    }
};

inline double weighted_integral(const ScalarField& u, const ScalarField* w) {
    if (!w) return integral(u);
    return inner(u, *w);
}

}  // namespace detail

/// Time weight eta(t) with its derivative; defaults to eta == 1.
struct TimeWeight {
    std::function<double(double)> value = [](double) { return 1.0; };
    std::function<double(double)> derivative = [](double) { return 0.0; };
};

/// Total-energy dissipation identity with a time weight eta:
///   eta(T) E(T) + II[ eta Lz - e(rho) eta' ] = eta(0) E(0) + II[ eta growth ],
/// where E(t) = int e(rho(t)) and Lz is the dissipation pair. The time
/// quadrature follows the trajectory's own steps (left endpoint), matching
/// the forward-Euler scheme.
inline DissipationReport energy_identity_report(const Trajectory& traj,
                                                const EnergyPair& pair,
                                                const TimeWeight& eta = {}) {
    if (traj.snapshots.size() < 1) throw Error("report: empty trajectory");
    const PressureLaw& law = traj.law;
    double a_hi = max_value(traj.front().total) * 1.5 + 0.5;
    check_coupling(pair, law, a_hi);

    DissipationReport rep;
    rep.identity = pair.name;
    rep.grid_n = traj.front().total.grid.n;
    rep.steps = traj.steps();

    detail::LzAccumulator lz;
    double growth_int = 0.0;
    double eta_deriv_int = 0.0;
    double total_dt = 0.0;
    for (std::size_t n = 0; n + 1 < traj.snapshots.size(); ++n) {
        const SolverState& st = traj.snapshots[n];
        double dt = traj.snapshots[n + 1].t - st.t;
        total_dt += dt;
        double et = eta.value(st.t);
        double etp = eta.derivative(st.t);
        lz.add(st, law.nu, pair, dt * et, nullptr);
        ScalarField e_rho = st.total.map(pair.e);
        ScalarField growth(st.total.grid);
        for (std::size_t k = 0; k < growth.size(); ++k) {
            double Gp = 0.0;
            // per-species growth acting on the summed reaction term
            for (std::size_t s = 0; s < traj.growth.size(); ++s) {
                double share = st.total.v[k] > 0.0
                                   ? st.species[s].v[k] / st.total.v[k]
                                   : 0.0;
                Gp += share * traj.growth[s].value(st.pressure.v[k]);
            }
            growth.v[k] = pair.growth_integrand(st.total.v[k], st.pressure.v[k], Gp);
        }
        growth_int += dt * et * integral(growth);
        eta_deriv_int += dt * etp * integral(e_rho);
    }
    const SolverState& last = traj.back();
    const SolverState& first = traj.front();
    double terminal = eta.value(last.t) * integral(last.total.map(pair.e));
    double initial = eta.value(first.t) * integral(first.total.map(pair.e));

    rep.terms = {{"terminal_energy", terminal},
                 {"diffusive_dissipation", lz.diffusive},
                 {"frictional_dissipation", lz.frictional},
                 {"eta_derivative", -eta_deriv_int},
                 {"initial_energy", initial},
                 {"growth", growth_int}};
    rep.lhs = terminal + lz.diffusive + lz.frictional - eta_deriv_int;
    rep.rhs = initial + growth_int;
    rep.min_diffusive = lz.min_diffusive;
    rep.min_frictional = lz.min_frictional;
    rep.mean_dt = rep.steps ? total_dt / static_cast<double>(rep.steps) : 0.0;
    rep.finalize();
    return rep;
}

/// Space-time test function psi(t, x[, y]) >= 0 with compact support in t.
struct SpaceTimeTest {
    std::function<double(double t, double x, double y)> value;

    ScalarField sample(const Grid& g, double t) const {
        ScalarField out(g);
        if (g.dim == 1) {
            for (int i = 0; i < g.n; ++i) out.at(i) = value(t, g.x(i), 0.0);
        } else {
            for (int j = 0; j < g.n; ++j)
                for (int i = 0; i < g.n; ++i) out.at(i, j) = value(t, g.x(i), g.x(j));
        }
        return out;
    }

    /// N(psi): ||psi(0)||_1 + ||psi||_1 + ||dt psi||_1 + || |grad psi|^2/psi ||_1,
    /// evaluated by grid/step quadrature on the trajectory's own mesh.
    double seminorm(const Trajectory& traj) const {
        const Grid& g = traj.front().total.grid;
        double n_psi = l1_norm(sample(g, traj.front().t));
        for (std::size_t n = 0; n + 1 < traj.snapshots.size(); ++n) {
            double t = traj.snapshots[n].t;
            double dt = traj.snapshots[n + 1].t - t;
            ScalarField psi = sample(g, t);
            ScalarField psi_next = sample(g, traj.snapshots[n + 1].t);
            double l1 = 0.0, dl1 = 0.0, gl1 = 0.0;
            ScalarField grad2 = face_magnitude_squared(gradient(psi));
            for (std::size_t k = 0; k < psi.size(); ++k) {
                l1 += std::fabs(psi.v[k]);
                dl1 += std::fabs(psi_next.v[k] - psi.v[k]) / dt;
                if (psi.v[k] > 1e-14) gl1 += grad2.v[k] / psi.v[k];
            }
            n_psi += dt * g.cell_volume() * (l1 + dl1 + gl1);
        }
        return n_psi;
    }
};

/// The energy evolution equation in full weak form against a space-time
/// test function. Requires pair.z. Residual = LHS - RHS of the identity.
inline DissipationReport eee_residual(const Trajectory& traj, const EnergyPair& pair,
                                      const SpaceTimeTest& psi) {
    if (!pair.z) throw Error("eee_residual: pair must provide z");
    const PressureLaw& law = traj.law;
    double a_hi = max_value(traj.front().total) * 1.5 + 0.5;
    check_coupling(pair, law, a_hi);

    DissipationReport rep;
    rep.identity = pair.name + "+eee";
    const Grid& g = traj.front().total.grid;
    rep.grid_n = g.n;
    rep.steps = traj.steps();

    detail::LzAccumulator lz;
    double transport = 0.0;   // II e(rho) (grad w . grad psi - dt psi)
    double diffusion = 0.0;   // -II z(w) lap psi
    double growth_int = 0.0;
    double total_dt = 0.0;
    for (std::size_t n = 0; n + 1 < traj.snapshots.size(); ++n) {
        const SolverState& st = traj.snapshots[n];
        double dt = traj.snapshots[n + 1].t - st.t;
        total_dt += dt;
        ScalarField psi_now = psi.sample(g, st.t);
        ScalarField psi_next = psi.sample(g, traj.snapshots[n + 1].t);
        lz.add(st, law.nu, pair, dt, &psi_now);

        ScalarField e_rho = st.total.map(pair.e);
        VectorField grad_psi = gradient(psi_now);
        VectorField grad_w = st.velocity;  // -grad w; flip the sign below
        ScalarField dot = detail::face_dot_to_cells(grad_w, grad_psi);
        for (std::size_t k = 0; k < e_rho.size(); ++k) {
            // grad w . grad psi = -velocity . grad psi
            transport += e_rho.v[k] * (-dot.v[k]) * dt * g.cell_volume();
            transport -= e_rho.v[k] * (psi_next.v[k] - psi_now.v[k]) * g.cell_volume();
        }
        ScalarField z_w = st.potential.map(pair.z);
        diffusion -= dt * inner(z_w, laplacian(psi_now));

        ScalarField growth(g);
        for (std::size_t k = 0; k < growth.size(); ++k) {
            double Gp = 0.0;
            for (std::size_t s = 0; s < traj.growth.size(); ++s) {
                double share = st.total.v[k] > 0.0 ? st.species[s].v[k] / st.total.v[k] : 0.0;
                Gp += share * traj.growth[s].value(st.pressure.v[k]);
            }
            growth.v[k] = pair.growth_integrand(st.total.v[k], st.pressure.v[k], Gp);
        }
        growth_int += dt * inner(growth, psi_now);
    }
    ScalarField psi0 = psi.sample(g, traj.front().t);
    double initial = inner(psi0, traj.front().total.map(pair.e));

    rep.terms = {{"diffusive_dissipation", lz.diffusive},
                 {"frictional_dissipation", lz.frictional},
                 {"transport", transport},
                 {"z_diffusion", diffusion},
                 {"initial_energy", initial},
                 {"growth", growth_int}};
    rep.lhs = lz.diffusive + lz.frictional + transport + diffusion;
    rep.rhs = initial + growth_int;
    rep.min_diffusive = lz.min_diffusive;
    rep.min_frictional = lz.min_frictional;
    rep.mean_dt = rep.steps ? total_dt / static_cast<double>(rep.steps) : 0.0;
    rep.finalize();
    return rep;
}

inline DissipationReport internal_energy_report(const Trajectory& traj,
                                                const TimeWeight& eta = {}) {
    return energy_identity_report(traj, internal_energy_pair(traj.law), eta);
}

inline DissipationReport h1_energy_report(const Trajectory& traj,
                                          const TimeWeight& eta = {}) {
    DissipationReport rep = energy_identity_report(traj, h1_energy_pair(traj.law), eta);
    // report the kinetic term II eta |grad f*(w)|^2 separately (face-based)
    double kinetic = 0.0;
    for (std::size_t n = 0; n + 1 < traj.snapshots.size(); ++n) {
        const SolverState& st = traj.snapshots[n];
        double dt = traj.snapshots[n + 1].t - st.t;
        ScalarField fw = st.potential.map([&](double b) { return traj.law.energy_dual(b); });
        VectorField gfw = gradient(fw);
        kinetic += dt * eta.value(st.t) * inner(gfw, gfw);
    }
    rep.terms.emplace_back("kinetic_grad_fstar_w", kinetic);
    return rep;
}

inline DissipationReport power_entropy_report(const Trajectory& traj, double m) {
    return energy_identity_report(traj, power_pair(traj.law, m));
}

inline DissipationReport entropy_report(const Trajectory& traj) {
    // finite second moment of the datum (trivial on a box; recorded anyway)
    return energy_identity_report(traj, entropy_pair(traj.law));
}

// --- derivative budget -------------------------------------------------------

struct DerivativeBudget {
    double lhs = 0.0;      // II psi (|grad w|^2 + nu |lap w|^2)
    double grad_part = 0.0;
    double lap_part = 0.0;
    double n_psi = 0.0;
    double state_bound = 0.0;  // ||rho + p + rho^2 p^2||_inf + 1
    double bound = 0.0;        // C N(psi) state_bound
    bool pass = false;
};

inline DerivativeBudget derivative_budget(const Trajectory& traj,
                                          const SpaceTimeTest& psi, double C = 10.0) {
    DerivativeBudget out;
    const Grid& g = traj.front().total.grid;
    const double nu = traj.law.nu;
    double sup_state = 0.0;
    for (std::size_t n = 0; n + 1 < traj.snapshots.size(); ++n) {
        const SolverState& st = traj.snapshots[n];
        double dt = traj.snapshots[n + 1].t - st.t;
        ScalarField psi_now = psi.sample(g, st.t);
        ScalarField grad2 = face_magnitude_squared(st.velocity);
        ScalarField lap_w = laplacian(st.potential);
        for (std::size_t k = 0; k < grad2.size(); ++k) {
            out.grad_part += dt * g.cell_volume() * psi_now.v[k] * grad2.v[k];
            out.lap_part +=
                dt * g.cell_volume() * psi_now.v[k] * nu * lap_w.v[k] * lap_w.v[k];
            double rho = st.total.v[k], p = st.pressure.v[k];
            sup_state = std::max(sup_state, rho + p + rho * rho * p * p);
        }
    }
    out.lhs = out.grad_part + out.lap_part;
    out.n_psi = psi.seminorm(traj);
    out.state_bound = sup_state + 1.0;
    out.bound = C * out.n_psi * out.state_bound;
    out.pass = out.lhs <= out.bound;
    return out;
}

// --- complementarity ---------------------------------------------------------

struct ComplementarityReport {
    double l1_residual = 0.0;   // || lap w + G(p) ||_1 on {p > V_p + margin}
    double linf_residual = 0.0;
    double active_volume = 0.0; // space-time measure of the active set
    double inequality_violation = 0.0;  // max (-lap w - sgn+(p-V_p) G(p))_+ on {w > V_p}
    bool advisory = false;      // density precondition failed; report only
};

inline ComplementarityReport complementarity_residual(const Trajectory& traj,
                                                      double V_p,
                                                      double margin = 0.0) {
    ComplementarityReport out;
    const PressureLaw& law = traj.law;
    double cap = law.density_cap(V_p);
    const Grid& g = traj.front().total.grid;
    for (std::size_t n = 0; n + 1 < traj.snapshots.size(); ++n) {
        const SolverState& st = traj.snapshots[n];
        double dt = traj.snapshots[n + 1].t - st.t;
        if (max_value(st.total) > cap * (1.0 + 1e-9)) out.advisory = true;
        ScalarField lap_w = laplacian(st.potential);
        for (std::size_t k = 0; k < st.total.size(); ++k) {
            double p = st.pressure.v[k];
            double w = st.potential.v[k];
            double Gp = traj.growth.front().value(p);
            if (p > V_p + margin) {
                double r = lap_w.v[k] + Gp;
                out.l1_residual += dt * g.cell_volume() * std::fabs(r);
                out.linf_residual = std::max(out.linf_residual, std::fabs(r));
                out.active_volume += dt * g.cell_volume();
            }
            if (w > V_p + margin) {
                double rhs = (p > V_p ? 1.0 : 0.0) * Gp;
                out.inequality_violation =
                    std::max(out.inequality_violation, -lap_w.v[k] - rhs);
            }
        }
    }
    return out;
}

// --- a-priori bound monitor ----------------------------------------------------

struct BoundMonitorReport {
    double B_p = 0.0;              // max(p_H, B)
    double max_pressure = 0.0;     // max over trajectory
    double density_cap = 0.0;      // sup df*(B_p)
    double max_density = 0.0;
    double worst_mass_ratio = 0.0; // max_t mass(t) / (e^{G(0)t} M(0))
    bool pressure_ok = false, density_ok = false, mass_ok = false;
    bool pass = false;
};

inline BoundMonitorReport bound_monitor(const Trajectory& traj, double bound_B,
                                        double slack = 1e-2) {
    BoundMonitorReport out;
    const PressureLaw& law = traj.law;
    out.B_p = std::max(law.growth.p_H, bound_B);
    out.density_cap = law.density_cap(out.B_p);
    double M0 = integral(traj.front().total);
    double G0 = law.growth.g0;
    out.worst_mass_ratio = 0.0;
    for (const SolverState& st : traj.snapshots) {
        out.max_pressure = std::max(out.max_pressure, max_value(st.pressure));
        out.max_density = std::max(out.max_density, max_value(st.total));
        double cap = M0 * std::exp(G0 * st.t);
        if (cap > 0.0)
            out.worst_mass_ratio = std::max(out.worst_mass_ratio, integral(st.total) / cap);
    }
    out.pressure_ok = out.max_pressure <= out.B_p * (1.0 + slack);
    out.density_ok = out.max_density <= out.density_cap * (1.0 + slack);
    out.mass_ok = (M0 == 0.0) || out.worst_mass_ratio <= 1.0 + 1e-3;
    out.pass = out.pressure_ok && out.density_ok && out.mass_ok;
    return out;
}

// --- non-concentration ----------------------------------------------------------

/// II chi_A(w) |grad w|^2 over the trajectory, A a finite union of
/// intervals; pair with |A| for the non-concentration ratio.
inline double singular_mass(const Trajectory& traj,
                            const std::vector<std::pair<double, double>>& A) {
    double total = 0.0;
    for (std::size_t n = 0; n + 1 < traj.snapshots.size(); ++n) {
        const SolverState& st = traj.snapshots[n];
        double dt = traj.snapshots[n + 1].t - st.t;
        ScalarField grad2 = face_magnitude_squared(st.velocity);
        total += dt * masked_integral(grad2, st.potential, [&](double w) {
            for (const auto& [lo, hi] : A)
                if (w >= lo && w <= hi) return true;
            return false;
        });
    }
    return total;
}

inline double interval_measure(const std::vector<std::pair<double, double>>& A) {
    double m = 0.0;
    for (const auto& [lo, hi] : A) m += std::max(hi - lo, 0.0);
    return m;
}

// --- density/flux swap -----------------------------------------------------------

struct FluxSwapReport {
    double error = 0.0;  // II psi |rho - f*'(w)| |grad w|
    double I1 = 0.0;     // II psi |p - w| |grad w|
    double I2 = 0.0;     // II psi chi_{S_delta}(w) |grad w|^2
    double delta = 0.0;
    double singular_set_measure = 0.0;
};

inline FluxSwapReport flux_swap_error(const Trajectory& traj, const SpaceTimeTest& psi,
                                      double delta = -1.0) {
    FluxSwapReport out;
    const PressureLaw& law = traj.law;
    out.delta = delta > 0.0 ? delta : std::cbrt(std::max(law.nu, 1e-30));
    const Grid& g = traj.front().total.grid;

    // maximal difference quotient of f*' on [0, B_p], tabulated once
    double b_hi = 0.0;
    for (const SolverState& st : traj.snapshots)
        b_hi = std::max(b_hi, std::max(max_value(st.pressure), max_value(st.potential)));
    b_hi = std::max(b_hi, 1e-12);
    const int nb = 512;
    std::vector<double> dq(nb + 1, 0.0), bgrid(nb + 1);
    for (int i = 0; i <= nb; ++i) bgrid[i] = b_hi * i / nb;
    for (int i = 0; i <= nb; ++i) {
        double di = law.dual_deriv(bgrid[i]);
        for (int j = 0; j <= nb; ++j) {
            if (i == j) continue;
            double q = std::fabs(di - law.dual_deriv(bgrid[j])) /
                       std::fabs(bgrid[i] - bgrid[j]);
            dq[i] = std::max(dq[i], q);
        }
    }
    auto in_singular_set = [&](double w) {
        double t = std::clamp(w, 0.0, b_hi) / b_hi * nb;
        int i = std::min(static_cast<int>(t), nb - 1);
        double q = dq[i] + (t - i) * (dq[i + 1] - dq[i]);
        return q > 1.0 / out.delta;
    };
    for (int i = 0; i <= nb; ++i)
        if (dq[i] > 1.0 / out.delta) out.singular_set_measure += b_hi / nb;

    for (std::size_t n = 0; n + 1 < traj.snapshots.size(); ++n) {
        const SolverState& st = traj.snapshots[n];
        double dt = traj.snapshots[n + 1].t - st.t;
        ScalarField psi_now = psi.sample(g, st.t);
        ScalarField grad2 = face_magnitude_squared(st.velocity);
        for (std::size_t k = 0; k < st.total.size(); ++k) {
            double gw = std::sqrt(grad2.v[k]);
            double w = st.potential.v[k];
            double p = st.pressure.v[k];
            double gap = std::fabs(st.total.v[k] - law.dual_deriv(w));
            double cw = dt * g.cell_volume() * psi_now.v[k];
            out.error += cw * gap * gw;
            out.I1 += cw * std::fabs(p - w) * gw;
            if (in_singular_set(w)) out.I2 += cw * grad2.v[k];
        }
    }
    return out;
}

// --- inviscid-limit velocity gap ---------------------------------------------------

struct VelocityGapReport {
    double velocity_gap = 0.0;   // || grad w_nu - grad p_ref ||_{L^2([t0,T] x Omega)}
    double kinetic_gap = 0.0;    // || grad f*(w_nu) - grad f*(p_ref) ||
    double pressure_gap = 0.0;   // || p_nu - p_ref ||_{L^2}
    double t0 = 0.0;
};

inline VelocityGapReport velocity_gap(const Trajectory& brinkman,
                                      const Trajectory& darcy_ref, double t0 = 0.0) {
    if (!(brinkman.front().total.grid == darcy_ref.front().total.grid))
        throw Error("velocity_gap: trajectories must share a grid");
    VelocityGapReport out;
    out.t0 = t0;
    double acc_v = 0.0, acc_k = 0.0, acc_p = 0.0;
    const auto& fstar_b = brinkman.law.energy_dual;
    const auto& fstar_d = darcy_ref.law.energy_dual;
    for (std::size_t n = 0; n + 1 < brinkman.snapshots.size(); ++n) {
        const SolverState& st = brinkman.snapshots[n];
        if (st.t < t0) continue;
        double dt = brinkman.snapshots[n + 1].t - st.t;
        const SolverState& ref = darcy_ref.nearest(st.t);

        VectorField gw = gradient(st.potential);
        VectorField gp = gradient(ref.pressure);
        double s = 0.0;
        for (std::size_t k = 0; k < gw.fx.size(); ++k) {
            double d = gw.fx[k] - gp.fx[k];
            s += d * d;
        }
        for (std::size_t k = 0; k < gw.fy.size(); ++k) {
            double d = gw.fy[k] - gp.fy[k];
            s += d * d;
        }
        acc_v += dt * s * st.total.grid.cell_volume();

        ScalarField fw = st.potential.map([&](double b) { return fstar_b(b); });
        ScalarField fp = ref.pressure.map([&](double b) { return fstar_d(b); });
        VectorField gfw = gradient(fw);
        VectorField gfp = gradient(fp);
        s = 0.0;
        for (std::size_t k = 0; k < gfw.fx.size(); ++k) {
            double d = gfw.fx[k] - gfp.fx[k];
            s += d * d;
        }
        for (std::size_t k = 0; k < gfw.fy.size(); ++k) {
            double d = gfw.fy[k] - gfp.fy[k];
            s += d * d;
        }
        acc_k += dt * s * st.total.grid.cell_volume();

        s = 0.0;
        for (std::size_t k = 0; k < st.pressure.size(); ++k) {
            double d = st.pressure.v[k] - ref.pressure.v[k];
            s += d * d;
        }
        acc_p += dt * s * st.total.grid.cell_volume();
    }
    out.velocity_gap = std::sqrt(acc_v);
    out.kinetic_gap = std::sqrt(acc_k);
    out.pressure_gap = std::sqrt(acc_p);
    return out;
}

/// Frictional-dissipation consistency: cellwise
///   (z'(w) - z'(p))(w - p)/nu  vs  nu |lap_h w|^2 * mean z'' on [w,p];
/// returns the largest relative mismatch over a trajectory (z'' constant
/// along the segment makes the identity exact up to solver tolerance).
inline double frictional_identity_gap(const Trajectory& traj, const EnergyPair& pair) {
    const double nu = traj.law.nu;
    if (nu <= 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t n = 0; n + 1 < traj.snapshots.size(); ++n) {
        const SolverState& st = traj.snapshots[n];
        ScalarField lap_w = laplacian(st.potential);
        for (std::size_t k = 0; k < st.total.size(); ++k) {
            double w = st.potential.v[k], p = st.pressure.v[k];
            double lhs = (pair.z_prime(w) - pair.z_prime(p)) * (w - p) / nu;
            double zbar = 0.5 * (pair.z_second(w) + pair.z_second(p));
            double rhs = nu * lap_w.v[k] * lap_w.v[k] * zbar;
            double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-14});
            worst = std::max(worst, std::fabs(lhs - rhs) / scale);
        }
    }
    return worst;
}

}  // namespace brinkman
