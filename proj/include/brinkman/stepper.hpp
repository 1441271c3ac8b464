#pragma once

// Explicit upwind/forward-Euler integrator for the multi-species Brinkman
// system: per-species conservative transport along the shared potential
// velocity -grad w, plus pressure-dependent growth. Positivity and the
// discrete mass ledger are exact by construction.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "brinkman/grid.hpp"
#include "brinkman/helmholtz.hpp"
#include "brinkman/laws.hpp"

namespace brinkman {

struct InitialData {
    std::vector<ScalarField> density_per_species;
    double bound_B = 0.0;  // well-preparedness pressure level

    const Grid& grid() const { return density_per_species.at(0).grid; }
    ScalarField total() const {
        ScalarField t = density_per_species.at(0);
        for (std::size_t s = 1; s < density_per_species.size(); ++s)
            for (std::size_t k = 0; k < t.size(); ++k)
                t.v[k] += density_per_species[s].v[k];
        return t;
    }
};

inline WellPreparedReport validate_well_prepared(const InitialData& data,
                                                 const PressureLaw& law) {
    WellPreparedReport r;
    ScalarField total = data.total();
    r.max_density = max_value(total);
    r.density_cap = law.density_cap(data.bound_B);
    r.mass = integral(total);
    r.linf = r.max_density;
    double min_rho = min_value(total);
    if (min_rho < 0.0) {
        r.pass = false;
        r.failures.push_back("negative initial density");
    }
    if (r.max_density > r.density_cap * (1.0 + 1e-12) + 1e-300) {
        r.pass = false;
        r.failures.push_back("initial density exceeds sup df*(B)");
    }
    for (double v : total.v)
        if (!std::isfinite(v)) {
            r.pass = false;
            r.failures.push_back("non-finite initial density");
            break;
        }
    return r;
}

struct StepControls {
    double cfl_fraction = 0.45;      // transport CFL fraction in (0,1]
    double max_dt = 1e-2;
    double reaction_fraction = 0.2;  // |G| dt bound in (0,1)
    HelmholtzOptions helmholtz;

    void validate() const {
        if (!(cfl_fraction > 0.0 && cfl_fraction <= 1.0))
            throw Error("controls: cfl_fraction must lie in (0,1]");
        if (!(max_dt > 0.0)) throw Error("controls: max_dt must be positive");
        if (!(reaction_fraction > 0.0 && reaction_fraction < 1.0))
            throw Error("controls: reaction_fraction must lie in (0,1)");
    }
};

/// One Brinkman (or Darcy, nu = 0) trajectory snapshot. p and w are always
/// recomputed from the densities, never carried stale.
struct SolverState {
    double t = 0.0;
    std::vector<ScalarField> species;
    ScalarField total;     // sum of species
    ScalarField pressure;  // f'(total)
    ScalarField potential; // solve_w(pressure, nu)
    VectorField velocity;  // -grad potential
};

using GrowthRates = std::vector<GrowthLaw>;  // one per species

/// p = f'(rho) pointwise. Rejects multivalued laws and log-law densities
/// at/above the domain wall (names the offending cell).
inline ScalarField pressure_from_density(const ScalarField& rho_total,
                                         const PressureLaw& law) {
    if (!law.single_valued_pressure)
        throw Error("pressure_from_density: law has multivalued pressure "
                    "(incompressible); use the large-gamma proxy");
    ScalarField p(rho_total.grid);
    const double wall = law.energy.domain_hi();
    for (std::size_t k = 0; k < rho_total.size(); ++k) {
        double rho = rho_total.v[k];
        if (rho >= wall * (1.0 - 1e-12)) {
            throw Error("pressure_from_density: density " + std::to_string(rho) +
                        " at cell " + std::to_string(k) + " reached dom(f) boundary");
        }
        p.v[k] = law.pressure(rho);
    }
    return p;
}

namespace detail {

inline void refresh_derived(SolverState& st, const PressureLaw& law) {
    st.total = st.species.at(0);
    for (std::size_t s = 1; s < st.species.size(); ++s)
        for (std::size_t k = 0; k < st.total.size(); ++k)
            st.total.v[k] += st.species[s].v[k];
    st.pressure = pressure_from_density(st.total, law);
    st.potential = solve_w(st.pressure, law.nu);
    st.velocity = gradient(st.potential);
    for (double& f : st.velocity.fx) f = -f;
    for (double& f : st.velocity.fy) f = -f;
}

/// Worst-case per-cell outflow rate sum_faces max(outgoing v, 0)/h; the
/// donor-cell update stays nonnegative when dt * rate <= 1.
inline double max_outflow_rate(const VectorField& vel) {
    const Grid& g = vel.grid;
    const int n = g.n;
    double m = 0.0;
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) {
            double out = std::max(vel.x(i + 1), 0.0) - std::min(vel.x(i), 0.0);
            m = std::max(m, out);
        }
    } else {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                double out = std::max(vel.x(i + 1, j), 0.0) - std::min(vel.x(i, j), 0.0) +
                             std::max(vel.y(i, j + 1), 0.0) - std::min(vel.y(i, j), 0.0);
                m = std::max(m, out);
            }
    }
    return m / g.h();
}

/// Donor-cell flux rho_up * v on each face.
inline VectorField upwind_flux(const ScalarField& rho, const VectorField& vel) {
    const Grid& g = rho.grid;
    VectorField F(g);
    const int n = g.n;
    auto donor1 = [&](int i) {
        double v = vel.x(i);
        double up = (v >= 0.0) ? rho.at(i == 0 ? n - 1 : i - 1) : rho.at(i == n ? 0 : i);
        return up * v;
    };
    if (g.dim == 1) {
        for (int i = 1; i < n; ++i) F.x(i) = donor1(i);
        if (g.boundary == Boundary::periodic) {
            double w = donor1(0);
            F.x(0) = w;
            F.x(n) = w;
        }
        return F;
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 1; i < n; ++i) {
            double v = vel.x(i, j);
            F.x(i, j) = ((v >= 0.0) ? rho.at(i - 1, j) : rho.at(i, j)) * v;
        }
        if (g.boundary == Boundary::periodic) {
            double v = vel.x(0, j);
            double w = ((v >= 0.0) ? rho.at(n - 1, j) : rho.at(0, j)) * v;
            F.x(0, j) = w;
            F.x(n, j) = w;
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 1; j < n; ++j) {
            double v = vel.y(i, j);
            F.y(i, j) = ((v >= 0.0) ? rho.at(i, j - 1) : rho.at(i, j)) * v;
        }
        if (g.boundary == Boundary::periodic) {
            double v = vel.y(i, 0);
            double w = ((v >= 0.0) ? rho.at(i, n - 1) : rho.at(i, 0)) * v;
            F.y(i, 0) = w;
            F.y(i, n) = w;
        }
    }
    return F;
}

}  // namespace detail

inline SolverState make_state(const InitialData& data, const PressureLaw& law) {
    SolverState st;
    st.t = 0.0;
    st.species = data.density_per_species;
    detail::refresh_derived(st, law);
    return st;
}

/// One explicit step. Returns the new state; dt is chosen from the
/// transport CFL (per-cell outflow), the reaction bound and max_dt, then
/// clipped to dt_cap when positive (used to land exactly on the horizon).
inline SolverState step(const SolverState& state, const PressureLaw& law,
                        const GrowthRates& growth, const StepControls& controls,
                        double dt_cap = 0.0) {
    controls.validate();
    if (growth.size() != state.species.size())
        throw Error("step: one growth law per species required");
    const Grid& g = state.total.grid;

    double rate = detail::max_outflow_rate(state.velocity);
    double dt = controls.max_dt;
    if (rate > 0.0) dt = std::min(dt, controls.cfl_fraction / rate);
    // Quasi-parabolic stability: through w = (I - nu Lap)^{-1} f'(rho) the
    // transport acts like diffusion with symbol rho f''(rho) l / (1 + nu l),
    // worst at the grid-scale eigenvalue l = 4 dim / h^2.
    double phi_max = 0.0;
    for (double rho : state.total.v) {
        if (rho <= 0.0) continue;
        double c = law.energy.has_curvature()
                       ? law.energy.curvature(rho)
                       : (law.pressure(rho * 1.001) - law.pressure(rho * 0.999)) /
                             (0.002 * rho);
        phi_max = std::max(phi_max, rho * c);
    }
    if (phi_max > 0.0) {
        double lam = 4.0 * g.dim / (g.h() * g.h());
        dt = std::min(dt, controls.cfl_fraction * (1.0 + law.nu * lam) /
                              (phi_max * lam));
    }
    double gmax = 0.0;
    for (const auto& G : growth)
        for (double p : state.pressure.v) gmax = std::max(gmax, std::fabs(G.value(p)));
    if (gmax > 0.0) dt = std::min(dt, controls.reaction_fraction / gmax);
    if (dt_cap > 0.0) dt = std::min(dt, dt_cap);
    if (!(dt > 1e-14 * std::max(1.0, state.t)))
        throw Error("step: dt underflow (velocity or growth blow-up), rate=" +
                    std::to_string(rate));

    if (boundary_contamination(state.total) > 1e-10)
        throw Error("step: density reached the domain boundary; domain too small");

    SolverState next;
    next.t = state.t + dt;
    next.species.reserve(state.species.size());
    const double inv_h = 1.0 / g.h();
    for (std::size_t s = 0; s < state.species.size(); ++s) {
        VectorField flux = detail::upwind_flux(state.species[s], state.velocity);
        ScalarField rho = state.species[s];
        const int n = g.n;
        if (g.dim == 1) {
            for (int i = 0; i < n; ++i)
                rho.at(i) -= dt * inv_h * (flux.x(i + 1) - flux.x(i));
        } else {
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    rho.at(i, j) -= dt * inv_h *
                                    (flux.x(i + 1, j) - flux.x(i, j) +
                                     flux.y(i, j + 1) - flux.y(i, j));
        }
        // explicit reaction with factor (1 + dt G) > 0
        const auto& G = growth[s];
        if (G.g0 != 0.0 || G.name != "zero") {
            for (std::size_t k = 0; k < rho.size(); ++k)
                rho.v[k] *= 1.0 + dt * G.value(state.pressure.v[k]);
        }
        next.species.push_back(std::move(rho));
    }
    detail::refresh_derived(next, law);
    return next;
}

/// Stored trajectory: snapshots at every accepted step (t, species, p, w).
struct Trajectory {
    std::vector<SolverState> snapshots;
    PressureLaw law;
    GrowthRates growth;

    const SolverState& front() const { return snapshots.front(); }
    const SolverState& back() const { return snapshots.back(); }
    std::size_t steps() const { return snapshots.empty() ? 0 : snapshots.size() - 1; }

    /// Snapshot at the step time nearest to t (observers use nearest-step
    /// sampling, no interpolation).
    const SolverState& nearest(double t) const {
        std::size_t best = 0;
        double err = kInf;
        for (std::size_t k = 0; k < snapshots.size(); ++k) {
            double e = std::fabs(snapshots[k].t - t);
            if (e < err) {
                err = e;
                best = k;
            }
        }
        return snapshots[best];
    }
};

using StepObserver = std::function<void(const SolverState&)>;

/// Integrate to the horizon T. keep_all stores every step (as needed by the
/// time-integrated identity diagnostics); otherwise only the first and last
/// snapshot plus any observer_times (nearest step) are kept.
inline Trajectory run(const InitialData& initial, const PressureLaw& law,
                      const GrowthRates& growth, double T,
                      const StepControls& controls, bool keep_all = true,
                      const std::vector<double>& observer_times = {},
                      const StepObserver& on_step = nullptr) {
    WellPreparedReport wp = validate_well_prepared(initial, law);
    if (!wp.pass) {
        std::string msg = "run: initial data not well-prepared:";
        for (const auto& f : wp.failures) msg += " " + f + ";";
        throw Error(msg);
    }
    Trajectory traj;
    traj.law = law;
    traj.growth = growth;
    SolverState st = make_state(initial, law);
    traj.snapshots.push_back(st);
    if (on_step) on_step(st);
    std::size_t next_obs = 0;
    while (st.t < T * (1.0 - 1e-12)) {
        SolverState nxt = step(st, law, growth, controls, T - st.t);
        st = std::move(nxt);
        if (on_step) on_step(st);
        bool want = keep_all || st.t >= T * (1.0 - 1e-12);
        while (!want && next_obs < observer_times.size() &&
               st.t >= observer_times[next_obs]) {
            want = true;
            ++next_obs;
        }
        if (want) traj.snapshots.push_back(st);
    }
    return traj;
}

inline GrowthRates uniform_growth(const GrowthLaw& g, std::size_t species = 1) {
    return GrowthRates(species, g);
}

}  // namespace brinkman
