#pragma once

// Explicit integrator for the nu = 0 limit equation (porous-medium type
// with growth), in divergence form rho_t = Lap Phi(rho) + rho G(p) with the
// flux potential Phi(rho) = f*(f'(rho)). An upwind cross-check mode uses
// the donor-cell transport of the Brinkman stepper with velocity -grad p.

#include <cmath>
#include <utility>
#include <vector>

#include "brinkman/stepper.hpp"

namespace brinkman {

/// Flux potential with grad Phi(rho) = rho grad p.
struct DarcyFlux {
    ConvexScalarFunction phi;                    // Phi(a) = f*(f'(a))
    std::function<double(double)> value;         // closed form
    std::function<double(double)> derivative;    // Phi'(a) = a f''(a) ... = rho p'(rho)
};

inline DarcyFlux flux_potential(const PressureLaw& law) {
    if (!law.single_valued_pressure)
        throw Error("flux_potential: incompressible law rejected; use the "
                    "large-gamma proxy");
    DarcyFlux flux;
    if (law.family == LawFamily::power) {
        const double g = law.gamma;
        // Phi(rho) = g/(g+1) rho^{g+1}
        flux.value = [g](double a) { return a <= 0.0 ? 0.0 : (g / (g + 1.0)) * std::pow(a, g + 1.0); };
        flux.derivative = [g](double a) { return a <= 0.0 ? 0.0 : g * std::pow(a, g); };
    } else {
        const PressureLaw l = law;
        flux.value = [l](double a) {
            return a <= 0.0 ? 0.0 : conjugate_value(l.energy, l.pressure(a));
        };
        flux.derivative = [l](double a) {
            // Phi'(a) = a p'(a) = a f''(a)
            return a <= 0.0 ? 0.0 : a * l.energy.curvature(a);
        };
    }
    auto val = flux.value;
    auto der = flux.derivative;
    flux.phi = ConvexScalarFunction::closed_form(
        0.0, law.energy.domain_hi(), [val](double a) { return val(a); },
        [der](double a) { return Interval::point(der(a)); });
    return flux;
}

enum class DarcyMode { divergence_form, upwind };

/// One explicit Darcy step in divergence form:
///   rho <- rho + dt (Lap_h Phi(rho) + rho G(p)),
/// with the parabolic stability bound dt <= cfl h^2 / (2 d max Phi'(rho)).
inline SolverState step_darcy(const SolverState& state, const PressureLaw& law,
                              const DarcyFlux& flux, const GrowthRates& growth,
                              const StepControls& controls, double dt_cap = 0.0) {
    controls.validate();
    const Grid& g = state.total.grid;
    const double h = g.h();

    double dmax = 0.0;
    for (double rho : state.total.v) dmax = std::max(dmax, flux.derivative(rho));
    double dt = controls.max_dt;
    if (dmax > 0.0) dt = std::min(dt, controls.cfl_fraction * h * h / (2.0 * g.dim * dmax));
    double gmax = 0.0;
    for (const auto& G : growth)
        for (double p : state.pressure.v) gmax = std::max(gmax, std::fabs(G.value(p)));
    if (gmax > 0.0) dt = std::min(dt, controls.reaction_fraction / gmax);
    if (dt_cap > 0.0) dt = std::min(dt, dt_cap);
    if (!(dt > 0.0))
        throw Error("step_darcy: dt underflow; Phi' = " + std::to_string(dmax) +
                    " suggests a finer gamma/grid pairing");

    if (boundary_contamination(state.total) > 1e-10)
        throw Error("step_darcy: density reached the domain boundary; domain too small");

    // per-species update sharing the total-density diffusion: species move
    // proportionally to their share of the total (exact for one species).
    ScalarField phi = state.total.map(flux.value);
    ScalarField lap_phi = laplacian(phi);

    SolverState next;
    next.t = state.t + dt;
    next.species.reserve(state.species.size());
    for (std::size_t s = 0; s < state.species.size(); ++s) {
        ScalarField rho = state.species[s];
        if (state.species.size() == 1) {
            for (std::size_t k = 0; k < rho.size(); ++k)
                rho.v[k] += dt * lap_phi.v[k];
        } else {
            // share of the diffusive update, donor-weighted by fraction
            for (std::size_t k = 0; k < rho.size(); ++k) {
                double tot = state.total.v[k];
                double w = tot > 0.0 ? rho.v[k] / tot : 1.0 / state.species.size();
                rho.v[k] += dt * lap_phi.v[k] * w;
            }
        }
        const auto& G = growth[s];
        for (std::size_t k = 0; k < rho.size(); ++k)
            rho.v[k] *= 1.0 + dt * G.value(state.pressure.v[k]);
        next.species.push_back(std::move(rho));
    }
    detail::refresh_derived(next, law);  // nu = 0 in Darcy laws gives w = p
    return next;
}

/// Integrate the Darcy equation to the horizon T. The divergence form is
/// the default; DarcyMode::upwind runs the donor-cell transport along
/// -grad p instead (matching the Brinkman discretization at nu = 0).
inline Trajectory run_darcy(const InitialData& initial, const PressureLaw& law,
                            const GrowthRates& growth, double T,
                            const StepControls& controls,
                            DarcyMode mode = DarcyMode::divergence_form,
                            bool keep_all = true,
                            const std::vector<double>& observer_times = {}) {
    if (law.nu != 0.0)
        throw Error("run_darcy: law must carry nu = 0");
    if (mode == DarcyMode::upwind)
        return run(initial, law, growth, T, controls, keep_all, observer_times);

    WellPreparedReport wp = validate_well_prepared(initial, law);
    if (!wp.pass) {
        std::string msg = "run_darcy: initial data not well-prepared:";
        for (const auto& f : wp.failures) msg += " " + f + ";";
        throw Error(msg);
    }
    DarcyFlux flux = flux_potential(law);
    Trajectory traj;
    traj.law = law;
    traj.growth = growth;
    SolverState st = make_state(initial, law);
    traj.snapshots.push_back(st);
    std::size_t next_obs = 0;
    while (st.t < T * (1.0 - 1e-12)) {
        st = step_darcy(st, law, flux, growth, controls, T - st.t);
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

}  // namespace brinkman
