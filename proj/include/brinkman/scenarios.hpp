#pragma once

// Named initial shapes, config -> solver-object translation, default test
// functions and trajectory disk IO (per-snapshot CSV plus a manifest).

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "brinkman/config.hpp"
#include "brinkman/darcy.hpp"
#include "brinkman/diagnostics.hpp"
#include "brinkman/stepper.hpp"

namespace brinkman {

inline Grid make_grid(const GridSpec& spec) {
    Boundary b = spec.boundary == "periodic" ? Boundary::periodic : Boundary::neumann;
    return Grid(spec.dim, spec.n, spec.length, b);
}

inline PressureLaw make_law(const LawSpec& spec, const GrowthSpec& growth) {
    GrowthLaw G = linear_growth(growth.p_H, growth.g0);
    if (spec.family == "power") return power_law(spec.gamma, spec.nu, G);
    if (spec.family == "pme") {
        // porous-medium convention p = rho^{gamma-1}; needs gamma > 1
        if (!(spec.gamma > 1.0)) throw Error("pme law needs gamma > 1");
        return power_law(spec.gamma - 1.0, spec.nu, G);
    }
    if (spec.family == "log") return log_law(spec.gamma, spec.nu, G);
    if (spec.family == "incompressible") {
        PressureLaw law = incompressible_law(G);
        law.nu = spec.nu;
        return law;
    }
    throw Error("unknown law family '" + spec.family + "'");
}

namespace detail {

/// Smooth compactly supported bump: amp * exp(1 - 1/(1 - r^2)) inside |r|<1.
inline double mollifier(double r) {
    double r2 = r * r;
    if (r2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r2));
}

/// C^1 plateau: 1 on the core, smoothstep falloff across the rim.
inline double plateau(double r) {
    double a = std::fabs(r);
    if (a <= 0.6) return 1.0;
    if (a >= 1.0) return 0.0;
    double s = (1.0 - a) / 0.4;
    return s * s * (3.0 - 2.0 * s);
}

inline ScalarField shape_field(const Grid& g, double cx, double cy, double radius,
                               double amplitude, double (*profile)(double)) {
    ScalarField out(g);
    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i)
            out.at(i) = amplitude * profile((g.x(i) - cx) / radius);
        return out;
    }
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            double r = std::hypot(g.x(i) - cx, g.x(j) - cy);
            out.at(i, j) = amplitude * profile(r / radius);
        }
    return out;
}

}  // namespace detail

inline InitialData make_initial(const InitialSpec& spec, const Grid& g,
                                const PressureLaw& law) {
    const double L = g.length;
    const double cx = spec.center * L;
    const double cy = 0.5 * L;
    const double radius = spec.width * L;
    const double amp = spec.amplitude;

    InitialData data;
    if (spec.shape == "bump") {
        data.density_per_species = {detail::shape_field(g, cx, cy, radius, amp,
                                                        detail::mollifier)};
    } else if (spec.shape == "two_bumps") {
        ScalarField a = detail::shape_field(g, cx - 1.2 * radius, cy, radius, amp,
                                            detail::mollifier);
        ScalarField b = detail::shape_field(g, cx + 1.2 * radius, cy, radius, amp,
                                            detail::mollifier);
        for (std::size_t k = 0; k < a.size(); ++k) a.v[k] += b.v[k];
        data.density_per_species = {std::move(a)};
    } else if (spec.shape == "plateau") {
        data.density_per_species = {detail::shape_field(g, cx, cy, radius, amp,
                                                        detail::plateau)};
    } else if (spec.shape == "two_species") {
        data.density_per_species = {
            detail::shape_field(g, cx - 1.2 * radius, cy, radius, amp, detail::mollifier),
            detail::shape_field(g, cx + 1.2 * radius, cy, radius, amp, detail::mollifier)};
    } else if (spec.shape == "barenblatt") {
        // exact profile for rho_t = Lap(rho^2)/2 at unit time offset (gamma=1)
        double t0 = 1.0;
        double tau = t0 / 2.0;
        double C = amp;
        ScalarField rho(g);
        for (int i = 0; i < g.n; ++i) {
            double x = g.x(i) - cx;
            double val = std::pow(tau, -1.0 / 3.0) *
                         std::max(C - x * x * std::pow(tau, -2.0 / 3.0) / 12.0, 0.0);
            if (g.dim == 1) rho.at(i) = val;
        }
        if (g.dim == 2) throw Error("barenblatt shape is 1D only");
        data.density_per_species = {std::move(rho)};
    } else {
        throw Error("unknown initial shape '" + spec.shape + "'");
    }

    // bound_B: pressure level dominating the datum unless supplied
    ScalarField total = data.total();
    double rho_max = max_value(total);
    if (spec.bound_B > 0.0) {
        data.bound_B = spec.bound_B;
    } else if (law.single_valued_pressure && rho_max > 0.0 &&
               rho_max < law.energy.domain_hi()) {
        data.bound_B = law.pressure(rho_max) * 1.0000001;
    } else {
        data.bound_B = 1.0;  // incompressible: datum must satisfy rho <= 1
    }
    return data;
}

inline GrowthRates make_growth(const ExperimentConfig& cfg, std::size_t species) {
    return uniform_growth(linear_growth(cfg.growth.p_H, cfg.growth.g0), species);
}

inline StepControls make_controls(const RunSpec& spec) {
    StepControls c;
    c.cfl_fraction = spec.cfl;
    c.max_dt = spec.max_dt;
    c.reaction_fraction = spec.reaction_fraction;
    return c;
}

/// Run the configured scenario (Brinkman when nu > 0, divergence-form Darcy
/// when nu = 0 unless the shape needs transport).
inline Trajectory run_scenario(const ExperimentConfig& cfg) {
    Grid g = make_grid(cfg.grid);
    PressureLaw law = make_law(cfg.law, cfg.growth);
    InitialData initial = make_initial(cfg.initial, g, law);
    GrowthRates growth = make_growth(cfg, initial.density_per_species.size());
    StepControls controls = make_controls(cfg.run);
    if (law.nu == 0.0)
        return run_darcy(initial, law, growth, cfg.run.T, controls,
                         DarcyMode::divergence_form, cfg.run.keep_all,
                         cfg.run.observer_times);
    return run(initial, law, growth, cfg.run.T, controls, cfg.run.keep_all,
               cfg.run.observer_times);
}

// --- default test functions ---------------------------------------------------

/// eta(t): smooth plateau on [0, T], equal to 1 on the core of the interval.
inline TimeWeight plateau_weight(double T) {
    double ramp = 0.2 * T;
    auto s = [ramp, T](double t) {
        if (t <= 0.0 || t >= T) return 0.0;
        double a = std::min(t, T - t);
        if (a >= ramp) return 1.0;
        double u = a / ramp;
        return u * u * (3.0 - 2.0 * u);
    };
    auto sp = [ramp, T](double t) {
        if (t <= 0.0 || t >= T) return 0.0;
        double a = std::min(t, T - t);
        if (a >= ramp) return 0.0;
        double u = a / ramp;
        double d = 6.0 * u * (1.0 - u) / ramp;
        return t < T - t ? d : -d;
    };
    return TimeWeight{s, sp};
}

/// psi(t, x) = eta(t) phi(x): eta a plateau on [0,T], phi a wide mollifier
/// bump covering the initial support dilated by the expected spread.
inline SpaceTimeTest default_test_function(const ExperimentConfig& cfg) {
    const double L = cfg.grid.length;
    const double cx = cfg.initial.center * L;
    const double cy = 0.5 * L;
    const double radius = std::min(0.45 * L, 3.0 * cfg.initial.width * L + 0.15 * L);
    TimeWeight eta = plateau_weight(cfg.run.T);
    const int dim = cfg.grid.dim;
    SpaceTimeTest psi;
    psi.value = [eta, cx, cy, radius, dim](double t, double x, double y) {
        double r = dim == 1 ? std::fabs(x - cx) : std::hypot(x - cx, y - cy);
        return eta.value(t) * detail::mollifier(r / radius);
    };
    return psi;
}

// --- trajectory disk IO ---------------------------------------------------------

/// Writes snapshot_k.csv files (x[,y],total,pressure,potential[,species_i])
/// plus manifest.csv (index, time, file). Deterministic and byte-stable.
inline void write_trajectory(const Trajectory& traj, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream manifest(dir + "/manifest.csv");
    if (!manifest) throw Error("cannot write manifest in '" + dir + "'");
    manifest << "index,time,file\n";
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const SolverState& st = traj.snapshots[k];
        std::ostringstream name;
        name << "snapshot_" << std::setw(6) << std::setfill('0') << k << ".csv";
        manifest << k << ',' << std::setprecision(17) << st.t << ',' << name.str() << '\n';
        std::ofstream out(dir + "/" + name.str());
        out << std::setprecision(17);
        const Grid& g = st.total.grid;
        out << (g.dim == 1 ? "x" : "x,y") << ",total,pressure,potential";
        for (std::size_t s = 0; s < st.species.size(); ++s) out << ",species_" << s;
        out << '\n';
        auto row = [&](std::size_t cell, double x, double y) {
            if (g.dim == 1) out << x;
            else out << x << ',' << y;
            out << ',' << st.total.v[cell] << ',' << st.pressure.v[cell] << ','
                << st.potential.v[cell];
            for (const auto& sp : st.species) out << ',' << sp.v[cell];
            out << '\n';
        };
        if (g.dim == 1) {
            for (int i = 0; i < g.n; ++i) row(static_cast<std::size_t>(i), g.x(i), 0.0);
        } else {
            for (int j = 0; j < g.n; ++j)
                for (int i = 0; i < g.n; ++i)
                    row(static_cast<std::size_t>(j) * g.n + i, g.x(i), g.x(j));
        }
    }
}

}  // namespace brinkman
