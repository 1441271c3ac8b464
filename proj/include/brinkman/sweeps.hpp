#pragma once

// Convergence arms (nu -> 0 at fixed gamma, gamma -> infinity at fixed nu,
// and the joint diagonal gamma = 1/nu), slope fitting in log-log
// coordinates, and the diagram-commutation check comparing the joint path
// against the sequential stiff-law proxy.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "brinkman/scenarios.hpp"

namespace brinkman {

struct SweepPoint {
    double param = 0.0;          // nu (or 1/gamma on the gamma arm)
    double velocity_gap = 0.0;   // L2 grad-w vs grad-p_ref gap
    double kinetic_gap = 0.0;    // grad f*(w) vs grad f*(p_ref)
    double pressure_gap = 0.0;   // L2 pressure gap
    double flux_swap = 0.0;      // density/flux swap integral
    double flux_swap_I1 = 0.0;
    double flux_swap_I2 = 0.0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;    // log-log intercept
    double stderr_slope = 0.0; // 1-sigma band on the slope
    bool valid = false;
    std::string flag;          // reason when invalid ("degenerate", "too few points")
};

struct RateTable {
    std::string arm;
    std::vector<SweepPoint> points;

    /// Least-squares slope of log(value) against log(param); needs >= 3
    /// strictly positive samples, otherwise flags instead of fitting.
    RateFit fit(const std::function<double(const SweepPoint&)>& column) const {
        RateFit out;
        std::vector<double> xs, ys;
        for (const auto& p : points) {
            double v = column(p);
            if (p.param > 0.0 && v > 0.0) {
                xs.push_back(std::log(p.param));
                ys.push_back(std::log(v));
            }
        }
        if (xs.size() < 3) {
            out.flag = "too few points";
            return out;
        }
        double n = static_cast<double>(xs.size());
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sx += xs[k];
            sy += ys[k];
            sxx += xs[k] * xs[k];
            sxy += xs[k] * ys[k];
        }
        double denom = n * sxx - sx * sx;
        if (std::fabs(denom) < 1e-12) {
            out.flag = "degenerate";
            return out;
        }
        out.slope = (n * sxy - sx * sy) / denom;
        out.intercept = (sy - out.slope * sx) / n;
        double ss = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            double r = ys[k] - (out.intercept + out.slope * xs[k]);
            ss += r * r;
        }
        if (xs.size() > 2)
            out.stderr_slope = std::sqrt(ss / (n - 2.0) / (sxx - sx * sx / n));
        out.valid = true;
        return out;
    }

    void write_csv(std::ostream& os) const {
        os << "param,velocity_gap,kinetic_gap,pressure_gap,flux_swap,flux_swap_I1,"
              "flux_swap_I2\n";
        for (const auto& p : points)
            os << p.param << ',' << p.velocity_gap << ',' << p.kinetic_gap << ','
               << p.pressure_gap << ',' << p.flux_swap << ',' << p.flux_swap_I1 << ','
               << p.flux_swap_I2 << '\n';
    }
};

struct ConvergenceResult {
    RateTable table;
    double diagram_l1 = -1.0;  // relative L1 gap of the commutation check (joint arm)
    std::vector<DerivativeBudget> budgets;
};

namespace detail {

inline std::vector<double> sample_times(double T, int count = 32) {
    std::vector<double> out;
    for (int k = 1; k <= count; ++k) out.push_back(T * k / count);
    return out;
}

/// Index-parallel loop over sweep members; results land in pre-sized slots
/// keyed by index, so aggregation order never depends on scheduling.
inline void parallel_members(std::size_t count, int jobs,
                             const std::function<void(std::size_t)>& work) {
    int workers = std::max(1, jobs);
    if (workers == 1 || count <= 1) {
        for (std::size_t k = 0; k < count; ++k) work(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t k = next.fetch_add(1);
                if (k >= count) return;
                try {
                    work(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

/// Runs one sweep member against a reference trajectory and fills a point.
inline SweepPoint evaluate_member(const Trajectory& traj, const Trajectory& ref,
                                  const SpaceTimeTest& psi, double param, double t0) {
    SweepPoint pt;
    pt.param = param;
    VelocityGapReport gap = velocity_gap(traj, ref, t0);
    pt.velocity_gap = gap.velocity_gap;
    pt.kinetic_gap = gap.kinetic_gap;
    pt.pressure_gap = gap.pressure_gap;
    FluxSwapReport fs = flux_swap_error(traj, psi);
    pt.flux_swap = fs.error;
    pt.flux_swap_I1 = fs.I1;
    pt.flux_swap_I2 = fs.I2;
    return pt;
}

/// nu -> 0 arm: fixed gamma, Brinkman runs at each nu against the nu = 0
/// divergence-form Darcy reference on the same grid and datum.
inline ConvergenceResult sweep_nu(const ExperimentConfig& cfg, int jobs = 1) {
    if (cfg.sweep.nu.size() < 1) throw Error("sweep_nu: sweep.nu list is empty");
    ConvergenceResult res;
    res.table.arm = "nu";

    ExperimentConfig ref_cfg = cfg;
    ref_cfg.law.nu = 0.0;
    ref_cfg.run.keep_all = false;
    ref_cfg.run.observer_times = detail::sample_times(cfg.run.T);
    Trajectory ref = run_scenario(ref_cfg);

    SpaceTimeTest psi = default_test_function(cfg);
    std::vector<double> nus = cfg.sweep.nu;
    std::sort(nus.rbegin(), nus.rend());
    res.table.points.resize(nus.size());
    res.budgets.resize(nus.size());
    detail::parallel_members(nus.size(), jobs, [&](std::size_t k) {
        ExperimentConfig member = cfg;
        member.law.nu = nus[k];
        member.run.keep_all = false;  // bounded memory; 32-snapshot quadrature
        member.run.observer_times = detail::sample_times(cfg.run.T);
        Trajectory traj = run_scenario(member);
        res.table.points[k] = evaluate_member(traj, ref, psi, nus[k], cfg.diagnostics.t0);
        res.budgets[k] = derivative_budget(traj, psi);
    });
    return res;
}

/// gamma -> infinity arm: fixed nu, runs against the stiff-proxy Darcy
/// reference (gamma = sweep.proxy_gamma, nu = 0). Points keyed by 1/gamma.
inline ConvergenceResult sweep_gamma(const ExperimentConfig& cfg, int jobs = 1) {
    if (cfg.sweep.gamma.size() < 1) throw Error("sweep_gamma: sweep.gamma list is empty");
    ConvergenceResult res;
    res.table.arm = "gamma";

    ExperimentConfig ref_cfg = cfg;
    ref_cfg.law.nu = 0.0;
    ref_cfg.law.gamma = cfg.sweep.proxy_gamma;
    ref_cfg.run.keep_all = false;
    ref_cfg.run.observer_times = detail::sample_times(cfg.run.T);
    Trajectory ref = run_scenario(ref_cfg);

    SpaceTimeTest psi = default_test_function(cfg);
    std::vector<double> gammas = cfg.sweep.gamma;
    std::sort(gammas.begin(), gammas.end());
    res.table.points.resize(gammas.size());
    detail::parallel_members(gammas.size(), jobs, [&](std::size_t k) {
        ExperimentConfig member = cfg;
        member.law.gamma = gammas[k];
        member.run.keep_all = false;
        member.run.observer_times = detail::sample_times(cfg.run.T);
        Trajectory traj = run_scenario(member);
        res.table.points[k] =
            evaluate_member(traj, ref, psi, 1.0 / gammas[k], cfg.diagnostics.t0);
    });
    return res;
}

/// Joint diagonal gamma = 1/nu, against the same stiff-proxy reference, plus
/// the diagram-commutation check: the joint path's final density at the
/// smallest nu vs the sequential endpoint (stiff law first, then nu = 0),
/// reported as a relative L1 gap.
inline ConvergenceResult sweep_joint(const ExperimentConfig& cfg, int jobs = 1) {
    if (cfg.sweep.nu.size() < 1) throw Error("sweep_joint: sweep.nu list is empty");
    ConvergenceResult res;
    res.table.arm = "joint";

    ExperimentConfig ref_cfg = cfg;
    ref_cfg.law.nu = 0.0;
    ref_cfg.law.gamma = cfg.sweep.proxy_gamma;
    ref_cfg.run.keep_all = false;
    ref_cfg.run.observer_times = detail::sample_times(cfg.run.T);
    Trajectory ref = run_scenario(ref_cfg);

    SpaceTimeTest psi = default_test_function(cfg);
    std::vector<double> nus = cfg.sweep.nu;
    std::sort(nus.rbegin(), nus.rend());
    res.table.points.resize(nus.size());
    ScalarField joint_final;  // final density of the smallest-nu member
    detail::parallel_members(nus.size(), jobs, [&](std::size_t k) {
        ExperimentConfig member = cfg;
        member.law.nu = nus[k];
        member.law.gamma = 1.0 / nus[k];
        member.run.keep_all = false;
        member.run.observer_times = detail::sample_times(cfg.run.T);
        Trajectory traj = run_scenario(member);
        res.table.points[k] = evaluate_member(traj, ref, psi, nus[k], cfg.diagnostics.t0);
        if (k + 1 == nus.size()) joint_final = traj.back().total;
    });
    const ScalarField& seq_final = ref.back().total;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < seq_final.size(); ++k) {
        num += std::fabs(joint_final.v[k] - seq_final.v[k]);
        den += std::fabs(seq_final.v[k]);
    }
    res.diagram_l1 = den > 0.0 ? num / den : 0.0;
    return res;
}

inline ConvergenceResult run_convergence(const ExperimentConfig& cfg, int jobs = 1) {
    if (cfg.sweep.arm == "nu") return sweep_nu(cfg, jobs);
    if (cfg.sweep.arm == "gamma") return sweep_gamma(cfg, jobs);
    if (cfg.sweep.arm == "joint") return sweep_joint(cfg, jobs);
    throw Error("unknown sweep arm '" + cfg.sweep.arm + "'");
}

}  // namespace brinkman
