// Command-line front end: run | diagnose | convergence | validate-config.
// Exit codes: 0 success, 1 an enabled check failed, 2 usage/config error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "brinkman/svg.hpp"
#include "brinkman/sweeps.hpp"

namespace fs = std::filesystem;
using namespace brinkman;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    bool check = true;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_out) {
    cmd->add_option("--config", args.config_path, "config file path")->required();
    auto* out = cmd->add_option("--out", args.out_dir, "output directory");
    if (needs_out) out->required();
    cmd->add_option("--jobs", args.jobs, "worker count for sweeps")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--check,!--no-check", args.check,
                  "fail (exit 1) when an enabled diagnostic check fails");
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << body;
}

std::string bound_monitor_csv(const BoundMonitorReport& r) {
    std::ostringstream os;
    os << "quantity,value,limit,ok\n"
       << "max_pressure," << r.max_pressure << ',' << r.B_p << ',' << r.pressure_ok << '\n'
       << "max_density," << r.max_density << ',' << r.density_cap << ',' << r.density_ok
       << '\n'
       << "mass_ratio," << r.worst_mass_ratio << ",1," << r.mass_ok << '\n';
    return os.str();
}

int cmd_run(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args.config_path);
    std::string out = args.out_dir.empty() ? cfg.output_dir : args.out_dir;
    Trajectory traj = run_scenario(cfg);
    write_trajectory(traj, out);

    InitialData initial =
        make_initial(cfg.initial, make_grid(cfg.grid), make_law(cfg.law, cfg.growth));
    BoundMonitorReport bm = bound_monitor(traj, initial.bound_B);
    write_text(out + "/bound_monitor.csv", bound_monitor_csv(bm));
    std::cout << "wrote " << traj.snapshots.size() << " snapshots to " << out << "\n";
    if (args.check && !bm.pass) {
        std::cout << "bound_monitor: FAIL\n";
        return 1;
    }
    return 0;
}

int cmd_diagnose(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args.config_path);
    std::string out = args.out_dir.empty() ? cfg.output_dir : args.out_dir;
    fs::create_directories(out);

    // deterministic re-run from the config; diagnostics need every step
    ExperimentConfig run_cfg = cfg;
    run_cfg.run.keep_all = true;
    Trajectory traj = run_scenario(run_cfg);
    SpaceTimeTest psi = default_test_function(cfg);
    TimeWeight eta;  // eta == 1: the plain dissipation balance

    bool all_pass = true;
    auto record = [&](const std::string& name, bool pass, const std::string& detail) {
        std::cout << name << ": " << (pass ? "pass" : "FAIL") << " (" << detail << ")\n";
        if (!pass) all_pass = false;
    };

    for (const std::string& d : cfg.diagnostics.enabled) {
        if (d == "bound_monitor") {
            InitialData initial = make_initial(cfg.initial, make_grid(cfg.grid),
                                               make_law(cfg.law, cfg.growth));
            BoundMonitorReport bm = bound_monitor(traj, initial.bound_B);
            write_text(out + "/bound_monitor.csv", bound_monitor_csv(bm));
            record(d, bm.pass,
                   "max p=" + std::to_string(bm.max_pressure) + " cap=" +
                       std::to_string(bm.B_p));
        } else if (d == "internal_energy" || d == "h1_energy" || d == "entropy" ||
                   d == "power_entropy") {
            DissipationReport rep;
            if (d == "internal_energy") rep = internal_energy_report(traj, eta);
            else if (d == "h1_energy") rep = h1_energy_report(traj, eta);
            else if (d == "entropy") rep = entropy_report(traj);
            else rep = power_entropy_report(traj, cfg.diagnostics.power_m);
            std::ostringstream os;
            rep.write_csv(os);
            write_text(out + "/" + d + ".csv", os.str());
            bool pass = std::fabs(rep.normalized_residual) <= 0.1 &&
                        rep.min_diffusive >= -1e-12 && rep.min_frictional >= -1e-12;
            record(d, pass, rep.summary());
        } else if (d == "derivative_budget") {
            DerivativeBudget b = derivative_budget(traj, psi);
            std::ostringstream os;
            os << "quantity,value\nlhs," << b.lhs << "\ngrad_part," << b.grad_part
               << "\nlap_part," << b.lap_part << "\nn_psi," << b.n_psi
               << "\nstate_bound," << b.state_bound << "\nbound," << b.bound << '\n';
            write_text(out + "/derivative_budget.csv", os.str());
            record(d, b.pass,
                   "lhs=" + std::to_string(b.lhs) + " bound=" + std::to_string(b.bound));
        } else if (d == "complementarity") {
            ComplementarityReport r = complementarity_residual(
                traj, cfg.diagnostics.V_p, cfg.diagnostics.margin);
            std::ostringstream os;
            os << "quantity,value\nl1_residual," << r.l1_residual << "\nlinf_residual,"
               << r.linf_residual << "\nactive_volume," << r.active_volume
               << "\ninequality_violation," << r.inequality_violation << "\nadvisory,"
               << r.advisory << '\n';
            write_text(out + "/complementarity.csv", os.str());
            // informational: the residual vanishes only in the stiff limit
            record(d, true, "L1=" + std::to_string(r.l1_residual));
        } else if (d == "singular_mass") {
            double B = max_value(traj.front().pressure);
            std::vector<std::pair<double, double>> A = {{0.25 * B, 0.45 * B}};
            double mass = singular_mass(traj, A);
            std::ostringstream os;
            os << "quantity,value\nmass," << mass << "\ninterval_measure,"
               << interval_measure(A) << '\n';
            write_text(out + "/singular_mass.csv", os.str());
            record(d, true, "mass=" + std::to_string(mass));
        } else if (d == "flux_swap") {
            FluxSwapReport r = flux_swap_error(traj, psi);
            std::ostringstream os;
            os << "quantity,value\nerror," << r.error << "\nI1," << r.I1 << "\nI2,"
               << r.I2 << "\ndelta," << r.delta << '\n';
            write_text(out + "/flux_swap.csv", os.str());
            record(d, true, "error=" + std::to_string(r.error));
        } else if (d == "velocity_gap") {
            ExperimentConfig ref_cfg = cfg;
            ref_cfg.law.nu = 0.0;
            ref_cfg.run.keep_all = false;
            ref_cfg.run.observer_times.clear();
            for (int k = 1; k <= 32; ++k)
                ref_cfg.run.observer_times.push_back(cfg.run.T * k / 32.0);
            Trajectory ref = run_scenario(ref_cfg);
            VelocityGapReport r = velocity_gap(traj, ref, cfg.diagnostics.t0);
            std::ostringstream os;
            os << "quantity,value\nvelocity_gap," << r.velocity_gap << "\nkinetic_gap,"
               << r.kinetic_gap << "\npressure_gap," << r.pressure_gap << '\n';
            write_text(out + "/velocity_gap.csv", os.str());
            record(d, true, "gap=" + std::to_string(r.velocity_gap));
        } else {
            throw Error("unknown diagnostic '" + d + "'");
        }
    }
    return (args.check && !all_pass) ? 1 : 0;
}

int cmd_convergence(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args.config_path);
    std::string out = args.out_dir.empty() ? cfg.output_dir : args.out_dir;
    fs::create_directories(out);

    ConvergenceResult res = run_convergence(cfg, args.jobs);
    {
        std::ofstream csv(out + "/rates_" + res.table.arm + ".csv");
        res.table.write_csv(csv);
    }
    auto column = [](const std::string& name) {
        if (name == "velocity_gap")
            return std::function<double(const SweepPoint&)>(
                [](const SweepPoint& p) { return p.velocity_gap; });
        if (name == "flux_swap")
            return std::function<double(const SweepPoint&)>(
                [](const SweepPoint& p) { return p.flux_swap; });
        return std::function<double(const SweepPoint&)>(
            [](const SweepPoint& p) { return p.pressure_gap; });
    };
    std::ostringstream fits;
    fits << "column,slope,stderr,valid,flag\n";
    for (const std::string name : {"velocity_gap", "flux_swap", "pressure_gap"}) {
        RateFit fit = res.table.fit(column(name));
        fits << name << ',' << fit.slope << ',' << fit.stderr_slope << ','
             << fit.valid << ',' << fit.flag << '\n';
        if (!fit.valid)
            std::cout << name << ": no fit (" << fit.flag << "), raw table emitted\n";
        else
            std::cout << name << ": slope " << fit.slope << " +- " << fit.stderr_slope
                      << "\n";
        PlotSeries series;
        series.name = name;
        for (const auto& p : res.table.points) {
            series.x.push_back(p.param);
            series.y.push_back(column(name)(p));
        }
        std::ofstream svg(out + "/" + name + "_" + res.table.arm + ".svg");
        PlotOptions opt;
        opt.title = name + " (" + res.table.arm + " sweep)";
        opt.x_label = res.table.arm == "gamma" ? "1/gamma" : "nu";
        opt.y_label = name;
        // the flux-swap bound is ~ nu^{1/6}; drawn as reference on every plot
        write_rate_plot(svg, series, 1.0 / 6.0, opt);
    }
    write_text(out + "/fits_" + res.table.arm + ".csv", fits.str());
    if (res.diagram_l1 >= 0.0) {
        write_text(out + "/diagram_commutation.csv",
                   "quantity,value\nrelative_l1," + std::to_string(res.diagram_l1) + "\n");
        std::cout << "diagram commutation: relative L1 " << res.diagram_l1 << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"congestion-averse growth PDE solver and diagnostics"};
    app.require_subcommand(1);

    CommonArgs run_args, diag_args, conv_args, val_args;
    CLI::App* run_cmd = app.add_subcommand("run", "integrate a scenario to disk");
    add_common(run_cmd, run_args, true);
    CLI::App* diag_cmd =
        app.add_subcommand("diagnose", "re-run a scenario and evaluate identity checks");
    add_common(diag_cmd, diag_args, true);
    CLI::App* conv_cmd =
        app.add_subcommand("convergence", "run a sweep arm and fit rates");
    add_common(conv_cmd, conv_args, true);
    CLI::App* val_cmd = app.add_subcommand("validate-config", "parse and validate only");
    add_common(val_cmd, val_args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_args);
        if (diag_cmd->parsed()) return cmd_diagnose(diag_args);
        if (conv_cmd->parsed()) return cmd_convergence(conv_args);
        if (val_cmd->parsed()) {
            load_config(val_args.config_path);
            std::cout << "config ok\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
