#include "cavity_bjj/run.hpp"

#include "cavity_bjj/dynamics.hpp"
#include "cavity_bjj/errors.hpp"
#include "cavity_bjj/fixed_points.hpp"
#include "cavity_bjj/io.hpp"
#include "cavity_bjj/portrait.hpp"
#include "cavity_bjj/quantum.hpp"
#include "cavity_bjj/reduced.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <ostream>

namespace cavity_bjj {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

Json to_json(const DimensionlessParams& p) {
    return Json{{"d_c", p.d_c}, {"w0", p.w0}, {"w12", p.w12}, {"u", p.u}, {"e", p.e}, {"n_atoms", p.n_atoms}};
}

Json to_json(const MeanFieldState& s) {
    return Json{{"z", s.z}, {"theta", s.theta}, {"xi", s.xi}, {"phi", s.phi}};
}

Json to_json(const StabilityReport& r) {
    Json eig = Json::array();
    for (const auto& l : r.eigenvalues) eig.push_back(Json::array({l.real(), l.imag()}));
    return Json{{"classification", to_string(r.classification)},
                {"pairs_balanced", r.pairs_balanced},
                {"eigenvalues", eig}};
}

Json to_json(const ode::Statistics& s) {
    return Json{{"accepted_steps", s.accepted},
                {"rejected_steps", s.rejected},
                {"rhs_evaluations", s.rhs_evaluations},
                {"min_step", s.min_step},
                {"max_step", s.max_step},
                {"error_estimate", s.error_estimate}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct Context {
    const RunConfig& config;
    const RunOverrides& overrides;
    fs::path out;
    std::ostream& log;
};

int cmd_params(const Context& ctx) {
    Json report;
    report["scenario"] = ctx.config.scenario;
    if (ctx.config.params) {
        report["source"] = "direct";
        report["dimensionless"] = to_json(*ctx.config.params);
        report["warnings"] = validate(*ctx.config.params);
    } else {
        const auto& d = *ctx.config.derived;
        const auto r = derive_parameters(d.well, d.cavity, d.g_gg, d.n_atoms, d.xi_sq_max, d.ratio_points);
        report["source"] = "derived";
        report["well"] = {{"form", d.well.form == WellForm::quartic ? "quartic" : "harmonic_gaussian"},
                          {"v0", d.well.v0},
                          {"a", d.well.a},
                          {"omega", d.well.omega},
                          {"barrier_height", d.well.barrier_height},
                          {"barrier_width", d.well.barrier_width},
                          {"half_width", d.well.half_width},
                          {"points", d.well.points}};
        report["cavity"] = {{"sigma", d.cavity.sigma}, {"k", d.cavity.k},     {"mirror_distance", d.cavity.mirror_distance},
                            {"l_h", d.cavity.l_h},     {"u0", d.cavity.u0},   {"eta", d.cavity.eta},
                            {"delta_c", d.cavity.delta_c}};
        report["energies"] = r.energies;
        report["delta_dw"] = r.basis.delta_dw;
        report["hubbard"] = {{"eps", r.hubbard.eps}, {"j", r.hubbard.j},     {"u", r.hubbard.u},
                             {"w0", r.hubbard.w0},   {"w12", r.hubbard.w12}, {"g_gg", r.hubbard.g_gg}};
        report["j_doublet"] = r.j_doublet;
        report["hopping_ratio"] = r.hubbard.j / (r.hubbard.eps - 1.0 / (d.cavity.l_h * d.cavity.l_h));
        report["barrier_width"] = r.barrier_width;
        report["dimensionless"] = to_json(r.dimensionless);
        report["validity"] = {{"xi_sq_max", r.xi_sq_max},
                              {"margin", r.validity.margin},
                              {"pass", r.validity.pass},
                              {"mean_f2", r.validity.mean_f2}};
        Json curve = Json::array();
        for (const auto& p : r.ratio_curve) {
            curve.push_back({{"sigma", p.sigma}, {"sigma_over_width", p.sigma_over_width}, {"ratio", p.ratio}});
        }
        report["ratio_curve"] = curve;
        report["warnings"] = r.warnings;
    }
    io::write_file_atomic(ctx.out / "params.json", dump(report));
    ctx.log << "wrote " << (ctx.out / "params.json").string() << "\n";
    return exit_ok;
}

int cmd_simulate(const Context& ctx, const DimensionlessParams& params) {
    const auto& sec = ctx.config.integration;
    IntegrationOptions options;
    options.tolerances = sec.tolerances;
    options.stride = ctx.overrides.stride.value_or(sec.stride);
    const double horizon = ctx.overrides.horizon.value_or(sec.horizon);
    const auto traj = integrate(params, ctx.config.initial, horizon, options);

    io::CsvTable table;
    table.header = {"tau", "z", "theta", "xi", "phi", "nu_eff", "delta_c_eff", "photon_number", "energy"};
    for (const auto& s : traj.samples()) {
        table.rows.push_back({s.tau, s.state.z, s.state.theta, s.state.xi, s.state.phi, s.derived.nu_eff,
                              s.derived.delta_c_eff, s.derived.photon_number, s.derived.energy});
    }
    io::write_csv(ctx.out / "trajectory.csv", table);

    const auto summary = trajectory_summary(traj);
    Json report{{"scenario", ctx.config.scenario},
                {"params", to_json(params)},
                {"initial", to_json(ctx.config.initial)},
                {"horizon", horizon},
                {"stride", options.stride},
                {"samples", traj.size()},
                {"z_min", summary.z_min},
                {"z_max", summary.z_max},
                {"zero_crossings", summary.zero_crossings},
                {"xi_max", summary.xi_max},
                {"energy_drift", summary.energy_drift},
                {"integrator", to_json(traj.statistics())}};
    io::write_file_atomic(ctx.out / "simulate_summary.json", dump(report));
    ctx.log << "wrote " << traj.size() << " samples to " << (ctx.out / "trajectory.csv").string() << "\n";
    return exit_ok;
}

int cmd_fixed_points(const Context& ctx, const DimensionlessParams& params) {
    const auto set = all_fixed_points(params);
    const auto checks = verify_fixed_points(params, set.points);
    Json points = Json::array();
    for (const auto& c : checks) {
        const auto& p = c.point;
        Json j{{"label", to_string(p.label)},
               {"state", to_json(p.state)},
               {"branch_theta", p.branch_theta},
               {"z_sign", p.z_sign},
               {"detuning_sign", p.detuning_sign},
               {"delta_c_eff", p.delta_c_eff},
               {"residual", p.residual},
               {"accepted", c.accepted},
               {"degenerate_photon", p.degenerate_photon},
               {"degenerate_root", p.degenerate_root},
               {"separatrix_distance", c.separatrix_distance},
               {"near_separatrix", c.near_separatrix}};
        j["stability"] = p.stability ? to_json(*p.stability) : Json(nullptr);
        points.push_back(j);
    }
    Json rejected = Json::array();
    for (const auto& r : set.rejected) rejected.push_back({{"label", r.label}, {"reason", r.reason}});
    Json report{{"scenario", ctx.config.scenario},
                {"params", to_json(params)},
                {"points", points},
                {"rejected", rejected},
                {"diagnostics", set.diagnostics}};
    if (params.w12 != 0.0) report["separatrix_ratio"] = (params.d_c - params.w0) / params.w12;
    io::write_file_atomic(ctx.out / "fixed_points.json", dump(report));
    ctx.log << "wrote " << checks.size() << " fixed points to " << (ctx.out / "fixed_points.json").string() << "\n";
    return exit_ok;
}

int cmd_portrait(const Context& ctx, const DimensionlessParams& params) {
    const auto& sec = ctx.config.portrait;
    PortraitSpec spec;
    spec.theta_points = sec.theta_points;
    spec.z_points = sec.z_points;
    spec.cap_threshold = sec.cap_threshold;
    spec.horizon = ctx.overrides.horizon.value_or(sec.horizon);
    spec.stride = ctx.overrides.stride.value_or(sec.stride);
    spec.default_seeds = sec.default_seeds;
    spec.seeds = sec.seeds;
    const auto grid = render_portrait(params, spec);

    io::write_file_atomic(ctx.out / "portrait.svg", portrait_svg(grid));
    io::CsvTable table;
    table.header = {"theta", "z", "photon_number", "delta_c_eff", "capped"};
    for (std::size_t j = 0; j < grid.z_axis.size(); ++j) {
        for (std::size_t i = 0; i < grid.theta_axis.size(); ++i) {
            const auto c = grid.cell(i, j);
            table.rows.push_back({grid.theta_axis[i], grid.z_axis[j], grid.photon_map[c], grid.detuning[c],
                                  static_cast<double>(grid.capped[c])});
        }
    }
    io::write_csv(ctx.out / "portrait_grid.csv", table);

    io::CsvTable traj;
    traj.header = {"seed", "theta", "z"};
    for (std::size_t k = 0; k < grid.trajectories.size(); ++k) {
        for (const auto& p : grid.trajectories[k].points) traj.rows.push_back({static_cast<double>(k), p[0], p[1]});
    }
    io::write_csv(ctx.out / "portrait_trajectories.csv", traj);
    ctx.log << "wrote " << (ctx.out / "portrait.svg").string() << "\n";
    return exit_ok;
}

int cmd_reduced(const Context& ctx, const DimensionlessParams& params) {
    const auto& sec = ctx.config.reduced;
    ReducedOptions options;
    options.tolerances = ctx.config.integration.tolerances;
    options.stride = ctx.overrides.stride.value_or(sec.stride);
    options.singularity_floor = sec.singularity_floor;
    const double horizon = ctx.overrides.horizon.value_or(sec.horizon);
    const auto& init = ctx.config.initial;
    const auto traj = integrate_reduced(params, init.z, init.theta, horizon, options);

    io::CsvTable table;
    table.header = {"tau", "z", "theta", "delta_c_eff", "photon_number", "energy"};
    for (const auto& s : traj.samples) {
        table.rows.push_back({s.tau, s.z, s.theta, s.delta_c_eff, s.photon_number, s.energy});
    }
    io::write_csv(ctx.out / "reduced.csv", table);

    Json report{{"scenario", ctx.config.scenario},
                {"params", to_json(params)},
                {"z0", init.z},
                {"theta0", init.theta},
                {"horizon", horizon},
                {"samples", traj.samples.size()},
                {"truncated", traj.truncated},
                {"diagnostic", traj.diagnostic},
                {"energy_drift", traj.energy_drift()},
                {"min_abs_detuning", traj.min_abs_detuning()}};
    if (sec.compare) {
        const auto start = adiabatic_initial_state(params, init.z, init.theta);
        const auto m = compare_full_vs_reduced(params, start, horizon, options);
        report["comparison"] = {{"max_dz", m.max_dz},
                                {"max_dtheta", m.max_dtheta},
                                {"min_abs_detuning", m.min_abs_detuning},
                                {"max_nu", m.max_nu},
                                {"compared_samples", m.compared_samples},
                                {"adiabatic_valid", m.adiabatic_valid},
                                {"diagnostic", m.diagnostic}};
    }
    io::write_file_atomic(ctx.out / "reduced_summary.json", dump(report));
    ctx.log << "wrote " << traj.samples.size() << " samples to " << (ctx.out / "reduced.csv").string() << "\n";
    return exit_ok;
}

int cmd_quantum(const Context& ctx, const DimensionlessParams& params) {
    const auto& sec = ctx.config.quantum;
    const auto& init = ctx.config.initial;
    EvolveOptions options;
    options.tolerance = sec.tolerance;
    const double horizon = ctx.overrides.horizon.value_or(sec.horizon);
    const double stride = ctx.overrides.stride.value_or(sec.stride);
    int cutoff = 0;
    if (sec.photon_cutoff) {
        cutoff = *sec.photon_cutoff;
    } else {
        // size the cutoff from the largest mean-field photon number over the run
        auto small = params;
        small.n_atoms = sec.n_atoms;
        double peak = init.xi * init.xi;
        for (const auto& s : integrate(small, init, horizon).samples()) peak = std::max(peak, s.derived.photon_number);
        cutoff = default_photon_cutoff(peak);
    }
    const auto cmp = compare_meanfield(params, init, sec.n_atoms, cutoff, horizon, stride, options);

    io::CsvTable table;
    table.header = {"tau", "z_quantum", "z_meanfield", "dz", "photons_quantum", "photons_meanfield", "dphotons",
                    "norm", "energy_quantum"};
    for (const auto& s : cmp.samples) {
        table.rows.push_back({s.tau, s.z_quantum, s.z_meanfield, s.z_quantum - s.z_meanfield, s.photons_quantum,
                              s.photons_meanfield, s.photons_quantum - s.photons_meanfield, s.norm, s.energy_quantum});
    }
    io::write_csv(ctx.out / "quantum.csv", table);
    Json report{{"scenario", ctx.config.scenario},
                {"params", to_json(params)},
                {"n_atoms", sec.n_atoms},
                {"photon_cutoff", cutoff},
                {"horizon", horizon},
                {"max_z_deviation", cmp.max_z_deviation},
                {"max_photon_deviation", cmp.max_photon_deviation},
                {"deviation_reached", cmp.deviation_reached},
                {"deviation_time", cmp.deviation_time},
                {"max_edge_population", cmp.max_edge_population}};
    io::write_file_atomic(ctx.out / "quantum_summary.json", dump(report));
    ctx.log << "wrote " << cmp.samples.size() << " samples to " << (ctx.out / "quantum.csv").string() << "\n";
    return exit_ok;
}

} // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"params", "simulate", "fixed-points", "portrait", "reduced", "quantum"};
    return names;
}

DimensionlessParams resolve_params(const RunConfig& config) {
    if (config.params) return *config.params;
    if (!config.derived) throw ConfigError({"missing parameter source"});
    const auto& d = *config.derived;
    return derive_parameters(d.well, d.cavity, d.g_gg, d.n_atoms, d.xi_sq_max, 0).dimensionless;
}

int run(const std::string& subcommand, const RunConfig& config, const RunOverrides& overrides, std::ostream& log,
        std::ostream& err) {
    const fs::path out = overrides.out_dir.value_or(config.output_dir);
    if (overrides.stride && !(*overrides.stride > 0.0)) {
        err << "error: --stride must be > 0\n";
        return exit_config;
    }
    if (overrides.horizon && !(*overrides.horizon >= 0.0)) {
        err << "error: --horizon must be >= 0\n";
        return exit_config;
    }
    const Context ctx{config, overrides, out, log};
    try {
        if (subcommand == "params") return cmd_params(ctx);
        const auto params = resolve_params(config);
        for (const auto& w : validate(params)) log << "warning: " << w << "\n";
        if (subcommand == "simulate") return cmd_simulate(ctx, params);
        if (subcommand == "fixed-points") return cmd_fixed_points(ctx, params);
        if (subcommand == "portrait") return cmd_portrait(ctx, params);
        if (subcommand == "reduced") return cmd_reduced(ctx, params);
        if (subcommand == "quantum") return cmd_quantum(ctx, params);
        err << "error: unknown subcommand '" << subcommand << "'\n";
        return exit_config;
    } catch (const ConfigError& e) {
        err << "configuration error:\n" << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        err << "numerical failure in '" << subcommand << "': " << e.what() << "\n";
        try {
            io::write_file_atomic(out / "diagnostic.txt",
                                  "subcommand: " + subcommand + "\nscenario: " + config.scenario + "\nerror: " + e.what() + "\n");
        } catch (const std::exception& write_error) {
            err << "could not write diagnostic: " << write_error.what() << "\n";
        }
        return exit_numerical;
    }
}

int run_file(const std::string& subcommand, const std::string& config_path, const RunOverrides& overrides,
             std::ostream& log, std::ostream& err) {
    RunConfig config;
    try {
        config = load_config(config_path);
    } catch (const ConfigError& e) {
        err << "configuration error:\n" << e.what() << "\n";
        return exit_config;
    }
    return run(subcommand, config, overrides, log, err);
}

} // namespace cavity_bjj
