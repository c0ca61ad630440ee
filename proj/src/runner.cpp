#include "vmcyl/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "vmcyl/report.hpp"

namespace vmcyl {

using nlohmann::json;

RunMode parse_run_mode(const std::string& s)
{
    if (s == "solve")
        return RunMode::solve;
    if (s == "verify")
        return RunMode::verify;
    if (s == "confine")
        return RunMode::confine;
    if (s == "extend")
        return RunMode::extend;
    if (s == "sweep")
        return RunMode::sweep;
    throw ConfigError("unknown mode: " + s + " (expected solve|verify|confine|extend|sweep)");
}

namespace {

struct RunContext {
    const RunConfig& cfg;
    std::string hash;
    std::filesystem::path out;

    void write_json(const std::string& name, json j) const
    {
        j["config_hash"] = hash;
        std::ofstream f(out / name);
        if (!f)
            throw std::runtime_error("cannot write " + (out / name).string());
        f << j.dump(2) << "\n";
    }
};

json verdict_json(const ConfinementVerdict& v)
{
    return json{{"pass", v.pass},
                {"worst_margin", v.worst_margin},
                {"worst_radius", v.worst_radius},
                {"detail", v.detail}};
}

struct Solved {
    SolveResult result;
    EnvelopeBounds env;
    FieldProfiles fields;
    OdeResiduals residuals;
    EnvelopeVerdict iterate_verdict;
    EnvelopeVerdict state_verdict;
};

Solved solve_pipeline(const RunConfig& cfg)
{
    const auto grid = uniform_grid(cfg.R0, cfg.grid_n);
    SolveResult res = picard_solve(grid, cfg.species, cfg.ext, cfg.quad, cfg.solve);
    EnvelopeBounds env(res.c1, res.c2);
    FieldProfiles fields =
        reconstruct_fields(res.state, cfg.ext, cfg.species, cfg.quad, cfg.threads);
    OdeResiduals residuals = ode_residuals(res.state, fields);
    EnvelopeVerdict iter_v = check_envelopes(res.log.iterates, env);
    EnvelopeVerdict state_v = check_state_envelopes(res.state, env);
    return {std::move(res), env, std::move(fields), residuals, iter_v, state_v};
}

json solve_json(const RunConfig& cfg, const Solved& s)
{
    json j;
    j["converged"] = true;
    j["iterations"] = s.result.iterations;
    j["deltas"] = s.result.log.deltas;
    j["c1"] = s.result.c1;
    j["c2"] = s.result.c2;
    j["grid_n"] = cfg.grid_n;
    j["tol_fix"] = cfg.solve.tol_fix;
    j["residuals"] = {{"phi", s.residuals.phi},
                      {"a_phi", s.residuals.a_phi},
                      {"a_z", s.residuals.a_z},
                      {"interior_margin", s.residuals.interior_margin}};
    j["envelopes"] = {{"iterates_pass", s.iterate_verdict.pass},
                      {"iterates_worst_excess", s.iterate_verdict.worst_excess},
                      {"state_pass", s.state_verdict.pass},
                      {"state_worst_excess", s.state_verdict.worst_excess}};
    const auto violations = cfg.ext.condition_violations(cfg.R0);
    j["external_condition_violations"] = violations;
    return j;
}

int run_solve(const RunContext& ctx)
{
    const Solved s = solve_pipeline(ctx.cfg);
    write_profiles_csv((ctx.out / "profiles.csv").string(), s.result.state, s.fields, s.env,
                       ctx.hash);
    ctx.write_json("solve_report.json", solve_json(ctx.cfg, s));
    return (s.iterate_verdict.pass && s.state_verdict.pass) ? exit_pass : exit_verdict_fail;
}

int run_verify(const RunContext& ctx)
{
    const RunConfig& cfg = ctx.cfg;
    const Solved s = solve_pipeline(cfg);
    AuditPlan plan = cfg.verify;
    if (cfg.verify_near_wall)
        plan.near_wall_radius = cfg.R;
    const AuditReport report = audit_stationarity(cfg.species, s.result.state, cfg.ext, plan);
    json j;
    j["pass"] = report.pass;
    j["seed"] = report.seed;
    j["grid_n"] = report.grid_n;
    j["drift_tol"] = report.drift_tol;
    j["samples"] = report.trajectories.size();
    j["phi_perturbation"] = plan.phi_perturbation;
    j["max_drift"] = {{"energy", report.max_drift_energy},
                      {"p_phi", report.max_drift_p_phi},
                      {"p_z", report.max_drift_p_z},
                      {"f", report.max_drift_f},
                      {"overall", report.max_drift}};
    int total_reflections = 0;
    for (const auto& t : report.trajectories)
        total_reflections += t.reflections;
    j["reflections"] = total_reflections;
    ctx.write_json("audit.json", j);
    return report.pass ? exit_pass : exit_verdict_fail;
}

int run_confine(const RunContext& ctx)
{
    const RunConfig& cfg = ctx.cfg;
    if (!cfg.confine_mode)
        throw ConfigError("confine mode requires confine.mode");
    const auto [c1, c2] = source_bound_constants(cfg.species, cfg.quad);
    const EnvelopeBounds env(c1, c2);
    const PinchSpec spec{*cfg.confine_mode, cfg.R};
    const auto grid = uniform_grid(cfg.R0, cfg.grid_n);
    const ConfinementVerdict verdict =
        check_confinement(cfg.ext, spec, cfg.species, env, grid);

    json j;
    j["mode"] = pinch_mode_name(spec.mode);
    j["target_radius"] = cfg.R;
    j["threshold_verdict"] = verdict_json(verdict);
    j["c1"] = c1;
    j["c2"] = c2;
    bool pass = verdict.pass;

    if (cfg.confine_with_solve) {
        const Solved s = solve_pipeline(cfg);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] < cfg.R)
                continue;
            worst = std::max({worst, std::abs(s.fields.rho.values()[i]),
                              std::abs(s.fields.j_phi.values()[i]),
                              std::abs(s.fields.j_z.values()[i])});
        }
        const bool densities_vanish = worst <= cfg.extend.density_floor;
        j["solve"] = {{"iterations", s.result.iterations},
                      {"max_source_beyond_R", worst},
                      {"densities_vanish", densities_vanish}};
        pass = pass && densities_vanish;
    }
    j["pass"] = pass;
    ctx.write_json("confine.json", j);
    return pass ? exit_pass : exit_verdict_fail;
}

int run_extend(const RunContext& ctx)
{
    const RunConfig& cfg = ctx.cfg;
    const Solved s = solve_pipeline(cfg);
    VacuumExtension ext;
    try {
        ext = extend_vacuum(s.result.state, s.fields, cfg.R, cfg.extend.density_floor);
    } catch (const std::domain_error& e) {
        json j;
        j["pass"] = false;
        j["error"] = e.what();
        ctx.write_json("extend.json", j);
        return exit_verdict_fail;
    }
    json j;
    j["pass"] = true;
    j["charge_moment"] = ext.charge_moment;
    j["axial_current_moment"] = ext.axial_current_moment;
    j["azimuthal_current_moment"] = ext.azimuthal_current_moment;
    j["base_radius"] = ext.base_radius;
    j["phi_const"] = ext.phi_const;
    j["a_z_const"] = ext.a_z_const;
    j["a_phi_inverse"] = ext.a_phi_inverse;
    j["value_jumps"] = {ext.phi_value_jump, ext.a_phi_value_jump, ext.a_z_value_jump};
    j["deriv_jumps"] = {ext.phi_deriv_jump, ext.a_phi_deriv_jump, ext.a_z_deriv_jump};
    json tail = json::array();
    const double r_hi = cfg.extend.factor * cfg.R0;
    for (int i = 0; i <= 64; ++i) {
        const double r = cfg.R0 + (r_hi - cfg.R0) * double(i) / 64.0;
        tail.push_back({{"r", r},
                        {"phi", ext.phi_tail(r)},
                        {"a_phi", ext.a_phi_tail(r)},
                        {"a_z", ext.a_z_tail(r)}});
    }
    j["tail"] = tail;
    ctx.write_json("extend.json", j);
    return exit_pass;
}

int run_sweep(const RunContext& ctx)
{
    const RunConfig& cfg = ctx.cfg;
    if (!cfg.confine_mode)
        throw ConfigError("sweep mode requires confine.mode");
    const PinchMode mode = *cfg.confine_mode;
    const auto [c1, c2] = source_bound_constants(cfg.species, cfg.quad);
    const EnvelopeBounds env(c1, c2);
    const auto grid = uniform_grid(cfg.R0, cfg.grid_n);
    const PinchSpec spec{mode, cfg.R};
    validate_mode_ansatz(spec, cfg.species);

    const bool theta = (mode == PinchMode::theta_a || mode == PinchMode::theta_b);
    const double base = theta ? uniform_field_threshold(cfg.species, env, cfg.R, cfg.R0)
                              : z_pinch_threshold(cfg.species, env, mode, cfg.R0);

    std::ofstream out(ctx.out / "sweep.csv");
    if (!out)
        throw std::runtime_error("cannot write sweep.csv");
    out << "# config_hash=" << ctx.hash << "\n";
    out << "scale,coeff,pass,margin\n";
    for (int i = 0; i < cfg.sweep.count; ++i) {
        const double scale =
            cfg.sweep.max_scale * double(i) / double(std::max(1, cfg.sweep.count - 1));
        RunConfig sweep_cfg = cfg;
        double coeff = scale * base;
        switch (mode) {
        case PinchMode::theta_a:
            sweep_cfg.ext.a_phi = ExternalComponent::linear(-coeff);
            break;
        case PinchMode::theta_b:
            sweep_cfg.ext.a_phi = ExternalComponent::linear(coeff);
            break;
        case PinchMode::z_a:
            sweep_cfg.ext.a_z = ExternalComponent::ramp(coeff, cfg.R);
            break;
        case PinchMode::z_b:
            sweep_cfg.ext.a_z = ExternalComponent::ramp(-coeff, cfg.R);
            break;
        }
        const ConfinementVerdict v =
            check_confinement(sweep_cfg.ext, spec, cfg.species, env, grid);
        out << format_g17(scale) << ',' << format_g17(coeff) << ','
            << (v.pass ? "pass" : "fail") << ',' << format_g17(v.worst_margin) << "\n";
    }
    json j;
    j["mode"] = pinch_mode_name(mode);
    j["base_value"] = base;
    j["rows"] = cfg.sweep.count;
    ctx.write_json("sweep_report.json", j);
    return exit_pass;
}

} // namespace

int run(const RunConfig& cfg, RunMode mode)
{
    RunContext ctx{cfg, sha256_hex(cfg.canonical_text()),
                   std::filesystem::path(cfg.out_dir)};
    std::error_code ec;
    std::filesystem::create_directories(ctx.out, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + cfg.out_dir);
    {
        std::ofstream f(ctx.out / "config_resolved.cfg");
        f << cfg.canonical_text();
    }
    try {
        switch (mode) {
        case RunMode::solve:
            return run_solve(ctx);
        case RunMode::verify:
            return run_verify(ctx);
        case RunMode::confine:
            return run_confine(ctx);
        case RunMode::extend:
            return run_extend(ctx);
        case RunMode::sweep:
            return run_sweep(ctx);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const IterationLimitError& e) {
        json j;
        j["converged"] = false;
        j["error"] = e.what();
        j["deltas"] = e.log.deltas;
        ctx.write_json("solve_report.json", j);
        std::cerr << e.what() << "\n";
        return exit_numerical_failure;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical_failure;
    }
    return exit_numerical_failure;
}

} // namespace vmcyl
