// swarm3d: run the built-in collision avoidance scenarios from the command line.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "swarm3d/io.hpp"
#include "swarm3d/scenarios.hpp"

using namespace swarm3d;

namespace {

struct RunConfig {
    std::string scenario = "circle";
    std::optional<int> n;
    std::optional<double> alpha;
    std::optional<double> t_end;
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
    std::optional<double> R;
    std::optional<double> kappa;
    std::optional<double> sigma;
    std::optional<double> nu;
    std::optional<std::string> potential;
    bool no_avoidance = false;
    bool no_mean_field_scaling = false;
    std::string out = "swarm3d";
    bool plot = false;
    std::string save_scenario;
};

void add_scenario_options(CLI::App* cmd, RunConfig& c) {
    cmd->add_option("--scenario", c.scenario, "Built-in scenario name or scenario JSON file");
    cmd->add_option("--n", c.n, "Number of agents")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", c.alpha, "Initial speed factor, v(0) = -alpha x(0) (circle)");
    cmd->add_option("--t-end", c.t_end, "Final time");
    cmd->add_option("--dt", c.dt, "Time step");
    cmd->add_option("--seed", c.seed, "Random seed");
    cmd->add_option("--R", c.R, "Safety radius");
    cmd->add_option("--kappa", c.kappa, "Vision cone cosine");
    cmd->add_option("--sigma", c.sigma, "Friction coefficient");
    cmd->add_option("--nu", c.nu, "Velocity noise intensity");
    cmd->add_option("--potential", c.potential, "Target potential: none, smooth, distance");
    cmd->add_flag("--no-avoidance", c.no_avoidance, "Disable collision avoidance");
    cmd->add_flag("--no-mean-field-scaling", c.no_mean_field_scaling,
                  "Drop the 1/N prefactor of the pair force");
}

bool is_builtin(const std::string& name) {
    for (auto s : scenario_names()) {
        if (s == name) return true;
    }
    return false;
}

ScenarioSpec resolve(const RunConfig& c) {
    ScenarioSpec s;
    if (is_builtin(c.scenario)) {
        ScenarioOptions opt;
        opt.n = c.n;
        opt.alpha = c.alpha;
        opt.seed = c.seed.value_or(0);
        s = build_scenario(c.scenario, opt);
    } else if (std::filesystem::is_regular_file(c.scenario)) {
        s = io::load_scenario(c.scenario);
        if (c.seed) s.params.seed = *c.seed;
    } else {
        throw ConfigError("unknown scenario '" + c.scenario + "'");
    }
    auto& p = s.params;
    if (c.t_end) p.t_end = *c.t_end;
    if (c.dt) p.dt = *c.dt;
    if (c.R) p.perception.safety_radius = *c.R;
    if (c.kappa) p.perception.kappa = *c.kappa;
    if (c.sigma) p.damping.sigma = *c.sigma;
    if (c.nu) p.damping.nu = *c.nu;
    if (c.potential) {
        auto kind = parse_potential_kind(*c.potential);
        if (!kind) throw ConfigError("unknown potential '" + *c.potential + "'");
        p.potential = *kind;
    }
    if (c.no_avoidance) p.avoidance_enabled = false;
    if (c.no_mean_field_scaling) p.avoidance.mean_field_scaling = false;
    validate(s);
    return s;
}

void warn_penetrations(const TrajectoryLog& log) {
    if (!log.penetrations.empty()) {
        std::cerr << "warning: " << log.penetrations.size()
                  << " penetration events (agent inside an obstacle)\n";
    }
}

int cmd_run(const RunConfig& c) {
    const ScenarioSpec s = resolve(c);
    if (!c.save_scenario.empty()) {
        io::save_scenario(s, c.save_scenario);
    }
    const TrajectoryLog log = run(s.world(), s.params);
    {
        auto out = io::open_out(c.out + "_traj.csv");
        io::write_trajectory_csv(out, log);
    }
    {
        auto out = io::open_out(c.out + "_diag.csv");
        io::write_diagnostics_csv(out, log);
    }
    {
        auto out = io::open_out(c.out + "_meta.json");
        out << io::meta_json(s, log).dump(2) << '\n';
    }
    if (c.plot) {
        auto xy = io::open_out(c.out + "_xy.svg");
        io::write_svg(xy, s, log, {0, 1, "xy"});
        auto xz = io::open_out(c.out + "_xz.svg");
        io::write_svg(xz, s, log, {0, 2, "xz"});
    }
    warn_penetrations(log);
    std::printf("%s: %zu agents, %zu steps, min pair distance %.6g\n", s.name.c_str(),
                s.agents.size(), log.steps, log.min_pair_dist);
    return 0;
}

int cmd_compare(const RunConfig& c) {
    ScenarioSpec on = resolve(c);
    on.params.avoidance_enabled = true;
    ScenarioSpec off = on;
    off.params.avoidance_enabled = false;
    const TrajectoryLog log_on = run(on.world(), on.params);
    const TrajectoryLog log_off = run(off.world(), off.params);

    std::printf("%-28s %14s %14s\n", "", "avoidance on", "avoidance off");
    std::printf("%-28s %14.6g %14.6g\n", "min pair distance", log_on.min_pair_dist,
                log_off.min_pair_dist);
    std::printf("%-28s %14zu %14zu\n", "penetration events", log_on.penetrations.size(),
                log_off.penetrations.size());
    const auto& end_on = log_on.states.back();
    const auto& end_off = log_off.states.back();
    for (std::size_t i = 0; i < end_on.size(); ++i) {
        char label[64];
        std::snprintf(label, sizeof label, "agent %d distance to target", end_on[i].id);
        std::printf("%-28s %14.6g %14.6g\n", label, norm(end_on[i].x - end_on[i].target),
                    norm(end_off[i].x - end_off[i].target));
    }
    warn_penetrations(log_on);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3-D vision-based swarm collision avoidance"};
    app.require_subcommand(1);

    RunConfig run_cfg;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write CSV/JSON/SVG output");
    add_scenario_options(run_cmd, run_cfg);
    run_cmd->add_option("--out", run_cfg.out, "Output file prefix");
    run_cmd->add_flag("--plot", run_cfg.plot, "Also write xy and xz SVG projections");
    run_cmd->add_option("--save-scenario", run_cfg.save_scenario,
                        "Write the resolved scenario as JSON");

    RunConfig cmp_cfg;
    auto* cmp_cmd = app.add_subcommand("compare", "Run with avoidance on and off and summarize");
    add_scenario_options(cmp_cmd, cmp_cfg);

    auto* list_cmd = app.add_subcommand("list-scenarios", "Print the built-in scenario names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run_cmd) return cmd_run(run_cfg);
        if (*cmp_cmd) return cmd_compare(cmp_cfg);
        if (*list_cmd) {
            for (auto s : scenario_names()) std::cout << s << '\n';
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
