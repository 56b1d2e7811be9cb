// ricker_lab: command-line front end for the stochastic Ricker experiments.
//
//   ricker_lab experiment --preset T2.1b --out runs/t21b
//   ricker_lab theory-bounds --config my.json
//   ricker_lab fit --samples runs/t21b/samples.csv
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ricker/experiment.hpp"

namespace {

using namespace ricker;

struct Common
{
    std::string config_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::int64_t> horizon;
    std::optional<std::int64_t> n_traj;
    std::string out;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config_path, "JSON scenario config");
    app->add_option("--preset", c.preset_name, "built-in scenario (see `ricker_lab presets`)");
    app->add_option("--seed", c.seed, "override master seed");
    app->add_option("--workers", c.workers, "worker threads (results do not depend on this)");
    app->add_option("--horizon", c.horizon, "override censoring horizon");
    app->add_option("--n-traj", c.n_traj, "override number of trajectories");
    app->add_option("--out", c.out, "output directory or file");
}

struct ConfigError
{
    std::vector<std::string> messages;
};

ExperimentConfig load(const Common& c)
{
    if (c.config_path.empty() == c.preset_name.empty()) {
        throw ConfigError{{"give exactly one of --config or --preset"}};
    }
    ExperimentConfig cfg;
    if (!c.preset_name.empty()) {
        const auto names = preset_names();
        if (std::find(names.begin(), names.end(), c.preset_name) == names.end()) {
            throw ConfigError{{"unknown preset '" + c.preset_name + "'"}};
        }
        cfg = preset(c.preset_name);
    } else {
        std::string text;
        try {
            text = io::read_file(c.config_path);
        } catch (const std::exception& e) {
            throw ConfigError{{e.what()}};
        }
        auto parsed = parse_config(text);
        if (!parsed.ok()) {
            throw ConfigError{parsed.errors};
        }
        cfg = *parsed.config;
    }
    if (c.seed) cfg.master_seed = *c.seed;
    if (c.workers) cfg.workers = *c.workers;
    if (c.horizon) cfg.horizon = *c.horizon;
    if (c.n_traj) cfg.n_traj = *c.n_traj;
    if (!c.out.empty()) cfg.output_dir = c.out;
    if (auto errs = validate_config(cfg); !errs.empty()) {
        throw ConfigError{errs};
    }
    return cfg;
}

void emit(const std::string& out_path, const std::string& text)
{
    if (out_path.empty()) {
        std::cout << text;
    } else {
        io::write_file(out_path, text);
    }
}

int cmd_simulate(const Common& c, std::int64_t steps, std::uint64_t stream, std::size_t x0_index)
{
    auto cfg = load(c);
    std::string csv;
    if (cfg.kind == ScenarioKind::single) {
        if (x0_index >= cfg.x0.size()) {
            throw ConfigError{{"--x0-index out of range"}};
        }
        const auto path = simulate_trajectory(cfg.model, cfg.noise, LogState::from_density(cfg.x0[x0_index]), steps,
                                              cfg.master_seed, stream, cfg.log_floor);
        csv = "n,log_x\n";
        for (std::size_t n = 0; n < path.size(); ++n) {
            csv += std::to_string(n) + ',' + io::format_double(path[n].value) + '\n';
        }
    } else {
        const LogPair start{LogState::from_density(cfg.x0_1), LogState::from_density(cfg.x0_2)};
        const auto path = simulate_two_species(cfg.two, start, steps, cfg.master_seed, stream);
        csv = "n,log_x1,log_x2\n";
        for (std::size_t n = 0; n < path.size(); ++n) {
            csv += std::to_string(n) + ',' + io::format_double(path[n].first.value) + ',' +
                   io::format_double(path[n].second.value) + '\n';
        }
    }
    emit(c.out, csv);
    return 0;
}

int cmd_hitting(const Common& c)
{
    auto cfg = load(c);
    if (cfg.output_dir.empty()) {
        throw ConfigError{{"hitting needs --out <dir>"}};
    }
    const auto s = simulate_experiment(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    for (const auto& r : s.runs) {
        io::write_file(std::filesystem::path(cfg.output_dir) / r.sample_file, io::samples_csv(r.samples));
        std::cout << r.sample_file << ": hit " << r.hits << ", censored " << r.censored << ", extinct " << r.extinct
                  << '\n';
    }
    if (cfg.kind == ScenarioKind::two_species) {
        io::write_file(std::filesystem::path(cfg.output_dir) / s.tau_file, io::samples_csv(s.tau_samples));
        std::cout << s.tau_file << '\n';
        for (const auto& sp : s.species) {
            io::write_file(std::filesystem::path(cfg.output_dir) / sp.sample_file, io::samples_csv(sp.species));
            if (!sp.tau_file.empty()) {
                io::write_file(std::filesystem::path(cfg.output_dir) / sp.tau_file, io::samples_csv(sp.tau));
            }
            std::cout << sp.sample_file << '\n';
        }
    }
    return 0;
}

int cmd_experiment(const Common& c)
{
    auto cfg = load(c);
    if (cfg.output_dir.empty()) {
        cfg.output_dir = "runs/" + detail::file_safe(cfg.scenario_id);
    }
    const auto s = run_experiment(cfg);
    std::cout << report_text(s);
    std::cout << "\nartifacts in " << cfg.output_dir << '\n';
    return 0;
}

int cmd_theory(const Common& c)
{
    auto cfg = load(c);
    Json j;
    j["scenario_id"] = cfg.scenario_id;
    j["theorem"] = to_string(effective_theorem(cfg));
    j["bounds"] = theory_bounds(cfg);
    emit(c.out, j.dump(2) + "\n");
    return 0;
}

int cmd_fit(const std::string& samples_path, std::optional<std::size_t> hill_k, std::int64_t horizon,
            const std::string& out)
{
    const auto samples = io::parse_samples_csv(io::read_file(samples_path), horizon);
    ExperimentConfig cfg;
    cfg.estimator.hill_k = hill_k;
    const auto curve = survival_curve(samples);
    const auto tail = fit_power_tail(samples, hill_k);
    Json j;
    j["sample_file"] = samples_path;
    j["outcomes"] = detail::counts_json(samples);
    j["hill"] = detail::fit_json(tail.hill, samples_path);
    j["hill_half_k"] = detail::fit_json(tail.hill_half, samples_path);
    j["hill_double_k"] = detail::fit_json(tail.hill_double, samples_path);
    j["loglog_regression"] = detail::fit_json(tail.regression, samples_path);
    j["cutoff_lr"] = detail::number(tail.comparison.cutoff_lr);
    j["vuong_z_power_vs_geometric"] = detail::number(tail.comparison.z);
    j["power_fit_poor"] = tail.power_fit_poor;
    j["exponential_preferred"] = tail.exponential_preferred;
    j["exp_rate"] = detail::fit_json(detail::default_exp_rate(cfg, curve), samples_path);
    j["mean"] = detail::mean_json(mean_with_ci(samples));
    emit(out, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stochastic Ricker hitting-time experiments"};
    app.require_subcommand(1);

    Common common;
    std::int64_t steps = 100;
    std::uint64_t stream = 0;
    std::size_t x0_index = 0;
    auto* sim = app.add_subcommand("simulate", "write one trajectory as CSV");
    add_common(sim, common);
    sim->add_option("--steps", steps, "number of steps")->check(CLI::NonNegativeNumber);
    sim->add_option("--stream", stream, "trajectory index (RNG stream)");
    sim->add_option("--x0-index", x0_index, "which X0 of a sweep to start from");

    auto* hit = app.add_subcommand("hitting", "sample hitting times and write the sample CSVs");
    add_common(hit, common);

    auto* exp = app.add_subcommand("experiment", "run a scenario: samples, fits, bounds, verdicts");
    add_common(exp, common);

    auto* th = app.add_subcommand("theory-bounds", "print closed-form bounds for a scenario as JSON");
    add_common(th, common);

    std::string samples_path;
    std::optional<std::size_t> hill_k;
    std::int64_t fit_horizon = 0;
    std::string fit_out;
    auto* fit = app.add_subcommand("fit", "tail and mean estimators on an existing sample CSV");
    fit->add_option("--samples", samples_path, "sample CSV")->required();
    fit->add_option("--hill-k", hill_k, "Hill order statistics (default sqrt(n))");
    fit->add_option("--horizon", fit_horizon, "censoring horizon if no row is censored");
    fit->add_option("--out", fit_out, "output file (default stdout)");

    app.add_subcommand("presets", "list built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(common, steps, stream, x0_index);
        if (hit->parsed()) return cmd_hitting(common);
        if (exp->parsed()) return cmd_experiment(common);
        if (th->parsed()) return cmd_theory(common);
        if (fit->parsed()) return cmd_fit(samples_path, hill_k, fit_horizon, fit_out);
        for (const auto& n : preset_names()) {
            std::cout << n << '\n';
        }
        return 0;
    } catch (const ConfigError& e) {
        for (const auto& m : e.messages) {
            std::cerr << "config error: " << m << '\n';
        }
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
