// Experiment driver for the contingency-management models: builds the
// factored transition/reward tensors, solves the MDP and POMDP policies, runs
// Monte Carlo sweeps over observability x battery health x policy, and
// renders the comparison tables.
//
// Exit codes: 0 success, 1 validation error, 2 missing assets.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "cma/experiment.hpp"

namespace fs = std::filesystem;

namespace {

cma::ModelSpec load_or_default(const std::string& path) {
    return path.empty() ? cma::default_model_spec() : cma::load_model_spec(path);
}

int cmd_export_defaults(const std::string& out) {
    cma::write_file(out, cma::to_json(cma::default_model_spec()));
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_validate(const std::string& model_path) {
    cma::ModelSpec spec;
    try {
        spec = load_or_default(model_path);
    } catch (const std::exception& e) {
        std::cerr << "model load failed: " << e.what() << "\n";
        return 1;
    }
    try {
        const cma::CmaModel model = cma::build_cma_model(spec);
        const cma::ValidationReport report = cma::validate_model(model);
        std::cout << report.summary() << "\n";
        return report.ok() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "model construction failed: " << e.what() << "\n";
        return 1;
    }
}

int cmd_solve_mdp(const std::string& model_path, double gamma, double tol,
                  const std::string& out) {
    const cma::CmaModel model = cma::build_cma_model(load_or_default(model_path));
    cma::SolverConfig config;
    config.discount = gamma;
    config.bellman_tolerance = tol;
    const cma::ValueFunction vf = cma::value_iteration(model, config);
    cma::write_file(out, cma::to_json(vf));
    std::cout << "wrote " << out << " (" << vf.iterations << " iterations, residual "
              << vf.residual << ")\n";
    return 0;
}

int cmd_solve_pomdp(const std::string& model_path, double p_obs, double gamma,
                    const cma::PbviConfig& pbvi_in, const std::string& out,
                    const std::string& obs_out) {
    const cma::CmaModel model = cma::build_cma_model(load_or_default(model_path));
    const cma::ObservationModel z = cma::build_observation_model(p_obs);
    cma::PbviConfig pbvi = pbvi_in;
    pbvi.discount = gamma;
    const cma::AlphaSet alphas = cma::pbvi_solve(model, z, pbvi);
    cma::write_file(out, cma::to_json(alphas, p_obs));
    std::cout << "wrote " << out << " (" << alphas.alphas.size() << " alpha vectors)\n";
    if (!obs_out.empty()) {
        cma::write_file(obs_out, cma::to_json(z));
        std::cout << "wrote " << obs_out << "\n";
    }
    return 0;
}

int cmd_sweep(const cma::ExperimentSpec& spec) {
    const cma::SolvedAssets assets = cma::solve_assets(spec);
    cma::write_assets(spec, assets);
    const cma::SweepResult result = cma::run_sweep(spec, assets);
    std::cout << "wrote " << result.cells.size() << " cells to " << spec.out_dir << "\n";
    return 0;
}

int cmd_report(const cma::ExperimentSpec& spec, const std::string& results_dir,
               const std::string& out_dir) {
    std::string tables;
    const std::vector<std::string> missing =
        cma::write_report(spec, results_dir, out_dir, &tables);
    std::cout << tables;
    if (!missing.empty()) {
        std::cerr << "missing cells:\n";
        for (const auto& m : missing) std::cerr << "  " << m << "\n";
        return 2;
    }
    std::cout << "report written to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"contingency-management MDP/POMDP toolkit"};
    app.require_subcommand(1);

    std::string model_path;
    std::string out;
    std::string obs_out;
    std::string config_path;
    std::string results_dir;
    double gamma = 0.99;
    double tol = 1e-9;
    double p_obs = 0.9;
    cma::ExperimentSpec spec;
    cma::PbviConfig pbvi;

    auto* model = app.add_subcommand("model", "model file utilities");
    model->require_subcommand(1);
    auto* exp_def = model->add_subcommand("export-defaults", "write the embedded default model");
    exp_def->add_option("--out", out, "output JSON path")->default_val("default_model.json");
    auto* validate = model->add_subcommand("validate", "build and validate a model file");
    validate->add_option("--model", model_path, "model JSON path (empty = defaults)");

    auto* solve = app.add_subcommand("solve", "solve policies offline");
    solve->require_subcommand(1);
    auto* mdp = solve->add_subcommand("mdp", "value iteration on the fully observable model");
    mdp->add_option("--model", model_path, "model JSON path (empty = defaults)");
    mdp->add_option("--gamma", gamma, "discount factor")->default_val(0.99);
    mdp->add_option("--tol", tol, "Bellman residual tolerance")->default_val(1e-9);
    mdp->add_option("--out", out, "output JSON path")->default_val("vf.json");
    auto* pomdp = solve->add_subcommand("pomdp", "point-based alpha-vector policy");
    pomdp->add_option("--model", model_path, "model JSON path (empty = defaults)");
    pomdp->add_option("--p-obs", p_obs, "observation probability in [0.5, 1]")->required();
    pomdp->add_option("--gamma", gamma, "discount factor")->default_val(0.99);
    pomdp->add_option("--expansions", pbvi.num_expansions, "belief expansion rounds");
    pomdp->add_option("--backups", pbvi.backups_per_expansion, "backup sweeps per round");
    pomdp->add_option("--pbvi-seed", pbvi.seed, "expansion RNG seed");
    pomdp->add_option("--out", out, "output JSON path")->default_val("alphas.json");
    pomdp->add_option("--obs-out", obs_out, "also export the observation model JSON");

    auto* sweep = app.add_subcommand("sweep", "run the Monte Carlo policy comparison");
    sweep->add_option("--config", config_path, "experiment spec JSON (flags override)");
    std::string sweep_model;
    int episodes = 0;
    std::uint64_t seed = 0;
    std::vector<double> p_obs_grid;
    std::vector<std::string> bh_codes;
    std::vector<std::string> policy_names;
    int horizon = 0;
    double sweep_gamma = 0.0;
    double sf_onset = 0.0;
    std::string sweep_out;
    auto* opt_model = sweep->add_option("--model", sweep_model, "model JSON path (empty = defaults)");
    auto* opt_episodes = sweep->add_option("--episodes", episodes, "episodes per cell");
    auto* opt_seed = sweep->add_option("--seed", seed, "base RNG seed");
    auto* opt_pobs = sweep->add_option("--p-obs", p_obs_grid, "observability grid");
    auto* opt_bh = sweep->add_option("--bh", bh_codes, "battery health grid (G M P)");
    auto* opt_policy =
        sweep->add_option("--policy", policy_names, "policies (noop true_mdp obs_mdp map_mdp pomdp)");
    auto* opt_horizon = sweep->add_option("--horizon", horizon, "episode horizon");
    auto* opt_gamma = sweep->add_option("--gamma", sweep_gamma, "discount factor");
    auto* opt_sf = sweep->add_option("--sf-onset", sf_onset,
                                     "override ground-truth spall onset probability");
    auto* opt_out = sweep->add_option("--out", sweep_out, "results directory");

    auto* report = app.add_subcommand("report", "render summary tables from sweep results");
    report->add_option("--results", results_dir, "sweep results directory")->required();
    report->add_option("--out", out, "report output directory");
    report->add_option("--config", config_path, "experiment spec JSON (defines the grid)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (exp_def->parsed()) return cmd_export_defaults(out);
        if (validate->parsed()) return cmd_validate(model_path);
        if (mdp->parsed()) return cmd_solve_mdp(model_path, gamma, tol, out);
        if (pomdp->parsed()) return cmd_solve_pomdp(model_path, p_obs, gamma, pbvi, out, obs_out);
        if (sweep->parsed()) {
            if (!config_path.empty())
                spec = cma::experiment_spec_from_json(cma::read_file(config_path));
            if (opt_model->count()) spec.model_path = sweep_model;
            if (opt_episodes->count()) spec.n_episodes = episodes;
            if (opt_seed->count()) spec.base_seed = seed;
            if (opt_pobs->count()) spec.p_obs_grid = p_obs_grid;
            if (opt_bh->count()) {
                spec.bh_grid.clear();
                for (const auto& c : bh_codes) spec.bh_grid.push_back(cma::battery_health_from_code(c));
            }
            if (opt_policy->count()) {
                spec.policies.clear();
                for (const auto& n : policy_names) spec.policies.push_back(cma::policy_from_string(n));
            }
            if (opt_horizon->count()) spec.horizon = horizon;
            if (opt_gamma->count()) spec.gamma = sweep_gamma;
            if (opt_sf->count()) spec.sf_onset_override = sf_onset;
            if (opt_out->count()) spec.out_dir = sweep_out;
            spec.validate();
            return cmd_sweep(spec);
        }
        if (report->parsed()) {
            cma::ExperimentSpec report_spec;
            if (!config_path.empty())
                report_spec = cma::experiment_spec_from_json(cma::read_file(config_path));
            if (out.empty()) out = (fs::path(results_dir) / "report").string();
            return cmd_report(report_spec, results_dir, out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
