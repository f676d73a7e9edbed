#include "cma/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace cma {

namespace fs = std::filesystem;
using nlohmann::json;

void ExperimentSpec::validate() const {
    if (p_obs_grid.empty() || bh_grid.empty() || policies.empty())
        throw std::invalid_argument("experiment: grids must be non-empty");
    for (double p : p_obs_grid)
        if (!(p >= 0.5 && p <= 1.0))
            throw std::invalid_argument("experiment: p_obs values must lie in [0.5, 1]");
    if (n_episodes < 1) throw std::invalid_argument("experiment: episodes must be >= 1");
    if (horizon < 1) throw std::invalid_argument("experiment: horizon must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("experiment: gamma must be in (0,1)");
}

ExperimentSpec experiment_spec_from_json(const std::string& text) {
    const json j = json::parse(text);
    ExperimentSpec spec;
    if (j.contains("model")) spec.model_path = j.at("model").get<std::string>();
    if (j.contains("p_obs")) spec.p_obs_grid = j.at("p_obs").get<std::vector<double>>();
    if (j.contains("bh")) {
        spec.bh_grid.clear();
        for (const auto& code : j.at("bh"))
            spec.bh_grid.push_back(battery_health_from_code(code.get<std::string>()));
    }
    if (j.contains("policies")) {
        spec.policies.clear();
        for (const auto& name : j.at("policies"))
            spec.policies.push_back(policy_from_string(name.get<std::string>()));
    }
    if (j.contains("episodes")) spec.n_episodes = j.at("episodes").get<int>();
    if (j.contains("seed")) spec.base_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("horizon")) spec.horizon = j.at("horizon").get<int>();
    if (j.contains("gamma")) spec.gamma = j.at("gamma").get<double>();
    if (j.contains("sf_onset")) spec.sf_onset_override = j.at("sf_onset").get<double>();
    if (j.contains("diffuse_bh")) spec.diffuse_bh_prior = j.at("diffuse_bh").get<bool>();
    if (j.contains("out")) spec.out_dir = j.at("out").get<std::string>();
    spec.validate();
    return spec;
}

std::string to_json(const ExperimentSpec& spec) {
    json j;
    j["model"] = spec.model_path;
    j["p_obs"] = spec.p_obs_grid;
    json bh = json::array();
    for (BatteryHealth b : spec.bh_grid) bh.push_back(to_code(b));
    j["bh"] = bh;
    json pol = json::array();
    for (PolicyKind p : spec.policies) pol.push_back(to_string(p));
    j["policies"] = pol;
    j["episodes"] = spec.n_episodes;
    j["seed"] = spec.base_seed;
    j["horizon"] = spec.horizon;
    j["gamma"] = spec.gamma;
    if (spec.sf_onset_override) j["sf_onset"] = *spec.sf_onset_override;
    j["diffuse_bh"] = spec.diffuse_bh_prior;
    j["out"] = spec.out_dir;
    return j.dump(2) + "\n";
}

SolvedAssets solve_assets(const ExperimentSpec& spec) {
    spec.validate();
    SolvedAssets assets;
    assets.model_spec = spec.model_path.empty() ? default_model_spec()
                                                : load_model_spec(spec.model_path);
    assets.model = build_cma_model(assets.model_spec);
    SolverConfig solver;
    solver.discount = spec.gamma;
    assets.vf = value_iteration(assets.model, solver);
    const bool needs_alphas =
        std::find(spec.policies.begin(), spec.policies.end(), PolicyKind::Pomdp) !=
        spec.policies.end();
    if (needs_alphas) {
        for (double p : spec.p_obs_grid) {
            PbviConfig cfg = spec.pbvi;
            cfg.discount = spec.gamma;
            const ObservationModel z = build_observation_model(p);
            assets.alphas_by_p_obs.emplace(p, pbvi_solve(assets.model, z, cfg));
        }
    }
    return assets;
}

namespace {

std::string p_obs_tag(double p) { return CsvWriter::num(p); }

std::string cell_filename(const SweepCell& cell) {
    std::string name = "cell_" + to_string(cell.policy) + "_bh" + to_code(cell.bh);
    if (cell.p_obs) name += "_po" + p_obs_tag(*cell.p_obs);
    return name + ".csv";
}

}  // namespace

void write_assets(const ExperimentSpec& spec, const SolvedAssets& assets) {
    fs::create_directories(spec.out_dir);
    write_file((fs::path(spec.out_dir) / "vf.json").string(), to_json(assets.vf));
    for (const auto& [p, set] : assets.alphas_by_p_obs)
        write_file((fs::path(spec.out_dir) / ("alphas_po" + p_obs_tag(p) + ".json")).string(),
                   to_json(set, p));
}

std::string episode_csv(const SweepCell& cell, const std::vector<SimOutcome>& episodes) {
    CsvWriter csv({"episode", "seed", "policy", "p_obs", "bh", "terminal", "steps",
                   "took_contingency", "cum_reward", "disc_reward", "p_minmax"});
    for (std::size_t i = 0; i < episodes.size(); ++i) {
        const SimOutcome& o = episodes[i];
        csv.add_row({CsvWriter::num(static_cast<int>(i)), CsvWriter::num(o.seed),
                     to_string(cell.policy), cell.p_obs ? CsvWriter::num(*cell.p_obs) : "",
                     to_code(cell.bh), to_string(o.terminal), CsvWriter::num(o.steps),
                     o.took_contingency ? "1" : "0", CsvWriter::num(o.cum_reward),
                     CsvWriter::num(o.disc_reward),
                     o.p_minmax ? CsvWriter::num(*o.p_minmax) : ""});
    }
    return csv.str();
}

namespace {

json rate_to_json(const RateStat& r) {
    return json{{"value", r.value}, {"sem", r.sem}, {"ci95", {r.ci95_lo, r.ci95_hi}}};
}
json mean_to_json(const MeanStat& m) {
    return json{{"mean", m.mean}, {"stddev", m.stddev}, {"sem", m.sem},
                {"ci95", {m.ci95_lo, m.ci95_hi}}};
}
RateStat rate_from_json(const json& j) {
    RateStat r;
    r.value = j.at("value").get<double>();
    r.sem = j.at("sem").get<double>();
    r.ci95_lo = j.at("ci95")[0].get<double>();
    r.ci95_hi = j.at("ci95")[1].get<double>();
    return r;
}
MeanStat mean_from_json(const json& j) {
    MeanStat m;
    m.mean = j.at("mean").get<double>();
    m.stddev = j.at("stddev").get<double>();
    m.sem = j.at("sem").get<double>();
    m.ci95_lo = j.at("ci95")[0].get<double>();
    m.ci95_hi = j.at("ci95")[1].get<double>();
    return m;
}

json cell_to_json(const SweepCell& cell) {
    json j;
    j["policy"] = to_string(cell.policy);
    j["bh"] = to_code(cell.bh);
    if (cell.p_obs) j["p_obs"] = *cell.p_obs;
    const MetricsSummary& s = cell.summary;
    j["n"] = s.n;
    j["completion_rate"] = rate_to_json(s.completion_rate);
    j["true_success_rate"] = rate_to_json(s.true_success_rate);
    j["failure_rate"] = rate_to_json(s.failure_rate);
    j["safety_rate"] = rate_to_json(s.safety_rate);
    j["terminated_rate"] = rate_to_json(s.terminated_rate);
    j["horizon_rate"] = rate_to_json(s.horizon_rate);
    j["cum_reward"] = mean_to_json(s.cum_reward);
    j["disc_reward"] = mean_to_json(s.disc_reward);
    j["reward_per_step"] = mean_to_json(s.reward_per_step);
    if (s.p_minmax_n > 0) {
        j["p_minmax"] = mean_to_json(s.p_minmax);
        j["p_minmax"]["min"] = s.p_minmax_min;
        j["p_minmax"]["n"] = s.p_minmax_n;
    }
    return j;
}

SweepCell cell_from_json(const json& j) {
    SweepCell cell;
    cell.policy = policy_from_string(j.at("policy").get<std::string>());
    cell.bh = battery_health_from_code(j.at("bh").get<std::string>());
    if (j.contains("p_obs")) cell.p_obs = j.at("p_obs").get<double>();
    MetricsSummary& s = cell.summary;
    s.n = j.at("n").get<int>();
    s.completion_rate = rate_from_json(j.at("completion_rate"));
    s.true_success_rate = rate_from_json(j.at("true_success_rate"));
    s.failure_rate = rate_from_json(j.at("failure_rate"));
    s.safety_rate = rate_from_json(j.at("safety_rate"));
    s.terminated_rate = rate_from_json(j.at("terminated_rate"));
    s.horizon_rate = rate_from_json(j.at("horizon_rate"));
    s.cum_reward = mean_from_json(j.at("cum_reward"));
    s.disc_reward = mean_from_json(j.at("disc_reward"));
    s.reward_per_step = mean_from_json(j.at("reward_per_step"));
    if (j.contains("p_minmax")) {
        s.p_minmax = mean_from_json(j.at("p_minmax"));
        s.p_minmax_min = j.at("p_minmax").at("min").get<double>();
        s.p_minmax_n = j.at("p_minmax").at("n").get<int>();
    }
    return cell;
}

std::vector<std::string> summary_row(const SweepCell& cell) {
    const MetricsSummary& s = cell.summary;
    return {to_string(cell.policy),
            cell.p_obs ? CsvWriter::num(*cell.p_obs) : "",
            to_code(cell.bh),
            CsvWriter::num(s.n),
            CsvWriter::num(s.completion_rate.value),
            CsvWriter::num(s.completion_rate.sem),
            CsvWriter::num(s.true_success_rate.value),
            CsvWriter::num(s.true_success_rate.sem),
            CsvWriter::num(s.failure_rate.value),
            CsvWriter::num(s.failure_rate.sem),
            CsvWriter::num(s.safety_rate.value),
            CsvWriter::num(s.safety_rate.sem),
            CsvWriter::num(s.terminated_rate.value),
            CsvWriter::num(s.horizon_rate.value),
            CsvWriter::num(s.cum_reward.mean),
            CsvWriter::num(s.cum_reward.sem),
            CsvWriter::num(s.disc_reward.mean),
            CsvWriter::num(s.disc_reward.sem),
            CsvWriter::num(s.reward_per_step.mean),
            CsvWriter::num(s.reward_per_step.sem),
            s.p_minmax_n ? CsvWriter::num(s.p_minmax.mean) : "",
            s.p_minmax_n ? CsvWriter::num(s.p_minmax.stddev) : "",
            s.p_minmax_n ? CsvWriter::num(s.p_minmax_min) : ""};
}

const std::vector<std::string> kSummaryHeader{
    "policy", "p_obs", "bh", "n",
    "completion_rate", "sem_completion",
    "true_success_rate", "sem_true_success",
    "failure_rate", "sem_failure",
    "safety_rate", "sem_safety",
    "terminated_rate", "horizon_rate",
    "mean_cum_reward", "sem_cum_reward",
    "mean_disc_reward", "sem_disc_reward",
    "mean_reward_per_step", "sem_reward_per_step",
    "mean_p_minmax", "std_p_minmax", "min_p_minmax"};

}  // namespace

std::string summary_csv(const SweepResult& result) {
    CsvWriter csv(kSummaryHeader);
    for (const auto& cell : result.cells) csv.add_row(summary_row(cell));
    return csv.str();
}

std::string summary_json(const SweepResult& result) {
    json cells = json::array();
    for (const auto& cell : result.cells) cells.push_back(cell_to_json(cell));
    return json{{"cells", cells}}.dump(2) + "\n";
}

SweepResult run_sweep(const ExperimentSpec& spec, const SolvedAssets& assets) {
    spec.validate();
    fs::create_directories(spec.out_dir);

    std::optional<TransitionModel> stressed;
    if (spec.sf_onset_override)
        stressed = stressed_transition(assets.model_spec, *spec.sf_onset_override);

    const ObservationModel perfect_obs = build_observation_model(1.0);
    SweepResult result;
    for (BatteryHealth bh : spec.bh_grid) {
        for (PolicyKind policy : spec.policies) {
            const bool obs_independent =
                policy == PolicyKind::BaselineNoOp || policy == PolicyKind::TrueMdp;
            std::vector<std::optional<double>> cell_p_obs;
            if (obs_independent) {
                cell_p_obs.push_back(std::nullopt);
            } else {
                for (double p : spec.p_obs_grid) cell_p_obs.push_back(p);
            }
            for (const auto& p_obs : cell_p_obs) {
                SimConfig config;
                config.horizon = spec.horizon;
                config.discount = spec.gamma;
                config.n_episodes = spec.n_episodes;
                config.base_seed = spec.base_seed;
                config.p_obs = p_obs.value_or(1.0);
                config.bh_cohort = bh;
                config.policy = policy;
                config.sf_onset_override = spec.sf_onset_override;
                config.diffuse_bh_prior = spec.diffuse_bh_prior;

                ObservationModel local_obs;
                const ObservationModel* obs = &perfect_obs;
                if (p_obs && *p_obs != 1.0) {
                    local_obs = build_observation_model(*p_obs);
                    obs = &local_obs;
                }
                PolicyAssets pa;
                pa.vf = &assets.vf;
                if (policy == PolicyKind::Pomdp) {
                    auto it = assets.alphas_by_p_obs.find(*p_obs);
                    if (it == assets.alphas_by_p_obs.end())
                        throw std::runtime_error("sweep: no alpha set solved for p_obs=" +
                                                 CsvWriter::num(*p_obs));
                    pa.alphas = &it->second;
                }
                BatchResult batch = run_batch(config, assets.model, *obs, pa,
                                              stressed ? &*stressed : nullptr);
                SweepCell cell{policy, bh, p_obs, batch.summary};
                write_file((fs::path(spec.out_dir) / cell_filename(cell)).string(),
                           episode_csv(cell, batch.episodes));
                result.cells.push_back(std::move(cell));
            }
        }
    }
    write_file((fs::path(spec.out_dir) / "summary.csv").string(), summary_csv(result));
    write_file((fs::path(spec.out_dir) / "summary.json").string(), summary_json(result));
    return result;
}

namespace {

std::string pm(double value, double sem) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f +/- %.4f", value, 2.0 * sem);
    return buf;
}

}  // namespace

std::vector<std::string> write_report(const ExperimentSpec& spec, const std::string& results_dir,
                                      const std::string& out_dir, std::string* rendered_tables) {
    const fs::path summary_path = fs::path(results_dir) / "summary.json";
    if (!fs::exists(summary_path))
        return {"summary.json not found in '" + results_dir + "'"};
    const json j = json::parse(read_file(summary_path.string()));

    std::map<std::tuple<std::string, std::string, std::string>, SweepCell> cells;
    for (const auto& cj : j.at("cells")) {
        SweepCell cell = cell_from_json(cj);
        cells[{to_string(cell.policy), to_code(cell.bh),
               cell.p_obs ? CsvWriter::num(*cell.p_obs) : ""}] = cell;
    }

    // The observation-independent policies are computed once per battery
    // health and replicated across the observability grid in the report.
    std::vector<std::string> missing;
    auto find_cell = [&](PolicyKind policy, BatteryHealth bh,
                         double p_obs) -> const SweepCell* {
        const bool obs_independent =
            policy == PolicyKind::BaselineNoOp || policy == PolicyKind::TrueMdp;
        auto it = cells.find({to_string(policy), to_code(bh),
                              obs_independent ? "" : CsvWriter::num(p_obs)});
        return it == cells.end() ? nullptr : &it->second;
    };

    std::ostringstream tables;
    CsvWriter long_csv({"policy", "p_obs", "bh", "n", "completion_rate", "completion_2sem",
                        "true_success_rate", "true_success_2sem", "failure_rate", "failure_2sem",
                        "safety_rate", "safety_2sem", "mean_cum_reward", "cum_reward_2sem"});
    fs::create_directories(out_dir);

    for (BatteryHealth bh : spec.bh_grid) {
        CsvWriter bh_csv({"policy", "p_obs", "completion_rate", "completion_2sem", "safety_rate",
                          "safety_2sem", "mean_cum_reward", "cum_reward_2sem"});
        tables << "battery health " << to_code(bh) << "\n";
        tables << "  policy     p_obs  completion          safety              mean_reward\n";
        for (PolicyKind policy : spec.policies) {
            for (double p_obs : spec.p_obs_grid) {
                const SweepCell* cell = find_cell(policy, bh, p_obs);
                if (!cell) {
                    missing.push_back(to_string(policy) + "/bh=" + to_code(bh) +
                                      "/p_obs=" + CsvWriter::num(p_obs));
                    continue;
                }
                const MetricsSummary& s = cell->summary;
                char line[160];
                std::snprintf(line, sizeof(line), "  %-10s %-5s  %-19s %-19s %s\n",
                              to_string(policy).c_str(), CsvWriter::num(p_obs).c_str(),
                              pm(s.completion_rate.value, s.completion_rate.sem).c_str(),
                              pm(s.safety_rate.value, s.safety_rate.sem).c_str(),
                              pm(s.cum_reward.mean, s.cum_reward.sem).c_str());
                tables << line;
                bh_csv.add_row({to_string(policy), CsvWriter::num(p_obs),
                                CsvWriter::num(s.completion_rate.value),
                                CsvWriter::num(2 * s.completion_rate.sem),
                                CsvWriter::num(s.safety_rate.value),
                                CsvWriter::num(2 * s.safety_rate.sem),
                                CsvWriter::num(s.cum_reward.mean),
                                CsvWriter::num(2 * s.cum_reward.sem)});
                long_csv.add_row({to_string(policy), CsvWriter::num(p_obs), to_code(bh),
                                  CsvWriter::num(s.n), CsvWriter::num(s.completion_rate.value),
                                  CsvWriter::num(2 * s.completion_rate.sem),
                                  CsvWriter::num(s.true_success_rate.value),
                                  CsvWriter::num(2 * s.true_success_rate.sem),
                                  CsvWriter::num(s.failure_rate.value),
                                  CsvWriter::num(2 * s.failure_rate.sem),
                                  CsvWriter::num(s.safety_rate.value),
                                  CsvWriter::num(2 * s.safety_rate.sem),
                                  CsvWriter::num(s.cum_reward.mean),
                                  CsvWriter::num(2 * s.cum_reward.sem)});
            }
        }
        tables << "\n";
        write_file((fs::path(out_dir) / ("report_bh" + to_code(bh) + ".csv")).string(),
                   bh_csv.str());
    }
    write_file((fs::path(out_dir) / "report_long.csv").string(), long_csv.str());
    if (rendered_tables) *rendered_tables = tables.str();
    return missing;
}

}  // namespace cma
