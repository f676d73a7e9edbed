#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cma/io.hpp"
#include "cma/pbvi.hpp"
#include "cma/sim.hpp"

namespace cma {

// Experiment description driving solve/sweep/report. Defaults follow the
// transition-matrix evaluation protocol: 5000 episodes per cell, observation
// probabilities {1.0, 0.9, 0.8, 0.6}, all battery-health cohorts, all five
// policies.
struct ExperimentSpec {
    std::string model_path;  // empty = embedded defaults
    std::vector<double> p_obs_grid{1.0, 0.9, 0.8, 0.6};
    std::vector<BatteryHealth> bh_grid{BatteryHealth::Good, BatteryHealth::Medium,
                                       BatteryHealth::Poor};
    std::vector<PolicyKind> policies{PolicyKind::BaselineNoOp, PolicyKind::TrueMdp,
                                     PolicyKind::ObsMdp, PolicyKind::MapMdp, PolicyKind::Pomdp};
    int n_episodes = 5000;
    std::uint64_t base_seed = 0;
    int horizon = 100;
    double gamma = 0.99;
    std::optional<double> sf_onset_override;
    bool diffuse_bh_prior = false;
    std::string out_dir = "out";
    PbviConfig pbvi;

    void validate() const;
};

ExperimentSpec experiment_spec_from_json(const std::string& text);
std::string to_json(const ExperimentSpec& spec);

struct SolvedAssets {
    ModelSpec model_spec;
    CmaModel model;
    ValueFunction vf;
    std::map<double, AlphaSet> alphas_by_p_obs;
};

// Solves the MDP once and one PBVI alpha set per grid observability.
SolvedAssets solve_assets(const ExperimentSpec& spec);

// Writes vf.json and alphas_p<v>.json under spec.out_dir.
void write_assets(const ExperimentSpec& spec, const SolvedAssets& assets);

struct SweepCell {
    PolicyKind policy;
    BatteryHealth bh;
    std::optional<double> p_obs;  // absent for observation-independent policies
    MetricsSummary summary;
};

struct SweepResult {
    std::vector<SweepCell> cells;
};

// Runs every (policy, bh[, p_obs]) cell; BaselineNoOp and TrueMdp do not
// consume observations and run once per battery health. Writes one episode
// CSV per cell plus combined summary.csv / summary.json in spec.out_dir.
SweepResult run_sweep(const ExperimentSpec& spec, const SolvedAssets& assets);

// Reads summary.json from `results_dir`, verifies the expected grid is
// complete, writes per-BH tables (value +/- 2 SEM columns) and a long-format
// CSV with the observation-independent policies replicated across the grid.
// Returns the missing (policy, bh, p_obs) triples, empty when complete.
std::vector<std::string> write_report(const ExperimentSpec& spec, const std::string& results_dir,
                                      const std::string& out_dir, std::string* rendered_tables);

std::string episode_csv(const SweepCell& cell, const std::vector<SimOutcome>& episodes);
std::string summary_json(const SweepResult& result);
std::string summary_csv(const SweepResult& result);

}  // namespace cma
