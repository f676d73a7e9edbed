// Exercises the command-line driver end to end through std::system. The
// binary path arrives via the CMA_CLI environment variable set by CTest.

#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "cma/io.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* path = std::getenv("CMA_CLI");
    REQUIRE(path != nullptr);
    return path;
}

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("cma_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("export-defaults then validate round-trips") {
    TempDir tmp;
    const std::string model = tmp / "model.json";
    CHECK(run("model export-defaults --out " + model) == 0);
    CHECK(fs::exists(model));
    CHECK(run("model validate --model " + model) == 0);
    CHECK(run("model validate") == 0);
}

TEST_CASE("validate rejects a malformed model with exit code 1") {
    TempDir tmp;
    const std::string model = tmp / "broken.json";
    cma::write_file(model, R"({"factors": {}})");
    CHECK(run("model validate --model " + model) == 1);
}

TEST_CASE("solve mdp is deterministic and idempotent") {
    TempDir tmp;
    const std::string a = tmp / "vf_a.json";
    const std::string b = tmp / "vf_b.json";
    CHECK(run("solve mdp --out " + a) == 0);
    CHECK(run("solve mdp --out " + b) == 0);
    CHECK(cma::read_file(a) == cma::read_file(b));
}

TEST_CASE("solve pomdp writes alphas and the observation model") {
    TempDir tmp;
    const std::string alphas = tmp / "alphas.json";
    const std::string obs = tmp / "obs.json";
    CHECK(run("solve pomdp --p-obs 0.9 --expansions 2 --backups 3 --out " + alphas +
              " --obs-out " + obs) == 0);
    CHECK(fs::exists(alphas));
    CHECK(fs::exists(obs));
    CHECK(run("solve pomdp --p-obs 0.3 --out " + alphas) == 1);
}

TEST_CASE("sweep and report produce the full grid") {
    TempDir tmp;
    const std::string out = tmp / "results";
    // tiny but complete sweep: 2 policies x 1 bh x 2 p_obs
    CHECK(run("sweep --episodes 5 --seed 1 --bh P --policy noop map_mdp --p-obs 0.9 0.6 --out " +
              out) == 0);
    CHECK(fs::exists(fs::path(out) / "summary.json"));
    CHECK(fs::exists(fs::path(out) / "summary.csv"));
    CHECK(fs::exists(fs::path(out) / "cell_noop_bhP.csv"));
    CHECK(fs::exists(fs::path(out) / "cell_map_mdp_bhP_po0.9.csv"));

    TempDir cfg_dir;
    const std::string cfg = cfg_dir / "spec.json";
    cma::write_file(cfg, R"({"bh": ["P"], "policies": ["noop", "map_mdp"], "p_obs": [0.9, 0.6]})");
    CHECK(run("report --results " + out + " --config " + cfg + " --out " + (tmp / "report")) == 0);
    CHECK(fs::exists(fs::path(tmp / "report") / "report_long.csv"));
    CHECK(fs::exists(fs::path(tmp / "report") / "report_bhP.csv"));

    // a missing cell (pomdp never swept) exits with code 2
    cma::write_file(cfg, R"({"bh": ["P"], "policies": ["pomdp"], "p_obs": [0.9]})");
    CHECK(run("report --results " + out + " --config " + cfg + " --out " + (tmp / "report2")) ==
          2);
}

TEST_CASE("sweep results are byte-identical across runs") {
    TempDir tmp;
    const std::string out_a = tmp / "a";
    const std::string out_b = tmp / "b";
    const std::string flags = "sweep --episodes 8 --seed 42 --bh G --policy true_mdp obs_mdp "
                              "--p-obs 0.8 --out ";
    CHECK(run(flags + out_a) == 0);
    CHECK(run(flags + out_b) == 0);
    CHECK(cma::read_file((fs::path(out_a) / "summary.csv").string()) ==
          cma::read_file((fs::path(out_b) / "summary.csv").string()));
    CHECK(cma::read_file((fs::path(out_a) / "cell_obs_mdp_bhG_po0.8.csv").string()) ==
          cma::read_file((fs::path(out_b) / "cell_obs_mdp_bhG_po0.8.csv").string()));
}
