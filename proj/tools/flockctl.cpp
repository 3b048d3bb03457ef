// flockctl: command-line front end over the C interface of libflock.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flock/flock.h"

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kConfigError = 2, kRuntimeError = 3, kBoundFailure = 4 };

int report(flock_status status) {
    std::fprintf(stderr, "flockctl: %s\n", flock_last_error());
    return status == FLOCK_ERR_CONFIG ? kConfigError : kRuntimeError;
}

// Anything that goes wrong while reading or overriding the config, including
// a missing file, is a config error.
int config_failure() {
    std::fprintf(stderr, "flockctl: %s\n", flock_last_error());
    return kConfigError;
}

struct Common {
    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "JSON config file")->required();
    cmd->add_option("--out", c.out_dir, "Output directory (created if missing)");
    cmd->add_option("--set", c.overrides, "Override a config key, key=value (repeatable)");
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [&c](const std::uint64_t& s) {
            c.seed = s;
            c.seed_given = true;
        },
        "Master seed, overrides the config");
}

class ConfigHandle {
  public:
    ~ConfigHandle() { flock_config_free(cfg_); }
    flock_config* get() const { return cfg_; }

    flock_status load(const Common& c) {
        if (auto s = flock_config_load(c.config_path.c_str(), &cfg_); s != FLOCK_OK) return s;
        for (const auto& o : c.overrides)
            if (auto s = flock_config_set(cfg_, o.c_str()); s != FLOCK_OK) return s;
        if (c.seed_given) return flock_config_set_seed(cfg_, c.seed);
        return FLOCK_OK;
    }

  private:
    flock_config* cfg_ = nullptr;
};

std::string prepare_out(const Common& c, const char* file) {
    std::filesystem::create_directories(c.out_dir);
    return (std::filesystem::path(c.out_dir) / file).string();
}

int run_simulate(const Common& c) {
    ConfigHandle cfg;
    if (cfg.load(c) != FLOCK_OK) return config_failure();
    flock_trajectory* traj = nullptr;
    if (auto s = flock_simulate(cfg.get(), &traj); s != FLOCK_OK) return report(s);
    const std::string path = prepare_out(c, "trajectory.csv");
    const auto s = flock_trajectory_write(traj, path.c_str());
    const std::size_t rows = flock_trajectory_rows(traj);
    flock_trajectory_free(traj);
    if (s != FLOCK_OK) return report(s);
    std::printf("wrote %zu rows to %s\n", rows, path.c_str());
    return kOk;
}

int run_sweep(const Common& c, std::uint64_t runs, unsigned threads) {
    ConfigHandle cfg;
    if (cfg.load(c) != FLOCK_OK) return config_failure();
    flock_sweep* sweep = nullptr;
    if (auto s = flock_sweep_run(cfg.get(), runs, threads, &sweep); s != FLOCK_OK) return report(s);
    const std::string path = prepare_out(c, "sweep.csv");
    const auto s = flock_sweep_write(sweep, path.c_str());
    const std::size_t cells = flock_sweep_cells(sweep);
    flock_sweep_free(sweep);
    if (s != FLOCK_OK) return report(s);
    std::printf("wrote %zu cells to %s\n", cells, path.c_str());
    return kOk;
}

int run_critical_velocity(const Common& c, std::uint64_t samples) {
    ConfigHandle cfg;
    if (cfg.load(c) != FLOCK_OK) return config_failure();
    const std::string path = prepare_out(c, "critical_velocity.csv");
    if (auto s = flock_critical_velocity_write(cfg.get(), samples, path.c_str()); s != FLOCK_OK) return report(s);
    std::printf("wrote %s\n", path.c_str());
    return kOk;
}

int run_verify_bounds(const Common& c) {
    ConfigHandle cfg;
    if (cfg.load(c) != FLOCK_OK) return config_failure();
    flock_bound_report* rep = nullptr;
    if (auto s = flock_verify_bounds(cfg.get(), &rep); s != FLOCK_OK) return report(s);
    std::fputs(flock_bound_report_text(rep), stdout);
    const std::string path = prepare_out(c, "bounds_report.txt");
    const auto s = flock_bound_report_write(rep, path.c_str());
    const bool passed = flock_bound_report_passed(rep);
    flock_bound_report_free(rep);
    if (s != FLOCK_OK) return report(s);
    return passed ? kOk : kBoundFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cucker-Smale flocking with random link failures"};
    app.set_version_flag("--version", std::string(flock_version()));
    app.require_subcommand(1);

    Common common;
    std::uint64_t runs = 100;
    std::uint64_t samples = 10000;
    unsigned threads = 0;

    auto* simulate = app.add_subcommand("simulate", "Run one trajectory and write trajectory.csv");
    add_common(simulate, common);

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo runs over a (k, alpha, lambda) grid; writes sweep.csv");
    add_common(sweep, common);
    sweep->add_option("--runs", runs, "Runs per grid cell")->check(CLI::PositiveNumber);
    sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* critical = app.add_subcommand("critical-velocity",
                                        "Estimate the expected Fiedler number of the failure graph");
    add_common(critical, common);
    critical->add_option("--samples", samples, "Monte Carlo samples per cell")->check(CLI::PositiveNumber);

    auto* verify = app.add_subcommand("verify-bounds", "Audit the bound chain along one trajectory");
    add_common(verify, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*simulate) return run_simulate(common);
        if (*sweep) return run_sweep(common, runs, threads);
        if (*critical) return run_critical_velocity(common, samples);
        if (*verify) return run_verify_bounds(common);
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "flockctl: %s\n", e.what());
        return kRuntimeError;
    }
    return kUsage;
}
