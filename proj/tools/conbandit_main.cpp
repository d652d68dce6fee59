#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "conbandit/conbandit.hpp"

namespace {

// exit codes: 0 ok, 2 config error, 3 instance error, 4 I/O error, 5 internal
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kInstanceError = 3;
constexpr int kIoError = 4;
constexpr int kInternalError = 5;

int run_command(const conbandit::ExperimentConfig& cfg) {
    try {
        const conbandit::ExperimentResult res = conbandit::run_experiment(cfg);
        std::printf("K=%d optimal_value=%.6f\n", res.table.K(), res.optimal_value);
        for (const conbandit::PolicyResult& p : res.policies)
            std::printf("%-8s cum_reward=%.3f cum_regret=%.3f vio_horizon=%.3f vio_clipped=%.3f ratio=%g\n",
                        p.name.c_str(), p.final_cum_reward(), p.final_cum_regret(),
                        p.final_vio_horizon(), p.final_vio_clipped(), p.final_ratio());
        if (!cfg.out_dir.empty()) std::printf("traces written to %s\n", cfg.out_dir.c_str());
        return kOk;
    } catch (const conbandit::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const conbandit::InstanceError& e) {
        std::fprintf(stderr, "instance error: %s\n", e.what());
        return kInstanceError;
    } catch (const conbandit::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kIoError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInternalError;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constrained multiple-play bandit simulator"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print help");  // frees -h for the threshold flag
    // app-level so values land before subcommand requirements are checked;
    // file keys live in a [run] section and command-line flags override them
    app.set_config("--config", "", "Read options from an INI/TOML file; flags override");

    conbandit::ExperimentConfig cfg;
    CLI::App* run = app.add_subcommand(
        "run", "Run policies on an arm table and write averaged metric traces");
    run->set_help_flag("--help", "Print help");
    CLI::Option* arms = run->add_option("--arms", cfg.arms_csv,
                                        "Arm table CSV with header arm_id,a_mean,b_mean");
    CLI::Option* synth = run->add_option("--synthetic", cfg.synthetic,
                                         "Synthetic table generator: uniform | conflicting");
    arms->excludes(synth);
    synth->excludes(arms);
    run->add_option("--K", cfg.K, "Arm count for --synthetic");
    run->add_option("--L", cfg.L, "Arms selected per round")->required();
    run->add_option("--h", cfg.h, "Attractiveness threshold, 0 < h < L")->required();
    run->add_option("--T", cfg.T, "Rounds per run")->required();
    run->add_option("--delta", cfg.delta, "Allowed failure probability")->required();
    run->add_option("--policies", cfg.policies,
                    "Comma-separated subset of: conucb,cucb,exp3m,oracle,uniform")
        ->delimiter(',');
    run->add_option("--runs", cfg.runs, "Independent runs per policy");
    run->add_option("--seed", cfg.base_seed, "Base seed; outputs are a pure function of config+seed");
    CLI::Option* gen_seed = run->add_option("--gen-seed", cfg.gen_seed,
                                            "Synthetic table seed (default: --seed)");
    run->add_option("--out", cfg.out_dir, "Output directory for traces and summary")->required();
    run->add_option("--stride", cfg.stride, "Trace sampling stride in rounds");
    run->add_option("--threads", cfg.threads, "Worker threads; 0 = hardware concurrency");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }
    cfg.gen_seed_set = gen_seed->count() > 0;
    return run_command(cfg);
}
