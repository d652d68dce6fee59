#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "conbandit/env.hpp"
#include "conbandit/metrics.hpp"
#include "conbandit/policies.hpp"
#include "conbandit/rng.hpp"
#include "conbandit/types.hpp"

namespace conbandit {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InstanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& known_policies() {
    static const std::vector<std::string> names = {"conucb", "cucb", "exp3m", "oracle", "uniform"};
    return names;
}

struct ExperimentConfig {
    std::string arms_csv;         // mutually exclusive with `synthetic`
    std::string synthetic;        // generator name: uniform | conflicting
    int K = 0;                    // arm count for synthetic tables
    std::uint64_t gen_seed = 0;   // synthetic table seed (defaults to base_seed)
    bool gen_seed_set = false;
    int L = 1;
    double h = 0.0;
    long T = 1;
    double delta = 0.01;
    std::vector<std::string> policies = known_policies();
    int runs = 1;
    std::uint64_t base_seed = 0;
    std::string out_dir;          // empty: keep results in memory only
    long stride = 50;
    int threads = 0;              // worker threads; 0 = hardware concurrency

    std::uint64_t table_seed() const noexcept { return gen_seed_set ? gen_seed : base_seed; }

    void validate() const {
        if (arms_csv.empty() == synthetic.empty())
            throw ConfigError("config: exactly one of an arms file or a synthetic generator is required");
        if (!synthetic.empty() && K < 2)
            throw ConfigError("config: synthetic tables need K >= 2");
        if (policies.empty()) throw ConfigError("config: no policies requested");
        for (const std::string& p : policies) {
            const auto& known = known_policies();
            if (std::find(known.begin(), known.end(), p) == known.end())
                throw ConfigError("config: unknown policy `" + p + "`");
        }
        if (runs < 1) throw ConfigError("config: need runs >= 1");
        if (stride < 1) throw ConfigError("config: need stride >= 1");
        if (threads < 0) throw ConfigError("config: need threads >= 0");
    }
};

inline ArmTable resolve_table(const ExperimentConfig& cfg) {
    if (!cfg.arms_csv.empty()) {
        if (!std::filesystem::exists(cfg.arms_csv))
            throw IoError("arms file not found: " + cfg.arms_csv);
        try {
            return load_arm_table(cfg.arms_csv);
        } catch (const std::runtime_error& e) {
            throw InstanceError(e.what());
        }
    }
    try {
        return synthetic_instance(cfg.synthetic, cfg.K, cfg.table_seed());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline std::unique_ptr<Policy> make_policy(const std::string& name, const ProblemInstance& inst,
                                           const PolicyVector& x_star) {
    if (name == "conucb") return std::make_unique<ConUcbPolicy>(inst);
    if (name == "cucb") return std::make_unique<CucbPolicy>(inst.K(), inst.L);
    if (name == "exp3m") return std::make_unique<Exp3MPolicy>(inst.K(), inst.L, inst.T);
    if (name == "oracle") return std::make_unique<FixedVectorPolicy>("oracle", x_star, inst.L);
    if (name == "uniform") return std::make_unique<FixedVectorPolicy>(make_uniform_policy(inst.K(), inst.L));
    throw ConfigError("unknown policy `" + name + "`");
}

// The expected cumulative reward line t * (x_star . g) of the optimal
// stationary policy, for t = 1..T.
inline std::vector<double> compute_oracle_line(const ProblemInstance& inst) {
    const PolicyVector x_star = oracle_policy(inst);
    double opt = 0.0;
    for (int i = 0; i < inst.K(); ++i) opt += x_star[i] * inst.arms[i].g_mean();
    std::vector<double> line(static_cast<std::size_t>(inst.T));
    for (long t = 1; t <= inst.T; ++t)
        line[static_cast<std::size_t>(t - 1)] = static_cast<double>(t) * opt;
    return line;
}

// One independent run of one policy: T rounds against the shared reward
// stream, cumulative metrics sampled every `stride` rounds and at T.
inline MetricsTrace simulate_run(const ArmTable& table, const ProblemInstance& inst,
                                 const std::string& policy_name, const PolicyVector& x_star,
                                 double optimal_value, std::uint64_t base_seed, int run,
                                 long stride) {
    const std::unique_ptr<Policy> policy = make_policy(policy_name, inst, x_star);
    Rng policy_rng(mix(mix(base_seed, fnv1a64(policy_name)), static_cast<std::uint64_t>(run)));
    const RewardStream stream{base_seed, static_cast<std::uint64_t>(run)};
    MetricsAccumulator acc(optimal_value, inst.h);
    MetricsTrace trace;
    for (long t = 1; t <= inst.T; ++t) {
        const SelectionSet sel = policy->select(policy_rng);
        const RoundOutcome outcome = sample_round(table, t, sel, stream);
        double reward_sum = 0.0, attr_sum = 0.0;
        for (const RewardSample& s : outcome.samples) {
            reward_sum += s.g;
            attr_sum += s.a;
        }
        acc.add_round(reward_sum, attr_sum);
        policy->observe(outcome);
        if (t % stride == 0 || t == inst.T) acc.append_row(trace);
    }
    return trace;
}

struct PolicyResult {
    std::string name;
    MetricsTrace averaged;

    double final_cum_reward() const { return averaged.cum_reward.back(); }
    double final_cum_regret() const { return averaged.cum_regret.back(); }
    double final_vio_horizon() const { return averaged.vio_horizon.back(); }
    double final_vio_clipped() const { return averaged.vio_clipped.back(); }
    double final_ratio() const { return averaged.ratio.back(); }
};

struct ExperimentResult {
    ArmTable table;
    ProblemInstance instance;
    PolicyVector x_star;
    double optimal_value = 0.0;
    std::vector<PolicyResult> policies;

    const PolicyResult& policy(std::string_view name) const {
        for (const PolicyResult& p : policies)
            if (p.name == name) return p;
        throw std::out_of_range("no such policy result");
    }
};

namespace harness_detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_trace_csv(const std::filesystem::path& path, const MetricsTrace& trace) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "t,cum_reward,cum_regret,vio_horizon,vio_clipped,ratio\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << trace.rounds[k] << ',' << format_double(trace.cum_reward[k]) << ','
            << format_double(trace.cum_regret[k]) << ',' << format_double(trace.vio_horizon[k])
            << ',' << format_double(trace.vio_clipped[k]) << ','
            << format_double(trace.ratio[k]) << '\n';
    }
    if (!out) throw IoError("failed while writing " + path.string());
}

inline void write_optimal_line_csv(const std::filesystem::path& path, double optimal_value,
                                   long T, long stride) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "t,optimal_cum_reward\n";
    for (long t = stride; t <= T; t += stride)
        out << t << ',' << format_double(static_cast<double>(t) * optimal_value) << '\n';
    if (T % stride != 0)
        out << T << ',' << format_double(static_cast<double>(T) * optimal_value) << '\n';
    if (!out) throw IoError("failed while writing " + path.string());
}

inline std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// Everything that determines the outputs is echoed; the thread count is not,
// since the fold order makes results schedule-independent.
inline void write_summary(const std::filesystem::path& path, const ExperimentConfig& cfg,
                          const ExperimentResult& res) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "[config]\n";
    if (!cfg.arms_csv.empty()) out << "arms = " << cfg.arms_csv << '\n';
    else out << "synthetic = " << cfg.synthetic << "\ngen_seed = " << cfg.table_seed() << '\n';
    out << "K = " << res.table.K() << '\n';
    out << "L = " << cfg.L << '\n';
    out << "h = " << format_double(cfg.h) << '\n';
    out << "T = " << cfg.T << '\n';
    out << "delta = " << format_double(cfg.delta) << '\n';
    out << "policies = " << join(cfg.policies, ',') << '\n';
    out << "runs = " << cfg.runs << '\n';
    out << "base_seed = " << cfg.base_seed << '\n';
    out << "stride = " << cfg.stride << '\n';
    out << "optimal_value = " << format_double(res.optimal_value) << '\n';
    for (const PolicyResult& p : res.policies) {
        out << "\n[" << p.name << "]\n";
        out << "cum_reward = " << format_double(p.final_cum_reward()) << '\n';
        out << "cum_regret = " << format_double(p.final_cum_regret()) << '\n';
        out << "vio_horizon = " << format_double(p.final_vio_horizon()) << '\n';
        out << "vio_clipped = " << format_double(p.final_vio_clipped()) << '\n';
        out << "ratio = " << format_double(p.final_ratio()) << '\n';
    }
    if (!out) throw IoError("failed while writing " + path.string());
}

} // namespace harness_detail

// Runs every requested policy for `runs` independent runs of T rounds.
// Reward realizations are shared across policies per (run, round, arm), so
// curve differences reflect decisions only. Runs execute in parallel but are
// folded in run order, making the outputs independent of scheduling; the
// whole pipeline is a deterministic function of (config, base_seed).
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult res;
    res.table = resolve_table(cfg);
    res.instance = ProblemInstance{res.table.arms, cfg.L, cfg.h, cfg.T, cfg.delta};
    try {
        res.instance.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    try {
        res.x_star = oracle_policy(res.instance);
    } catch (const std::invalid_argument& e) {
        throw InstanceError(e.what());
    }
    res.optimal_value = 0.0;
    for (int i = 0; i < res.instance.K(); ++i)
        res.optimal_value += res.x_star[i] * res.instance.arms[i].g_mean();

    const int P = static_cast<int>(cfg.policies.size());
    const int R = cfg.runs;
    std::vector<std::vector<MetricsTrace>> traces(static_cast<std::size_t>(P));
    for (auto& t : traces) t.resize(static_cast<std::size_t>(R));

    auto job = [&](int flat) {
        const int p = flat / R;
        const int r = flat % R;
        traces[p][r] = simulate_run(res.table, res.instance, cfg.policies[p], res.x_star,
                                    res.optimal_value, cfg.base_seed, r, cfg.stride);
    };
    const int jobs = P * R;
    unsigned workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(jobs));
    if (workers <= 1) {
        for (int f = 0; f < jobs; ++f) job(f);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int f = next.fetch_add(1); f < jobs; f = next.fetch_add(1)) job(f);
            });
        for (std::thread& th : pool) th.join();
    }

    res.policies.reserve(static_cast<std::size_t>(P));
    for (int p = 0; p < P; ++p)
        res.policies.push_back({cfg.policies[p], average_traces(traces[static_cast<std::size_t>(p)])});

    if (!cfg.out_dir.empty()) {
        const std::filesystem::path dir(cfg.out_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory " + dir.string());
        for (const PolicyResult& p : res.policies)
            harness_detail::write_trace_csv(dir / (p.name + "_trace.csv"), p.averaged);
        harness_detail::write_optimal_line_csv(dir / "optimal_line.csv", res.optimal_value,
                                               cfg.T, cfg.stride);
        harness_detail::write_summary(dir / "summary.txt", cfg, res);
    }
    return res;
}

} // namespace conbandit
