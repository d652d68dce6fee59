#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace conbandit {

// Sampled cumulative curves for one policy. Two violation measures are kept:
//   vio_horizon: [h t - sum of realized attractiveness]_+ over the horizon
//   vio_clipped: sum over rounds of (h - per-round attractiveness)_+
// The clipped form never forgives a shortfall, so it dominates the horizon
// form; they answer different questions and are never conflated.
struct MetricsTrace {
    std::vector<long> rounds;
    std::vector<double> cum_reward;
    std::vector<double> cum_regret;
    std::vector<double> vio_horizon;
    std::vector<double> vio_clipped;
    std::vector<double> ratio;

    std::size_t size() const noexcept { return rounds.size(); }
};

// Reward earned per unit of clipped violation; infinite when no violation
// has occurred.
inline double reward_violation_ratio(double cum_reward, double vio_clipped) noexcept {
    if (vio_clipped == 0.0) return std::numeric_limits<double>::infinity();
    return cum_reward / vio_clipped;
}

// t * optimal_value minus the realized compound reward, recomputed from the
// per-round reward log.
inline double cumulative_regret(std::span<const double> round_reward_sums,
                                double optimal_value, long t) {
    if (t < 0 || t > static_cast<long>(round_reward_sums.size()))
        throw std::invalid_argument("cumulative_regret: t outside the log");
    double reward = 0.0;
    for (long tau = 0; tau < t; ++tau) reward += round_reward_sums[tau];
    return static_cast<double>(t) * optimal_value - reward;
}

struct ViolationPair {
    double horizon = 0.0;
    double clipped = 0.0;
};

inline ViolationPair cumulative_violation(std::span<const double> round_attractiveness_sums,
                                          double h, long t) {
    if (t < 0 || t > static_cast<long>(round_attractiveness_sums.size()))
        throw std::invalid_argument("cumulative_violation: t outside the log");
    double total = 0.0;
    double clipped = 0.0;
    for (long tau = 0; tau < t; ++tau) {
        const double s = round_attractiveness_sums[tau];
        total += s;
        clipped += std::max(h - s, 0.0);
    }
    return {std::max(h * static_cast<double>(t) - total, 0.0), clipped};
}

// Streaming form of the metrics, fed once per round with the realized sums
// over the selected arms.
class MetricsAccumulator {
public:
    MetricsAccumulator(double optimal_value, double h) : opt_(optimal_value), h_(h) {}

    void add_round(double reward_sum, double attractiveness_sum) noexcept {
        ++t_;
        cum_reward_ += reward_sum;
        cum_attr_ += attractiveness_sum;
        vio_clipped_ += std::max(h_ - attractiveness_sum, 0.0);
    }

    long rounds() const noexcept { return t_; }
    double optimal_value() const noexcept { return opt_; }
    double cum_reward() const noexcept { return cum_reward_; }
    double cum_regret() const noexcept { return static_cast<double>(t_) * opt_ - cum_reward_; }
    double vio_horizon() const noexcept {
        return std::max(h_ * static_cast<double>(t_) - cum_attr_, 0.0);
    }
    double vio_clipped() const noexcept { return vio_clipped_; }
    double ratio() const noexcept { return reward_violation_ratio(cum_reward_, vio_clipped_); }

    void append_row(MetricsTrace& trace) const {
        trace.rounds.push_back(t_);
        trace.cum_reward.push_back(cum_reward());
        trace.cum_regret.push_back(cum_regret());
        trace.vio_horizon.push_back(vio_horizon());
        trace.vio_clipped.push_back(vio_clipped());
        trace.ratio.push_back(ratio());
    }

private:
    double opt_;
    double h_;
    long t_ = 0;
    double cum_reward_ = 0.0;
    double cum_attr_ = 0.0;
    double vio_clipped_ = 0.0;
};

// Pointwise mean across runs, folded in run order. The ratio column is
// recomputed from the averaged reward and violation so it stays the ratio of
// the curves actually reported.
inline MetricsTrace average_traces(std::span<const MetricsTrace> runs) {
    if (runs.empty()) throw std::invalid_argument("average_traces: no runs");
    const std::size_t n = runs.front().size();
    MetricsTrace avg;
    avg.rounds = runs.front().rounds;
    avg.cum_reward.assign(n, 0.0);
    avg.cum_regret.assign(n, 0.0);
    avg.vio_horizon.assign(n, 0.0);
    avg.vio_clipped.assign(n, 0.0);
    avg.ratio.assign(n, 0.0);
    for (const MetricsTrace& run : runs) {
        if (run.size() != n || run.rounds != avg.rounds)
            throw std::invalid_argument("average_traces: runs sampled at different rounds");
        for (std::size_t k = 0; k < n; ++k) {
            avg.cum_reward[k] += run.cum_reward[k];
            avg.cum_regret[k] += run.cum_regret[k];
            avg.vio_horizon[k] += run.vio_horizon[k];
            avg.vio_clipped[k] += run.vio_clipped[k];
        }
    }
    const double inv = 1.0 / static_cast<double>(runs.size());
    for (std::size_t k = 0; k < n; ++k) {
        avg.cum_reward[k] *= inv;
        avg.cum_regret[k] *= inv;
        avg.vio_horizon[k] *= inv;
        avg.vio_clipped[k] *= inv;
        avg.ratio[k] = reward_violation_ratio(avg.cum_reward[k], avg.vio_clipped[k]);
    }
    return avg;
}

} // namespace conbandit
