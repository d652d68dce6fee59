#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace conbandit {

// Selection probabilities, one entry per arm; a valid vector lies in the
// polytope {0 <= x_i <= 1, sum_i x_i = L}.
using PolicyVector = std::vector<double>;

// Exactly L distinct arm indices, ascending.
using SelectionSet = std::vector<int>;

inline constexpr double kPolicySumTol = 1e-9;

// Ground-truth means of one arm's two-level reward; environment side only.
// The two levels are drawn independently, so the compound mean is the product.
struct ArmParams {
    double a_mean = 0.0;  // first level: click-through
    double b_mean = 0.0;  // second level: after-click conversion

    double g_mean() const noexcept { return a_mean * b_mean; }
};

struct ProblemInstance {
    std::vector<ArmParams> arms;
    int L = 1;
    double h = 0.0;    // minimum expected total first-level reward per round
    long T = 1;
    double delta = 0.01;

    int K() const noexcept { return static_cast<int>(arms.size()); }

    // h = 0 would make the threshold vacuous and h >= L is unattainable, so
    // both are rejected.
    void validate() const {
        const int k = K();
        if (k < 1) throw std::invalid_argument("instance: no arms");
        for (const ArmParams& p : arms)
            if (!(p.a_mean >= 0.0 && p.a_mean <= 1.0) || !(p.b_mean >= 0.0 && p.b_mean <= 1.0))
                throw std::invalid_argument("instance: arm mean outside [0,1]");
        if (L < 1 || L > k) throw std::invalid_argument("instance: need 1 <= L <= K");
        if (!(h > 0.0) || !(h < static_cast<double>(L)))
            throw std::invalid_argument("instance: need 0 < h < L");
        if (T < 1) throw std::invalid_argument("instance: need T >= 1");
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("instance: need 0 < delta < 1");
    }
};

inline double compound(double a, double b) noexcept { return a * b; }

struct RewardSample {
    double a = 0.0;
    double b = 0.0;
    double g = 0.0;  // always a * b
};

inline RewardSample make_reward_sample(double a, double b) noexcept { return {a, b, a * b}; }

// Observed feedback for one round; samples[k] belongs to selection[k].
struct RoundOutcome {
    long round = 0;
    SelectionSet selection;
    std::vector<RewardSample> samples;
};

// Running per-arm state. Sums are stored and the averages divide by plays+1;
// that denominator biases them low at small counts, which the confidence
// radius is built to absorb. Deriving the averages from the sums keeps the
// incremental and closed forms identical up to one rounding.
struct ArmStatistics {
    std::uint64_t plays = 0;  // N_i
    double a_sum = 0.0;
    double g_sum = 0.0;

    double a_bar() const noexcept { return a_sum / static_cast<double>(plays + 1); }
    double g_bar() const noexcept { return g_sum / static_cast<double>(plays + 1); }

    void add(const RewardSample& s) noexcept {
        ++plays;
        a_sum += s.a;
        g_sum += s.g;
    }
};

inline ArmStatistics update_statistics(ArmStatistics stats, const RewardSample& s) noexcept {
    stats.add(s);
    return stats;
}

inline bool is_policy_vector(std::span<const double> x, int L, double tol = kPolicySumTol) noexcept {
    double sum = 0.0;
    for (double v : x) {
        if (!(v >= -tol && v <= 1.0 + tol)) return false;
        sum += v;
    }
    return std::abs(sum - static_cast<double>(L)) <= tol;
}

inline bool is_selection_set(const SelectionSet& sel, int K, int L) noexcept {
    if (static_cast<int>(sel.size()) != L) return false;
    for (std::size_t k = 0; k < sel.size(); ++k) {
        if (sel[k] < 0 || sel[k] >= K) return false;
        if (k > 0 && sel[k] <= sel[k - 1]) return false;
    }
    return true;
}

} // namespace conbandit
