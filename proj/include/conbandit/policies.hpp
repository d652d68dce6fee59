#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "conbandit/lp.hpp"
#include "conbandit/rng.hpp"
#include "conbandit/rounding.hpp"
#include "conbandit/types.hpp"

namespace conbandit {

// Confidence radius sqrt(gamma * mu / n) + gamma / n.
inline double radius(double mu, double n, double gamma) noexcept {
    return std::sqrt(gamma * mu / n) + gamma / n;
}

// Radius scale; gamma >= 1 is required for the optimistic index of an
// unplayed arm to start at 1.
struct ConfidenceParams {
    double gamma = 1.0;

    static ConfidenceParams for_instance(const ProblemInstance& inst) {
        return {72.0 * std::log(8.0 * inst.K() * static_cast<double>(inst.T) / inst.delta)};
    }
};

// Optimistic index min{1, bar + 2 R(bar, N+1)}.
inline double ucb_index(double bar, std::uint64_t plays, double gamma) noexcept {
    const double n = static_cast<double>(plays + 1);
    return std::min(1.0, bar + 2.0 * radius(bar, n, gamma));
}

inline void ucb_indices(std::span<const ArmStatistics> stats, double gamma,
                        std::span<double> a_hat, std::span<double> g_hat) {
    for (std::size_t i = 0; i < stats.size(); ++i) {
        a_hat[i] = ucb_index(stats[i].a_bar(), stats[i].plays, gamma);
        g_hat[i] = ucb_index(stats[i].g_bar(), stats[i].plays, gamma);
    }
}

// A policy proposes exactly L arms each round, then absorbs the observed
// rewards of those arms. select/observe alternate strictly.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string_view name() const = 0;
    virtual SelectionSet select(Rng& rng) = 0;
    virtual void observe(const RoundOutcome& outcome) = 0;
};

namespace policy_detail {

inline void check_outcome(const RoundOutcome& outcome, long expected_round, int K, int L) {
    if (outcome.round != expected_round)
        throw std::invalid_argument("policy: outcome round mismatch");
    if (static_cast<int>(outcome.selection.size()) != L)
        throw std::invalid_argument("policy: outcome must cover exactly L arms");
    if (outcome.samples.size() != outcome.selection.size())
        throw std::invalid_argument("policy: samples do not match selection");
    for (int i : outcome.selection)
        if (i < 0 || i >= K) throw std::invalid_argument("policy: arm index out of range");
}

} // namespace policy_detail

// Optimism-driven constrained selection: each round solves
//   maximize x . g_hat  subject to  x . a_hat >= h, x in the polytope,
// rounds the solution to an integral set, and updates the played arms'
// statistics. When the threshold is unattainable even optimistically, the
// attractiveness-maximizing vertex is played instead.
class ConUcbPolicy final : public Policy {
public:
    ConUcbPolicy(int K, int L, double h, double gamma)
        : K_(K), L_(L), h_(h), gamma_(gamma), stats_(static_cast<std::size_t>(K)),
          a_hat_(static_cast<std::size_t>(K), 1.0), g_hat_(static_cast<std::size_t>(K), 1.0) {
        if (K < 1 || L < 1 || L > K) throw std::invalid_argument("conucb: need 1 <= L <= K");
        if (!(h >= 0.0)) throw std::invalid_argument("conucb: need h >= 0");
        if (!(gamma >= 1.0)) throw std::invalid_argument("conucb: need gamma >= 1");
    }

    explicit ConUcbPolicy(const ProblemInstance& inst)
        : ConUcbPolicy(inst.K(), inst.L, inst.h, ConfidenceParams::for_instance(inst).gamma) {}

    std::string_view name() const override { return "conucb"; }

    SelectionSet select(Rng& rng) override {
        LpResult lp = solve_constrained_selection(g_hat_, a_hat_, L_, h_);
        if (lp.optimal()) {
            last_x_ = std::move(lp.x);
            last_objective_ = lp.objective;
            last_lp_feasible_ = true;
        } else {
            last_x_ = fallback_vector(a_hat_, L_);
            last_objective_ = 0.0;
            for (int i = 0; i < K_; ++i) last_objective_ += g_hat_[i] * last_x_[i];
            last_lp_feasible_ = false;
        }
        return dependent_rounding(last_x_, rng);
    }

    void observe(const RoundOutcome& outcome) override {
        policy_detail::check_outcome(outcome, t_, K_, L_);
        for (std::size_t k = 0; k < outcome.selection.size(); ++k) {
            const int i = outcome.selection[k];
            stats_[i].add(outcome.samples[k]);
            a_hat_[i] = ucb_index(stats_[i].a_bar(), stats_[i].plays, gamma_);
            g_hat_[i] = ucb_index(stats_[i].g_bar(), stats_[i].plays, gamma_);
        }
        ++t_;
    }

    long round() const noexcept { return t_; }
    double gamma() const noexcept { return gamma_; }
    std::span<const ArmStatistics> statistics() const noexcept { return stats_; }
    std::span<const double> attractiveness_ucb() const noexcept { return a_hat_; }
    std::span<const double> reward_ucb() const noexcept { return g_hat_; }
    const PolicyVector& last_policy_vector() const noexcept { return last_x_; }
    double last_objective() const noexcept { return last_objective_; }
    bool last_lp_feasible() const noexcept { return last_lp_feasible_; }

private:
    int K_;
    int L_;
    double h_;
    double gamma_;
    std::vector<ArmStatistics> stats_;
    std::vector<double> a_hat_, g_hat_;
    PolicyVector last_x_;
    double last_objective_ = 0.0;
    bool last_lp_feasible_ = true;
    long t_ = 1;
};

// Index of the unconstrained multiple-play UCB baseline. Unplayed arms rank
// first; ln 1 = 0 at t = 1 is harmless since every arm is unplayed then.
inline double cucb_index(double g_bar, std::uint64_t plays, double t) noexcept {
    if (plays == 0) return std::numeric_limits<double>::infinity();
    return g_bar + std::sqrt(3.0 * std::log(t) / (2.0 * static_cast<double>(plays)));
}

// Top-L arms by compound-reward UCB index; ignores the threshold entirely.
class CucbPolicy final : public Policy {
public:
    CucbPolicy(int K, int L) : K_(K), L_(L), stats_(static_cast<std::size_t>(K)), order_(static_cast<std::size_t>(K)) {
        if (K < 1 || L < 1 || L > K) throw std::invalid_argument("cucb: need 1 <= L <= K");
        std::iota(order_.begin(), order_.end(), 0);
    }

    std::string_view name() const override { return "cucb"; }

    SelectionSet select(Rng&) override {
        const double scale = std::sqrt(3.0 * std::log(static_cast<double>(t_)) / 2.0);
        index_.resize(stats_.size());
        for (std::size_t i = 0; i < stats_.size(); ++i) {
            index_[i] = stats_[i].plays == 0
                            ? std::numeric_limits<double>::infinity()
                            : stats_[i].g_bar() + scale / std::sqrt(static_cast<double>(stats_[i].plays));
        }
        std::iota(order_.begin(), order_.end(), 0);
        if (L_ < K_) {
            std::nth_element(order_.begin(), order_.begin() + L_, order_.end(), [&](int l, int r) {
                if (index_[l] != index_[r]) return index_[l] > index_[r];
                return l < r;
            });
        }
        SelectionSet out(order_.begin(), order_.begin() + L_);
        std::sort(out.begin(), out.end());
        return out;
    }

    void observe(const RoundOutcome& outcome) override {
        policy_detail::check_outcome(outcome, t_, K_, L_);
        for (std::size_t k = 0; k < outcome.selection.size(); ++k)
            stats_[outcome.selection[k]].add(outcome.samples[k]);
        ++t_;
    }

    long round() const noexcept { return t_; }
    std::span<const ArmStatistics> statistics() const noexcept { return stats_; }

private:
    int K_;
    int L_;
    std::vector<ArmStatistics> stats_;
    std::vector<int> order_;
    std::vector<double> index_;
    long t_ = 1;
};

// Exploration share for the multiple-play exponential-weights baseline,
// tuned for horizon T.
inline double exp3m_gamma(int K, int L, long T) {
    if (K == L) return 0.0;
    const double e1 = std::exp(1.0) - 1.0;
    return std::min(1.0, std::sqrt(static_cast<double>(K) * std::log(static_cast<double>(K) / L) /
                                   (e1 * L * static_cast<double>(T))));
}

// Selection probabilities p_i = L ((1-g) w'_i / W' + g/K), where w' caps
// weights above a level alpha chosen so the largest probability is exactly 1.
// Fewer than L arms can be capped, so the descending scan for alpha only ever
// needs the top L weights.
inline PolicyVector exp3m_probabilities(std::span<const double> w, int L, double gamma_e) {
    const int K = static_cast<int>(w.size());
    if (K < 1 || L < 1 || L > K) throw std::invalid_argument("exp3m_probabilities: need 1 <= L <= K");
    if (!(gamma_e >= 0.0 && gamma_e <= 1.0))
        throw std::invalid_argument("exp3m_probabilities: need gamma in [0,1]");
    PolicyVector p(static_cast<std::size_t>(K));
    if (L == K) {
        std::fill(p.begin(), p.end(), 1.0);
        return p;
    }
    double W = 0.0;
    double wmax = 0.0;
    for (double v : w) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("exp3m_probabilities: weights must be positive and finite");
        W += v;
        wmax = std::max(wmax, v);
    }
    const auto prob = [&](double wi, double Wp) {
        return L * ((1.0 - gamma_e) * wi / Wp + gamma_e / K);
    };
    if (prob(wmax, W) <= 1.0) {
        for (int i = 0; i < K; ++i) p[i] = prob(w[i], W);
        return p;
    }

    const int scan = std::min(L + 1, K);
    std::vector<int> order(static_cast<std::size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + scan, order.end(), [&](int l, int r) {
        if (w[l] != w[r]) return w[l] > w[r];
        return l < r;
    });
    int capped = -1;
    double alpha = 0.0;
    double prefix = 0.0;
    for (int m = 1; m < scan; ++m) {
        prefix += w[order[m - 1]];
        const double rest = W - prefix;
        const double denom = L * (1.0 - gamma_e) - m * (1.0 - L * gamma_e / K);
        if (denom <= 0.0) break;
        const double cand = (1.0 - L * gamma_e / K) * rest / denom;
        if (cand <= w[order[m - 1]] && cand >= w[order[m]]) {
            capped = m;
            alpha = cand;
            break;
        }
    }
    if (capped < 0) throw std::logic_error("exp3m_probabilities: no valid weight cap");
    double Wp = 0.0;  // sum of the capped weight vector min(w_i, alpha)
    for (int i = 0; i < K; ++i) Wp += std::min(w[i], alpha);
    for (int i = 0; i < K; ++i) p[i] = std::min(1.0, prob(std::min(w[i], alpha), Wp));
    for (int m = 0; m < capped; ++m) p[order[m]] = 1.0;
    return p;
}

// Exponential weights on the compound rewards with importance weighting;
// arms selected with probability 1 are not reweighted.
class Exp3MPolicy final : public Policy {
public:
    Exp3MPolicy(int K, int L, double gamma_e)
        : K_(K), L_(L), gamma_e_(gamma_e), w_(static_cast<std::size_t>(K), 1.0) {
        if (K < 1 || L < 1 || L > K) throw std::invalid_argument("exp3m: need 1 <= L <= K");
        if (!(gamma_e >= 0.0 && gamma_e <= 1.0)) throw std::invalid_argument("exp3m: need gamma in [0,1]");
    }

    Exp3MPolicy(int K, int L, long T) : Exp3MPolicy(K, L, exp3m_gamma(K, L, T)) {}

    std::string_view name() const override { return "exp3m"; }

    SelectionSet select(Rng& rng) override {
        p_ = exp3m_probabilities(w_, L_, gamma_e_);
        return dependent_rounding(p_, rng);
    }

    void observe(const RoundOutcome& outcome) override {
        policy_detail::check_outcome(outcome, t_, K_, L_);
        const double rate = L_ * gamma_e_ / K_;
        for (std::size_t k = 0; k < outcome.selection.size(); ++k) {
            const int i = outcome.selection[k];
            if (p_[i] < 1.0) w_[i] *= std::exp(rate * outcome.samples[k].g / p_[i]);
        }
        double wmax = 0.0;
        for (double v : w_) wmax = std::max(wmax, v);
        if (wmax > 1e150)
            for (double& v : w_) v /= wmax;  // probabilities depend on ratios only
        ++t_;
    }

    long round() const noexcept { return t_; }
    double gamma_e() const noexcept { return gamma_e_; }
    std::span<const double> weights() const noexcept { return w_; }
    const PolicyVector& last_probabilities() const noexcept { return p_; }

private:
    int K_;
    int L_;
    double gamma_e_;
    std::vector<double> w_;
    PolicyVector p_;
    long t_ = 1;
};

// Optimal stationary selection probabilities computed from the true means.
inline PolicyVector oracle_policy(const ProblemInstance& inst) {
    inst.validate();
    const int K = inst.K();
    std::vector<double> a(static_cast<std::size_t>(K)), g(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) {
        a[i] = inst.arms[i].a_mean;
        g[i] = inst.arms[i].g_mean();
    }
    LpResult lp = solve_constrained_selection(g, a, inst.L, inst.h);
    if (!lp.optimal())
        throw std::invalid_argument("oracle_policy: infeasible instance (threshold above attainable attractiveness)");
    return lp.x;
}

// Plays a fixed probabilistic selection vector every round.
class FixedVectorPolicy final : public Policy {
public:
    FixedVectorPolicy(std::string_view name, PolicyVector x, int L)
        : name_(name), x_(std::move(x)), L_(L) {
        if (!is_policy_vector(x_, L_))
            throw std::invalid_argument("fixed policy: vector outside the polytope");
    }

    std::string_view name() const override { return name_; }

    SelectionSet select(Rng& rng) override { return dependent_rounding(x_, rng); }

    void observe(const RoundOutcome& outcome) override {
        policy_detail::check_outcome(outcome, t_, static_cast<int>(x_.size()), L_);
        ++t_;
    }

    const PolicyVector& vector() const noexcept { return x_; }

private:
    std::string name_;
    PolicyVector x_;
    int L_;
    long t_ = 1;
};

inline FixedVectorPolicy make_oracle_policy(const ProblemInstance& inst) {
    return {"oracle", oracle_policy(inst), inst.L};
}

inline FixedVectorPolicy make_uniform_policy(int K, int L) {
    if (K < 1 || L < 1 || L > K) throw std::invalid_argument("uniform policy: need 1 <= L <= K");
    return {"uniform", PolicyVector(static_cast<std::size_t>(K), static_cast<double>(L) / K), L};
}

} // namespace conbandit
