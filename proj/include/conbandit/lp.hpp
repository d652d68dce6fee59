#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "conbandit/types.hpp"

namespace conbandit {

enum class LpStatus { optimal, infeasible };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    PolicyVector x;          // populated iff optimal
    double objective = 0.0;  // g_hat . x

    bool optimal() const noexcept { return status == LpStatus::optimal; }
};

// Sum of the L largest entries.
inline double top_l_sum(std::span<const double> v, int L) {
    const int K = static_cast<int>(v.size());
    if (L <= 0) return 0.0;
    if (L >= K) return std::accumulate(v.begin(), v.end(), 0.0);
    std::vector<double> tmp(v.begin(), v.end());
    std::nth_element(tmp.begin(), tmp.begin() + L, tmp.end(), std::greater<>());
    double s = 0.0;
    for (int k = 0; k < L; ++k) s += tmp[k];
    return s;
}

// True iff some selection of L arms reaches the threshold.
inline bool feasible(std::span<const double> a_hat, int L, double h) {
    if (L < 1 || L > static_cast<int>(a_hat.size()))
        throw std::invalid_argument("feasible: need 1 <= L <= K");
    return top_l_sum(a_hat, L) >= h;
}

// Indicator of the top-L arms by attractiveness (ties to the lower index):
// the violation-minimizing member of the polytope, used when the threshold
// is unattainable.
inline PolicyVector fallback_vector(std::span<const double> a_hat, int L) {
    const int K = static_cast<int>(a_hat.size());
    if (L < 1 || L > K) throw std::invalid_argument("fallback_vector: need 1 <= L <= K");
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::nth_element(order.begin(), order.begin() + L, order.end(), [&](int l, int r) {
        if (a_hat[l] != a_hat[r]) return a_hat[l] > a_hat[r];
        return l < r;
    });
    PolicyVector x(K, 0.0);
    for (int k = 0; k < L; ++k) x[order[k]] = 1.0;
    return x;
}

namespace lp_detail {

struct ScoredArm {
    double score;
    double a;
    int idx;
};

// Larger score first, then larger attractiveness, then smaller index. The
// attractiveness key resolves score ties toward the selection with the larger
// attractiveness sum, which keeps that sum nondecreasing in the multiplier.
inline bool ranks_before(const ScoredArm& l, const ScoredArm& r) noexcept {
    if (l.score != r.score) return l.score > r.score;
    if (l.a != r.a) return l.a > r.a;
    return l.idx < r.idx;
}

struct TopL {
    double sum_a = 0.0;
    double sum_g = 0.0;
};

class ParametricSelector {
public:
    ParametricSelector(std::span<const double> g, std::span<const double> a, int L)
        : g_(g), a_(a), L_(L), arms_(g.size()) {}

    // Top-L totals for scores g + lam * a; optionally captures the set.
    TopL eval(double lam, std::vector<int>* set = nullptr) {
        const int K = static_cast<int>(g_.size());
        for (int i = 0; i < K; ++i) arms_[i] = {g_[i] + lam * a_[i], a_[i], i};
        if (L_ < K)
            std::nth_element(arms_.begin(), arms_.begin() + L_, arms_.end(), ranks_before);
        TopL out;
        for (int k = 0; k < L_; ++k) {
            out.sum_a += arms_[k].a;
            out.sum_g += g_[arms_[k].idx];
        }
        if (set) {
            set->clear();
            for (int k = 0; k < L_; ++k) set->push_back(arms_[k].idx);
        }
        return out;
    }

private:
    std::span<const double> g_, a_;
    int L_;
    std::vector<ScoredArm> arms_;
};

} // namespace lp_detail

// Maximizes g_hat . x over {0 <= x <= 1, sum x = L, a_hat . x >= h}.
//
// The maximizer of (g_hat + lam * a_hat) . x over the box-and-sum polytope is
// a top-L selection, and its attractiveness sum is nondecreasing in lam, so
// the binding multiplier is bracketed by bisection. The two selections on
// either side of the crossover differ only in arms whose scores tie there;
// exchanging those arms one at a time and splitting the exchange that crosses
// the threshold yields a basic solution with at most two fractional
// coordinates and the constraint tight, which together with the multiplier
// satisfies the optimality conditions.
inline LpResult solve_constrained_selection(std::span<const double> g_hat,
                                            std::span<const double> a_hat,
                                            int L, double h) {
    const int K = static_cast<int>(g_hat.size());
    if (static_cast<int>(a_hat.size()) != K)
        throw std::invalid_argument("solve_constrained_selection: g_hat/a_hat size mismatch");
    if (K < 1 || L < 1 || L > K)
        throw std::invalid_argument("solve_constrained_selection: need 1 <= L <= K");
    if (!(h >= 0.0))
        throw std::invalid_argument("solve_constrained_selection: need h >= 0");

    LpResult res;
    auto finish = [&](const std::vector<int>& ones) -> LpResult& {
        res.status = LpStatus::optimal;
        res.x.assign(K, 0.0);
        for (int i : ones) res.x[i] = 1.0;
        return res;
    };
    auto set_objective = [&] {
        double obj = 0.0;
        for (int i = 0; i < K; ++i) obj += g_hat[i] * res.x[i];
        res.objective = obj;
    };

    if (L == K) {
        double sa = 0.0;
        for (double v : a_hat) sa += v;
        if (sa < h) return res;
        res.status = LpStatus::optimal;
        res.x.assign(K, 1.0);
        set_objective();
        return res;
    }
    if (top_l_sum(a_hat, L) < h) return res;

    lp_detail::ParametricSelector sel(g_hat, a_hat, L);
    std::vector<int> chosen;
    if (sel.eval(0.0, &chosen).sum_a >= h) {
        // Threshold slack at the unconstrained optimum: integral vertex.
        finish(chosen);
        set_objective();
        return res;
    }

    // Bracket the smallest multiplier whose top-L meets the threshold.
    double lo = 0.0, hi = 1.0;
    bool bracketed = false;
    while (hi <= 1e18) {
        if (sel.eval(hi).sum_a >= h) { bracketed = true; break; }
        lo = hi;
        hi *= 2.0;
    }
    if (!bracketed) {
        // h sits at the attainable maximum; every feasible point is a maximal
        // attractiveness selection, so take the best of those.
        std::vector<int> order(K);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int l, int r) {
            if (a_hat[l] != a_hat[r]) return a_hat[l] > a_hat[r];
            if (g_hat[l] != g_hat[r]) return g_hat[l] > g_hat[r];
            return l < r;
        });
        order.resize(L);
        finish(order);
        set_objective();
        return res;
    }
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (sel.eval(mid).sum_a >= h ? hi : lo) = mid;
    }

    std::vector<int> above_set;
    const lp_detail::TopL below = sel.eval(lo, &chosen);
    sel.eval(hi, &above_set);

    finish(chosen);
    std::vector<char> in_below(K, 0), in_above(K, 0);
    for (int i : chosen) in_below[i] = 1;
    for (int i : above_set) in_above[i] = 1;
    std::vector<int> enter, leave;
    for (int i : above_set)
        if (!in_below[i]) enter.push_back(i);
    for (int i : chosen)
        if (!in_above[i]) leave.push_back(i);
    std::sort(enter.begin(), enter.end(), [&](int l, int r) {
        if (a_hat[l] != a_hat[r]) return a_hat[l] > a_hat[r];
        return l < r;
    });
    std::sort(leave.begin(), leave.end(), [&](int l, int r) {
        if (a_hat[l] != a_hat[r]) return a_hat[l] < a_hat[r];
        return l < r;
    });

    // Pair the k-th entering arm with the k-th leaving one and apply exchanges
    // by decreasing attractiveness gain; the exchange that crosses the
    // threshold is split to make the constraint tight.
    const std::size_t n_pairs = std::min(enter.size(), leave.size());
    std::vector<std::size_t> order(n_pairs);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return a_hat[enter[l]] - a_hat[leave[l]] > a_hat[enter[r]] - a_hat[leave[r]];
    });
    double cur = below.sum_a;
    for (std::size_t k : order) {
        if (cur >= h) break;
        const int in = enter[k];
        const int out = leave[k];
        const double gain = a_hat[in] - a_hat[out];
        if (gain > 0.0 && cur + gain >= h) {
            const double theta = (h - cur) / gain;  // in (0, 1]
            res.x[out] = 1.0 - theta;
            res.x[in] = theta;
            cur = h;
        } else {
            res.x[out] = 0.0;
            res.x[in] = 1.0;
            cur += gain;
        }
    }
    set_objective();
    return res;
}

} // namespace conbandit
