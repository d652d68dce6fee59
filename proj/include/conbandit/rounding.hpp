#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "conbandit/rng.hpp"
#include "conbandit/types.hpp"

namespace conbandit {

inline constexpr double kRoundingSnapTol = 1e-12;

// Randomized rounding of x into exactly L = sum(x) indices with
// Pr[i selected] = x_i. Repeatedly takes the two lowest-indexed fractional
// coordinates i, j and moves mass
//   (x_i, x_j) <- (x_i + p, x_j - p) with probability q/(p+q), else
//   (x_i, x_j) <- (x_i - q, x_j + q),
// where p = min(1-x_i, x_j) and q = min(x_i, 1-x_j). Each step pins at least
// one coordinate to a bound, so the loop runs at most K times. Values within
// kRoundingSnapTol of a bound are snapped so float residue cannot stall the
// loop.
inline SelectionSet dependent_rounding(PolicyVector x, Rng& rng) {
    const int K = static_cast<int>(x.size());
    double sum = 0.0;
    for (double v : x) {
        if (!(v >= -kPolicySumTol && v <= 1.0 + kPolicySumTol))
            throw std::invalid_argument("dependent_rounding: coordinate outside [0,1]");
        sum += v;
    }
    const double rounded = std::round(sum);
    if (std::abs(sum - rounded) > kPolicySumTol || rounded < 0.0)
        throw std::invalid_argument("dependent_rounding: coordinates must sum to an integer");
    const int L = static_cast<int>(rounded);

    std::vector<int> frac;
    frac.reserve(x.size());
    for (int i = 0; i < K; ++i) {
        if (x[i] <= kRoundingSnapTol) x[i] = 0.0;
        else if (x[i] >= 1.0 - kRoundingSnapTol) x[i] = 1.0;
        else frac.push_back(i);
    }

    // Coordinates before position i and between i and j are already resolved,
    // so the two lowest fractional ones are always frac[i] and frac[j].
    const int F = static_cast<int>(frac.size());
    int i = 0, j = 1;
    while (i < F && j < F) {
        const int fi = frac[i];
        const int fj = frac[j];
        const double p = std::min(1.0 - x[fi], x[fj]);
        const double q = std::min(x[fi], 1.0 - x[fj]);
        if (p + q > 0.0) {
            // The min tells us which coordinate lands on a bound; assign the
            // bound exactly rather than relying on float cancellation.
            if (rng.uniform01() < q / (p + q)) {
                if (1.0 - x[fi] <= x[fj]) { x[fi] = 1.0; x[fj] -= p; }
                else                      { x[fj] = 0.0; x[fi] += p; }
            } else {
                if (x[fi] <= 1.0 - x[fj]) { x[fi] = 0.0; x[fj] += q; }
                else                      { x[fj] = 1.0; x[fi] -= q; }
            }
        }
        if (x[fi] <= kRoundingSnapTol) x[fi] = 0.0;
        else if (x[fi] >= 1.0 - kRoundingSnapTol) x[fi] = 1.0;
        if (x[fj] <= kRoundingSnapTol) x[fj] = 0.0;
        else if (x[fj] >= 1.0 - kRoundingSnapTol) x[fj] = 1.0;

        const bool i_done = (x[fi] == 0.0 || x[fi] == 1.0);
        const bool j_done = (x[fj] == 0.0 || x[fj] == 1.0);
        if (i_done && j_done) { i = j + 1; j = i + 1; }
        else if (i_done)      { i = j; ++j; }
        else if (j_done)      { ++j; }
        else throw std::logic_error("dependent_rounding: step resolved no coordinate");
    }
    if (i < F) {
        // A lone fractional coordinate can only be float drift left over from
        // the final pair; settle it to the nearer bound.
        const int fi = frac[i];
        if (!(x[fi] <= 1e-6 || x[fi] >= 1.0 - 1e-6))
            throw std::logic_error("dependent_rounding: unresolved coordinate");
        x[fi] = x[fi] < 0.5 ? 0.0 : 1.0;
    }

    SelectionSet out;
    out.reserve(static_cast<std::size_t>(L));
    for (int k = 0; k < K; ++k)
        if (x[k] == 1.0) out.push_back(k);
    if (static_cast<int>(out.size()) != L)
        throw std::logic_error("dependent_rounding: cardinality drifted");
    return out;
}

} // namespace conbandit
