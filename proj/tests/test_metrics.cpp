#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "conbandit/metrics.hpp"
#include "conbandit/rng.hpp"

using namespace conbandit;

TEST_CASE("regret of the optimal deterministic play is zero", "[metrics]") {
    // realized reward equals the optimal value every round
    const std::vector<double> rewards(100, 0.75);
    for (long t : {0L, 1L, 50L, 100L})
        CHECK_THAT(cumulative_regret(rewards, 0.75, t), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("always playing the worthless arm has linear regret", "[metrics]") {
    const std::vector<double> rewards(100, 0.0);
    for (long t : {1L, 10L, 100L})
        CHECK_THAT(cumulative_regret(rewards, 1.0, t),
                   Catch::Matchers::WithinAbs(static_cast<double>(t), 1e-12));
}

TEST_CASE("violation forms differ exactly as clipping dictates", "[metrics]") {
    const std::vector<double> attr = {0.0, 2.0};
    const ViolationPair v = cumulative_violation(attr, 1.0, 2);
    CHECK_THAT(v.horizon, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(v.clipped, Catch::Matchers::WithinAbs(1.0, 1e-12));

    const std::vector<double> exact = {1.0, 1.0, 1.0};
    const ViolationPair v2 = cumulative_violation(exact, 1.0, 3);
    CHECK(v2.horizon == 0.0);
    CHECK(v2.clipped == 0.0);
}

TEST_CASE("clipped violation dominates the horizon form", "[metrics]") {
    Rng rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        const long n = 1 + static_cast<long>(rng.uniform01() * 50);
        std::vector<double> attr(static_cast<std::size_t>(n));
        for (double& v : attr) v = 3.0 * rng.uniform01();
        const double h = 2.0 * rng.uniform01();
        for (long t = 0; t <= n; ++t) {
            const ViolationPair v = cumulative_violation(attr, h, t);
            CHECK(v.clipped >= v.horizon - 1e-12);
        }
    }
}

TEST_CASE("ratio guards division by zero with an infinite sentinel", "[metrics]") {
    CHECK_THAT(reward_violation_ratio(100.0, 10.0), Catch::Matchers::WithinAbs(10.0, 1e-12));
    CHECK(reward_violation_ratio(100.0, 0.0) == std::numeric_limits<double>::infinity());
    CHECK(std::isinf(reward_violation_ratio(0.0, 0.0)));
}

TEST_CASE("accumulator reproduces the log recomputation exactly", "[metrics]") {
    Rng rng(18);
    const double opt = 0.6, h = 1.2;
    MetricsAccumulator acc(opt, h);
    std::vector<double> rewards, attrs;
    for (long t = 1; t <= 300; ++t) {
        const double g = 2.0 * rng.uniform01();
        const double a = 2.5 * rng.uniform01();
        rewards.push_back(g);
        attrs.push_back(a);
        acc.add_round(g, a);
        CHECK(acc.cum_regret() == cumulative_regret(rewards, opt, t));
        const ViolationPair v = cumulative_violation(attrs, h, t);
        CHECK(acc.vio_horizon() == v.horizon);
        CHECK(acc.vio_clipped() == v.clipped);
        CHECK(acc.ratio() == reward_violation_ratio(acc.cum_reward(), v.clipped));
    }
}

TEST_CASE("cumulative reward and clipped violation never decrease", "[metrics]") {
    Rng rng(19);
    MetricsAccumulator acc(0.5, 1.0);
    double prev_reward = 0.0, prev_clip = 0.0;
    for (long t = 1; t <= 500; ++t) {
        acc.add_round(rng.uniform01(), 2.0 * rng.uniform01());
        CHECK(acc.cum_reward() >= prev_reward);
        CHECK(acc.vio_clipped() >= prev_clip);
        prev_reward = acc.cum_reward();
        prev_clip = acc.vio_clipped();
    }
}

TEST_CASE("averaging traces is the trace of averages", "[metrics]") {
    Rng rng(20);
    const double opt = 0.4, h = 0.8;
    const long T = 64;
    const int R = 5;
    std::vector<MetricsTrace> traces;
    std::vector<std::vector<double>> all_rewards(R), all_attrs(R);
    for (int r = 0; r < R; ++r) {
        MetricsAccumulator acc(opt, h);
        MetricsTrace trace;
        for (long t = 1; t <= T; ++t) {
            const double g = rng.uniform01();
            const double a = 2.0 * rng.uniform01();
            all_rewards[r].push_back(g);
            all_attrs[r].push_back(a);
            acc.add_round(g, a);
            if (t % 8 == 0) acc.append_row(trace);
        }
        traces.push_back(std::move(trace));
    }
    const MetricsTrace avg = average_traces(traces);
    REQUIRE(avg.size() == static_cast<std::size_t>(T / 8));
    for (std::size_t k = 0; k < avg.size(); ++k) {
        const long t = avg.rounds[k];
        double mean_reward = 0.0, mean_regret = 0.0;
        for (int r = 0; r < R; ++r) {
            double cum = 0.0;
            for (long tau = 0; tau < t; ++tau) cum += all_rewards[r][tau];
            mean_reward += cum;
            mean_regret += t * opt - cum;
        }
        mean_reward /= R;
        mean_regret /= R;
        CHECK_THAT(avg.cum_reward[k], Catch::Matchers::WithinAbs(mean_reward, 1e-10));
        CHECK_THAT(avg.cum_regret[k], Catch::Matchers::WithinAbs(mean_regret, 1e-10));
        CHECK_THAT(avg.ratio[k],
                   Catch::Matchers::WithinAbs(avg.cum_reward[k] / avg.vio_clipped[k], 1e-12));
    }
}

TEST_CASE("averaging rejects mismatched sampling grids", "[metrics]") {
    MetricsTrace a, b;
    MetricsAccumulator acc(0.5, 0.5);
    acc.add_round(1.0, 1.0);
    acc.append_row(a);
    acc.add_round(1.0, 1.0);
    acc.append_row(b);
    const std::vector<MetricsTrace> runs = {a, b};
    CHECK_THROWS_AS(average_traces(runs), std::invalid_argument);
}
