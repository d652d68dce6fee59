#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "conbandit/rng.hpp"
#include "conbandit/types.hpp"

using namespace conbandit;

TEST_CASE("compound reward is the product of the levels", "[types]") {
    CHECK(compound(1.0, 0.7) == 0.7);
    CHECK(compound(0.0, 0.9) == 0.0);
    CHECK(compound(0.5, 0.5) == 0.25);
}

TEST_CASE("statistics update follows the plays+1 denominator", "[types]") {
    ArmStatistics st;
    CHECK(st.a_bar() == 0.0);
    CHECK(st.g_bar() == 0.0);

    st = update_statistics(st, make_reward_sample(1.0, 1.0));
    CHECK(st.plays == 1);
    CHECK(st.a_bar() == 0.5);

    st = update_statistics(st, make_reward_sample(0.0, 0.0));
    CHECK(st.plays == 2);
    CHECK_THAT(st.a_bar(), Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-15));
}

TEST_CASE("m identical samples average to m v / (m+1)", "[types]") {
    const double v = 0.37;
    ArmStatistics st;
    for (int m = 1; m <= 50; ++m) {
        st.add(make_reward_sample(v, 1.0));
        CHECK_THAT(st.a_bar(), Catch::Matchers::WithinAbs(m * v / (m + 1.0), 1e-12));
    }
}

TEST_CASE("running-sum and incremental forms agree", "[types]") {
    Rng rng(2024);
    ArmStatistics st;
    double inc_a = 0.0, inc_g = 0.0;  // incremental recurrence
    double naive_a = 0.0, naive_g = 0.0;
    for (int n = 0; n < 2000; ++n) {
        const RewardSample s = make_reward_sample(rng.uniform01(), rng.uniform01());
        inc_a = (inc_a * (n + 1) + s.a) / (n + 2);
        inc_g = (inc_g * (n + 1) + s.g) / (n + 2);
        naive_a += s.a;
        naive_g += s.g;
        st.add(s);
        CHECK(st.a_bar() == naive_a / (st.plays + 1));
        CHECK(st.g_bar() == naive_g / (st.plays + 1));
        CHECK_THAT(st.a_bar(), Catch::Matchers::WithinAbs(inc_a, 1e-12));
        CHECK_THAT(st.g_bar(), Catch::Matchers::WithinAbs(inc_g, 1e-12));
    }
}

TEST_CASE("averages stay below plays/(plays+1) and converge", "[types]") {
    Rng rng(7);
    ArmStatistics st;
    const double p = 0.3;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double a = rng.uniform01() < p ? 1.0 : 0.0;
        st.add(make_reward_sample(a, 1.0));
        CHECK(st.a_bar() <= static_cast<double>(st.plays) / (st.plays + 1.0));
    }
    const double expected = p * n / (n + 1.0);
    const double sigma = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(st.a_bar() - expected) <= 3.0 * sigma);
}

TEST_CASE("instance validation rejects bad parameters", "[types]") {
    ProblemInstance inst;
    inst.arms = {{0.5, 0.5}, {0.2, 0.9}};
    inst.L = 1;
    inst.h = 0.4;
    inst.T = 10;
    inst.delta = 0.1;
    CHECK_NOTHROW(inst.validate());

    auto bad = inst;
    bad.L = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = inst;
    bad.h = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = inst;
    bad.h = 1.0;  // h >= L leaves no feasible point
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = inst;
    bad.delta = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = inst;
    bad.arms[0].a_mean = 1.2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("policy vector and selection validators", "[types]") {
    CHECK(is_policy_vector(std::vector<double>{0.5, 0.5, 1.0}, 2));
    CHECK_FALSE(is_policy_vector(std::vector<double>{0.5, 0.6, 1.0}, 2));
    CHECK_FALSE(is_policy_vector(std::vector<double>{-0.1, 1.1, 1.0}, 2));

    CHECK(is_selection_set({0, 2}, 3, 2));
    CHECK_FALSE(is_selection_set({2, 0}, 3, 2));
    CHECK_FALSE(is_selection_set({0, 0}, 3, 2));
    CHECK_FALSE(is_selection_set({0, 3}, 3, 2));
    CHECK_FALSE(is_selection_set({0}, 3, 2));
}
