#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "conbandit/env.hpp"

using namespace conbandit;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("degenerate means give deterministic rewards", "[env]") {
    ArmTable table{{"only"}, {{1.0, 0.0}}};
    const RewardStream stream{1, 0};
    for (long t = 1; t <= 200; ++t) {
        const RoundOutcome out = sample_round(table, t, {0}, stream);
        REQUIRE(out.samples.size() == 1);
        CHECK(out.samples[0].a == 1.0);
        CHECK(out.samples[0].b == 0.0);
        CHECK(out.samples[0].g == 0.0);
    }
}

TEST_CASE("first-level mean is recovered within the binomial band", "[env]") {
    ArmTable table{{"x"}, {{0.5, 0.3}}};
    const RewardStream stream{2, 0};
    const int n = 100000;
    double sum_a = 0.0, sum_g = 0.0;
    for (long t = 1; t <= n; ++t) {
        const RoundOutcome out = sample_round(table, t, {0}, stream);
        sum_a += out.samples[0].a;
        sum_g += out.samples[0].g;
    }
    const double band_a = 4.0 * std::sqrt(0.25 / n);
    CHECK(std::abs(sum_a / n - 0.5) <= band_a);
    const double g_mean = 0.5 * 0.3;
    const double band_g = 4.0 * std::sqrt(g_mean * (1 - g_mean) / n);
    CHECK(std::abs(sum_g / n - g_mean) <= band_g);
}

TEST_CASE("outcomes are a pure function of (seed, run, round)", "[env]") {
    ArmTable table = synthetic_instance("uniform", 8, 5);
    const RewardStream s1{77, 3};
    const RewardStream s2{77, 3};
    for (long t = 1; t <= 50; ++t) {
        const RoundOutcome a = sample_round(table, t, {0, 3, 5}, s1);
        const RoundOutcome b = sample_round(table, t, {0, 3, 5}, s2);
        for (std::size_t k = 0; k < a.samples.size(); ++k) {
            CHECK(a.samples[k].a == b.samples[k].a);
            CHECK(a.samples[k].b == b.samples[k].b);
        }
    }
    // same arm, same round, different surrounding selection: identical draw
    const RoundOutcome wide = sample_round(table, 9, {0, 3, 5}, s1);
    const RoundOutcome narrow = sample_round(table, 9, {3}, s1);
    CHECK(wide.samples[1].a == narrow.samples[0].a);
    CHECK(wide.samples[1].b == narrow.samples[0].b);
}

TEST_CASE("only selected arms are observed", "[env]") {
    ArmTable table = synthetic_instance("uniform", 5, 6);
    const RewardStream stream{3, 0};
    const RoundOutcome out = sample_round(table, 1, {1, 4}, stream);
    CHECK(out.selection == SelectionSet{1, 4});
    CHECK(out.samples.size() == 2);
}

TEST_CASE("arm table loads and preserves row order", "[env]") {
    const auto path = write_temp("cb_table_ok.csv",
                                 "arm_id,a_mean,b_mean\n"
                                 "left,0.25,0.5\n"
                                 "right,1,0\n");
    const ArmTable table = load_arm_table(path.string());
    REQUIRE(table.K() == 2);
    CHECK(table.ids[0] == "left");
    CHECK(table.arms[0].a_mean == 0.25);
    CHECK(table.arms[1].a_mean == 1.0);
    CHECK(table.arms[1].b_mean == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("arm table errors carry line numbers", "[env]") {
    const auto bad_range = write_temp("cb_table_range.csv",
                                      "arm_id,a_mean,b_mean\n"
                                      "ok,0.5,0.5\n"
                                      "bad,1.2,0.5\n");
    CHECK_THROWS_WITH(load_arm_table(bad_range.string()),
                      Catch::Matchers::ContainsSubstring(":3:") &&
                          Catch::Matchers::ContainsSubstring("a_mean"));
    std::filesystem::remove(bad_range);

    const auto dup = write_temp("cb_table_dup.csv",
                                "arm_id,a_mean,b_mean\n"
                                "same,0.5,0.5\n"
                                "same,0.4,0.4\n");
    CHECK_THROWS_WITH(load_arm_table(dup.string()),
                      Catch::Matchers::ContainsSubstring(":3:") &&
                          Catch::Matchers::ContainsSubstring("duplicate"));
    std::filesystem::remove(dup);

    const auto malformed = write_temp("cb_table_malformed.csv",
                                      "arm_id,a_mean,b_mean\n"
                                      "x,0.5\n");
    CHECK_THROWS_WITH(load_arm_table(malformed.string()),
                      Catch::Matchers::ContainsSubstring(":2:"));
    std::filesystem::remove(malformed);

    const auto header = write_temp("cb_table_header.csv", "id,a,b\nx,0.5,0.5\n");
    CHECK_THROWS_WITH(load_arm_table(header.string()),
                      Catch::Matchers::ContainsSubstring("header"));
    std::filesystem::remove(header);
}

TEST_CASE("a production-scale table round-trips", "[env]") {
    std::string content = "arm_id,a_mean,b_mean\n";
    for (int i = 0; i < 271; ++i)
        content += "arm" + std::to_string(i) + ",0.5,0.5\n";
    const auto path = write_temp("cb_table_271.csv", content);
    const ArmTable table = load_arm_table(path.string());
    CHECK(table.K() == 271);
    std::filesystem::remove(path);
}

TEST_CASE("synthetic tables are deterministic in the seed", "[env]") {
    const ArmTable t1 = synthetic_instance("uniform", 20, 7);
    const ArmTable t2 = synthetic_instance("uniform", 20, 7);
    REQUIRE(t1.K() == 20);
    for (int i = 0; i < 20; ++i) {
        CHECK(t1.arms[i].a_mean == t2.arms[i].a_mean);
        CHECK(t1.arms[i].b_mean == t2.arms[i].b_mean);
    }
    const ArmTable t3 = synthetic_instance("uniform", 20, 8);
    bool any_diff = false;
    for (int i = 0; i < 20; ++i) any_diff |= t1.arms[i].a_mean != t3.arms[i].a_mean;
    CHECK(any_diff);
}

TEST_CASE("conflicting generator is strongly negatively correlated", "[env]") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const ArmTable table = synthetic_instance("conflicting", 40, seed);
        double ma = 0.0, mb = 0.0;
        for (const ArmParams& p : table.arms) {
            ma += p.a_mean;
            mb += p.b_mean;
            CHECK(p.a_mean >= 0.0);
            CHECK(p.a_mean <= 1.0);
            CHECK(p.b_mean >= 0.0);
            CHECK(p.b_mean <= 1.0);
        }
        ma /= table.K();
        mb /= table.K();
        double cov = 0.0, va = 0.0, vb = 0.0;
        for (const ArmParams& p : table.arms) {
            cov += (p.a_mean - ma) * (p.b_mean - mb);
            va += (p.a_mean - ma) * (p.a_mean - ma);
            vb += (p.b_mean - mb) * (p.b_mean - mb);
        }
        const double pearson = cov / std::sqrt(va * vb);
        CHECK(pearson <= -0.5);
    }
}

TEST_CASE("unknown generator and tiny K are rejected", "[env]") {
    CHECK_THROWS_AS(synthetic_instance("gaussian", 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(synthetic_instance("uniform", 1, 1), std::invalid_argument);
}
