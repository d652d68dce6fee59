#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "conbandit/rng.hpp"
#include "conbandit/types.hpp"

namespace conbandit {

// Arm means keyed by stable identifiers; row order defines arm indices.
struct ArmTable {
    std::vector<std::string> ids;
    std::vector<ArmParams> arms;

    int K() const noexcept { return static_cast<int>(arms.size()); }
};

// One round of Bernoulli two-level feedback, observed for the selected arms
// only. The two levels are drawn independently; draws are a pure function of
// (stream, round, arm), so replays under a different policy see the same
// realizations.
inline RoundOutcome sample_round(const ArmTable& table, long round,
                                 const SelectionSet& selection, const RewardStream& stream) {
    RoundOutcome out;
    out.round = round;
    out.selection = selection;
    out.samples.reserve(selection.size());
    for (int i : selection) {
        if (i < 0 || i >= table.K())
            throw std::invalid_argument("sample_round: arm index out of range");
        const ArmParams& arm = table.arms[i];
        const auto r = static_cast<std::uint64_t>(round);
        const auto idx = static_cast<std::uint64_t>(i);
        const double a = stream.uniform(r, idx, 0) < arm.a_mean ? 1.0 : 0.0;
        const double b = stream.uniform(r, idx, 1) < arm.b_mean ? 1.0 : 0.0;
        out.samples.push_back(make_reward_sample(a, b));
    }
    return out;
}

namespace env_detail {

inline std::string location(const std::string& path, long line) {
    return path + ":" + std::to_string(line) + ": ";
}

inline double parse_mean(std::string_view field, const std::string& path, long line,
                         const char* what) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw std::runtime_error(location(path, line) + std::string("malformed ") + what);
    if (!(value >= 0.0 && value <= 1.0))
        throw std::runtime_error(location(path, line) + std::string(what) + " outside [0,1]");
    return value;
}

} // namespace env_detail

// Loads a UTF-8 CSV with header exactly `arm_id,a_mean,b_mean`. Row order is
// preserved as arm index order. Errors carry the offending line number.
inline ArmTable load_arm_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open arm table: " + path);

    auto next_line = [&](std::string& s) {
        if (!std::getline(in, s)) return false;
        if (!s.empty() && s.back() == '\r') s.pop_back();
        return true;
    };

    std::string line;
    long lineno = 1;
    if (!next_line(line) || line != "arm_id,a_mean,b_mean")
        throw std::runtime_error(env_detail::location(path, 1) +
                                 "expected header `arm_id,a_mean,b_mean`");

    ArmTable table;
    std::unordered_set<std::string> seen;
    while (next_line(line)) {
        ++lineno;
        if (line.empty()) {
            // tolerate a trailing blank line only
            if (in.peek() == std::ifstream::traits_type::eof()) break;
            throw std::runtime_error(env_detail::location(path, lineno) + "empty row");
        }
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos ||
            line.find(',', c2 + 1) != std::string::npos)
            throw std::runtime_error(env_detail::location(path, lineno) + "expected 3 fields");
        std::string id = line.substr(0, c1);
        if (id.empty())
            throw std::runtime_error(env_detail::location(path, lineno) + "empty arm_id");
        if (!seen.insert(id).second)
            throw std::runtime_error(env_detail::location(path, lineno) + "duplicate arm_id `" + id + "`");
        const std::string_view view(line);
        ArmParams params;
        params.a_mean = env_detail::parse_mean(view.substr(c1 + 1, c2 - c1 - 1), path, lineno, "a_mean");
        params.b_mean = env_detail::parse_mean(view.substr(c2 + 1), path, lineno, "b_mean");
        table.ids.push_back(std::move(id));
        table.arms.push_back(params);
    }
    if (table.arms.empty())
        throw std::runtime_error(path + ": arm table has no rows");
    return table;
}

// Deterministic synthetic tables:
//   uniform:     both means independent uniform on [0,1]
//   conflicting: attractiveness uniform on [0.05, 0.95], conversion close to
//                its complement, so attractive arms pay little and the two
//                goals pull apart
inline ArmTable synthetic_instance(std::string_view kind, int K, std::uint64_t seed) {
    if (K < 2) throw std::invalid_argument("synthetic_instance: need K >= 2");
    ArmTable table;
    table.ids.reserve(static_cast<std::size_t>(K));
    table.arms.reserve(static_cast<std::size_t>(K));
    const std::uint64_t root = mix(fnv1a64(kind), seed);
    for (int i = 0; i < K; ++i) {
        const double u = to_unit(mix(root, static_cast<std::uint64_t>(2 * i)));
        const double v = to_unit(mix(root, static_cast<std::uint64_t>(2 * i + 1)));
        ArmParams params;
        if (kind == "uniform") {
            params.a_mean = u;
            params.b_mean = v;
        } else if (kind == "conflicting") {
            params.a_mean = 0.05 + 0.9 * u;
            params.b_mean = std::clamp(1.0 - params.a_mean + 0.1 * (2.0 * v - 1.0), 0.0, 1.0);
        } else {
            throw std::invalid_argument("synthetic_instance: unknown generator `" + std::string(kind) + "`");
        }
        table.ids.push_back("arm_" + std::to_string(i));
        table.arms.push_back(params);
    }
    return table;
}

} // namespace conbandit
