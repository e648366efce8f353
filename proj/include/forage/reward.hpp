#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace forage {

// Group score statistic shared by the evolutionary and Q-learning pipelines:
// every agent in the group receives the same number.
enum class RewardScheme { Mean, Minimum, Maximum };

inline double scheme_reward(std::array<double, 4> v, RewardScheme scheme) {
    switch (scheme) {
    case RewardScheme::Mean:
        // summed in sorted order so the result is exactly permutation-invariant
        std::sort(v.begin(), v.end());
        return (v[0] + v[1] + v[2] + v[3]) / 4.0;
    case RewardScheme::Minimum:
        return *std::min_element(v.begin(), v.end());
    case RewardScheme::Maximum:
        return *std::max_element(v.begin(), v.end());
    }
    return 0.0;
}

inline std::array<double, 4> aggregate_rewards(const std::array<double, 4>& collected,
                                               RewardScheme scheme) {
    double s = scheme_reward(collected, scheme);
    return {s, s, s, s};
}

inline std::string to_string(RewardScheme s) {
    switch (s) {
    case RewardScheme::Mean: return "mean";
    case RewardScheme::Minimum: return "minimum";
    case RewardScheme::Maximum: return "maximum";
    }
    return "?";
}

inline RewardScheme reward_scheme_from(const std::string& name) {
    if (name == "mean") return RewardScheme::Mean;
    if (name == "minimum" || name == "min") return RewardScheme::Minimum;
    if (name == "maximum" || name == "max") return RewardScheme::Maximum;
    throw std::invalid_argument("unknown reward scheme: " + name);
}

} // namespace forage
