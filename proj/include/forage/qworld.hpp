#pragma once

#include <array>
#include <bitset>
#include <cassert>
#include <cstdint>
#include <span>
#include <string>

#include "forage/grid.hpp"
#include "forage/rng.hpp"

namespace forage {

// Tile codes for the fully observed 8x8 world. Agents under the
// centralized controller get one distinct code each so the joint policy can
// tell them apart; the aliased variant folds them all onto the
// other-agent code.
inline constexpr double kEmptyCode = 0.0;
inline constexpr double kFoodCode = 1.0;
inline constexpr double kOtherAgentCode = -1.0;
inline constexpr double kSelfCode = -0.5;
inline constexpr std::array<double, 4> kCentralAgentCode = {-0.5, -0.6, -0.7, -0.8};

struct Perspective {
    enum class Kind { Decentralized, Centralized, CentralizedAliased };
    Kind kind = Kind::Centralized;
    int agent = 0; // only meaningful for Decentralized

    static Perspective decentralized(int agent_idx) {
        return {Kind::Decentralized, agent_idx};
    }
    static Perspective centralized() { return {Kind::Centralized, 0}; }
    static Perspective centralized_aliased() { return {Kind::CentralizedAliased, 0}; }
};

using StateEncoding = std::array<double, 64>;

// Exact integer form of an encoding: sum of digit_t * base^t over row-major
// tiles. 64 base-6 digits need up to 166 bits, so the value is kept in
// three 64-bit limbs, little-endian.
struct StateKey {
    std::array<std::uint64_t, 3> limbs{};

    friend bool operator==(const StateKey&, const StateKey&) = default;

    static StateKey from_u64(std::uint64_t v) {
        StateKey k;
        k.limbs[0] = v;
        return k;
    }
};

struct StateKeyHash {
    std::size_t operator()(const StateKey& k) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (std::uint64_t limb : k.limbs) h = splitmix64(h ^ limb);
        return static_cast<std::size_t>(h);
    }
};

namespace detail {

// 192-bit multiply-by-small-and-add in 32-bit half-limbs; `mul` is a digit
// base (<= 6), so none of the partial products can overflow 64 bits.
inline void mul_small_add(StateKey& k, std::uint64_t mul, std::uint64_t add) {
    std::uint64_t carry = add;
    for (auto& limb : k.limbs) {
        std::uint64_t lo = (limb & 0xFFFFFFFFull) * mul + (carry & 0xFFFFFFFFull);
        std::uint64_t hi = (limb >> 32) * mul + (carry >> 32) + (lo >> 32);
        limb = (hi << 32) | (lo & 0xFFFFFFFFull);
        carry = hi >> 32;
    }
    assert(carry == 0);
}

inline int digit_of(double code, Perspective::Kind kind) {
    if (code == kEmptyCode) return 0;
    if (code == kFoodCode) return 1;
    if (kind == Perspective::Kind::Centralized) {
        for (int i = 0; i < 4; ++i)
            if (code == kCentralAgentCode[static_cast<std::size_t>(i)]) return 2 + i;
    } else {
        if (code == kOtherAgentCode) return 2;
        if (code == kSelfCode) return 3;
    }
    assert(false && "unknown tile code");
    return 0;
}

} // namespace detail

// Positional key of an encoding for a given perspective mode: base 4 for
// the decentralized/aliased codes, base 6 for the centralized ones.
// Injective over encodings of a fixed mode.
inline StateKey state_key(std::span<const double> enc, Perspective::Kind kind) {
    const std::uint64_t base = (kind == Perspective::Kind::Centralized) ? 6 : 4;
    StateKey key;
    for (std::size_t t = enc.size(); t-- > 0;)
        detail::mul_small_add(key, base,
                              static_cast<std::uint64_t>(detail::digit_of(enc[t], kind)));
    return key;
}

// 8x8 fully observed foraging grid for the Q-learning pipeline. Four agents
// start in the corners; the other 60 tiles each hold one unit of food.
// Food is conserved: tiles + carried always sum to 60.
class QWorld {
public:
    static constexpr int kSize = 8;
    static constexpr int kInitialFood = kSize * kSize - 4;

    QWorld() {
        food_.set();
        static constexpr Pos corners[4] = {{0, 0}, {7, 0}, {0, 7}, {7, 7}};
        for (int i = 0; i < 4; ++i) {
            pos_[static_cast<std::size_t>(i)] = corners[i];
            food_.reset(tile_index(corners[i]));
        }
    }

    bool in_bounds(Pos p) const { return p.x >= 0 && p.x < kSize && p.y >= 0 && p.y < kSize; }
    bool food_at(Pos p) const { return food_.test(tile_index(p)); }
    int food_remaining() const { return static_cast<int>(food_.count()); }
    Pos agent_pos(int i) const { return pos_[static_cast<std::size_t>(i)]; }
    int carried(int i) const { return carried_[static_cast<std::size_t>(i)]; }
    long step_count() const { return steps_; }

    int agent_at(Pos p) const {
        for (int i = 0; i < 4; ++i)
            if (pos_[static_cast<std::size_t>(i)] == p) return i;
        return -1;
    }

    StateEncoding encode(Perspective persp) const {
        StateEncoding enc{};
        for (std::size_t t = 0; t < 64; ++t) enc[t] = kEmptyCode;
        for (int t = 0; t < 64; ++t)
            if (food_.test(static_cast<std::size_t>(t))) enc[static_cast<std::size_t>(t)] = kFoodCode;
        for (int i = 0; i < 4; ++i) {
            std::size_t t = tile_index(pos_[static_cast<std::size_t>(i)]);
            switch (persp.kind) {
            case Perspective::Kind::Decentralized:
                enc[t] = (i == persp.agent) ? kSelfCode : kOtherAgentCode;
                break;
            case Perspective::Kind::Centralized:
                enc[t] = kCentralAgentCode[static_cast<std::size_t>(i)];
                break;
            case Perspective::Kind::CentralizedAliased:
                enc[t] = kOtherAgentCode;
                break;
            }
        }
        return enc;
    }

    StateKey key(Perspective persp) const { return state_key(encode(persp), persp.kind); }

    // Moves the four agents sequentially in index order and returns the net
    // carried-food change per agent. Walking into an occupied tile hands
    // one unit of food to the occupant when the mover has any; moving onto
    // an empty tile earns nothing.
    std::array<int, 4> step(const std::array<Direction, 4>& dirs) {
        std::array<int, 4> delta{};
        for (int i = 0; i < 4; ++i) {
            Pos target = neighbor(pos_[static_cast<std::size_t>(i)],
                                  dirs[static_cast<std::size_t>(i)]);
            if (!in_bounds(target)) continue;
            int occupant = agent_at(target);
            if (occupant >= 0) {
                if (carried_[static_cast<std::size_t>(i)] >= 1) {
                    carried_[static_cast<std::size_t>(i)] -= 1;
                    carried_[static_cast<std::size_t>(occupant)] += 1;
                    delta[static_cast<std::size_t>(i)] -= 1;
                    delta[static_cast<std::size_t>(occupant)] += 1;
                }
                continue;
            }
            if (food_at(target)) {
                food_.reset(tile_index(target));
                carried_[static_cast<std::size_t>(i)] += 1;
                delta[static_cast<std::size_t>(i)] += 1;
            }
            pos_[static_cast<std::size_t>(i)] = target;
        }
        ++steps_;
        return delta;
    }

    std::string dump() const {
        std::string out;
        for (int y = 0; y < kSize; ++y) {
            for (int x = 0; x < kSize; ++x) {
                int who = agent_at({x, y});
                if (who >= 0)
                    out += static_cast<char>('0' + who);
                else
                    out += food_at({x, y}) ? '#' : '.';
            }
            out += '\n';
        }
        return out;
    }

private:
    static std::size_t tile_index(Pos p) {
        return static_cast<std::size_t>(p.y) * kSize + static_cast<std::size_t>(p.x);
    }

    std::bitset<64> food_;
    std::array<Pos, 4> pos_;
    std::array<int, 4> carried_{};
    long steps_ = 0;
};

} // namespace forage
