#pragma once

#include <array>
#include <bitset>
#include <cassert>
#include <string>

#include "forage/grid.hpp"

namespace forage {

// What an agent asks for in one step: a movement op plus an audible beep
// heard by everyone on the following step. Decoded from 3 actuator bits
// (2 bits movement, 1 bit beep).
enum class MoveOp : std::uint8_t { Nothing = 0, TurnLeft = 1, TurnRight = 2, Forward = 3 };

struct ForageAction {
    MoveOp move = MoveOp::Nothing;
    bool beep = false;
};

inline ForageAction decode_forage_action(bool move_hi, bool move_lo, bool beep) {
    return {static_cast<MoveOp>((static_cast<int>(move_hi) << 1) | static_cast<int>(move_lo)),
            beep};
}

// 7 sensor bits, in order:
//   [0,1] what lies ahead (00 empty, 01 food, 10 agent, 11 wall)
//   [2,3,4] beep flags of the other three agents, ascending index
//   [5,6] carried food saturated at 3, big-endian
using Percept = std::array<bool, 7>;

struct Forager {
    Pos pos;
    Direction facing = Direction::East;
    int carried = 0;
    bool beeped = false;
};

// The 16x16 foraging room used by the evolutionary pipeline. Four agents
// start in the corners facing inward; every non-corner tile starts with one
// unit of food. Food is conserved: tiles + carried always sum to 252.
class ForageWorld {
public:
    static constexpr int kSize = 16;
    static constexpr int kInitialFood = kSize * kSize - 4;

    ForageWorld() {
        food_.set();
        static constexpr Pos corners[4] = {{0, 0}, {15, 0}, {0, 15}, {15, 15}};
        static constexpr Direction facings[4] = {Direction::East, Direction::West,
                                                 Direction::East, Direction::West};
        for (int i = 0; i < 4; ++i) {
            agents_[i].pos = corners[i];
            agents_[i].facing = facings[i];
            food_.reset(tile_index(corners[i]));
        }
    }

    bool in_bounds(Pos p) const { return p.x >= 0 && p.x < kSize && p.y >= 0 && p.y < kSize; }

    bool food_at(Pos p) const { return food_.test(tile_index(p)); }

    int food_remaining() const { return static_cast<int>(food_.count()); }

    const Forager& agent(int i) const { return agents_[static_cast<std::size_t>(i)]; }

    long step_count() const { return steps_; }

    // -1 when the tile is unoccupied.
    int agent_at(Pos p) const {
        for (int i = 0; i < 4; ++i)
            if (agents_[static_cast<std::size_t>(i)].pos == p) return i;
        return -1;
    }

    Percept sense(int agent_idx) const {
        assert(agent_idx >= 0 && agent_idx < 4);
        const Forager& a = agents_[static_cast<std::size_t>(agent_idx)];
        Pos ahead = neighbor(a.pos, a.facing);
        int code; // 0 empty, 1 food, 2 agent, 3 wall
        if (!in_bounds(ahead))
            code = 3;
        else if (agent_at(ahead) >= 0)
            code = 2;
        else if (food_at(ahead))
            code = 1;
        else
            code = 0;
        Percept p{};
        p[0] = (code & 2) != 0;
        p[1] = (code & 1) != 0;
        int s = 2;
        for (int j = 0; j < 4; ++j) {
            if (j == agent_idx) continue;
            p[static_cast<std::size_t>(s++)] = agents_[static_cast<std::size_t>(j)].beeped;
        }
        int c = std::min(a.carried, 3);
        p[5] = (c & 2) != 0;
        p[6] = (c & 1) != 0;
        return p;
    }

    // Resolves the four actions sequentially in agent-index order and
    // returns each agent's net change in carried food. Walking into another
    // agent hands over one unit of food when the mover has any.
    std::array<int, 4> step(const std::array<ForageAction, 4>& actions) {
        std::array<int, 4> delta{};
        for (int i = 0; i < 4; ++i) {
            Forager& a = agents_[static_cast<std::size_t>(i)];
            switch (actions[static_cast<std::size_t>(i)].move) {
            case MoveOp::Nothing:
                break;
            case MoveOp::TurnLeft:
                a.facing = turn_left(a.facing);
                break;
            case MoveOp::TurnRight:
                a.facing = turn_right(a.facing);
                break;
            case MoveOp::Forward: {
                Pos target = neighbor(a.pos, a.facing);
                if (!in_bounds(target)) break;
                int occupant = agent_at(target);
                if (occupant >= 0) {
                    if (a.carried >= 1) {
                        a.carried -= 1;
                        agents_[static_cast<std::size_t>(occupant)].carried += 1;
                        delta[static_cast<std::size_t>(i)] -= 1;
                        delta[static_cast<std::size_t>(occupant)] += 1;
                    }
                    break;
                }
                if (food_at(target)) {
                    food_.reset(tile_index(target));
                    a.carried += 1;
                    delta[static_cast<std::size_t>(i)] += 1;
                }
                a.pos = target;
                break;
            }
            }
        }
        for (int i = 0; i < 4; ++i)
            agents_[static_cast<std::size_t>(i)].beeped = actions[static_cast<std::size_t>(i)].beep;
        ++steps_;
        return delta;
    }

    // One character per tile: agent index, '#' food, '.' empty.
    std::string dump() const {
        std::string out;
        out.reserve(static_cast<std::size_t>(kSize * (kSize + 1)));
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

    std::bitset<256> food_;
    std::array<Forager, 4> agents_;
    long steps_ = 0;
};

} // namespace forage
