#pragma once

#include <cstdint>

namespace forage {

// Cardinal directions, clockwise from North. Grid rows grow southward, so
// North decreases the row index.
enum class Direction : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline Direction turn_left(Direction d) {
    return static_cast<Direction>((static_cast<std::uint8_t>(d) + 3) & 3);
}

inline Direction turn_right(Direction d) {
    return static_cast<Direction>((static_cast<std::uint8_t>(d) + 1) & 3);
}

inline int step_dx(Direction d) {
    constexpr int dx[4] = {0, 1, 0, -1};
    return dx[static_cast<std::uint8_t>(d)];
}

inline int step_dy(Direction d) {
    constexpr int dy[4] = {-1, 0, 1, 0};
    return dy[static_cast<std::uint8_t>(d)];
}

struct Pos {
    int x = 0;
    int y = 0;
    friend bool operator==(const Pos&, const Pos&) = default;
};

inline Pos neighbor(Pos p, Direction d) { return {p.x + step_dx(d), p.y + step_dy(d)}; }

} // namespace forage
