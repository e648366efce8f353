#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "forage/forage_world.hpp"
#include "forage/rng.hpp"

namespace forage {

// Mutable genotype: a flat byte string scanned for gate records.
struct Genome {
    std::vector<std::uint8_t> sites;
};

struct MutationConfig {
    double point_rate = 0.005;     // per-site substitution probability
    double duplication_rate = 0.2; // per-genome probability of one segment copy
    double deletion_rate = 0.05;   // per-genome probability of one segment removal
    std::size_t min_len = 1000;
    std::size_t max_len = 20000;
};

enum class GateKind : std::uint8_t { Deterministic, Probabilistic };

// 19 node slots: 0-6 sensors (read-only to gates), 7-9 actuators, 10-18
// hidden. Node state lives in one 32-bit word; each gate row is predecoded
// into a write mask so stepping is a table lookup and an OR.
inline constexpr int kNumNodes = 19;
inline constexpr int kNumSensors = 7;
inline constexpr std::uint32_t kSensorMask = (1u << kNumSensors) - 1;
inline constexpr std::uint32_t kWritableMask = ((1u << kNumNodes) - 1) & ~kSensorMask;

struct Gate {
    GateKind kind = GateKind::Deterministic;
    std::uint8_t num_inputs = 0;
    std::uint8_t num_outputs = 0;
    std::array<std::uint8_t, 4> inputs{};
    std::array<std::uint8_t, 4> outputs{};
    // Deterministic: row -> node write mask.
    std::array<std::uint32_t, 16> row_mask{};
    // Probabilistic: cumulative distribution per row (2^in rows * 2^out
    // columns, row-major; each row's last entry is exactly 1) over output
    // patterns, plus pattern -> node write mask.
    std::vector<double> row_cdf;
    std::array<std::uint32_t, 16> pattern_mask{};
};

// A decoded gate network plus its node state. Copies share the immutable
// gate list, so cloning an individual into a group of four is cheap.
class Brain {
public:
    Brain() : gates_(std::make_shared<std::vector<Gate>>()) {}
    explicit Brain(std::vector<Gate> gates)
        : gates_(std::make_shared<std::vector<Gate>>(std::move(gates))) {}

    const std::vector<Gate>& gates() const { return *gates_; }
    std::size_t gate_count() const { return gates_->size(); }

    void reset() { state_ = 0; }

    bool node(int i) const { return (state_ >> i) & 1u; }

    // Writes the sensor bits, fires every gate against the pre-step node
    // vector (multiple writes OR together), then replaces actuator and
    // hidden state with the freshly written buffer. Returns the actuator
    // bits (move hi, move lo, beep).
    std::array<bool, 3> step(const Percept& sensors, Rng& rng) {
        std::uint32_t st = state_ & ~kSensorMask;
        for (int i = 0; i < kNumSensors; ++i)
            st |= static_cast<std::uint32_t>(sensors[static_cast<std::size_t>(i)]) << i;
        std::uint32_t buf = 0;
        for (const Gate& g : *gates_) {
            std::uint32_t row = 0;
            for (int j = 0; j < g.num_inputs; ++j)
                row |= ((st >> g.inputs[static_cast<std::size_t>(j)]) & 1u) << j;
            if (g.kind == GateKind::Deterministic) {
                buf |= g.row_mask[row];
            } else {
                const unsigned cols = 1u << g.num_outputs;
                const double* cdf = g.row_cdf.data() + row * cols;
                double u = rng.real();
                unsigned c = 0;
                while (c + 1 < cols && u >= cdf[c]) ++c;
                buf |= g.pattern_mask[c];
            }
        }
        state_ = (st & kSensorMask) | (buf & kWritableMask);
        return {node(7), node(8), node(9)};
    }

    ForageAction act(const Percept& sensors, Rng& rng) {
        auto bits = step(sensors, rng);
        return decode_forage_action(bits[0], bits[1], bits[2]);
    }

    std::string describe() const;

private:
    std::shared_ptr<const std::vector<Gate>> gates_;
    std::uint32_t state_ = 0;
};

namespace detail {

struct SiteCursor {
    const std::vector<std::uint8_t>& sites;
    std::size_t pos;
    bool ok = true;

    std::uint8_t next() {
        if (pos >= sites.size()) {
            ok = false;
            return 0;
        }
        return sites[pos++];
    }
};

inline std::uint32_t write_mask(const std::array<std::uint8_t, 4>& outputs, int m,
                                unsigned pattern) {
    std::uint32_t mask = 0;
    for (int j = 0; j < m; ++j)
        if ((pattern >> j) & 1u) mask |= 1u << outputs[static_cast<std::size_t>(j)];
    return mask & kWritableMask; // writes aimed at sensor nodes are dropped
}

} // namespace detail

// Start codons: (42,213) opens a deterministic gate, (43,212) a
// probabilistic one. The record after a codon is: input count, output count
// (each 1 + site mod 4), the input node indices, the output node indices
// (each site mod 19), then the table payload. Records cut off by the end of
// the genome are discarded. Scanning resumes one site after each codon, so
// records may overlap.
inline Brain decode(const Genome& genome) {
    std::vector<Gate> gates;
    const auto& s = genome.sites;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        GateKind kind;
        if (s[i] == 42 && s[i + 1] == 213)
            kind = GateKind::Deterministic;
        else if (s[i] == 43 && s[i + 1] == 212)
            kind = GateKind::Probabilistic;
        else
            continue;

        detail::SiteCursor cur{s, i + 2};
        Gate g;
        g.kind = kind;
        g.num_inputs = static_cast<std::uint8_t>(1 + cur.next() % 4);
        g.num_outputs = static_cast<std::uint8_t>(1 + cur.next() % 4);
        for (int j = 0; j < g.num_inputs; ++j)
            g.inputs[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(cur.next() % 19);
        for (int j = 0; j < g.num_outputs; ++j)
            g.outputs[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(cur.next() % 19);

        const unsigned rows = 1u << g.num_inputs;
        if (kind == GateKind::Deterministic) {
            for (unsigned r = 0; r < rows; ++r) {
                unsigned pattern = 0;
                for (int j = 0; j < g.num_outputs; ++j)
                    pattern |= static_cast<unsigned>(cur.next() % 2) << j;
                g.row_mask[r] = detail::write_mask(g.outputs, g.num_outputs, pattern);
            }
        } else {
            const unsigned cols = 1u << g.num_outputs;
            g.row_cdf.resize(rows * cols);
            for (unsigned r = 0; r < rows; ++r) {
                std::array<double, 16> raw{};
                double sum = 0.0;
                for (unsigned c = 0; c < cols; ++c) {
                    raw[c] = static_cast<double>(cur.next());
                    sum += raw[c];
                }
                double acc = 0.0;
                for (unsigned c = 0; c < cols; ++c) {
                    acc += (sum == 0.0) ? 1.0 / cols : raw[c] / sum;
                    g.row_cdf[r * cols + c] = acc;
                }
                g.row_cdf[r * cols + (cols - 1)] = 1.0;
            }
            for (unsigned c = 0; c < cols; ++c)
                g.pattern_mask[c] = detail::write_mask(g.outputs, g.num_outputs, c);
        }
        if (cur.ok) gates.push_back(std::move(g));
    }
    return Brain(std::move(gates));
}

inline std::string Brain::describe() const {
    std::ostringstream os;
    os << "brain: " << gates_->size() << " gates\n";
    for (std::size_t k = 0; k < gates_->size(); ++k) {
        const Gate& g = (*gates_)[k];
        os << "  gate " << k << " "
           << (g.kind == GateKind::Deterministic ? "det" : "prob") << " in[";
        for (int j = 0; j < g.num_inputs; ++j)
            os << (j ? "," : "") << int(g.inputs[static_cast<std::size_t>(j)]);
        os << "] out[";
        for (int j = 0; j < g.num_outputs; ++j)
            os << (j ? "," : "") << int(g.outputs[static_cast<std::size_t>(j)]);
        os << "]";
        if (g.kind == GateKind::Deterministic) {
            os << " rows";
            for (unsigned r = 0; r < (1u << g.num_inputs); ++r) os << " " << g.row_mask[r];
        }
        os << "\n";
    }
    return os.str();
}

namespace detail {

// Geometric gap between successive per-site events with probability p;
// equivalent in distribution to testing each site independently.
inline std::size_t geometric_gap(Rng& rng, double log1m) {
    double u = 1.0 - rng.real(); // (0, 1]
    return static_cast<std::size_t>(std::floor(std::log(u) / log1m));
}

} // namespace detail

// Point substitutions, then at most one duplication, then at most one
// deletion. Segment lengths are drawn from 128-512 and clamped so the
// result stays inside [min_len, max_len].
inline Genome mutate(const Genome& genome, const MutationConfig& cfg, Rng& rng) {
    Genome out = genome;
    auto& s = out.sites;

    if (cfg.point_rate >= 1.0) {
        for (auto& site : s) {
            std::uint8_t v = static_cast<std::uint8_t>(rng.below(255));
            site = (v >= site) ? static_cast<std::uint8_t>(v + 1) : v;
        }
    } else if (cfg.point_rate > 0.0 && !s.empty()) {
        const double log1m = std::log1p(-cfg.point_rate);
        std::size_t i = detail::geometric_gap(rng, log1m);
        while (i < s.size()) {
            std::uint8_t v = static_cast<std::uint8_t>(rng.below(255));
            s[i] = (v >= s[i]) ? static_cast<std::uint8_t>(v + 1) : v;
            i += 1 + detail::geometric_gap(rng, log1m);
        }
    }

    if (cfg.duplication_rate > 0.0 && rng.chance(cfg.duplication_rate) && !s.empty()) {
        std::size_t len = s.size();
        std::size_t seg = static_cast<std::size_t>(rng.int_in(128, 512));
        seg = std::min(seg, len);
        if (len + seg > cfg.max_len) seg = cfg.max_len > len ? cfg.max_len - len : 0;
        if (seg > 0) {
            std::size_t start = rng.index(len - seg + 1);
            std::size_t at = rng.index(len + 1);
            std::vector<std::uint8_t> copy(s.begin() + static_cast<std::ptrdiff_t>(start),
                                           s.begin() + static_cast<std::ptrdiff_t>(start + seg));
            s.insert(s.begin() + static_cast<std::ptrdiff_t>(at), copy.begin(), copy.end());
        }
    }

    if (cfg.deletion_rate > 0.0 && rng.chance(cfg.deletion_rate) && !s.empty()) {
        std::size_t len = s.size();
        std::size_t seg = static_cast<std::size_t>(rng.int_in(128, 512));
        seg = std::min(seg, len);
        if (len - seg < cfg.min_len) seg = len > cfg.min_len ? len - cfg.min_len : 0;
        if (seg > 0) {
            std::size_t start = rng.index(len - seg + 1);
            s.erase(s.begin() + static_cast<std::ptrdiff_t>(start),
                    s.begin() + static_cast<std::ptrdiff_t>(start + seg));
        }
    }

    return out;
}

// Fresh genome: uniform sites with a handful of deterministic start codons
// planted at random positions so generation 0 is not entirely gate-free.
inline Genome random_genome(std::size_t length, int codon_pairs, Rng& rng) {
    Genome g;
    g.sites.resize(length);
    for (auto& site : g.sites) site = static_cast<std::uint8_t>(rng.below(256));
    for (int k = 0; k < codon_pairs && length >= 2; ++k) {
        std::size_t p = rng.index(length - 1);
        g.sites[p] = 42;
        g.sites[p + 1] = 213;
    }
    return g;
}

// Runs `steps` sense/think/act rounds and returns each agent's final
// carried food. Brains must be freshly reset; the world should be in its
// initial state.
inline std::array<int, 4> run_forage_episode(ForageWorld& world, std::array<Brain, 4>& brains,
                                             int steps, Rng& rng) {
    for (int t = 0; t < steps; ++t) {
        std::array<Percept, 4> percepts;
        for (int i = 0; i < 4; ++i) percepts[static_cast<std::size_t>(i)] = world.sense(i);
        std::array<ForageAction, 4> actions;
        for (int i = 0; i < 4; ++i)
            actions[static_cast<std::size_t>(i)] =
                brains[static_cast<std::size_t>(i)].act(percepts[static_cast<std::size_t>(i)], rng);
        world.step(actions);
    }
    return {world.agent(0).carried, world.agent(1).carried, world.agent(2).carried,
            world.agent(3).carried};
}

} // namespace forage
