#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <limits>
#include <unordered_map>
#include <vector>

#include "forage/qworld.hpp"
#include "forage/reward.hpp"
#include "forage/rng.hpp"

namespace forage {

enum class ControllerMode { Centralized, Decentralized };

inline std::string to_string(ControllerMode m) {
    return m == ControllerMode::Centralized ? "centralized" : "decentralized";
}

inline ControllerMode controller_mode_from(const std::string& name) {
    if (name == "centralized" || name == "central") return ControllerMode::Centralized;
    if (name == "decentralized" || name == "independent") return ControllerMode::Decentralized;
    throw std::invalid_argument("unknown controller mode: " + name);
}

// When the shared scalar reward is computed: from each step's carried-food
// deltas (default), or once per episode from the final totals (assigned to
// the last recorded transition).
enum class RewardTiming { PerStep, PerEpisode };

// Keyed action-value store. Unseen states are initialized with uniform
// random values; every lookup stamps the entry with the epoch so stale
// entries can be pruned by age.
class SparseQTable {
public:
    struct Entry {
        std::vector<double> values;
        std::int64_t last_used = 0;
    };

    explicit SparseQTable(int action_count) : action_count_(action_count) {}

    int action_count() const { return action_count_; }
    std::size_t size() const { return entries_.size(); }

    std::vector<double>& lookup_or_init(const StateKey& key, std::int64_t epoch, Rng& rng) {
        auto [it, inserted] = entries_.try_emplace(key);
        Entry& e = it->second;
        if (inserted) {
            e.values.resize(static_cast<std::size_t>(action_count_));
            for (auto& v : e.values) v = rng.real();
            oldest_bound_ = std::min(oldest_bound_, epoch);
        }
        e.last_used = epoch;
        return e.values;
    }

    const Entry* find(const StateKey& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    void set(const StateKey& key, std::vector<double> values, std::int64_t epoch) {
        assert(values.size() == static_cast<std::size_t>(action_count_));
        Entry& e = entries_[key];
        e.values = std::move(values);
        e.last_used = epoch;
        oldest_bound_ = std::min(oldest_bound_, epoch);
    }

    // Drops every entry whose age (epoch - last_used) has reached
    // `prune_age`. Returns the number removed. A lower bound on the oldest
    // timestamp lets the scan be skipped entirely while nothing can be
    // stale (touches only ever raise last_used, so the bound stays valid).
    std::size_t prune(std::int64_t epoch, std::int64_t prune_age) {
        if (entries_.empty() || epoch - oldest_bound_ < prune_age) return 0;
        std::size_t removed = 0;
        std::int64_t oldest = std::numeric_limits<std::int64_t>::max();
        for (auto it = entries_.begin(); it != entries_.end();) {
            if (epoch - it->second.last_used >= prune_age) {
                it = entries_.erase(it);
                ++removed;
            } else {
                oldest = std::min(oldest, it->second.last_used);
                ++it;
            }
        }
        oldest_bound_ = oldest;
        return removed;
    }

    const std::unordered_map<StateKey, Entry, StateKeyHash>& entries() const { return entries_; }

private:
    int action_count_;
    std::unordered_map<StateKey, Entry, StateKeyHash> entries_;
    std::int64_t oldest_bound_ = std::numeric_limits<std::int64_t>::max();
};

struct Transition {
    StateKey state;
    StateKey next_state;
    std::uint16_t action = 0;
    double reward = 0.0;
};

// Bounded FIFO of transitions; pushing past capacity overwrites the oldest.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 50000) : capacity_(capacity) {
        ring_.reserve(capacity);
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return ring_.size(); }
    bool empty() const { return ring_.empty(); }

    void push(const Transition& t) {
        if (ring_.size() < capacity_) {
            ring_.push_back(t);
        } else {
            ring_[head_] = t;
            head_ = (head_ + 1) % capacity_;
        }
    }

    // Logical index: 0 is the oldest transition.
    const Transition& operator[](std::size_t i) const {
        return ring_[(head_ + i) % ring_.size()];
    }

    const Transition& sample(Rng& rng) const { return (*this)[rng.index(ring_.size())]; }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition> ring_;
};

// Epsilon-greedy over an action-value vector; ties go to the lowest index.
inline std::size_t select_action(const std::vector<double>& values, double epsilon, Rng& rng) {
    assert(!values.empty());
    if (rng.real() < epsilon) return rng.index(values.size());
    return static_cast<std::size_t>(
        std::max_element(values.begin(), values.end()) - values.begin());
}

// (1 - alpha) * q + alpha * (r + gamma * max_next); the convex-combination
// form of the one-step value update.
inline double bellman_update(double q, double r, double max_next, double alpha, double gamma) {
    return (1.0 - alpha) * q + alpha * (r + gamma * max_next);
}

// Joint action index -> one direction per agent: agent i reads digit i of
// the index in base 4, little-endian (0 N, 1 E, 2 S, 3 W).
inline std::array<Direction, 4> joint_action_decode(int index) {
    assert(index >= 0 && index < 256);
    std::array<Direction, 4> dirs;
    for (int i = 0; i < 4; ++i) {
        dirs[static_cast<std::size_t>(i)] = static_cast<Direction>(index & 3);
        index >>= 2;
    }
    return dirs;
}

inline int joint_action_encode(const std::array<Direction, 4>& dirs) {
    int index = 0;
    for (int i = 3; i >= 0; --i)
        index = (index << 2) | static_cast<int>(dirs[static_cast<std::size_t>(i)]);
    return index;
}

struct TrainConfig {
    double alpha = 0.8;
    double gamma = 0.9;
    double epsilon0 = 1.0;
    double epsilon_decay = 0.999; // applied once per epoch
    int epochs = 10000;
    int steps_per_epoch = 50;
    int replay_sample = 2000;
    std::size_t replay_capacity = 50000;
    std::int64_t prune_age = 2000;
    ControllerMode mode = ControllerMode::Centralized;
    RewardScheme scheme = RewardScheme::Minimum;
    RewardTiming reward_timing = RewardTiming::PerStep;
    bool aliased_identity = false; // centralized ablation: all agents share one code
    std::uint64_t seed = 1;
};

struct EpochRecord {
    int epoch = 0;
    std::array<int, 4> food{}; // per-agent carried totals at epoch end
    double epsilon = 0.0;
    std::size_t table_size = 0; // total entries across tables, after pruning
};

// One centralized table/buffer, or four decentralized pairs.
struct QPolicy {
    ControllerMode mode;
    bool aliased_identity;
    std::vector<SparseQTable> tables;
    std::vector<ReplayBuffer> buffers;

    explicit QPolicy(const TrainConfig& cfg)
        : mode(cfg.mode), aliased_identity(cfg.aliased_identity) {
        int n = (mode == ControllerMode::Centralized) ? 1 : 4;
        int actions = (mode == ControllerMode::Centralized) ? 256 : 4;
        for (int i = 0; i < n; ++i) {
            tables.emplace_back(actions);
            buffers.emplace_back(cfg.replay_capacity);
        }
    }

    Perspective perspective(int agent_idx) const {
        if (mode == ControllerMode::Decentralized) return Perspective::decentralized(agent_idx);
        return aliased_identity ? Perspective::centralized_aliased()
                                : Perspective::centralized();
    }

    std::size_t total_entries() const {
        std::size_t n = 0;
        for (const auto& t : tables) n += t.size();
        return n;
    }
};

// One 50-step foraging episode on a fresh world: pick actions
// epsilon-greedily, step the world jointly, give every agent the same
// scheme-aggregated scalar reward, and record the transitions for replay.
inline std::array<int, 4> run_epoch(QWorld& world, QPolicy& policy, const TrainConfig& cfg,
                                    double epsilon, std::int64_t epoch, Rng& rng) {
    std::vector<Transition> pending;
    if (cfg.reward_timing == RewardTiming::PerEpisode)
        pending.reserve(static_cast<std::size_t>(cfg.steps_per_epoch) *
                        (policy.mode == ControllerMode::Centralized ? 1 : 4));

    for (int t = 0; t < cfg.steps_per_epoch; ++t) {
        std::array<Direction, 4> dirs{};
        StateKey central_key;
        int central_action = 0;
        std::array<StateKey, 4> agent_keys;
        std::array<std::uint16_t, 4> agent_actions{};

        if (policy.mode == ControllerMode::Centralized) {
            central_key = world.key(policy.perspective(0));
            auto& values = policy.tables[0].lookup_or_init(central_key, epoch, rng);
            central_action = static_cast<int>(select_action(values, epsilon, rng));
            dirs = joint_action_decode(central_action);
        } else {
            for (int i = 0; i < 4; ++i) {
                agent_keys[static_cast<std::size_t>(i)] = world.key(policy.perspective(i));
                auto& values = policy.tables[static_cast<std::size_t>(i)].lookup_or_init(
                    agent_keys[static_cast<std::size_t>(i)], epoch, rng);
                agent_actions[static_cast<std::size_t>(i)] =
                    static_cast<std::uint16_t>(select_action(values, epsilon, rng));
                dirs[static_cast<std::size_t>(i)] =
                    static_cast<Direction>(agent_actions[static_cast<std::size_t>(i)]);
            }
        }

        auto delta = world.step(dirs);
        std::array<double, 4> d{static_cast<double>(delta[0]), static_cast<double>(delta[1]),
                                static_cast<double>(delta[2]), static_cast<double>(delta[3])};
        double reward =
            (cfg.reward_timing == RewardTiming::PerStep) ? scheme_reward(d, cfg.scheme) : 0.0;

        if (policy.mode == ControllerMode::Centralized) {
            Transition tr{central_key, world.key(policy.perspective(0)),
                          static_cast<std::uint16_t>(central_action), reward};
            if (cfg.reward_timing == RewardTiming::PerEpisode)
                pending.push_back(tr);
            else
                policy.buffers[0].push(tr);
        } else {
            for (int i = 0; i < 4; ++i) {
                Transition tr{agent_keys[static_cast<std::size_t>(i)],
                              world.key(policy.perspective(i)),
                              agent_actions[static_cast<std::size_t>(i)], reward};
                if (cfg.reward_timing == RewardTiming::PerEpisode)
                    pending.push_back(tr);
                else
                    policy.buffers[static_cast<std::size_t>(i)].push(tr);
            }
        }
    }

    std::array<int, 4> totals = {world.carried(0), world.carried(1), world.carried(2),
                                 world.carried(3)};
    if (cfg.reward_timing == RewardTiming::PerEpisode && !pending.empty()) {
        std::array<double, 4> final_d{static_cast<double>(totals[0]),
                                      static_cast<double>(totals[1]),
                                      static_cast<double>(totals[2]),
                                      static_cast<double>(totals[3])};
        double episode_reward = scheme_reward(final_d, cfg.scheme);
        // only the last transition of the episode carries the episode reward
        std::size_t per_step = (policy.mode == ControllerMode::Centralized) ? 1 : 4;
        for (std::size_t k = pending.size() - per_step; k < pending.size(); ++k)
            pending[k].reward = episode_reward;
        for (std::size_t k = 0; k < pending.size(); ++k) {
            std::size_t b = (policy.mode == ControllerMode::Centralized) ? 0 : k % 4;
            policy.buffers[b].push(pending[k]);
        }
    }
    return totals;
}

// Uniform-with-replacement replay: each sampled transition gets one Bellman
// update against the current table. Decentralized policies train each
// agent's table from that agent's own buffer. Returns the update count.
inline std::size_t replay_train(QPolicy& policy, const TrainConfig& cfg, std::int64_t epoch,
                                Rng& rng) {
    std::size_t updates = 0;
    for (std::size_t b = 0; b < policy.buffers.size(); ++b) {
        ReplayBuffer& buf = policy.buffers[b];
        SparseQTable& table = policy.tables[b];
        if (buf.empty()) continue;
        std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(cfg.replay_sample),
                                              buf.size());
        for (std::size_t k = 0; k < n; ++k) {
            const Transition& tr = buf.sample(rng);
            const auto& next_values = table.lookup_or_init(tr.next_state, epoch, rng);
            double max_next = *std::max_element(next_values.begin(), next_values.end());
            auto& values = table.lookup_or_init(tr.state, epoch, rng);
            values[tr.action] =
                bellman_update(values[tr.action], tr.reward, max_next, cfg.alpha, cfg.gamma);
            ++updates;
        }
    }
    return updates;
}

inline std::size_t prune_policy(QPolicy& policy, std::int64_t epoch, std::int64_t prune_age) {
    std::size_t removed = 0;
    for (auto& t : policy.tables) removed += t.prune(epoch, prune_age);
    return removed;
}

// Greedy (epsilon = 0) rollout on a fresh world; used for the final
// rank-by-food report. States never seen during training still fall back
// to the random-init vector.
inline std::array<int, 4> greedy_rollout(QPolicy& policy, const TrainConfig& cfg,
                                         std::int64_t epoch, Rng& rng) {
    QWorld world;
    for (int t = 0; t < cfg.steps_per_epoch; ++t) {
        std::array<Direction, 4> dirs{};
        if (policy.mode == ControllerMode::Centralized) {
            auto& values = policy.tables[0].lookup_or_init(world.key(policy.perspective(0)),
                                                           epoch, rng);
            dirs = joint_action_decode(static_cast<int>(select_action(values, 0.0, rng)));
        } else {
            for (int i = 0; i < 4; ++i) {
                auto& values = policy.tables[static_cast<std::size_t>(i)].lookup_or_init(
                    world.key(policy.perspective(i)), epoch, rng);
                dirs[static_cast<std::size_t>(i)] =
                    static_cast<Direction>(select_action(values, 0.0, rng));
            }
        }
        world.step(dirs);
    }
    return {world.carried(0), world.carried(1), world.carried(2), world.carried(3)};
}

struct TrainingResult {
    std::vector<EpochRecord> records;
    std::array<int, 4> greedy_food{};
};

// Full training run: epsilon decays geometrically once per epoch (no
// floor), each epoch is foraging + replay training + pruning, and the run
// ends with a deterministic greedy evaluation.
inline TrainingResult run_training(const TrainConfig& cfg) {
    Rng rng(cfg.seed);
    QPolicy policy(cfg);
    TrainingResult result;
    result.records.reserve(static_cast<std::size_t>(cfg.epochs));

    double epsilon = cfg.epsilon0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        QWorld world;
        auto totals = run_epoch(world, policy, cfg, epsilon, epoch, rng);
        replay_train(policy, cfg, epoch, rng);
        prune_policy(policy, epoch, cfg.prune_age);
        result.records.push_back({epoch, totals, epsilon, policy.total_entries()});
        epsilon *= cfg.epsilon_decay;
    }
    result.greedy_food = greedy_rollout(policy, cfg, cfg.epochs, rng);
    return result;
}

// Checkpoint: table entries, buffer contents and RNG state, little-endian
// binary with a versioned header.
inline constexpr char kQCheckpointMagic[4] = {'F', 'Q', 'T', 'C'};
inline constexpr std::uint32_t kQCheckpointVersion = 1;

inline void save_checkpoint(std::ostream& os, const QPolicy& policy, const Rng& rng) {
    os.write(kQCheckpointMagic, 4);
    std::uint32_t ver = kQCheckpointVersion;
    os.write(reinterpret_cast<const char*>(&ver), sizeof ver);
    std::uint8_t mode = policy.mode == ControllerMode::Centralized ? 0 : 1;
    std::uint8_t aliased = policy.aliased_identity ? 1 : 0;
    os.write(reinterpret_cast<const char*>(&mode), 1);
    os.write(reinterpret_cast<const char*>(&aliased), 1);
    std::uint32_t n_tables = static_cast<std::uint32_t>(policy.tables.size());
    os.write(reinterpret_cast<const char*>(&n_tables), sizeof n_tables);
    for (const auto& table : policy.tables) {
        std::uint32_t actions = static_cast<std::uint32_t>(table.action_count());
        os.write(reinterpret_cast<const char*>(&actions), sizeof actions);
        std::uint64_t n = table.size();
        os.write(reinterpret_cast<const char*>(&n), sizeof n);
        for (const auto& [key, entry] : table.entries()) {
            os.write(reinterpret_cast<const char*>(key.limbs.data()), sizeof key.limbs);
            os.write(reinterpret_cast<const char*>(&entry.last_used), sizeof entry.last_used);
            os.write(reinterpret_cast<const char*>(entry.values.data()),
                     static_cast<std::streamsize>(entry.values.size() * sizeof(double)));
        }
    }
    std::uint32_t n_buffers = static_cast<std::uint32_t>(policy.buffers.size());
    os.write(reinterpret_cast<const char*>(&n_buffers), sizeof n_buffers);
    for (const auto& buf : policy.buffers) {
        std::uint64_t cap = buf.capacity(), n = buf.size();
        os.write(reinterpret_cast<const char*>(&cap), sizeof cap);
        os.write(reinterpret_cast<const char*>(&n), sizeof n);
        for (std::size_t i = 0; i < buf.size(); ++i) {
            const Transition& t = buf[i];
            os.write(reinterpret_cast<const char*>(t.state.limbs.data()), sizeof t.state.limbs);
            os.write(reinterpret_cast<const char*>(t.next_state.limbs.data()),
                     sizeof t.next_state.limbs);
            os.write(reinterpret_cast<const char*>(&t.action), sizeof t.action);
            os.write(reinterpret_cast<const char*>(&t.reward), sizeof t.reward);
        }
    }
    std::string state = rng.save_state();
    std::uint64_t slen = state.size();
    os.write(reinterpret_cast<const char*>(&slen), sizeof slen);
    os.write(state.data(), static_cast<std::streamsize>(slen));
}

inline bool load_checkpoint(std::istream& is, QPolicy& policy, Rng& rng) {
    char magic[4];
    std::uint32_t ver = 0;
    if (!is.read(magic, 4) || std::string(magic, 4) != std::string(kQCheckpointMagic, 4))
        return false;
    if (!is.read(reinterpret_cast<char*>(&ver), sizeof ver) || ver != kQCheckpointVersion)
        return false;
    std::uint8_t mode = 0, aliased = 0;
    if (!is.read(reinterpret_cast<char*>(&mode), 1)) return false;
    if (!is.read(reinterpret_cast<char*>(&aliased), 1)) return false;
    policy.mode = mode == 0 ? ControllerMode::Centralized : ControllerMode::Decentralized;
    policy.aliased_identity = aliased != 0;
    std::uint32_t n_tables = 0;
    if (!is.read(reinterpret_cast<char*>(&n_tables), sizeof n_tables)) return false;
    policy.tables.clear();
    for (std::uint32_t ti = 0; ti < n_tables; ++ti) {
        std::uint32_t actions = 0;
        std::uint64_t n = 0;
        if (!is.read(reinterpret_cast<char*>(&actions), sizeof actions)) return false;
        if (!is.read(reinterpret_cast<char*>(&n), sizeof n)) return false;
        SparseQTable table(static_cast<int>(actions));
        for (std::uint64_t k = 0; k < n; ++k) {
            StateKey key;
            std::int64_t last_used = 0;
            std::vector<double> values(actions);
            if (!is.read(reinterpret_cast<char*>(key.limbs.data()), sizeof key.limbs))
                return false;
            if (!is.read(reinterpret_cast<char*>(&last_used), sizeof last_used)) return false;
            if (!is.read(reinterpret_cast<char*>(values.data()),
                         static_cast<std::streamsize>(values.size() * sizeof(double))))
                return false;
            table.set(key, std::move(values), last_used);
        }
        policy.tables.push_back(std::move(table));
    }
    std::uint32_t n_buffers = 0;
    if (!is.read(reinterpret_cast<char*>(&n_buffers), sizeof n_buffers)) return false;
    policy.buffers.clear();
    for (std::uint32_t bi = 0; bi < n_buffers; ++bi) {
        std::uint64_t cap = 0, n = 0;
        if (!is.read(reinterpret_cast<char*>(&cap), sizeof cap)) return false;
        if (!is.read(reinterpret_cast<char*>(&n), sizeof n)) return false;
        ReplayBuffer buf(cap);
        for (std::uint64_t k = 0; k < n; ++k) {
            Transition t;
            if (!is.read(reinterpret_cast<char*>(t.state.limbs.data()), sizeof t.state.limbs))
                return false;
            if (!is.read(reinterpret_cast<char*>(t.next_state.limbs.data()),
                         sizeof t.next_state.limbs))
                return false;
            if (!is.read(reinterpret_cast<char*>(&t.action), sizeof t.action)) return false;
            if (!is.read(reinterpret_cast<char*>(&t.reward), sizeof t.reward)) return false;
            buf.push(t);
        }
        policy.buffers.push_back(std::move(buf));
    }
    std::uint64_t slen = 0;
    if (!is.read(reinterpret_cast<char*>(&slen), sizeof slen)) return false;
    std::string state(slen, '\0');
    if (!is.read(state.data(), static_cast<std::streamsize>(slen))) return false;
    rng.load_state(state);
    return true;
}

} // namespace forage
