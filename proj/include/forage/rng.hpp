#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace forage {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Seeded random source used by every stochastic component. The engine is
// std::mt19937_64, whose output stream is fixed by the standard; the
// distribution helpers are hand-rolled because the standard distributions
// are implementation-defined and would break cross-platform reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Unbiased draw from [0, bound), bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = eng_();
            if (r >= threshold) return r % bound;
        }
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    // Inclusive integer range.
    int int_in(int lo, int hi) {
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    // Uniform in [0, 1), 53-bit resolution.
    double real() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double real_in(double lo, double hi) { return lo + (hi - lo) * real(); }

    bool chance(double p) { return real() < p; }

    // Stable derivation of a child seed from (seed, a, b); used to give
    // independent work units their own streams so scheduling order can
    // never change results.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
        return splitmix64(splitmix64(seed ^ splitmix64(a)) ^ b);
    }

    // Engine state round-trips through the standard textual form.
    std::string save_state() const {
        std::ostringstream os;
        os << eng_;
        return os.str();
    }

    void load_state(const std::string& s) {
        std::istringstream is(s);
        is >> eng_;
    }

    friend bool operator==(const Rng& a, const Rng& b) { return a.eng_ == b.eng_; }

private:
    std::mt19937_64 eng_;
};

} // namespace forage
