#pragma once

#include <cstdint>
#include <random>

namespace ahc {

// Deterministic seed derivation (splitmix64 step).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Thin wrapper over mt19937_64 with portable draw helpers. The standard
// distributions are implementation-defined, so all sampling goes through
// these to keep runs bit-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // Uniform in [0,1), 53-bit resolution.
    double unit() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0,n). n must be positive.
    int below(int n) {
        const std::uint64_t un = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        std::uint64_t r;
        do {
            r = gen_();
        } while (r >= limit);
        return static_cast<int>(r % un);
    }

    bool bernoulli(double p) { return unit() < p; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    // In-place Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
            std::swap(v[static_cast<std::size_t>(i)],
                      v[static_cast<std::size_t>(below(i + 1))]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace ahc
