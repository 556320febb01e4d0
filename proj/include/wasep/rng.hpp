#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>

namespace wasep {

// SplitMix64 step (Steele/Lea/Flood). Used for seed mixing only, never as the
// main generator.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Deterministic substream seed for (master, tag, index). Distinct tags or
// indices give independent-looking streams; the same triple always gives the
// same seed, independent of worker scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL + fnv1a64(tag));
    std::uint64_t a = splitmix64(s);
    s ^= index * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL;
    std::uint64_t b = splitmix64(s);
    std::uint64_t c = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(c);
}

// mt19937_64 wrapped with fully specified real-valued draws, so that output
// streams are reproducible across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        std::seed_seq seq{splitmix64(s), splitmix64(s), splitmix64(s), splitmix64(s)};
        gen_.seed(seq);
    }

    std::uint64_t raw() { return gen_(); }

    // Uniform on (0, 1]; never returns 0, so -log(u) is always finite.
    double uniform01() {
        return static_cast<double>((gen_() >> 11) + 1) * 0x1p-53;
    }

    double exponential(double rate) {
        if (!(rate > 0.0)) throw std::invalid_argument("Rng::exponential: rate must be positive");
        return -std::log(uniform01()) / rate;
    }

    // Standard normal via Marsaglia polar; deterministic given the stream.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double x, y, r2;
        do {
            x = 2.0 * uniform01() - 1.0;
            y = 2.0 * uniform01() - 1.0;
            r2 = x * x + y * y;
        } while (r2 >= 1.0 || r2 == 0.0);
        const double f = std::sqrt(-2.0 * std::log(r2) / r2);
        spare_ = y * f;
        has_spare_ = true;
        return x * f;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace wasep
