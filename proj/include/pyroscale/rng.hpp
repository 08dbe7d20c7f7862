#pragma once

#include <cmath>
#include <cstdint>

namespace pyroscale {

// Counter-based splittable generator built on the SplitMix64 finalizer.
//
// Every stream is addressed by a 64-bit key; output i of the stream is
// mix(key + i*golden), i.e. the SplitMix64 sequence seeded at the key.  The
// generator therefore has no shared state: any (master seed, replica, site)
// triple can be turned into an independent substream with derive_key, and
// results are reproducible no matter how work is scheduled across threads.
class counter_rng {
public:
    counter_rng() = default;
    explicit counter_rng(std::uint64_t key) : key_(key) {}

    static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t next_u64() {
        ctr_ += 1;
        return mix(key_ + ctr_ * golden);
    }

    // Uniform on the open interval (0,1): the 53-bit mantissa is offset by
    // half an ulp so neither endpoint can be returned, keeping log(u) and
    // tail-quantile inversions finite.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate = 1.0) {
        return -std::log(uniform01()) / rate;
    }

    // Poisson sampling: gap-counting for small means, mean-splitting
    // recursion (a sum of independent Poissons is Poisson) above.  Unlike
    // std::poisson_distribution the draw sequence is pinned, so fixed seeds
    // give identical results on every platform.
    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        if (mean <= 30.0) {
            const double limit = std::exp(-mean);
            std::uint64_t k = 0;
            double prod = 1.0;
            do {
                k += 1;
                prod *= uniform01();
            } while (prod > limit);
            return k - 1;
        }
        const double half = mean / 2.0;
        return poisson(half) + poisson(mean - half);
    }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t ctr_ = 0;
};

// Hash coordinates into a substream key.  Chained finalizer applications keep
// distinct (a,b,c) triples statistically uncorrelated.
inline std::uint64_t derive_key(std::uint64_t master, std::uint64_t a = 0,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = counter_rng::mix(master + counter_rng::golden);
    h = counter_rng::mix(h ^ (a + counter_rng::golden));
    h = counter_rng::mix(h ^ (b + counter_rng::golden));
    h = counter_rng::mix(h ^ (c + counter_rng::golden));
    return h;
}

// Purpose tags used when deriving substreams, so that e.g. the seed stream
// and the match stream of the same site never alias.
enum class stream_tag : std::uint64_t {
    seed = 1,
    match = 2,
    marks = 3,
    cell_boundary = 4,
    initial_cloud = 5,
    regen_cloud = 6,
    occupation = 7,
    generic = 8,
};

inline std::uint64_t derive_key(std::uint64_t master, stream_tag tag,
                                std::uint64_t a = 0, std::uint64_t b = 0) {
    return derive_key(master, static_cast<std::uint64_t>(tag), a, b);
}

} // namespace pyroscale
