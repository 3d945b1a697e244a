#pragma once

#include <cstdint>
#include <limits>

namespace rxn {

/// Counter-based generator: output i of stream (seed, stream) is a pure
/// function of (seed, stream, i). Seedable, splittable, trivially
/// reproducible; per-run ensemble streams are independent by construction.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    /// Independent child stream; deterministic in (parent key, index).
    CounterRng split(std::uint64_t index) const {
        CounterRng child(0);
        child.key_ = mix(key_ ^ mix(index + 0x632be59bd9b4e019ULL));
        child.counter_ = 0;
        return child;
    }

private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace rxn
