#pragma once

#include <absl/random/internal/pcg_engine.h>

#include <cstdint>
#include <random>

namespace ssep2d {

// PCG64 stream keyed by (seed, stream).
class Rng {
public:
    // The bare engine: the public bit generators salt their seeds per process.
    using engine_type = absl::random_internal::pcg64_2018_engine;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(make_seq(seed, stream)) {}

    std::uint64_t next() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n > 0 (Lemire's method).
    std::uint64_t below(std::uint64_t n) {
        __extension__ using u128 = unsigned __int128;
        u128 m = static_cast<u128>(engine_()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<u128>(engine_()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    engine_type& engine() { return engine_; }

private:
    static engine_type make_seq(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32), 0x55e9d2u};
        return engine_type(seq);
    }

    engine_type engine_;
};

}  // namespace ssep2d
