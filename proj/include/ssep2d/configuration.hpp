#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ssep2d/lattice.hpp"
#include "ssep2d/tilt.hpp"

namespace ssep2d {

class Configuration {
public:
    Configuration() = default;
    explicit Configuration(std::size_t sites, bool filled = false)
        : eta_(sites, filled ? 1 : 0), count_(filled ? sites : 0) {}
    static Configuration from_bits(std::vector<std::uint8_t> bits);

    std::size_t size() const { return eta_.size(); }
    std::size_t particle_count() const { return count_; }
    bool operator[](std::size_t i) const { return eta_[i] != 0; }
    void set(std::size_t i, bool value);
    std::span<const std::uint8_t> bits() const { return eta_; }

    // Swap the occupations of i and j without adjacency checks.
    void swap_sites(std::size_t i, std::size_t j) { std::swap(eta_[i], eta_[j]); }

    friend bool operator==(const Configuration& a, const Configuration& b) {
        return a.eta_ == b.eta_;
    }

private:
    std::vector<std::uint8_t> eta_;
    std::size_t count_ = 0;
};

// Swap the occupations at two neighbouring sites.
void exchange(const LatticeBall& ball, Configuration& eta, std::size_t x, std::size_t y);
void exchange(const LatticeBall& ball, Configuration& eta, Site x, Site y);

// Independent Bernoulli occupations with the tilt's per-site densities.
Configuration sample_product_measure(const LatticeBall& ball, const TiltProfile& profile,
                                     std::uint64_t seed, std::uint64_t stream = 0);
Configuration sample_product_measure(const LatticeBall& ball, double alpha, std::uint64_t seed,
                                     std::uint64_t stream = 0);
Configuration sample_product_measure(const LatticeBall& ball, std::span<const double> density,
                                     std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace ssep2d
