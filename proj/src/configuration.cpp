#include "ssep2d/configuration.hpp"

#include <numeric>
#include <string>

#include "ssep2d/errors.hpp"
#include "ssep2d/rng.hpp"

namespace ssep2d {

Configuration Configuration::from_bits(std::vector<std::uint8_t> bits) {
    Configuration c;
    for (auto b : bits)
        if (b > 1) throw DomainError("occupation bits must be 0 or 1");
    c.count_ = std::accumulate(bits.begin(), bits.end(), std::size_t{0});
    c.eta_ = std::move(bits);
    return c;
}

void Configuration::set(std::size_t i, bool value) {
    const auto v = static_cast<std::uint8_t>(value);
    count_ += v;
    count_ -= eta_[i];
    eta_[i] = v;
}

void exchange(const LatticeBall& ball, Configuration& eta, std::size_t x, std::size_t y) {
    if (x >= ball.size() || y >= ball.size() || eta.size() != ball.size())
        throw GeometryError("exchange: site index outside the ball");
    if (!ball.are_neighbors(x, y))
        throw GeometryError("exchange: sites " + std::to_string(x) + " and " + std::to_string(y) +
                            " are not nearest neighbours");
    eta.swap_sites(x, y);
}

void exchange(const LatticeBall& ball, Configuration& eta, Site x, Site y) {
    const auto i = ball.index(x), j = ball.index(y);
    if (!i || !j) throw GeometryError("exchange: site outside the ball");
    exchange(ball, eta, *i, *j);
}

Configuration sample_product_measure(const LatticeBall& ball, std::span<const double> density,
                                     std::uint64_t seed, std::uint64_t stream) {
    if (density.size() != ball.size()) throw DomainError("density table does not match the ball");
    Rng rng(seed, stream);
    std::vector<std::uint8_t> bits(ball.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!(density[i] >= 0.0 && density[i] <= 1.0))
            throw DomainError("site densities must lie in [0, 1]");
        bits[i] = rng.uniform() < density[i] ? 1 : 0;
    }
    return Configuration::from_bits(std::move(bits));
}

Configuration sample_product_measure(const LatticeBall& ball, const TiltProfile& profile,
                                     std::uint64_t seed, std::uint64_t stream) {
    const auto tables = profile.tabulate(ball);
    return sample_product_measure(ball, tables.density, seed, stream);
}

Configuration sample_product_measure(const LatticeBall& ball, double alpha, std::uint64_t seed,
                                     std::uint64_t stream) {
    const std::vector<double> density(ball.size(), alpha);
    return sample_product_measure(ball, density, seed, stream);
}

}  // namespace ssep2d
