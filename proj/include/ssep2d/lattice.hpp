#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ssep2d {

struct Site {
    int x1 = 0;
    int x2 = 0;

    friend bool operator==(const Site&, const Site&) = default;
    long long norm2() const { return 1LL * x1 * x1 + 1LL * x2 * x2; }
};

struct PolarCoords {
    double radius = 0.0;
    double sigma = 0.0;
    double theta = 0.0;  // in [-pi, pi)
};

// Directed bond (tail, tail + e_dir) with dir 0 for e1 and 1 for e2.
struct Bond {
    std::uint32_t tail = 0;
    std::uint32_t head = 0;
    std::uint8_t dir = 0;
};

inline constexpr std::size_t kDefaultSiteBudget = 4'000'000;
inline constexpr std::int32_t kNoSite = -1;

double sigma_of(double T, Site x);

class LatticeBall {
public:
    static LatticeBall build(double T, double r_max,
                             std::size_t site_budget = kDefaultSiteBudget);
    // Arbitrary finite site set (used for tiny exact checks). r_max is set to
    // the largest sigma present.
    static LatticeBall from_sites(double T, std::vector<Site> sites);

    double scale() const { return T_; }
    double log_scale() const { return log_T_; }
    double r_max() const { return r_max_; }
    int radius() const { return radius_; }

    std::size_t size() const { return sites_.size(); }
    std::size_t interior_size() const { return sites_.size() - (origin_ ? 1 : 0); }
    const Site& site(std::size_t i) const { return sites_[i]; }
    std::span<const Site> sites() const { return sites_; }
    std::optional<std::size_t> index(Site x) const;
    std::optional<std::size_t> origin() const { return origin_; }
    bool is_origin(std::size_t i) const { return origin_ && *origin_ == i; }

    double sigma(std::size_t i) const;  // throws at the origin
    double sigma_T(Site x) const;
    PolarCoords polar(std::size_t i) const;
    double norm(std::size_t i) const { return norm_[i]; }
    double inv_norm2(std::size_t i) const { return inv_norm2_[i]; }

    // Neighbour in direction k: 0 = +e1, 1 = +e2, 2 = -e1, 3 = -e2.
    std::int32_t neighbor(std::size_t i, int k) const { return neighbors_[4 * i + k]; }
    bool are_neighbors(std::size_t a, std::size_t b) const;

    std::span<const Bond> bonds() const { return bonds_; }
    std::size_t bond_count() const { return bonds_.size(); }
    // Bond touching site i in direction k (same convention as neighbor), or kNoSite.
    std::int32_t bond_at(std::size_t i, int k) const { return site_bonds_[4 * i + k]; }

    // Non-origin site indices sorted by increasing |x| (ties by index).
    std::span<const std::uint32_t> by_radius() const { return by_radius_; }

private:
    LatticeBall() = default;
    void finalize();

    double T_ = 0.0;
    double log_T_ = 0.0;
    double r_max_ = 0.0;
    int radius_ = 0;
    std::vector<Site> sites_;
    std::vector<double> norm_;
    std::vector<double> inv_norm2_;
    std::vector<double> sigma_;
    std::vector<std::int32_t> neighbors_;
    std::vector<Bond> bonds_;
    std::vector<std::int32_t> site_bonds_;
    std::vector<std::uint32_t> by_radius_;
    std::optional<std::size_t> origin_;
    int min1_ = 0, min2_ = 0, width_ = 0, height_ = 0;
    std::vector<std::int32_t> lookup_;
};

}  // namespace ssep2d
