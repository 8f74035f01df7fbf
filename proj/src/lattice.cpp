#include "ssep2d/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ssep2d/errors.hpp"

namespace ssep2d {

namespace {

constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

void require_scale(double T) {
    if (!(T > 1.0) || !std::isfinite(T))
        throw DomainError("scale T must be finite and > 1, got " + std::to_string(T));
}

}  // namespace

double sigma_of(double T, Site x) {
    require_scale(T);
    if (x.x1 == 0 && x.x2 == 0)
        throw UndefinedCoordinateError("sigma_T is undefined at the origin");
    return 0.5 * std::log(static_cast<double>(x.norm2())) / std::log(T);
}

LatticeBall LatticeBall::build(double T, double r_max, std::size_t site_budget) {
    require_scale(T);
    if (!(r_max > 0.5 && r_max < 1.0))
        throw DomainError("r_max must lie in (1/2, 1), got " + std::to_string(r_max));
    const double reach = std::pow(T, r_max);
    const double estimate = std::numbers::pi * reach * reach;
    if (estimate > static_cast<double>(site_budget))
        throw SizingError("ball of radius " + std::to_string(reach) + " needs about " +
                              std::to_string(static_cast<std::size_t>(estimate)) +
                              " sites, budget is " + std::to_string(site_budget),
                          static_cast<std::size_t>(estimate));
    const int R = static_cast<int>(std::floor(reach + 1e-9));
    const long long R2 = 1LL * R * R;

    LatticeBall ball;
    ball.T_ = T;
    ball.log_T_ = std::log(T);
    ball.r_max_ = r_max;
    ball.radius_ = R;
    for (int x2 = -R; x2 <= R; ++x2)
        for (int x1 = -R; x1 <= R; ++x1)
            if (1LL * x1 * x1 + 1LL * x2 * x2 <= R2) ball.sites_.push_back({x1, x2});
    if (ball.sites_.size() > site_budget)
        throw SizingError("ball has " + std::to_string(ball.sites_.size()) +
                              " sites, budget is " + std::to_string(site_budget),
                          ball.sites_.size());
    ball.finalize();
    return ball;
}

LatticeBall LatticeBall::from_sites(double T, std::vector<Site> sites) {
    require_scale(T);
    if (sites.empty()) throw GeometryError("site set is empty");
    LatticeBall ball;
    ball.T_ = T;
    ball.log_T_ = std::log(T);
    ball.sites_ = std::move(sites);
    double max_norm = 0.0;
    for (const auto& s : ball.sites_) max_norm = std::max(max_norm, std::sqrt(double(s.norm2())));
    ball.radius_ = static_cast<int>(std::ceil(max_norm));
    ball.r_max_ = max_norm > 0.0 ? std::log(max_norm) / ball.log_T_ : 0.0;
    ball.finalize();
    return ball;
}

void LatticeBall::finalize() {
    const std::size_t n = sites_.size();
    min1_ = min2_ = 0;
    int max1 = 0, max2 = 0;
    for (const auto& s : sites_) {
        min1_ = std::min(min1_, s.x1);
        min2_ = std::min(min2_, s.x2);
        max1 = std::max(max1, s.x1);
        max2 = std::max(max2, s.x2);
    }
    width_ = max1 - min1_ + 1;
    height_ = max2 - min2_ + 1;
    lookup_.assign(static_cast<std::size_t>(width_) * height_, kNoSite);
    for (std::size_t i = 0; i < n; ++i) {
        auto& slot = lookup_[static_cast<std::size_t>(sites_[i].x2 - min2_) * width_ +
                             (sites_[i].x1 - min1_)];
        if (slot != kNoSite) throw GeometryError("duplicate site in site set");
        slot = static_cast<std::int32_t>(i);
    }

    norm_.resize(n);
    inv_norm2_.resize(n);
    sigma_.resize(n);
    origin_.reset();
    for (std::size_t i = 0; i < n; ++i) {
        const double n2 = static_cast<double>(sites_[i].norm2());
        if (n2 == 0.0) {
            origin_ = i;
            norm_[i] = 0.0;
            inv_norm2_[i] = 0.0;
            sigma_[i] = std::nan("");
        } else {
            norm_[i] = std::sqrt(n2);
            inv_norm2_[i] = 1.0 / n2;
            sigma_[i] = 0.5 * std::log(n2) / log_T_;
        }
    }

    neighbors_.assign(4 * n, kNoSite);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < 4; ++k)
            if (auto j = index({sites_[i].x1 + kDx[k], sites_[i].x2 + kDy[k]}))
                neighbors_[4 * i + k] = static_cast<std::int32_t>(*j);

    bonds_.clear();
    site_bonds_.assign(4 * n, kNoSite);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < 2; ++k) {
            const std::int32_t j = neighbors_[4 * i + k];
            if (j == kNoSite) continue;
            const auto b = static_cast<std::int32_t>(bonds_.size());
            bonds_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                              static_cast<std::uint8_t>(k)});
            site_bonds_[4 * i + k] = b;
            site_bonds_[4 * static_cast<std::size_t>(j) + k + 2] = b;
        }

    by_radius_.clear();
    for (std::size_t i = 0; i < n; ++i)
        if (!is_origin(i)) by_radius_.push_back(static_cast<std::uint32_t>(i));
    std::stable_sort(by_radius_.begin(), by_radius_.end(), [&](std::uint32_t a, std::uint32_t b) {
        return sites_[a].norm2() < sites_[b].norm2();
    });
}

std::optional<std::size_t> LatticeBall::index(Site x) const {
    const int c = x.x1 - min1_, r = x.x2 - min2_;
    if (c < 0 || r < 0 || c >= width_ || r >= height_) return std::nullopt;
    const std::int32_t v = lookup_[static_cast<std::size_t>(r) * width_ + c];
    if (v == kNoSite) return std::nullopt;
    return static_cast<std::size_t>(v);
}

double LatticeBall::sigma(std::size_t i) const {
    if (is_origin(i)) throw UndefinedCoordinateError("sigma_T is undefined at the origin");
    return sigma_[i];
}

double LatticeBall::sigma_T(Site x) const { return sigma_of(T_, x); }

PolarCoords LatticeBall::polar(std::size_t i) const {
    if (is_origin(i)) throw UndefinedCoordinateError("polar coordinates undefined at the origin");
    double theta = std::atan2(static_cast<double>(sites_[i].x2), static_cast<double>(sites_[i].x1));
    if (theta >= std::numbers::pi) theta -= 2.0 * std::numbers::pi;
    return {norm_[i], sigma_[i], theta};
}

bool LatticeBall::are_neighbors(std::size_t a, std::size_t b) const {
    for (int k = 0; k < 4; ++k)
        if (neighbors_[4 * a + k] == static_cast<std::int32_t>(b)) return true;
    return false;
}

}  // namespace ssep2d
