#pragma once

#include <functional>
#include <vector>

namespace ssep2d {

// Density profile m(r) sampled on an increasing grid.
struct RadialDensity {
    std::vector<double> r;
    std::vector<double> m;
    double alpha = 0.5;
    bool alpha_extended = false;  // m = alpha on [1/2, r_max]
    // The function the samples came from, when known. Quadratures prefer it to
    // interpolating the grid.
    std::function<double(double)> exact;

    // Samples f at n + 1 equally spaced points of [lo, hi].
    static RadialDensity sample(const std::function<double(double)>& f, double lo, double hi,
                                std::size_t n, double alpha);

    std::size_t size() const { return r.size(); }
    // Throws DomainError on a malformed grid or values outside [0, 1].
    void validate() const;
    // The extension m_alpha: values at r >= 1/2 replaced by alpha.
    RadialDensity alpha_extension() const;
    bool is_alpha_extended(double tolerance = 1e-12) const;
    // Piecewise linear interpolation, constant beyond the ends.
    double at(double x) const;
    bool has_exact() const { return static_cast<bool>(exact); }
};

}  // namespace ssep2d
