#include "ssep2d/radial_density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssep2d/errors.hpp"

namespace ssep2d {

RadialDensity RadialDensity::sample(const std::function<double(double)>& f, double lo, double hi,
                                    std::size_t n, double alpha) {
    if (n < 1 || !(hi > lo)) throw DomainError("density grid needs hi > lo and n >= 1");
    RadialDensity d;
    d.alpha = alpha;
    d.r.resize(n + 1);
    d.m.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        d.r[i] = i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        d.m[i] = f(d.r[i]);
    }
    d.exact = f;
    return d;
}

void RadialDensity::validate() const {
    if (r.size() != m.size() || r.size() < 2)
        throw DomainError("density needs at least two (r, m) pairs of equal length");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!(r[i] >= 0.0) || (i > 0 && !(r[i] > r[i - 1])))
            throw DomainError("density grid must be nonnegative and strictly increasing");
        if (!(m[i] >= 0.0 && m[i] <= 1.0))
            throw DomainError("density value " + std::to_string(m[i]) + " at r=" +
                              std::to_string(r[i]) + " outside [0, 1]");
    }
    if (alpha_extended && !is_alpha_extended())
        throw DomainError("density flagged alpha-extended differs from alpha beyond r = 1/2");
}

RadialDensity RadialDensity::alpha_extension() const {
    RadialDensity d = *this;
    for (std::size_t i = 0; i < d.r.size(); ++i)
        if (d.r[i] >= 0.5) d.m[i] = alpha;
    if (exact) d.exact = [f = exact, a = alpha](double x) { return x >= 0.5 ? a : f(x); };
    d.alpha_extended = true;
    return d;
}

bool RadialDensity::is_alpha_extended(double tolerance) const {
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] >= 0.5 && std::abs(m[i] - alpha) > tolerance) return false;
    return true;
}

double RadialDensity::at(double x) const {
    if (x <= r.front()) return m.front();
    if (x >= r.back()) return m.back();
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - r.begin());
    const double w = (x - r[j - 1]) / (r[j] - r[j - 1]);
    return (1.0 - w) * m[j - 1] + w * m[j];
}

}  // namespace ssep2d
