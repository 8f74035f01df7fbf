#include "ssep2d/tilt.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <memory>
#include <sstream>

#include "ssep2d/errors.hpp"

namespace ssep2d {

namespace {

void require_alpha(double alpha, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw DomainError("clamp epsilon must lie in (0, 1/2)");
    if (!(alpha >= epsilon && alpha <= 1.0 - epsilon))
        throw DomainError("reference density alpha must lie in [eps, 1 - eps]");
}

// 35t^4 - 84t^5 + 70t^6 - 20t^7 and its first two derivatives.
Jet septic(double t) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    return {t4 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t3),
            140.0 * t3 * (1.0 - t) * (1.0 - t) * (1.0 - t),
            420.0 * t2 * (1.0 - t) * (1.0 - t) * (1.0 - 2.0 * t)};
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

double logit(double p) { return std::log(p) - std::log1p(-p); }

TiltProfile TiltProfile::flat(double alpha) {
    require_alpha(alpha, kDefaultClamp);
    TiltProfile t;
    t.alpha_ = alpha;
    t.flat_ = true;
    t.description_ = "flat(alpha=" + fmt(alpha) + ")";
    t.raw_ = [alpha](double) { return Jet{alpha, 0.0, 0.0}; };
    return t;
}

TiltProfile TiltProfile::smoothstep(double alpha, double beta, double inner, double outer,
                                    double epsilon) {
    require_alpha(alpha, epsilon);
    if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
    if (!(inner > 0.0 && inner < outer && outer < 0.5))
        throw DomainError("smoothstep transition must satisfy 0 < inner < outer < 1/2");
    TiltProfile t;
    t.alpha_ = alpha;
    t.epsilon_ = epsilon;
    t.flat_ = beta == alpha;
    t.description_ = "smoothstep(alpha=" + fmt(alpha) + ", beta=" + fmt(beta) +
                     ", inner=" + fmt(inner) + ", outer=" + fmt(outer) + ")";
    const double w = outer - inner;
    t.raw_ = [=](double r) {
        if (r <= inner) return Jet{beta, 0.0, 0.0};
        if (r >= outer) return Jet{alpha, 0.0, 0.0};
        const Jet s = septic((r - inner) / w);
        const double d = alpha - beta;
        return Jet{beta + d * s.value, d * s.d1 / w, d * s.d2 / (w * w)};
    };
    return t;
}

TiltProfile TiltProfile::bump(double alpha, double amplitude, double lo, double hi,
                              double epsilon) {
    require_alpha(alpha, epsilon);
    if (!(lo > 0.0 && lo < hi && hi < 0.5))
        throw DomainError("bump support must satisfy 0 < lo < hi < 1/2");
    TiltProfile t;
    t.alpha_ = alpha;
    t.epsilon_ = epsilon;
    t.flat_ = amplitude == 0.0;
    t.description_ = "bump(alpha=" + fmt(alpha) + ", amplitude=" + fmt(amplitude) +
                     ", lo=" + fmt(lo) + ", hi=" + fmt(hi) + ")";
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    t.raw_ = [=](double r) {
        if (r <= lo || r >= hi) return Jet{alpha, 0.0, 0.0};
        const double s = (r - c) / h;
        const double u = 1.0 - s * s;
        const double u2 = u * u;
        // f = u^4, f' = -8 s u^3, f'' = -8 u^3 + 48 s^2 u^2
        return Jet{alpha + amplitude * u2 * u2, amplitude * (-8.0 * s * u2 * u) / h,
                   amplitude * (-8.0 * u2 * u + 48.0 * s * s * u2) / (h * h)};
    };
    return t;
}

TiltProfile TiltProfile::from_grid(double alpha, std::vector<double> radii,
                                   std::vector<double> values, double epsilon) {
    require_alpha(alpha, epsilon);
    if (radii.size() != values.size() || radii.size() < 4)
        throw DomainError("tilt grid needs at least 4 (r, gamma) pairs of equal length");
    const double r0 = radii.front(), r1 = radii.back();
    const double h = (r1 - r0) / static_cast<double>(radii.size() - 1);
    if (!(r0 >= 0.0 && r1 <= 0.5 && h > 0.0))
        throw DomainError("tilt grid must be increasing inside [0, 1/2]");
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (std::abs(radii[i] - (r0 + h * static_cast<double>(i))) > 1e-9 * std::max(1.0, r1))
            throw DomainError("tilt grid must be uniformly spaced");
    for (double v : values)
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("tilt grid values must lie in [0, 1]");
    if (std::abs(values.back() - alpha) > 1e-12)
        throw DomainError("tilt grid must end at the reference density alpha");

    auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        values.begin(), values.end(), r0, h, 0.0, 0.0);
    TiltProfile t;
    t.alpha_ = alpha;
    t.epsilon_ = epsilon;
    t.flat_ = std::all_of(values.begin(), values.end(), [&](double v) { return v == alpha; });
    t.description_ = "grid(alpha=" + fmt(alpha) + ", points=" + std::to_string(radii.size()) +
                     ", r0=" + fmt(r0) + ", r1=" + fmt(r1) + ")";
    const double first = values.front();
    t.raw_ = [=](double r) {
        if (r <= r0) return Jet{first, 0.0, 0.0};
        if (r >= r1) return Jet{alpha, 0.0, 0.0};
        return Jet{(*spline)(r), spline->prime(r), spline->double_prime(r)};
    };
    return t;
}

Jet TiltProfile::gamma(double r) const {
    Jet j = raw_(r);
    if (j.value < epsilon_) return {epsilon_, 0.0, 0.0};
    if (j.value > 1.0 - epsilon_) return {1.0 - epsilon_, 0.0, 0.0};
    return j;
}

Jet TiltProfile::potential(double r) const {
    if (flat_) return {};
    const Jet g = gamma(r);
    const double s = g.value * (1.0 - g.value);
    const double value = 0.5 * (logit(g.value) - logit(alpha_));
    const double d1 = g.d1 / (2.0 * s);
    const double d2 = g.d2 / (2.0 * s) - g.d1 * g.d1 * (1.0 - 2.0 * g.value) / (2.0 * s * s);
    return {value, d1, d2};
}

double TiltProfile::curvature_bound() const {
    const int n = 4000;
    const double h = 0.5 / n;
    double worst = 0.0;
    for (int i = 1; i < n; ++i) {
        const double r = h * i;
        const double fd =
            (gamma(r + h).value - 2.0 * gamma(r).value + gamma(r - h).value) / (h * h);
        worst = std::max(worst, std::abs(fd));
    }
    return worst;
}

SiteTables TiltProfile::tabulate(const LatticeBall& ball) const {
    SiteTables t;
    t.density.resize(ball.size());
    t.potential.resize(ball.size());
    for (std::size_t i = 0; i < ball.size(); ++i) {
        if (flat_) {
            t.density[i] = alpha_;
            t.potential[i] = 0.0;
            continue;
        }
        const double r = ball.is_origin(i) ? 0.0 : ball.sigma(i);
        t.density[i] = gamma(r).value;
        t.potential[i] = potential(r).value;
    }
    return t;
}

}  // namespace ssep2d
