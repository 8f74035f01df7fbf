#include "ssep2d/polar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ssep2d/errors.hpp"

namespace ssep2d {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_width(double delta) {
    if (!(delta > 0.0 && delta < 0.5)) throw DomainError("mollifier width must lie in (0, 1/2)");
}

}  // namespace

Mollifier Mollifier::box(double delta) {
    require_width(delta);
    return {Kind::box, delta};
}

Mollifier Mollifier::ramp(double delta) {
    require_width(delta);
    return {Kind::ramp, delta};
}

double Mollifier::operator()(double s) const {
    const double a = std::abs(s);
    const double height = 0.5 / delta_;
    if (kind_ == Kind::box) return a <= delta_ ? height : 0.0;
    const double d2 = delta_ * delta_;
    if (a <= delta_ - d2) return height;
    if (a >= delta_ + d2) return 0.0;
    return height * (delta_ + d2 - a) / (2.0 * d2);
}

double Mollifier::reach() const { return kind_ == Kind::box ? delta_ : delta_ + delta_ * delta_; }

std::string Mollifier::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (kind_ == Kind::box)
        os << "box(delta=" << delta_ << ")";
    else
        os << "ramp(delta=" << delta_ << ", plateau=" << delta_ - delta_ * delta_
           << ", support=" << delta_ + delta_ * delta_ << ")";
    return os.str();
}

PolarMeasure PolarMeasure::from_occupancy(const LatticeBall& ball, std::span<const double> level) {
    if (level.size() != ball.size()) throw DomainError("occupancy table does not match the ball");
    PolarMeasure mu;
    mu.log_T_ = ball.log_scale();
    mu.r_max_ = ball.r_max();
    const double scale = 1.0 / (kTwoPi * ball.log_scale());
    for (std::uint32_t i : ball.by_radius()) {
        if (level[i] == 0.0) continue;
        mu.atoms_.push_back({ball.sigma(i), level[i] * scale * ball.inv_norm2(i), ball.norm(i), i});
    }
    mu.index();
    return mu;
}

PolarMeasure PolarMeasure::from_configuration(const LatticeBall& ball, const Configuration& eta) {
    if (eta.size() != ball.size()) throw DomainError("configuration does not match the ball");
    std::vector<double> level(ball.size());
    for (std::size_t i = 0; i < level.size(); ++i) level[i] = eta[i] ? 1.0 : 0.0;
    return from_occupancy(ball, level);
}

PolarMeasure PolarMeasure::time_averaged(const LatticeBall& ball, const TrajectoryAccumulator& acc) {
    if (!(acc.horizon > 0.0)) throw DomainError("accumulator has zero horizon");
    std::vector<double> level(acc.occ_time);
    for (double& v : level) v /= acc.horizon;
    return from_occupancy(ball, level);
}

PolarMeasure PolarMeasure::reference(const LatticeBall& ball) {
    const std::vector<double> level(ball.size(), 1.0);
    return from_occupancy(ball, level);
}

PolarMeasure PolarMeasure::combine(double a, const PolarMeasure& m1, double b,
                                   const PolarMeasure& m2) {
    if (m1.log_T_ != m2.log_T_) throw DomainError("cannot combine measures from different scales");
    PolarMeasure mu;
    mu.log_T_ = m1.log_T_;
    mu.r_max_ = std::max(m1.r_max_, m2.r_max_);
    // Merge by (sigma, site), which is the ordering both inputs already use.
    auto key = [](const Atom& x) { return std::pair(x.sigma, x.site); };
    std::size_t i = 0, j = 0;
    while (i < m1.atoms_.size() || j < m2.atoms_.size()) {
        if (j == m2.atoms_.size() ||
            (i < m1.atoms_.size() && key(m1.atoms_[i]) < key(m2.atoms_[j]))) {
            Atom x = m1.atoms_[i++];
            x.weight *= a;
            mu.atoms_.push_back(x);
        } else if (i == m1.atoms_.size() || key(m2.atoms_[j]) < key(m1.atoms_[i])) {
            Atom x = m2.atoms_[j++];
            x.weight *= b;
            mu.atoms_.push_back(x);
        } else {
            Atom x = m1.atoms_[i];
            x.weight = a * m1.atoms_[i].weight + b * m2.atoms_[j].weight;
            mu.atoms_.push_back(x);
            ++i;
            ++j;
        }
    }
    mu.index();
    return mu;
}

void PolarMeasure::index() {
    sigma_.resize(atoms_.size());
    prefix_w_.assign(atoms_.size() + 1, 0.0);
    prefix_sw_.assign(atoms_.size() + 1, 0.0);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        sigma_[i] = atoms_[i].sigma;
        prefix_w_[i + 1] = prefix_w_[i] + atoms_[i].weight;
        prefix_sw_[i + 1] = prefix_sw_[i] + atoms_[i].sigma * atoms_[i].weight;
    }
}

std::size_t PolarMeasure::lower(double s) const {
    return static_cast<std::size_t>(std::lower_bound(sigma_.begin(), sigma_.end(), s) - sigma_.begin());
}

std::size_t PolarMeasure::upper(double s) const {
    return static_cast<std::size_t>(std::upper_bound(sigma_.begin(), sigma_.end(), s) - sigma_.begin());
}

double PolarMeasure::mass(double a, double b) const {
    if (b < a) return 0.0;
    return weight_sum(lower(a), upper(b));
}

double PolarMeasure::integrate(const TestFunction& h, double margin) const {
    require_support(h, r_max_, margin);
    if (h.is_zero()) return 0.0;
    double total = 0.0;
    for (std::size_t i = upper(h.lower()), e = lower(h.upper()); i < e; ++i)
        total += atoms_[i].weight * h(atoms_[i].sigma);
    return total;
}

double PolarMeasure::evaluate(const Mollifier& k, double r) const {
    const double d = k.delta();
    const double height = 0.5 / d;
    if (k.kind() == Mollifier::Kind::box) return height * mass(r - d, r + d);
    const double d2 = d * d;
    const double a = d - d2, b = d + d2;
    double total = weight_sum(lower(r - a), upper(r + a));
    // Right ramp on (r + a, r + b): weight (r + b - s) / (2 d^2).
    {
        const std::size_t i = upper(r + a), j = lower(r + b);
        if (j > i) total += ((r + b) * weight_sum(i, j) - moment_sum(i, j)) / (2.0 * d2);
    }
    // Left ramp on (r - b, r - a): weight (s - (r - b)) / (2 d^2).
    {
        const std::size_t i = upper(r - b), j = lower(r - a);
        if (j > i) total += (moment_sum(i, j) - (r - b) * weight_sum(i, j)) / (2.0 * d2);
    }
    return height * total;
}

RadialDensity mollified_density(const PolarMeasure& mu, const Mollifier& k,
                                std::span<const double> grid, double alpha) {
    const double d = k.delta();
    RadialDensity out;
    out.alpha = alpha;
    for (double r : grid) {
        if (r < 2.0 * d - 1e-12 || r > mu.r_max() - 2.0 * d + 1e-12) {
            std::ostringstream os;
            os << "grid point " << r << " outside [" << 2.0 * d << ", " << mu.r_max() - 2.0 * d << "]";
            throw RangeError(os.str());
        }
        out.r.push_back(r);
        out.m.push_back(mu.evaluate(k, r));
    }
    return out;
}

double riemann_gap(const LatticeBall& ball, const TestFunction& h) {
    if (h.is_zero()) return 0.0;
    if (h.lower() <= 0.0 || h.upper() > ball.r_max())
        throw SupportError("test function support must lie inside (0, r_max]");
    long double sum = 0.0L;
    for (std::uint32_t i : ball.by_radius()) {
        const double s = ball.sigma(i);
        if (s <= h.lower()) continue;
        if (s >= h.upper()) break;
        sum += h(s) * ball.inv_norm2(i);
    }
    return std::abs(static_cast<double>(sum) / ball.log_scale() - kTwoPi * h.integral());
}

namespace {

// Range of by_radius entries with lo <= |y| <= hi.
std::pair<std::size_t, std::size_t> norm_range(const LatticeBall& ball, double lo, double hi) {
    const auto order = ball.by_radius();
    auto first = std::lower_bound(order.begin(), order.end(), lo,
                                  [&](std::uint32_t i, double v) { return ball.norm(i) < v; });
    auto last = std::upper_bound(order.begin(), order.end(), hi,
                                 [&](double v, std::uint32_t i) { return v < ball.norm(i); });
    return {static_cast<std::size_t>(first - order.begin()),
            static_cast<std::size_t>(last - order.begin())};
}

}  // namespace

double annulus_average(const LatticeBall& ball, const TestFunction& j, double delta, Site x) {
    if (!(delta > 0.0)) throw DomainError("annulus width must be positive");
    const double T = ball.scale();
    const double nx = std::sqrt(static_cast<double>(x.norm2()));
    if (!(nx > std::pow(T, 2.0 * delta)))
        throw DomainError("annulus needs |x| > T^(2 delta)");
    const double lo = nx * std::pow(T, -delta), hi = nx * std::pow(T, delta);
    if (hi > static_cast<double>(ball.radius()))
        throw RangeError("annulus around x leaves the ball");
    const auto [a, b] = norm_range(ball, lo, hi);
    long double sum = 0.0L;
    for (std::size_t k = a; k < b; ++k) {
        const std::uint32_t i = ball.by_radius()[k];
        sum += j(ball.sigma(i)) * ball.inv_norm2(i);
    }
    return static_cast<double>(sum) / (4.0 * std::numbers::pi * delta * ball.log_scale());
}

MesoscopicWindow MesoscopicWindow::make(double r, double theta, double epsilon, double q) {
    if (!(epsilon > 0.0 && epsilon < r)) throw DomainError("window needs 0 < epsilon < r");
    MesoscopicWindow w;
    w.r = r;
    w.theta = theta;
    w.epsilon = epsilon;
    w.q = q > 0.0 ? q : std::sqrt(epsilon);
    if (!(w.q < std::numbers::pi)) throw DomainError("angular half-width must be below pi");
    return w;
}

double iota_plus(double epsilon, double r, double T) {
    return std::log1p(std::pow(T, epsilon - r)) / std::log(T);
}

double iota_minus(double epsilon, double r, double T) {
    return -std::log1p(-std::pow(T, epsilon - r)) / std::log(T);
}

double mesoscopic_average(const LatticeBall& ball, const Configuration& eta,
                          const MesoscopicWindow& w) {
    const double T = ball.scale();
    if (!(w.epsilon > 0.0 && w.epsilon < w.r)) throw DomainError("window needs 0 < epsilon < r");
    const double centre = std::pow(T, w.r), half = std::pow(T, w.epsilon);
    if (centre + half > static_cast<double>(ball.radius()))
        throw RangeError("polar cube leaves the ball");
    const auto [a, b] = norm_range(ball, centre - half, centre + half);
    long double sum = 0.0L;
    std::size_t members = 0;
    for (std::size_t k = a; k < b; ++k) {
        const std::uint32_t i = ball.by_radius()[k];
        double diff = std::remainder(ball.polar(i).theta - w.theta, kTwoPi);
        if (std::abs(diff) > w.q) continue;
        ++members;
        if (eta[i]) sum += ball.inv_norm2(i);
    }
    if (members == 0) throw DomainError("polar cube contains no lattice site");
    const double norm = 2.0 * (iota_plus(w.epsilon, w.r, T) + iota_minus(w.epsilon, w.r, T)) * w.q *
                        ball.log_scale();
    return static_cast<double>(sum) / norm;
}

double interval_excess_constant(const PolarMeasure& mu,
                                std::span<const std::pair<double, double>> intervals) {
    double c = 0.0;
    for (const auto& [a, b] : intervals)
        c = std::max(c, (mu.mass(a, b) - (b - a)) * mu.log_scale());
    return c;
}

}  // namespace ssep2d
