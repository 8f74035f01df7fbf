#include "ssep2d/basis.hpp"

#include <algorithm>
#include <cmath>

#include "ssep2d/errors.hpp"

namespace ssep2d {

double cardinal_cubic(double u) {
    if (u <= 0.0 || u >= 4.0) return 0.0;
    if (u < 1.0) return u * u * u / 6.0;
    if (u < 2.0) return (((-3.0 * u + 12.0) * u - 12.0) * u + 4.0) / 6.0;
    if (u < 3.0) return (((3.0 * u - 24.0) * u + 60.0) * u - 44.0) / 6.0;
    const double v = 4.0 - u;
    return v * v * v / 6.0;
}

double cardinal_cubic_derivative(double u) {
    if (u <= 0.0 || u >= 4.0) return 0.0;
    if (u < 1.0) return u * u / 2.0;
    if (u < 2.0) return (-9.0 * u * u + 24.0 * u - 12.0) / 6.0;
    if (u < 3.0) return (9.0 * u * u - 48.0 * u + 60.0) / 6.0;
    const double v = 4.0 - u;
    return -v * v / 2.0;
}

namespace {

double grade(double s) { return s * s * (3.0 - 2.0 * s); }

double ungrade(double y) {
    y = std::clamp(y, 0.0, 1.0);
    return 0.5 - std::sin(std::asin(1.0 - 2.0 * y) / 3.0);
}

}  // namespace

TestBasis::TestBasis(double lo, double hi, std::size_t n, KnotGrading g)
    : lo_(lo), hi_(hi), intervals_(n), grading_(g) {}

TestBasis TestBasis::cubic(double lo, double hi, std::size_t intervals, KnotGrading grading) {
    if (!(hi > lo)) throw DomainError("basis interval must have hi > lo");
    if (intervals < 4) throw DomainError("cubic basis needs at least 4 knot intervals");
    return {lo, hi, intervals, grading};
}

TestBasis TestBasis::single_bump(double center, double width) {
    if (!(width > 0.0)) throw DomainError("bump width must be positive");
    return {center - 0.5 * width, center + 0.5 * width, 4, KnotGrading::uniform};
}

double TestBasis::coordinate(double r) const {
    const double y = (r - lo_) / (hi_ - lo_);
    const double s = grading_ == KnotGrading::uniform ? y : ungrade(y);
    return s * static_cast<double>(intervals_);
}

double TestBasis::coordinate_derivative(double r) const {
    const double n = static_cast<double>(intervals_);
    if (grading_ == KnotGrading::uniform) return n / (hi_ - lo_);
    const double s = ungrade((r - lo_) / (hi_ - lo_));
    const double slope = 6.0 * s * (1.0 - s);
    return slope > 0.0 ? n / ((hi_ - lo_) * slope) : 0.0;
}

std::size_t TestBasis::cell(double r) const {
    const double c = std::floor(coordinate(r));
    return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(intervals_ - 1)));
}

std::pair<double, double> TestBasis::support(std::size_t k) const {
    const auto ks = knots();
    return {ks[k], ks[k + 4]};
}

double TestBasis::value(std::size_t k, double r) const {
    if (r <= lo_ || r >= hi_) return 0.0;
    return cardinal_cubic(coordinate(r) - static_cast<double>(k));
}

double TestBasis::derivative(std::size_t k, double r) const {
    if (r <= lo_ || r >= hi_) return 0.0;
    return cardinal_cubic_derivative(coordinate(r) - static_cast<double>(k)) *
           coordinate_derivative(r);
}

std::vector<double> TestBasis::knots() const {
    std::vector<double> out(intervals_ + 1);
    const double n = static_cast<double>(intervals_);
    for (std::size_t i = 0; i <= intervals_; ++i) {
        const double s = static_cast<double>(i) / n;
        const double y = grading_ == KnotGrading::uniform ? s : grade(s);
        out[i] = i == intervals_ ? hi_ : lo_ + (hi_ - lo_) * y;
    }
    return out;
}

}  // namespace ssep2d
