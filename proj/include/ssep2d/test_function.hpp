#pragma once

#include <functional>
#include <string>
#include <vector>

namespace ssep2d {

// Compactly supported function on the radial axis with its derivative.
class TestFunction {
public:
    using Fn = std::function<double(double)>;

    static TestFunction zero();
    // amplitude * (1 - s^2)^4, s the offset from the centre scaled to [-1, 1].
    static TestFunction smooth_bump(double lo, double hi, double amplitude = 1.0);
    // Piecewise linear hat peaking at the centre.
    static TestFunction tent(double lo, double hi, double amplitude = 1.0);
    static TestFunction custom(double lo, double hi, Fn value, Fn derivative, std::string name,
                               std::vector<double> kinks = {});

    double operator()(double r) const;
    double derivative(double r) const;
    double lower() const { return lo_; }
    double upper() const { return hi_; }
    bool is_zero() const { return zero_; }
    const std::string& name() const { return name_; }

    TestFunction scaled(double factor) const;
    // Integral of g(H(r), r) over the support, split at the kinks.
    double integral(const std::function<double(double, double)>& g) const;
    double integral() const;

private:
    double lo_ = 0.0, hi_ = 0.0;
    bool zero_ = false;
    Fn value_, derivative_;
    std::string name_;
    std::vector<double> kinks_;
};

inline constexpr double kSupportMargin = 0.05;

// Throws SupportError unless the support lies inside [margin, r_max - margin].
void require_support(const TestFunction& h, double r_max, double margin = kSupportMargin);

}  // namespace ssep2d
