#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace ssep2d {

enum class KnotGrading {
    uniform,
    // Knots at lo + (hi - lo) * p(k/n) with p(s) = s^2 (3 - 2 s): spacing shrinks
    // quadratically towards both ends.
    ends,
};

// Cubic B-splines, uniform in the graded coordinate, whose supports lie inside
// [lo, hi]. With n knot intervals there are n - 3 functions; doubling n gives a
// nested span.
class TestBasis {
public:
    static TestBasis cubic(double lo, double hi, std::size_t intervals,
                           KnotGrading grading = KnotGrading::uniform);
    // A single cubic B-spline supported on [center - width/2, center + width/2].
    static TestBasis single_bump(double center, double width);

    std::size_t size() const { return intervals_ - 3; }
    std::size_t intervals() const { return intervals_; }
    double lower() const { return lo_; }
    double upper() const { return hi_; }
    KnotGrading grading() const { return grading_; }
    // Index of the knot interval containing r (clamped to [0, n - 1]).
    std::size_t cell(double r) const;
    std::pair<double, double> support(std::size_t k) const;
    double value(std::size_t k, double r) const;
    double derivative(std::size_t k, double r) const;
    // Knot positions lo, lo + h, ..., hi.
    std::vector<double> knots() const;

private:
    TestBasis(double lo, double hi, std::size_t n, KnotGrading g);
    double coordinate(double r) const;  // graded coordinate in [0, n]
    double coordinate_derivative(double r) const;
    double lo_, hi_;
    std::size_t intervals_;
    KnotGrading grading_;
};

// Cardinal cubic B-spline on [0, 4] and its derivative.
double cardinal_cubic(double u);
double cardinal_cubic_derivative(double u);

}  // namespace ssep2d
