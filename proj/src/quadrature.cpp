#include "ssep2d/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ssep2d {

double integrate(const std::function<double(double)>& f, double a, double b, double tolerance) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tolerance);
}

}  // namespace ssep2d
