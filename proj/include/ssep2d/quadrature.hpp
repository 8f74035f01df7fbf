#pragma once

#include <functional>

namespace ssep2d {

// Adaptive Gauss-Kronrod integral of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tolerance = 1e-13);

}  // namespace ssep2d
