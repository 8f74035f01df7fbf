#pragma once

#include <cstddef>
#include <limits>
#include <string>

#include "ssep2d/basis.hpp"
#include "ssep2d/radial_density.hpp"
#include "ssep2d/tilt.hpp"

namespace ssep2d {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDegenerateMobility = 1e-12;
inline constexpr double kDegenerateSlope = 1e-8;
inline constexpr double kHalfIntervalMargin = 1e-3;

double mobility(double a);

// A functional value that may be +infinity; location marks where it blew up.
struct EnergyValue {
    double value = 0.0;
    bool infinite = false;
    double location = 0.0;

    static EnergyValue infinity(double where) { return {kInfinity, true, where}; }
};

enum class EnergyVariant {
    plain,          // 1/4 int m'^2 / sigma(m)
    alpha,          // 1/8 int m'^2 / sigma(m_alpha)
    half_interval,  // (pi/4) int_0^{1/2} m'^2 / sigma(m)
};

// Cell differences with the mobility taken at the cell midpoint value.
EnergyValue energy_closed(const RadialDensity& m, EnergyVariant variant);

enum class BasisVariant {
    Q,        // sup {-int G'm - int sigma(m) G^2}
    Q_alpha,  // sup {-int G'm_alpha - 2 int sigma(m_alpha) G^2}
    hatI,     // pi * sup over G supported in (0, 1/2), m_alpha
    J_Q,      // pi * sup over G supported in (0, inf), m_alpha
};

struct BasisValue {
    double value = 0.0;
    bool infinite = false;
    bool regularized = false;  // A had a null space orthogonal to b
    std::size_t size = 0;
};

// Maximum of b.c - c.A.c over the span of the basis, scaled by the variant's constant.
BasisValue energy_basis(const RadialDensity& m, const TestBasis& basis, BasisVariant variant);

// pi Q(m) on M_{0,alpha}, +infinity off it.
EnergyValue rate_I_Q_alpha(const RadialDensity& m);

// -pi int Gamma'' m - pi int sigma(m) Gamma'^2 over the grid of m.
double J_gamma_linearized(const RadialDensity& m, const TiltProfile& tilt);

// (pi/2) (arcsin(2 beta - 1) - arcsin(2 alpha - 1))^2
double upsilon_closed(double alpha, double beta);

// (1 + sin(u0 + 2 (u1 - u0) r)) / 2, the exact minimiser on [0, 1/2].
double instanton_profile(double alpha, double beta, double r);

enum class InstantonMode { arcsin, direct };

struct InstantonResult {
    RadialDensity profile;  // grid of N + 1 points on [0, 1/2]
    double value = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    InstantonMode mode = InstantonMode::arcsin;
};

inline constexpr double kInstantonClamp = 1e-6;

// Minimises (pi/4) int_0^{1/2} m'^2 / sigma(m) with m(0) = beta, m(1/2) = alpha.
InstantonResult solve_instanton(double alpha, double beta, std::size_t N,
                                InstantonMode mode = InstantonMode::arcsin, int max_iterations = 200,
                                double tolerance = 1e-10);

// Discrete objective used by the direct solver.
double instanton_objective(const RadialDensity& m);

std::string to_string(EnergyVariant v);
std::string to_string(BasisVariant v);
std::string to_string(InstantonMode v);

}  // namespace ssep2d
