#pragma once

#include "ssep2d/configuration.hpp"
#include "ssep2d/dynamics.hpp"
#include "ssep2d/lattice.hpp"
#include "ssep2d/polar.hpp"
#include "ssep2d/test_function.hpp"
#include "ssep2d/tilt.hpp"

namespace ssep2d {

struct BondFunctionalSpec {
    TestFunction fn = TestFunction::zero();
    double delta = 0.05;
    double alpha = 0.5;
};

// Accumulator of a configuration held fixed for the given horizon.
TrajectoryAccumulator frozen_accumulator(const LatticeBall& ball, const Configuration& eta,
                                         double horizon = 1.0);

// Time integral of W^{J,delta}. The mobility term uses the mollified density of
// the time-averaged measure, so the integral of sigma(m) is horizon * sigma(m_bar).
double W_J_delta(const LatticeBall& ball, const TrajectoryAccumulator& acc,
                 const BondFunctionalSpec& spec);

struct EnergyParts {
    double linear = 0.0;
    double quadratic = 0.0;
    double value() const { return linear - quadratic; }
};

// Time integral of V^H split into its linear and quadratic parts.
EnergyParts V_H_energy(const LatticeBall& ball, const TrajectoryAccumulator& acc,
                       const TestFunction& h);

// |sum (x_j/|x|^2) H(sigma) [eta(x+e_j) - eta(x)] + 2 pi mu(H')|.
double summation_by_parts_residual(const LatticeBall& ball, const Configuration& eta,
                                   const TestFunction& h);

// Time integral of (1/(4 log T)) sum Gamma'(sigma)^2 (x_j^2/|x|^4) [eta(x+e_j) - eta(x)]^2.
double W_gamma(const LatticeBall& ball, const TrajectoryAccumulator& acc, const TiltProfile& tilt);

// Exact expectation of W_gamma under nu_{T,gamma} over a unit horizon.
double W_gamma_expected(const LatticeBall& ball, const TiltProfile& tilt);

// pi int Gamma'^2 sigma(gamma), the large-T value of W_gamma_expected.
double W_gamma_limit(const TiltProfile& tilt);

}  // namespace ssep2d
