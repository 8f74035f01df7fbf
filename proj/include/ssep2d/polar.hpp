#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ssep2d/configuration.hpp"
#include "ssep2d/dynamics.hpp"
#include "ssep2d/lattice.hpp"
#include "ssep2d/radial_density.hpp"
#include "ssep2d/test_function.hpp"

namespace ssep2d {

class Mollifier {
public:
    enum class Kind { box, ramp };

    static Mollifier box(double delta);
    // Plateau 1/(2 delta) on |s| <= delta - delta^2, linear to zero at delta + delta^2.
    static Mollifier ramp(double delta);

    Kind kind() const { return kind_; }
    double delta() const { return delta_; }
    double operator()(double s) const;
    double reach() const;
    std::string describe() const;

private:
    Mollifier(Kind k, double d) : kind_(k), delta_(d) {}
    Kind kind_;
    double delta_;
};

struct Atom {
    double sigma;
    double weight;
    double radius;
    std::uint32_t site;
};

// Atomic measure on the radial exponent axis, atoms sorted by sigma. The origin
// never carries an atom.
class PolarMeasure {
public:
    static PolarMeasure from_configuration(const LatticeBall& ball, const Configuration& eta);
    // Occupation times divided by the horizon.
    static PolarMeasure time_averaged(const LatticeBall& ball, const TrajectoryAccumulator& acc);
    // All sites occupied: the reference measure lambda_T.
    static PolarMeasure reference(const LatticeBall& ball);
    // Occupation level per site in [0, 1].
    static PolarMeasure from_occupancy(const LatticeBall& ball, std::span<const double> level);
    // a * m1 + b * m2 atom by atom; both must come from the same ball.
    static PolarMeasure combine(double a, const PolarMeasure& m1, double b, const PolarMeasure& m2);

    std::span<const Atom> atoms() const { return atoms_; }
    double log_scale() const { return log_T_; }
    double r_max() const { return r_max_; }
    double total_mass() const { return prefix_w_.back(); }

    // Mass of the closed interval [a, b].
    double mass(double a, double b) const;
    double integrate(const TestFunction& h, double margin = kSupportMargin) const;
    // mu(psi_{r, delta}), exact for the piecewise linear kernels.
    double evaluate(const Mollifier& k, double r) const;

private:
    PolarMeasure() = default;
    void index();
    std::size_t lower(double s) const;  // first atom with sigma >= s
    std::size_t upper(double s) const;  // first atom with sigma > s
    double weight_sum(std::size_t i, std::size_t j) const { return prefix_w_[j] - prefix_w_[i]; }
    double moment_sum(std::size_t i, std::size_t j) const { return prefix_sw_[j] - prefix_sw_[i]; }

    double log_T_ = 0.0;
    double r_max_ = 0.0;
    std::vector<Atom> atoms_;
    std::vector<double> sigma_;
    std::vector<double> prefix_w_{0.0};
    std::vector<double> prefix_sw_{0.0};
};

// m_delta(r) = mu(psi_{r, delta}) on the grid, which must lie in [2 delta, r_max - 2 delta].
RadialDensity mollified_density(const PolarMeasure& mu, const Mollifier& k,
                                std::span<const double> grid, double alpha = 0.5);

// |(1/log T) sum_x H(sigma_T(x)) / |x|^2 - 2 pi int H|.
double riemann_gap(const LatticeBall& ball, const TestFunction& h);

// (1/(4 pi delta log T)) sum over |x| T^-delta <= |y| <= |x| T^delta of J(sigma_T(y)) / |y|^2.
double annulus_average(const LatticeBall& ball, const TestFunction& j, double delta, Site x);

struct MesoscopicWindow {
    double r = 0.0;
    double theta = 0.0;
    double epsilon = 0.0;
    double q = 0.0;

    // q defaults to sqrt(epsilon).
    static MesoscopicWindow make(double r, double theta, double epsilon, double q = -1.0);
};

double iota_plus(double epsilon, double r, double T);
double iota_minus(double epsilon, double r, double T);

// Normalised weighted occupation over the polar cube of the window.
double mesoscopic_average(const LatticeBall& ball, const Configuration& eta,
                          const MesoscopicWindow& window);

// Smallest C with mu([a, b]) <= (b - a) + C / log T over the given intervals (floored at 0).
double interval_excess_constant(const PolarMeasure& mu,
                                std::span<const std::pair<double, double>> intervals);

}  // namespace ssep2d
