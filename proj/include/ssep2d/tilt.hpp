#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ssep2d/lattice.hpp"

namespace ssep2d {

inline constexpr double kDefaultClamp = 1e-4;

struct Jet {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

double logit(double p);

// Per-site tables. The origin is assigned radial coordinate 0.
struct SiteTables {
    std::vector<double> density;
    std::vector<double> potential;
};

// Density profile gamma on the radial axis together with its potential
// Gamma = (logit gamma - logit alpha) / 2.
class TiltProfile {
public:
    static TiltProfile flat(double alpha);
    // beta on [0, inner], alpha on [outer, inf), C^3 septic smoothstep between.
    static TiltProfile smoothstep(double alpha, double beta, double inner, double outer,
                                  double epsilon = kDefaultClamp);
    // alpha + amplitude * (1 - t^2)^4 on [lo, hi], t the rescaled offset from the centre.
    static TiltProfile bump(double alpha, double amplitude, double lo, double hi,
                            double epsilon = kDefaultClamp);
    // Cubic B-spline through uniformly spaced samples on [radii.front(), radii.back()],
    // constant outside. The last sample must equal alpha and radii.back() <= 1/2.
    static TiltProfile from_grid(double alpha, std::vector<double> radii,
                                 std::vector<double> values, double epsilon = kDefaultClamp);

    double alpha() const { return alpha_; }
    double epsilon() const { return epsilon_; }
    bool is_flat() const { return flat_; }
    const std::string& description() const { return description_; }

    Jet gamma(double r) const;
    Jet potential(double r) const;
    double Gamma(double r) const { return potential(r).value; }

    // max |gamma''| over a fine sample of [0, 1/2] (finite differences of gamma).
    double curvature_bound() const;

    SiteTables tabulate(const LatticeBall& ball) const;

private:
    TiltProfile() = default;

    double alpha_ = 0.5;
    double epsilon_ = kDefaultClamp;
    bool flat_ = true;
    std::string description_;
    std::function<Jet(double)> raw_;
};

}  // namespace ssep2d
