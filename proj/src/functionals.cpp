#include "ssep2d/functionals.hpp"

#include <cmath>
#include <numbers>

#include "ssep2d/errors.hpp"
#include "ssep2d/quadrature.hpp"

namespace ssep2d {

namespace {

double component(const LatticeBall& ball, const Bond& b) {
    const Site& x = ball.site(b.tail);
    return b.dir == 0 ? x.x1 : x.x2;
}

double mobility_of(double a) { return a * (1.0 - a); }

void require_same_ball(const LatticeBall& ball, const TrajectoryAccumulator& acc) {
    if (acc.occ_time.size() != ball.size() || acc.bond_disagreement.size() != ball.bond_count())
        throw DomainError("accumulator does not match the ball");
}

}  // namespace

TrajectoryAccumulator frozen_accumulator(const LatticeBall& ball, const Configuration& eta,
                                         double horizon) {
    if (eta.size() != ball.size()) throw DomainError("configuration does not match the ball");
    TrajectoryAccumulator acc;
    acc.horizon = horizon;
    acc.occ_time.resize(ball.size());
    for (std::size_t i = 0; i < ball.size(); ++i) acc.occ_time[i] = eta[i] ? horizon : 0.0;
    acc.bond_disagreement.resize(ball.bond_count());
    for (std::size_t b = 0; b < ball.bond_count(); ++b) {
        const Bond& bond = ball.bonds()[b];
        acc.bond_disagreement[b] = eta[bond.tail] != eta[bond.head] ? horizon : 0.0;
    }
    if (auto o = ball.origin()) acc.origin_occupation = acc.occ_time[*o];
    return acc;
}

double W_J_delta(const LatticeBall& ball, const TrajectoryAccumulator& acc,
                 const BondFunctionalSpec& spec) {
    require_same_ball(ball, acc);
    if (spec.fn.is_zero()) return 0.0;
    require_support(spec.fn, ball.r_max());
    const Mollifier kernel = Mollifier::ramp(spec.delta);
    const PolarMeasure mean = PolarMeasure::time_averaged(ball, acc);
    long double total = 0.0L;
    std::size_t last_site = SIZE_MAX;
    double local_mobility = 0.0, weight_j = 0.0;
    for (std::size_t b = 0; b < ball.bond_count(); ++b) {
        const Bond& bond = ball.bonds()[b];
        if (ball.is_origin(bond.tail)) continue;
        if (bond.tail != last_site) {
            last_site = bond.tail;
            const double s = ball.sigma(bond.tail);
            weight_j = spec.fn(s);
            if (weight_j != 0.0) {
                const double m = s < 0.5 ? mean.evaluate(kernel, s) : spec.alpha;
                local_mobility = mobility_of(m);
            }
        }
        if (weight_j == 0.0) continue;
        const double xj = component(ball, bond);
        const double inv2 = ball.inv_norm2(bond.tail);
        total += weight_j * xj * xj * inv2 * inv2 *
                 (acc.bond_disagreement[b] - 2.0 * acc.horizon * local_mobility);
    }
    return static_cast<double>(total) / ball.log_scale();
}

EnergyParts V_H_energy(const LatticeBall& ball, const TrajectoryAccumulator& acc,
                       const TestFunction& h) {
    require_same_ball(ball, acc);
    EnergyParts out;
    if (h.is_zero()) return out;
    require_support(h, ball.r_max());
    long double lin = 0.0L, quad = 0.0L;
    for (std::size_t b = 0; b < ball.bond_count(); ++b) {
        const Bond& bond = ball.bonds()[b];
        if (ball.is_origin(bond.tail)) continue;
        const double hv = h(ball.sigma(bond.tail));
        if (hv == 0.0) continue;
        const double xj = component(ball, bond);
        const double inv2 = ball.inv_norm2(bond.tail);
        lin += xj * inv2 * hv * acc.signed_bond(ball, b);
        quad += xj * xj * inv2 * inv2 * hv * hv * acc.bond_disagreement[b];
    }
    out.linear = static_cast<double>(lin);
    out.quadratic = static_cast<double>(quad) / ball.log_scale();
    return out;
}

double summation_by_parts_residual(const LatticeBall& ball, const Configuration& eta,
                                   const TestFunction& h) {
    if (eta.size() != ball.size()) throw DomainError("configuration does not match the ball");
    if (h.is_zero()) return 0.0;
    require_support(h, ball.r_max());
    long double lhs = 0.0L;
    for (const Bond& bond : ball.bonds()) {
        if (ball.is_origin(bond.tail)) continue;
        const double hv = h(ball.sigma(bond.tail));
        if (hv == 0.0) continue;
        lhs += component(ball, bond) * ball.inv_norm2(bond.tail) * hv *
               (static_cast<int>(eta[bond.head]) - static_cast<int>(eta[bond.tail]));
    }
    long double rhs = 0.0L;
    const PolarMeasure mu = PolarMeasure::from_configuration(ball, eta);
    for (const Atom& a : mu.atoms()) rhs += a.weight * h.derivative(a.sigma);
    return std::abs(static_cast<double>(lhs + 2.0L * std::numbers::pi * rhs));
}

double W_gamma(const LatticeBall& ball, const TrajectoryAccumulator& acc, const TiltProfile& tilt) {
    require_same_ball(ball, acc);
    if (tilt.is_flat()) return 0.0;
    long double total = 0.0L;
    for (std::size_t b = 0; b < ball.bond_count(); ++b) {
        const Bond& bond = ball.bonds()[b];
        if (ball.is_origin(bond.tail) || acc.bond_disagreement[b] == 0.0) continue;
        const double g1 = tilt.potential(ball.sigma(bond.tail)).d1;
        if (g1 == 0.0) continue;
        const double xj = component(ball, bond);
        const double inv2 = ball.inv_norm2(bond.tail);
        total += g1 * g1 * xj * xj * inv2 * inv2 * acc.bond_disagreement[b];
    }
    return static_cast<double>(total) / (4.0 * ball.log_scale());
}

double W_gamma_expected(const LatticeBall& ball, const TiltProfile& tilt) {
    if (tilt.is_flat()) return 0.0;
    const SiteTables tables = tilt.tabulate(ball);
    long double total = 0.0L;
    for (const Bond& bond : ball.bonds()) {
        if (ball.is_origin(bond.tail)) continue;
        const double g1 = tilt.potential(ball.sigma(bond.tail)).d1;
        if (g1 == 0.0) continue;
        const double gx = tables.density[bond.tail], gy = tables.density[bond.head];
        const double xj = component(ball, bond);
        const double inv2 = ball.inv_norm2(bond.tail);
        total += g1 * g1 * xj * xj * inv2 * inv2 * (gx * (1.0 - gy) + gy * (1.0 - gx));
    }
    return static_cast<double>(total) / (4.0 * ball.log_scale());
}

double W_gamma_limit(const TiltProfile& tilt) {
    if (tilt.is_flat()) return 0.0;
    return std::numbers::pi * integrate(
                                  [&](double r) {
                                      const double g1 = tilt.potential(r).d1;
                                      return g1 * g1 * mobility_of(tilt.gamma(r).value);
                                  },
                                  0.0, 0.5);
}

}  // namespace ssep2d
