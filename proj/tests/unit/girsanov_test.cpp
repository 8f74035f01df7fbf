#include <doctest.h>

#include <cmath>

#include "ssep2d/errors.hpp"
#include "ssep2d/girsanov.hpp"

using namespace ssep2d;

TEST_CASE("flat tilt gives a trivial likelihood ratio") {
    const auto b = LatticeBall::build(100.0, 0.55);
    const auto flat = TiltProfile::flat(0.5);
    for (const auto& r : run_replicas(b, flat, Drive::tilted, 3, 4, 1)) {
        CHECK(r.rn.log_psi_stat == 0.0);
        CHECK(r.rn.log_psi_pot == 0.0);
        CHECK(r.rn.log_psi_dyn == 0.0);
        CHECK(r.rn.log_rn_total == 0.0);
    }
    const auto m = martingale_check(b, flat, 8, 5, 1);
    CHECK(m.mean == 1.0);
    CHECK(m.deviation == 0.0);
    const auto e = entropy_estimate(b, flat, 4, 5, 1);
    CHECK(e.mean == 0.0);
}

TEST_CASE("factor identities") {
    const auto b = LatticeBall::build(100.0, 0.6);
    const auto tilt = TiltProfile::smoothstep(0.5, 0.8, 0.1, 0.3);
    const auto eta = sample_product_measure(b, 0.5, 2);
    CHECK(log_psi_pot(b, tilt, eta, eta) == 0.0);
    CHECK(log_psi_stat(b, TiltProfile::flat(0.5), eta) == 0.0);
    CHECK(log_psi_stat(b, tilt, eta) == log_psi_stat(b, tilt, eta));

    const auto tables = tilt.tabulate(b);
    const Configuration full(b.size(), true);
    double expected = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) expected += std::log(tables.density[i] / 0.5);
    CHECK(log_psi_stat(b, tilt, full) == doctest::Approx(expected).epsilon(1e-12));

    const auto x = *b.index({2, 1}), y = *b.index({3, 1});
    Configuration before(b.size());
    before.set(x, true);
    Configuration after = before;
    exchange(b, after, x, y);
    CHECK(log_psi_pot(b, tilt, before, after) ==
          doctest::Approx(tables.potential[y] - tables.potential[x]).epsilon(1e-14));
}

TEST_CASE("dynamical factor") {
    TrajectoryAccumulator acc;
    acc.dyn_integral = 0.25;
    CHECK(log_psi_dyn(acc, 100.0) == -12.5);
    acc.dyn_integral = 0.0;
    CHECK(log_psi_dyn(acc, 100.0) == 0.0);

    const auto b = LatticeBall::build(100.0, 0.6);
    const auto tilt = TiltProfile::smoothstep(0.5, 0.8, 0.1, 0.3);
    DynamicsSpec spec;
    spec.T = 100.0;
    spec.tilt = tilt;
    const auto path = run_trajectory(b, spec, Configuration(b.size(), true));
    CHECK(log_psi_dyn(path.accumulator, 100.0) == 0.0);
}

TEST_CASE("breakdown is additive and scaled") {
    const auto b = LatticeBall::build(100.0, 0.55);
    const auto tilt = TiltProfile::bump(0.5, 0.2, 0.15, 0.4);
    for (const auto& r : run_replicas(b, tilt, Drive::tilted, 9, 6, 1)) {
        CHECK(r.rn.log_rn_total == r.rn.log_psi_stat + r.rn.log_psi_pot + r.rn.log_psi_dyn);
        CHECK(r.rn.scaled_total == doctest::Approx(r.rn.log_rn_total * std::log(100.0) / 100.0));
        const auto again = girsanov_breakdown(b, tilt, r.initial, r.path);
        CHECK(again.log_rn_total == r.rn.log_rn_total);
        CHECK(r.path.final_state.particle_count() == r.initial.particle_count());
    }
}

TEST_CASE("replicas do not depend on the worker count") {
    const auto b = LatticeBall::build(100.0, 0.55);
    const auto tilt = TiltProfile::bump(0.5, 0.2, 0.15, 0.4);
    const auto one = run_replicas(b, tilt, Drive::tilted, 12, 6, 1);
    const auto three = run_replicas(b, tilt, Drive::tilted, 12, 6, 3);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].replica == i);
        CHECK(one[i].rn.log_rn_total == three[i].rn.log_rn_total);
        CHECK(one[i].path.final_state == three[i].path.final_state);
    }
}

TEST_CASE("Monte Carlo estimates") {
    const auto b = LatticeBall::build(100.0, 0.55);
    const auto tilt = TiltProfile::smoothstep(0.5, 0.8, 0.1, 0.3);
    CHECK_THROWS_AS(entropy_estimate(b, tilt, 1, 1), DomainError);
    CHECK_THROWS_AS(MonteCarloEstimate::from_samples({1.0}), DomainError);

    const auto small = entropy_estimate(b, tilt, 64, 21, 1);
    const auto large = entropy_estimate(b, tilt, 256, 22, 1);
    CHECK(small.mean < 0.0);
    CHECK(std::abs(large.standard_error / small.standard_error - 0.5) < 0.5 * 0.3);

    const auto mild = martingale_check(b, TiltProfile::bump(0.5, 0.01, 0.2, 0.4), 256, 4, 1);
    CHECK(!mild.variance_blowup);
    CHECK(std::abs(mild.deviation) <= 3.0);

    const auto strong = martingale_check(b, TiltProfile::smoothstep(0.5, 0.95, 0.1, 0.3), 32, 4, 1);
    CHECK(strong.variance_blowup);
}

TEST_CASE("scaled likelihood ratio stays bounded across T") {
    const auto tilt = TiltProfile::smoothstep(0.5, 0.8, 0.1, 0.3);
    std::vector<double> c;
    for (double T : {1e2, 1e3}) {
        const auto b = LatticeBall::build(T, 0.55);
        c.push_back(rn_bound_constant(run_replicas(b, tilt, Drive::tilted, 5, 8, 1), T));
    }
    CHECK(c[0] > 0.0);
    CHECK(std::abs(c[1] / c[0] - 1.0) <= 0.5);
}
