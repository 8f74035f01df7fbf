#include <doctest.h>

#include <cmath>
#include <vector>

#include "ssep2d/dynamics.hpp"
#include "ssep2d/errors.hpp"

using namespace ssep2d;

namespace {

DynamicsSpec make_spec(double T, std::optional<TiltProfile> tilt, std::uint64_t seed,
                       std::uint64_t replica = 0) {
    DynamicsSpec s;
    s.T = T;
    s.tilt = std::move(tilt);
    s.seed = seed;
    s.replica = replica;
    return s;
}

}  // namespace

TEST_CASE("all-ones configuration is frozen") {
    const auto b = LatticeBall::build(100.0, 0.6);
    const auto t = run_trajectory(b, make_spec(100.0, TiltProfile::smoothstep(0.5, 0.8, 0.1, 0.3), 1),
                                  Configuration(b.size(), true));
    CHECK(t.accumulator.event_count == 0);
    for (double o : t.accumulator.occ_time) CHECK(o == 1.0);
    for (double d : t.accumulator.bond_disagreement) CHECK(d == 0.0);
    CHECK(t.accumulator.dyn_integral == 0.0);
    CHECK(t.accumulator.origin_occupation == 1.0);
}

TEST_CASE("untilted run has zero dynamical integral and bounded accumulators") {
    const auto b = LatticeBall::build(100.0, 0.6);
    const auto t = run_trajectory(b, make_spec(100.0, TiltProfile::flat(0.5), 2),
                                  sample_product_measure(b, 0.5, 2));
    CHECK(t.accumulator.dyn_integral == 0.0);
    CHECK(t.accumulator.event_count > 0);
    for (double o : t.accumulator.occ_time) {
        CHECK(o >= 0.0);
        CHECK(o <= 1.0 + 1e-12);
    }
    for (double d : t.accumulator.bond_disagreement) {
        CHECK(d >= 0.0);
        CHECK(d <= 1.0 + 1e-12);
    }
}

TEST_CASE("event count matches the stationary jump rate") {
    const auto b = LatticeBall::build(100.0, 0.6);
    const double alpha = 0.5;
    const double expected = 0.5 * 100.0 * b.bond_count() * 2.0 * alpha * (1.0 - alpha);
    double total = 0.0;
    const int replicas = 32;
    for (int r = 0; r < replicas; ++r) {
        const auto t = run_trajectory(b, make_spec(100.0, std::nullopt, 7, r),
                                      sample_product_measure(b, alpha, 7, 1000 + r));
        total += static_cast<double>(t.accumulator.event_count);
    }
    CHECK(std::abs(total / replicas / expected - 1.0) < 0.2);
}

TEST_CASE("particle count is conserved and runs are reproducible") {
    const auto b = LatticeBall::build(100.0, 0.6);
    const auto tilt = TiltProfile::bump(0.5, 0.3, 0.1, 0.4);
    const auto eta = sample_product_measure(b, tilt, 4);
    const auto a = run_trajectory(b, make_spec(100.0, tilt, 4, 3), eta);
    const auto c = run_trajectory(b, make_spec(100.0, tilt, 4, 3), eta);
    CHECK(a.final_state.particle_count() == eta.particle_count());
    CHECK(a.final_state == c.final_state);
    CHECK(a.accumulator.occ_time == c.accumulator.occ_time);
    CHECK(a.accumulator.bond_disagreement == c.accumulator.bond_disagreement);
    CHECK(a.accumulator.dyn_integral == c.accumulator.dyn_integral);
    CHECK(a.accumulator.event_count == c.accumulator.event_count);
    const auto d = run_trajectory(b, make_spec(100.0, tilt, 4, 4), eta);
    CHECK(!(d.final_state == a.final_state));
}

TEST_CASE("incremental dynamical integrand matches recomputation") {
    const auto b = LatticeBall::build(100.0, 0.6);
    const auto tilt = TiltProfile::smoothstep(0.5, 0.85, 0.05, 0.35);
    ExclusionEngine engine(b, make_spec(100.0, tilt, 11), sample_product_measure(b, tilt, 11));
    const std::size_t particles = engine.state().particle_count();
    for (int step = 1; step <= 10; ++step) {
        engine.advance(0.1 * step);
        const double scratch = dyn_integrand(b, tilt, engine.state());
        CHECK(std::abs(engine.current_dyn_integrand() - scratch) <= 1e-9 * std::max(1.0, std::abs(scratch)));
        CHECK(engine.state().particle_count() == particles);
    }
}

TEST_CASE("per-jump conservation") {
    const auto b = LatticeBall::build(30.0, 0.6);
    ExclusionEngine engine(b, make_spec(30.0, std::nullopt, 5), sample_product_measure(b, 0.4, 5));
    const std::size_t particles = engine.state().particle_count();
    std::size_t jumps = 0;
    bool conserved = true;
    engine.advance(1.0, UINT64_MAX, [&](double) {
        ++jumps;
        conserved = conserved && engine.state().particle_count() == particles;
    });
    CHECK(jumps == engine.events());
    CHECK(conserved);
}

TEST_CASE("stationary occupation is near alpha") {
    const auto b = LatticeBall::build(100.0, 0.6);
    const double alpha = 0.3;
    const auto t = run_trajectory(b, make_spec(100.0, std::nullopt, 8),
                                  sample_product_measure(b, alpha, 8));
    double mean = 0.0;
    for (double o : t.accumulator.occ_time) mean += o;
    mean /= static_cast<double>(b.size());
    // Per-site variance of the time average is below alpha(1 - alpha); 3 sigma.
    CHECK(std::abs(mean - alpha) < 3.0 * std::sqrt(alpha * (1 - alpha) / b.size()));
}

TEST_CASE("detailed balance") {
    const auto b = LatticeBall::build(100.0, 0.6);
    CHECK(check_detailed_balance(b, TiltProfile::flat(0.5)) == 0.0);
    const auto tilt = TiltProfile::smoothstep(0.4, 0.9, 0.05, 0.45);
    CHECK(check_detailed_balance(b, tilt) <= 1e-12);
    CHECK(check_detailed_balance(b, tilt, 1.1) == doctest::Approx(0.1).epsilon(1e-6));

    const auto r4 = LatticeBall::build(16.0, 0.51);
    CHECK(check_detailed_balance(r4, TiltProfile::bump(0.5, -0.3, 0.1, 0.45)) <= 1e-12);
}

TEST_CASE("small-lattice stationarity") {
    const auto b = LatticeBall::from_sites(4.0, {{1, 1}, {2, 1}, {1, 2}, {2, 2}});
    const auto none = stationary_check_small(b, make_spec(4.0, std::nullopt, 1), 0, 1000);
    CHECK(none.states == 1);
    CHECK(none.tv_distance == 0.0);

    const auto plain = stationary_check_small(b, make_spec(4.0, std::nullopt, 2), 2, 1000000);
    CHECK(plain.states == 6);
    for (double p : plain.exact) CHECK(p == doctest::Approx(1.0 / 6.0));
    CHECK(plain.tv_distance < 0.02);

    const auto tilt = TiltProfile::smoothstep(0.5, 0.2, 0.3, 0.45);
    const auto tilted = stationary_check_small(b, make_spec(4.0, tilt, 3), 2, 1000000);
    CHECK(tilted.tv_distance < 0.02);
    bool uniform = true;
    for (double p : tilted.exact) uniform = uniform && std::abs(p - 1.0 / 6.0) < 1e-9;
    CHECK(!uniform);

    const auto big = LatticeBall::build(100.0, 0.6);
    CHECK_THROWS_AS(stationary_check_small(big, make_spec(100.0, std::nullopt, 1), 2, 10),
                    StateSpaceError);
}

TEST_CASE("Dirichlet form by enumeration") {
    const auto two = LatticeBall::from_sites(10.0, {{1, 0}, {2, 0}});
    const double T = two.scale(), alpha = 0.3;
    std::vector<double> constant(4, 2.5);
    CHECK(dirichlet_form_exact(two, alpha, constant) == 0.0);

    // f(eta) = eta(x0), indexed by the bit pattern.
    std::vector<double> f{0.0, 1.0, 0.0, 1.0};
    const double e = dirichlet_form_exact(two, alpha, f);
    CHECK(e == doctest::Approx(T * alpha * (1 - alpha) / 2.0).epsilon(1e-14));

    std::vector<double> f2{0.0, 2.0, 0.0, 2.0};
    CHECK(dirichlet_form_exact(two, alpha, f2) == doctest::Approx(4.0 * e).epsilon(1e-14));
}
