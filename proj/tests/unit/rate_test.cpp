#include <doctest.h>

#include <cmath>
#include <vector>

#include "ssep2d/errors.hpp"
#include "ssep2d/rate.hpp"
#include "ssep2d/rng.hpp"

using namespace ssep2d;

namespace {

const double kPi3over8 = M_PI * M_PI * M_PI / 8.0;

RadialDensity sine(std::size_t n = 2048) {
    return RadialDensity::sample(
        [](double r) { return r < 0.5 ? 0.5 * (1.0 + std::sin(M_PI * r)) : 1.0; }, 0.0, 0.6, n, 1.0);
}

RadialDensity step(std::size_t n) {
    return RadialDensity::sample([](double r) { return r < 0.5 ? 0.9 : 0.5; }, 0.0, 0.6, n, 0.5);
}

RadialDensity constant(double a) {
    return RadialDensity::sample([a](double) { return a; }, 0.0, 0.6, 600, a);
}

// Smooth alpha-extended profile with m(0) = beta.
RadialDensity smooth(double alpha, double beta, double width, std::size_t n = 2048) {
    return RadialDensity::sample(
        [=](double r) {
            if (r >= width) return alpha;
            const double s = r / width;
            const double w = 1.0 - s * s * (3.0 - 2.0 * s);
            return alpha + (beta - alpha) * w;
        },
        0.0, 0.6, n, alpha);
}

}  // namespace

TEST_CASE("mobility") {
    CHECK(mobility(0.0) == 0.0);
    CHECK(mobility(1.0) == 0.0);
    CHECK(mobility(0.5) == 0.25);
}

TEST_CASE("closed-form energies") {
    for (auto v : {EnergyVariant::plain, EnergyVariant::alpha, EnergyVariant::half_interval})
        CHECK(energy_closed(constant(0.3), v).value == 0.0);

    const auto j = energy_closed(sine(), EnergyVariant::half_interval);
    CHECK(!j.infinite);
    CHECK(j.value == doctest::Approx(kPi3over8).epsilon(1e-3));

    for (std::size_t n : {600, 1200, 2400}) {
        const auto e = energy_closed(step(n), EnergyVariant::plain);
        CHECK(std::isfinite(e.value));
        CHECK(e.value > 0.0);
    }
    CHECK(energy_closed(step(2400), EnergyVariant::plain).value >
          energy_closed(step(1200), EnergyVariant::plain).value);
    CHECK(energy_closed(step(1200), EnergyVariant::plain).value >
          energy_closed(step(600), EnergyVariant::plain).value);

    const auto cliff = RadialDensity::sample([](double r) { return r < 0.3 ? 1.0 : 0.5; }, 0.0, 0.6,
                                             600, 0.5);
    const auto inf = energy_closed(cliff, EnergyVariant::plain);
    CHECK(inf.infinite);
    CHECK(inf.location == doctest::Approx(0.3).epsilon(0.01));

    const auto tent = RadialDensity::sample([](double r) { return 1.0 - std::abs(r - 0.3); }, 0.0,
                                            0.6, 600, 0.5);
    CHECK(energy_closed(tent, EnergyVariant::plain).infinite);
    const auto touch = RadialDensity::sample(
        [](double r) { return 1.0 - (r - 0.3) * (r - 0.3); }, 0.0, 0.6, 600, 0.5);
    CHECK(!energy_closed(touch, EnergyVariant::plain).infinite);
}

TEST_CASE("basis energies") {
    const auto basis = TestBasis::cubic(0.0, 0.55, 16);
    for (auto v : {BasisVariant::Q, BasisVariant::Q_alpha, BasisVariant::J_Q})
        CHECK(energy_basis(constant(0.4), basis, v).value == 0.0);

    const auto b64 = TestBasis::cubic(0.0, 0.55, 64, KnotGrading::ends);
    const auto jq = energy_basis(sine(), b64, BasisVariant::J_Q);
    CHECK(std::abs(jq.value / kPi3over8 - 1.0) < 0.01);
    CHECK(jq.value <= kPi3over8 + 1e-9);

    const auto hat = energy_basis(step(2400), TestBasis::cubic(0.0, 0.5 - kHalfIntervalMargin, 64),
                                  BasisVariant::hatI);
    CHECK(hat.value <= 1e-9);
    const double narrow =
        energy_basis(step(2400), TestBasis::single_bump(0.5, 0.01), BasisVariant::J_Q).value;
    const double wide =
        energy_basis(step(2400), TestBasis::single_bump(0.5, 0.1), BasisVariant::J_Q).value;
    CHECK(narrow > 9.99 * wide);
}

TEST_CASE("basis values grow under refinement and stay below the closed form") {
    for (auto m : {smooth(0.5, 0.8, 0.4), smooth(0.3, 0.1, 0.45), sine()}) {
        const double closed = energy_closed(m, EnergyVariant::plain).value;
        double previous = -1.0;
        for (std::size_t n : {8, 16, 32, 64}) {
            for (auto g : {KnotGrading::uniform, KnotGrading::ends}) {
                const auto q = energy_basis(m, TestBasis::cubic(0.0, 0.55, n, g), BasisVariant::Q);
                CHECK(q.value <= closed + 1e-9 + 2e-3 * closed);
                if (g == KnotGrading::uniform) {
                    CHECK(q.value >= previous - 1e-10);
                    previous = q.value;
                }
            }
        }
    }
}

TEST_CASE("nested knot spans") {
    const auto coarse = TestBasis::cubic(0.0, 0.5, 8, KnotGrading::ends);
    const auto fine = TestBasis::cubic(0.0, 0.5, 16, KnotGrading::ends);
    const auto kc = coarse.knots();
    const auto kf = fine.knots();
    for (std::size_t i = 0; i < kc.size(); ++i) CHECK(kf[2 * i] == doctest::Approx(kc[i]));
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        const auto [lo, hi] = coarse.support(k);
        CHECK(lo >= 0.0);
        CHECK(hi <= 0.5 + 1e-15);
    }
}

TEST_CASE("convexity of Q") {
    const auto m1 = smooth(0.5, 0.85, 0.4);
    const auto m2 = smooth(0.5, 0.2, 0.3);
    const double q1 = energy_closed(m1, EnergyVariant::plain).value;
    const double q2 = energy_closed(m2, EnergyVariant::plain).value;
    for (double t : {0.25, 0.5, 0.75}) {
        RadialDensity mix = m1;
        mix.exact = nullptr;
        for (std::size_t i = 0; i < mix.size(); ++i) mix.m[i] = t * m1.m[i] + (1 - t) * m2.m[i];
        CHECK(energy_closed(mix, EnergyVariant::plain).value <= t * q1 + (1 - t) * q2 + 1e-9);
    }
}

TEST_CASE("rate I_Q_alpha") {
    CHECK(rate_I_Q_alpha(constant(0.5)).value == 0.0);
    const auto inst = RadialDensity::sample(
        [](double r) { return r < 0.5 ? instanton_profile(0.5, 1.0, r) : 0.5; }, 0.0, 0.6, 2400, 0.5);
    CHECK(rate_I_Q_alpha(inst).value == doctest::Approx(kPi3over8).epsilon(1e-3));
    CHECK(rate_I_Q_alpha(sine()).value == doctest::Approx(M_PI * 0.25 * M_PI * M_PI * 0.5).epsilon(1e-3));
    auto off = constant(0.5);
    off.m.back() = 0.6;
    CHECK(rate_I_Q_alpha(off).infinite);
}

TEST_CASE("linearised tilt functional") {
    const auto m = smooth(0.5, 0.8, 0.4);
    CHECK(J_gamma_linearized(m, TiltProfile::flat(0.5)) == 0.0);

    const auto tilt = TiltProfile::smoothstep(0.5, 0.8, 0.1, 0.3);
    const auto g = RadialDensity::sample([&](double r) { return tilt.gamma(r).value; }, 0.0, 0.6,
                                         2048, 0.5);
    const double j = J_gamma_linearized(g, tilt);
    const double e = energy_closed(g, EnergyVariant::half_interval).value;
    CHECK(std::abs(j / e - 1.0) < 0.005);

    const double I = rate_I_Q_alpha(g).value;
    double best = -INFINITY;
    for (double beta : {0.6, 0.7, 0.75, 0.8, 0.85, 0.9})
        for (double outer : {0.25, 0.3, 0.35})
            best = std::max(best, J_gamma_linearized(g, TiltProfile::smoothstep(0.5, beta, 0.1, outer)));
    CHECK(best <= I * 1.01);
    CHECK(best >= 0.9 * I);
}

TEST_CASE("closed-form instanton value") {
    CHECK(upsilon_closed(0.3, 0.3) == 0.0);
    CHECK(upsilon_closed(0.5, 1.0) == doctest::Approx(kPi3over8).epsilon(1e-14));
    CHECK(upsilon_closed(0.5, 0.0) == doctest::Approx(upsilon_closed(0.5, 1.0)).epsilon(1e-14));
}

TEST_CASE("instanton solver") {
    const auto flat = solve_instanton(0.4, 0.4, 256);
    CHECK(flat.value <= 1e-20);
    for (double v : flat.profile.m) CHECK(v == doctest::Approx(0.4));

    for (auto mode : {InstantonMode::arcsin, InstantonMode::direct}) {
        const auto s = solve_instanton(0.5, 0.9, 1024, mode);
        CHECK(std::abs(s.value / upsilon_closed(0.5, 0.9) - 1.0) < 1e-3);
        CHECK(s.value >= upsilon_closed(0.5, 0.9) - 1e-6);
        double worst = 0.0;
        for (std::size_t i = 0; i < s.profile.size(); ++i)
            worst = std::max(worst, std::abs(s.profile.m[i] - instanton_profile(0.5, 0.9, s.profile.r[i])));
        CHECK(worst < 1e-3);
    }
    const auto edge = solve_instanton(0.5, 1.0, 1024, InstantonMode::arcsin);
    CHECK(edge.value == doctest::Approx(kPi3over8).epsilon(1e-3));

    CHECK_THROWS_AS(solve_instanton(0.5, 0.99, 1024, InstantonMode::direct, 1), ConvergenceError);
    CHECK_THROWS_AS(solve_instanton(0.5, 1.2, 64), DomainError);
}

TEST_CASE("instanton optimality under random bumps") {
    const auto s = solve_instanton(0.3, 0.8, 512, InstantonMode::direct);
    const double base = instanton_objective(s.profile);
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const double lo = 0.45 * rng.uniform();
        const double hi = lo + 0.02 + (0.5 - lo - 0.02) * rng.uniform();
        const double amp = 0.05 * (2.0 * rng.uniform() - 1.0);
        auto p = s.profile;
        for (std::size_t i = 1; i + 1 < p.size(); ++i) {
            const double r = p.r[i];
            if (r <= lo || r >= hi) continue;
            const double t = (2.0 * r - lo - hi) / (hi - lo);
            p.m[i] = std::clamp(p.m[i] + amp * std::pow(1 - t * t, 2), kInstantonClamp,
                                1 - kInstantonClamp);
        }
        CHECK(instanton_objective(p) >= base - 1e-10);
    }
}
