#include <doctest.h>

#include <cmath>
#include <vector>

#include "ssep2d/errors.hpp"
#include "ssep2d/functionals.hpp"
#include "ssep2d/polar.hpp"

using namespace ssep2d;

TEST_CASE("polar measure atoms") {
    const auto b = LatticeBall::build(100.0, 0.6);
    const auto empty = PolarMeasure::from_configuration(b, Configuration(b.size()));
    CHECK(empty.total_mass() == 0.0);
    CHECK(empty.integrate(TestFunction::smooth_bump(0.2, 0.4)) == 0.0);

    Configuration one(b.size());
    one.set(*b.index({10, 0}), true);
    const auto mu = PolarMeasure::from_configuration(b, one);
    REQUIRE(mu.atoms().size() == 1);
    CHECK(mu.atoms()[0].sigma == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mu.atoms()[0].weight ==
          doctest::Approx(1.0 / (2 * M_PI * 100.0 * std::log(100.0))).epsilon(1e-14));

    Configuration origin_only(b.size());
    origin_only.set(*b.origin(), true);
    CHECK(PolarMeasure::from_configuration(b, origin_only).total_mass() == 0.0);
}

TEST_CASE("all-ones configuration gives the reference measure") {
    const auto b = LatticeBall::build(100.0, 0.6);
    const auto mu = PolarMeasure::from_configuration(b, Configuration(b.size(), true));
    const auto lambda = PolarMeasure::reference(b);
    CHECK(mu.total_mass() == lambda.total_mass());
    const double m = lambda.mass(0.2, 0.4);
    CHECK(m >= 0.15);
    CHECK(m <= 0.2 + 10.0 / std::log(100.0));
}

TEST_CASE("integration and support rules") {
    const auto b = LatticeBall::build(100.0, 0.6);
    const auto lambda = PolarMeasure::reference(b);
    CHECK(lambda.integrate(TestFunction::zero()) == 0.0);
    CHECK_THROWS_AS(lambda.integrate(TestFunction::smooth_bump(0.3, 0.58)), SupportError);
    CHECK_THROWS_AS(lambda.integrate(TestFunction::smooth_bump(0.01, 0.3)), SupportError);

    const auto h = TestFunction::tent(0.2, 0.4);
    std::vector<double> gaps;
    for (double T : {1e2, 1e4}) {
        const auto ball = LatticeBall::build(T, 0.6);
        gaps.push_back(std::abs(PolarMeasure::reference(ball).integrate(h) - h.integral()));
    }
    CHECK(gaps[1] < gaps[0]);
    CHECK(gaps[1] * std::pow(1e4, 0.2) <= 2.0 * gaps[0] * std::pow(1e2, 0.2));
}

TEST_CASE("mollifier invariants") {
    for (double d : {0.01, 0.05, 0.1}) {
        const auto psi = Mollifier::ramp(d);
        const auto phi = Mollifier::box(d);
        double integral = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double s = -2 * d + 4 * d * (i + 0.5) / n;
            CHECK(psi(s) <= 1.0 / (2 * d) + 1e-12);
            CHECK(psi(s) >= 0.0);
            if (std::abs(s) <= d - d * d) CHECK(psi(s) == phi(s));
            if (std::abs(s) > d + d * d) CHECK(psi(s) == 0.0);
            integral += phi(s) * 4 * d / n;
        }
        CHECK(integral == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(psi.reach() == doctest::Approx(d + d * d));
    }
}

TEST_CASE("box and ramp mollifications of lambda differ by O(delta)") {
    const auto b = LatticeBall::build(1e4, 0.6);
    const auto lambda = PolarMeasure::reference(b);
    for (double d : {0.02, 0.05}) {
        double worst = 0.0;
        for (double r = 0.25; r <= 0.5; r += 0.01)
            worst = std::max(worst, std::abs(lambda.evaluate(Mollifier::ramp(d), r) -
                                             lambda.evaluate(Mollifier::box(d), r)));
        CHECK(worst <= 2.0 * d);
    }
}

TEST_CASE("evaluate agrees with direct summation") {
    const auto b = LatticeBall::build(100.0, 0.6);
    const auto eta = sample_product_measure(b, 0.5, 31);
    const auto mu = PolarMeasure::from_configuration(b, eta);
    const auto k = Mollifier::ramp(0.05);
    for (double r : {0.12, 0.25, 0.333, 0.49}) {
        double direct = 0.0;
        for (const auto& a : mu.atoms()) direct += a.weight * k(a.sigma - r);
        CHECK(mu.evaluate(k, r) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("mollified density") {
    std::vector<double> grid;
    for (double r = 0.2; r <= 0.5 + 1e-12; r += 0.01) grid.push_back(r);
    const auto b = LatticeBall::build(1e4, 0.6);
    const auto k = Mollifier::ramp(0.05);
    const auto m = mollified_density(PolarMeasure::reference(b), k, grid);
    for (double v : m.m) CHECK(std::abs(v - 1.0) < 0.05);
    for (double v : m.m) CHECK(v <= 1.0 + 1.0 / (0.05 * std::log(1e4)));

    const auto zero = mollified_density(PolarMeasure::from_configuration(b, Configuration(b.size())), k, grid);
    for (double v : zero.m) CHECK(v == 0.0);

    const std::vector<double> bad{0.05, 0.2};
    CHECK_THROWS_AS(mollified_density(PolarMeasure::reference(b), k, bad), RangeError);
}

TEST_CASE("riemann gap decays") {
    const auto h = TestFunction::smooth_bump(0.2, 0.4);
    std::vector<double> scaled;
    double previous = INFINITY;
    for (double T : {1e2, 1e3, 1e4}) {
        const double g = riemann_gap(LatticeBall::build(T, 0.51), h);
        CHECK(g < previous);
        previous = g;
        scaled.push_back(g * std::pow(T, 0.2));
    }
    CHECK(scaled[1] <= 2 * scaled[0]);
    CHECK(scaled[2] <= 2 * scaled[0]);
    CHECK(riemann_gap(LatticeBall::build(100.0, 0.6), TestFunction::zero()) == 0.0);
}

TEST_CASE("annulus average") {
    const auto b = LatticeBall::build(1e4, 0.6);
    const Site x{static_cast<int>(std::round(std::pow(1e4, 0.3))), 0};
    const double sx = b.sigma_T(x);
    const auto flat = TestFunction::custom(0.06, 0.54, [](double) { return 1.0; },
                                           [](double) { return 0.0; }, "one");
    CHECK(std::abs(annulus_average(b, flat, 0.05, x) - 1.0) < 2.0 / std::log(1e4));

    const auto j = TestFunction::tent(0.1, 0.5);
    std::vector<double> dev;
    for (double d : {0.05, 0.01}) dev.push_back(std::abs(j(sx) - annulus_average(b, j, d, x)));
    CHECK(dev[0] <= 5.0 * 0.05 + 0.02);
    CHECK(dev[1] < dev[0]);

    CHECK_THROWS_AS(annulus_average(b, j, 0.05, Site{1, 0}), DomainError);
    CHECK_THROWS_AS(annulus_average(b, j, 0.2, Site{200, 0}), RangeError);
}

TEST_CASE("mesoscopic windows") {
    CHECK(std::abs(iota_plus(0.1, 0.3, 1e8)) < std::abs(iota_plus(0.1, 0.3, 1e4)));
    CHECK(std::abs(iota_minus(0.1, 0.3, 1e8)) < std::abs(iota_minus(0.1, 0.3, 1e4)));

    const auto b = LatticeBall::build(1e4, 0.6);
    const auto w = MesoscopicWindow::make(0.4, 0.5, 0.2);
    CHECK(w.q == doctest::Approx(std::sqrt(0.2)));
    CHECK(std::abs(mesoscopic_average(b, Configuration(b.size(), true), w) - 1.0) < 0.1);
    CHECK(mesoscopic_average(b, Configuration(b.size()), w) == 0.0);

    const double alpha = 0.3;
    const auto eta = sample_product_measure(b, alpha, 77);
    const double v = mesoscopic_average(b, eta, w);
    CHECK(std::abs(v - alpha) < 0.1);

    CHECK_THROWS_AS(mesoscopic_average(b, eta, MesoscopicWindow::make(0.3, 0.3, 0.01, 1e-9)),
                    DomainError);
}

TEST_CASE("time-averaged measure is dominated by lambda") {
    const auto b = LatticeBall::build(100.0, 0.6);
    DynamicsSpec spec;
    spec.T = 100.0;
    spec.seed = 3;
    const auto t = run_trajectory(b, spec, sample_product_measure(b, 0.6, 3));
    const auto mu = PolarMeasure::time_averaged(b, t.accumulator);
    const auto lambda = PolarMeasure::reference(b);
    for (double lo : {0.06, 0.15, 0.3}) {
        const auto h = TestFunction::smooth_bump(lo, lo + 0.2);
        const double v = mu.integrate(h);
        CHECK(v >= 0.0);
        CHECK(v <= lambda.integrate(h) + 1e-15);
    }
    std::vector<std::pair<double, double>> intervals;
    for (double a = 0.02; a < 0.4; a += 0.04) intervals.emplace_back(a, a + 0.1);
    CHECK(interval_excess_constant(mu, intervals) < 10.0);
}

TEST_CASE("integration is linear in the measure") {
    const auto b = LatticeBall::build(100.0, 0.6);
    const auto m1 = PolarMeasure::from_configuration(b, sample_product_measure(b, 0.3, 1));
    const auto m2 = PolarMeasure::from_configuration(b, sample_product_measure(b, 0.7, 2));
    const auto h = TestFunction::smooth_bump(0.1, 0.45);
    const auto c = PolarMeasure::combine(2.0, m1, -0.5, m2);
    CHECK(c.integrate(h) ==
          doctest::Approx(2.0 * m1.integrate(h) - 0.5 * m2.integrate(h)).epsilon(1e-13));
}
