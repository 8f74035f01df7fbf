#include "ssep2d/harness/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include "ssep2d/basis.hpp"
#include "ssep2d/dynamics.hpp"
#include "ssep2d/errors.hpp"
#include "ssep2d/functionals.hpp"
#include "ssep2d/girsanov.hpp"
#include "ssep2d/lattice.hpp"
#include "ssep2d/polar.hpp"
#include "ssep2d/rate.hpp"
#include "ssep2d/rng.hpp"
#include "ssep2d/tilt.hpp"

namespace ssep2d::harness {

using nlohmann::json;

namespace {

// Criterion 1
constexpr double kInstantonTolerance = 1e-3;
constexpr double kInstantonSecondsPerPair = 10.0;
constexpr std::size_t kInstantonN = 1024;
// Criterion 2
constexpr double kSineTolerance = 0.01;
constexpr double kSineOvershoot = 1e-9;
constexpr double kSineBasisUpper = 0.55;
// Criterion 3
constexpr double kHatIZero = 1e-9;
constexpr double kBumpRatio = 10.0;
constexpr double kBumpRatioSlack = 1e-9;
// Criterion 4
constexpr double kBalanceTolerance = 1e-12;
constexpr int kBalanceTilts = 5;
// Criterion 5
constexpr double kStationaryTv = 0.02;
constexpr std::uint64_t kStationaryEvents = 1'000'000;
// Criteria 6 and 7
constexpr double kLlnT = 1e4;
constexpr double kLlnRmax = 0.55;
constexpr std::size_t kLlnReplicas = 16;
constexpr double kLlnDelta = 0.05;
constexpr double kLlnTolerance = 0.05;
constexpr double kLlnSeconds = 15.0 * 60.0;
constexpr double kEntropyTolerance = 0.25;
// Criterion 8
constexpr double kExcessBound = 10.0;
constexpr double kExcessSpread = 0.5;
// Criterion 9
constexpr double kResidualExponent = 0.2;
constexpr double kResidualGrowth = 2.0;
// Criterion 10
constexpr double kMartingaleSigmas = 3.0;
constexpr std::size_t kMartingaleReplicas = 64;
constexpr double kMartingaleAmplitude = 0.01;
// Criterion 11
constexpr std::size_t kTrendReplicas = 16;
constexpr double kTrendRmax = 0.51;
constexpr double kEnergyLevel = 1.0;

const double kScales[] = {1e2, 1e3, 1e4};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

// The smooth tilt shared by the law-of-large-numbers and entropy criteria.
TiltProfile lln_tilt() { return TiltProfile::smoothstep(0.5, 0.8, 0.1, 0.3); }

class Context {
public:
    explicit Context(const AcceptanceOptions& o) : options(o) {}

    const AcceptanceOptions& options;

    std::uint64_t seed(std::uint64_t salt) const { return options.seed * 1000003ULL + salt; }

    // Tilted replicas at the largest scale, shared by criteria 6 and 7.
    const std::vector<ReplicaRun>& lln_runs() {
        if (!lln_runs_) {
            const auto t0 = Clock::now();
            const auto ball = LatticeBall::build(kLlnT, kLlnRmax);
            lln_runs_ = run_replicas(ball, lln_tilt(), Drive::tilted, seed(6), kLlnReplicas,
                                     options.workers);
            lln_seconds_ = seconds_since(t0);
        }
        return *lln_runs_;
    }
    double lln_seconds() const { return lln_seconds_; }

private:
    std::optional<std::vector<ReplicaRun>> lln_runs_;
    double lln_seconds_ = 0.0;
};

CriterionResult instanton_vs_closed_form(Context&) {
    CriterionResult r;
    double worst = 0.0, slowest = 0.0;
    std::string where;
    json per_mode = json::object();
    for (auto mode : {InstantonMode::arcsin, InstantonMode::direct}) {
        double mode_worst = 0.0;
        for (int i = 1; i <= 9; ++i)
            for (int j = 1; j <= 9; ++j) {
                const double alpha = 0.1 * i, beta = 0.1 * j;
                const auto t0 = Clock::now();
                const auto res = solve_instanton(alpha, beta, kInstantonN, mode);
                const double dt = seconds_since(t0);
                const double exact = upsilon_closed(alpha, beta);
                const double rel = std::abs(res.value - exact) / std::max(exact, 1e-6);
                slowest = std::max(slowest, dt);
                mode_worst = std::max(mode_worst, rel);
                if (rel >= worst) {
                    worst = rel;
                    where = fmt("%s (%.1f, %.1f)", to_string(mode).c_str(), alpha, beta);
                }
            }
        per_mode[to_string(mode)] = mode_worst;
    }
    r.passed = worst < kInstantonTolerance && slowest < kInstantonSecondsPerPair;
    r.detail = fmt("max relative error %.3g at %s (< %.0e), slowest pair %.3f s", worst,
                   where.c_str(), kInstantonTolerance, slowest);
    r.metrics = {{"max_relative_error", worst},
                 {"per_mode", per_mode},
                 {"slowest_seconds", slowest}};
    return r;
}

RadialDensity sine_profile() {
    return RadialDensity::sample(
        [](double r) { return r < 0.5 ? 0.5 * (1.0 + std::sin(M_PI * r)) : 1.0; }, 0.0, 0.6, 2400,
        1.0);
}

CriterionResult energy_basis_vs_closed(Context&) {
    CriterionResult r;
    const double target = M_PI * M_PI * M_PI / 8.0;
    const auto m = sine_profile();
    std::vector<double> values;
    bool below = true;
    for (std::size_t n : {8, 16, 32, 64}) {
        const auto v = energy_basis(
            m, TestBasis::cubic(0.0, kSineBasisUpper, n, KnotGrading::ends), BasisVariant::J_Q);
        values.push_back(v.infinite ? kInfinity : v.value);
        below = below && values.back() <= target + kSineOvershoot;
    }
    bool monotone = true;
    for (std::size_t i = 1; i < values.size(); ++i) monotone = monotone && values[i] >= values[i - 1];
    const double rel = std::abs(values.back() - target) / target;
    r.passed = rel < kSineTolerance && below && monotone;
    r.detail = fmt("n=64 value %.8f vs %.8f (rel %.3g), monotone %s, bounded %s", values.back(),
                   target, rel, monotone ? "yes" : "no", below ? "yes" : "no");
    r.metrics = {{"target", target}, {"values", values}, {"relative_error", rel}};
    return r;
}

CriterionResult hat_gap(Context&) {
    CriterionResult r;
    const auto step =
        RadialDensity::sample([](double x) { return x < 0.5 ? 0.9 : 0.5; }, 0.0, 0.6, 2400, 0.5);
    const auto hat = energy_basis(step, TestBasis::cubic(0.0, 0.5 - kHalfIntervalMargin, 64),
                                  BasisVariant::hatI);
    const auto narrow = energy_basis(step, TestBasis::single_bump(0.5, 0.01), BasisVariant::J_Q);
    const auto wide = energy_basis(step, TestBasis::single_bump(0.5, 0.1), BasisVariant::J_Q);
    const double ratio = narrow.value / wide.value;
    const bool hat_ok = !hat.infinite && std::abs(hat.value) <= kHatIZero;
    const bool ratio_ok = ratio > kBumpRatio * (1.0 + kBumpRatioSlack);
    r.passed = hat_ok && ratio_ok;
    r.detail = fmt("hatI %.3g (<= %.0e: %s); J^Q bump w=0.01 %.6f, w=0.1 %.6f, ratio %.15g "
                   "(> %.0f: %s)",
                   hat.value, kHatIZero, hat_ok ? "yes" : "no", narrow.value, wide.value, ratio,
                   kBumpRatio, ratio_ok ? "yes" : "no");
    r.metrics = {{"hatI", hat.value},
                 {"bump_narrow", narrow.value},
                 {"bump_wide", wide.value},
                 {"ratio", ratio}};
    return r;
}

TiltProfile random_tilt(Rng& rng, int kind) {
    const double alpha = 0.2 + 0.6 * rng.uniform();
    auto clamp = [](double v) { return std::clamp(v, 0.05, 0.95); };
    switch (kind % 3) {
        case 0: {
            const double inner = 0.05 + 0.15 * rng.uniform();
            const double outer = std::min(0.49, inner + 0.1 + 0.2 * rng.uniform());
            return TiltProfile::smoothstep(alpha, clamp(0.1 + 0.8 * rng.uniform()), inner, outer);
        }
        case 1: {
            const double lo = 0.05 + 0.15 * rng.uniform();
            const double hi = std::min(0.49, lo + 0.1 + 0.2 * rng.uniform());
            const double room = std::min(alpha - 0.05, 0.95 - alpha);
            return TiltProfile::bump(alpha, (2.0 * rng.uniform() - 1.0) * room, lo, hi);
        }
        default: {
            std::vector<double> radii, values;
            for (int k = 0; k <= 9; ++k) {
                radii.push_back(0.05 * k);
                values.push_back(k == 9 ? alpha : clamp(alpha + 0.4 * (rng.uniform() - 0.5)));
            }
            return TiltProfile::from_grid(alpha, radii, values);
        }
    }
}

CriterionResult detailed_balance(Context& ctx) {
    CriterionResult r;
    const auto ball = LatticeBall::build(100.0, 0.6);
    Rng rng(ctx.seed(4));
    double worst = 0.0;
    json tilts = json::array();
    for (int i = 0; i < kBalanceTilts; ++i) {
        const auto tilt = random_tilt(rng, i);
        const double v = check_detailed_balance(ball, tilt, ctx.options.detailed_balance_fault);
        worst = std::max(worst, v);
        tilts.push_back({{"tilt", tilt.description()}, {"violation", v}});
    }
    r.passed = worst <= kBalanceTolerance;
    r.detail = fmt("max relative violation %.3g over %d tilts on a radius-%d ball (<= %.0e)", worst,
                   kBalanceTilts, ball.radius(), kBalanceTolerance);
    if (ctx.options.detailed_balance_fault != 1.0)
        r.detail += fmt(" [rate fault %.6g injected]", ctx.options.detailed_balance_fault);
    r.metrics = {{"max_violation", worst}, {"tilts", tilts}};
    return r;
}

CriterionResult small_stationarity(Context& ctx) {
    CriterionResult r;
    const auto ball = LatticeBall::from_sites(4.0, {{1, 1}, {2, 1}, {1, 2}, {2, 2}});
    const auto tilt = TiltProfile::smoothstep(0.5, 0.2, 0.3, 0.45);
    double worst = 0.0;
    json runs = json::object();
    for (bool tilted : {false, true}) {
        DynamicsSpec spec;
        spec.T = ball.scale();
        if (tilted) spec.tilt = tilt;
        spec.seed = ctx.seed(5);
        spec.replica = tilted ? 1 : 0;
        const auto rep = stationary_check_small(ball, spec, 2, kStationaryEvents);
        worst = std::max(worst, rep.tv_distance);
        runs[tilted ? "tilted" : "untilted"] = {{"tv", rep.tv_distance}, {"events", rep.events},
                                                {"exact", rep.exact}, {"empirical", rep.empirical}};
    }
    r.passed = worst < kStationaryTv;
    r.detail = fmt("TV untilted %.4f, tilted %.4f (< %.2f, %llu events each)",
                   runs["untilted"]["tv"].get<double>(), runs["tilted"]["tv"].get<double>(),
                   kStationaryTv, static_cast<unsigned long long>(kStationaryEvents));
    r.metrics = runs;
    return r;
}

CriterionResult law_of_large_numbers(Context& ctx) {
    CriterionResult r;
    const auto& runs = ctx.lln_runs();
    const auto ball = LatticeBall::build(kLlnT, kLlnRmax);
    TrajectoryAccumulator total;
    for (const auto& run : runs) total.merge(run.path.accumulator);
    const auto mu = PolarMeasure::time_averaged(ball, total);
    std::vector<double> grid;
    for (int k = 0; k <= 70; ++k) grid.push_back(0.1 + 0.005 * k);
    const auto tilt = lln_tilt();
    const auto m = mollified_density(mu, Mollifier::ramp(kLlnDelta), grid, tilt.alpha());
    double worst = 0.0, at = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = std::abs(m.m[i] - tilt.gamma(grid[i]).value);
        if (d > worst) {
            worst = d;
            at = grid[i];
        }
    }
    // Same statistic for the exact stationary mean occupation gamma(sigma_T(x)).
    std::vector<double> level(ball.size());
    for (std::size_t i = 0; i < ball.size(); ++i)
        level[i] = tilt.gamma(ball.is_origin(i) ? 0.0 : ball.sigma(i)).value;
    const auto exact = mollified_density(PolarMeasure::from_occupancy(ball, level),
                                         Mollifier::ramp(kLlnDelta), grid, tilt.alpha());
    double floor = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        floor = std::max(floor, std::abs(exact.m[i] - tilt.gamma(grid[i]).value));

    const double secs = ctx.lln_seconds();
    r.passed = worst < kLlnTolerance && secs < kLlnSeconds;
    r.detail = fmt("sup |m - gamma| = %.4f at r=%.3f (< %.2f), exact stationary mean gives %.4f; "
                   "%zu replicas in %.0f s (< %.0f s)",
                   worst, at, kLlnTolerance, floor, runs.size(), secs, kLlnSeconds);
    r.metrics = {{"sup_error", worst}, {"at", at}, {"stationary_sup_error", floor},
                 {"simulation_seconds", secs}, {"events", total.event_count}};
    return r;
}

CriterionResult entropy_identity(Context& ctx) {
    CriterionResult r;
    const auto tilt = lln_tilt();
    const auto gamma = RadialDensity::sample([&](double x) { return tilt.gamma(x).value; }, 0.0,
                                             kLlnRmax, 4096, tilt.alpha());
    const double target = -rate_I_Q_alpha(gamma).value;
    const std::size_t replicas[] = {1024, 256, kLlnReplicas};
    std::vector<double> estimates, errors, gaps;
    for (int k = 0; k < 3; ++k) {
        const double T = kScales[k];
        MonteCarloEstimate e;
        if (T == kLlnT) {
            e = entropy_estimate(ctx.lln_runs(), T);
        } else {
            const auto ball = LatticeBall::build(T, kLlnRmax);
            e = entropy_estimate(ball, tilt, replicas[k], ctx.seed(70 + k), ctx.options.workers);
        }
        estimates.push_back(e.mean);
        errors.push_back(e.standard_error);
        gaps.push_back(std::abs(e.mean - target));
    }
    const double rel = gaps.back() / std::abs(target);
    const bool decreasing = gaps[1] < gaps[0] && gaps[2] < gaps[1];
    r.passed = rel < kEntropyTolerance && decreasing;
    r.detail = fmt("target %.4f; estimates %.4f, %.4f, %.4f (se %.3f, %.3f, %.3f); rel gap at "
                   "T=1e4 %.3f (< %.2f), decreasing %s",
                   target, estimates[0], estimates[1], estimates[2], errors[0], errors[1],
                   errors[2], rel, kEntropyTolerance, decreasing ? "yes" : "no");
    r.metrics = {{"target", target},
                 {"estimates", estimates},
                 {"standard_errors", errors},
                 {"gaps", gaps}};
    return r;
}

CriterionResult lambda_interval_bound(Context&) {
    CriterionResult r;
    std::vector<std::pair<double, double>> intervals;
    for (int i = 0; i < 10; ++i)
        for (double w : {0.01, 0.02, 0.05, 0.1, 0.2}) intervals.emplace_back(0.02 + 0.04 * i, 0.02 + 0.04 * i + w);
    std::vector<double> C;
    for (double T : kScales) {
        const auto ball = LatticeBall::build(T, 0.6);
        C.push_back(interval_excess_constant(PolarMeasure::reference(ball), intervals));
    }
    auto sorted = C;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[1];
    bool stable = median > 0.0;
    for (double c : C) stable = stable && std::abs(c - median) <= kExcessSpread * median;
    const double largest = sorted.back();
    r.passed = largest < kExcessBound && stable;
    r.detail = fmt("C = %.4f, %.4f, %.4f over %zu intervals (< %.0f), within %.0f%% of median %s",
                   C[0], C[1], C[2], intervals.size(), kExcessBound, 100 * kExcessSpread,
                   stable ? "yes" : "no");
    r.metrics = {{"C", C}, {"median", median}};
    return r;
}

CriterionResult summation_by_parts(Context&) {
    CriterionResult r;
    const auto h = TestFunction::smooth_bump(0.2, 0.4);
    std::vector<double> residual, gap, scaled_residual, scaled_gap;
    for (double T : kScales) {
        const auto ball = LatticeBall::build(T, 0.51);
        const Configuration full(ball.size(), true);
        residual.push_back(summation_by_parts_residual(ball, full, h));
        gap.push_back(riemann_gap(ball, h));
        scaled_residual.push_back(residual.back() * std::pow(T, kResidualExponent));
        scaled_gap.push_back(gap.back() * std::pow(T, kResidualExponent));
    }
    auto strictly_decreasing = [](const std::vector<double>& v) {
        return v[1] < v[0] && v[2] < v[1];
    };
    auto bounded = [](const std::vector<double>& v) {
        return *std::max_element(v.begin(), v.end()) <= kResidualGrowth * v[0];
    };
    r.passed = strictly_decreasing(residual) && strictly_decreasing(gap) &&
               bounded(scaled_residual) && bounded(scaled_gap);
    r.detail = fmt("residual %.3g, %.3g, %.3g; T^0.2 * residual %.3g, %.3g, %.3g; Riemann gap "
                   "%.3g, %.3g, %.3g",
                   residual[0], residual[1], residual[2], scaled_residual[0], scaled_residual[1],
                   scaled_residual[2], gap[0], gap[1], gap[2]);
    r.metrics = {{"residual", residual},
                 {"scaled_residual", scaled_residual},
                 {"riemann_gap", gap},
                 {"scaled_riemann_gap", scaled_gap}};
    return r;
}

CriterionResult martingale_identity(Context& ctx) {
    CriterionResult r;
    const auto ball = LatticeBall::build(1e2, kLlnRmax);
    const auto tilt = TiltProfile::bump(0.5, kMartingaleAmplitude, 0.2, 0.4);
    const auto rep = martingale_check(ball, tilt, kMartingaleReplicas, ctx.seed(10),
                                      ctx.options.workers);
    r.passed = !rep.variance_blowup && std::abs(rep.deviation) <= kMartingaleSigmas;
    r.detail = fmt("mean %.4f, se %.4f, deviation %.2f se (<= %.0f), ESS %.1f of %zu%s", rep.mean,
                   rep.standard_error, rep.deviation, kMartingaleSigmas, rep.effective_sample_size,
                   rep.replicas, rep.variance_blowup ? ", variance blow-up" : "");
    r.metrics = {{"mean", rep.mean},
                 {"standard_error", rep.standard_error},
                 {"deviation", rep.deviation},
                 {"effective_sample_size", rep.effective_sample_size}};
    return r;
}

CriterionResult superexponential_trends(Context& ctx) {
    CriterionResult r;
    const auto h = TestFunction::smooth_bump(0.2, 0.4);
    const BondFunctionalSpec spec{h, kLlnDelta, 0.5};
    const auto flat = TiltProfile::flat(0.5);
    std::vector<double> wj_upper, wj_mean, vh_frequency, vh_upper;
    for (double T : {1e2, 1e4}) {
        const auto ball = LatticeBall::build(T, kTrendRmax);
        const auto runs = run_replicas(ball, flat, Drive::tilted, ctx.seed(11), kTrendReplicas,
                                       ctx.options.workers);
        double upper = 0.0, mean = 0.0, hits = 0.0, vupper = 0.0;
        for (const auto& run : runs) {
            const double w = W_J_delta(ball, run.path.accumulator, spec);
            const double v = V_H_energy(ball, run.path.accumulator, h).value();
            upper += std::max(w, 0.0);
            mean += w;
            hits += v >= kEnergyLevel ? 1.0 : 0.0;
            vupper += std::max(v, 0.0);
        }
        const double n = static_cast<double>(runs.size());
        wj_upper.push_back(upper / n);
        wj_mean.push_back(mean / n);
        vh_frequency.push_back(hits / n);
        vh_upper.push_back(vupper / n);
    }
    const bool wj_ok = wj_upper[1] < wj_upper[0];
    const bool vh_ok = vh_frequency[1] <= vh_frequency[0] && vh_upper[1] < vh_upper[0];
    r.passed = wj_ok && vh_ok;
    r.detail = fmt("mean W_J^+ %.4g -> %.4g; V_H: P[>= 1] %.3f -> %.3f, mean V_H^+ %.4g -> %.4g "
                   "(T=1e2 -> 1e4)",
                   wj_upper[0], wj_upper[1], vh_frequency[0], vh_frequency[1], vh_upper[0],
                   vh_upper[1]);
    r.metrics = {{"W_J_upper_mean", wj_upper},
                 {"W_J_mean", wj_mean},
                 {"V_H_exceedance", vh_frequency},
                 {"V_H_upper_mean", vh_upper}};
    return r;
}

using Runner = CriterionResult (*)(Context&);

struct Entry {
    const char* name;
    Runner run;
};

const std::map<int, Entry>& registry() {
    static const std::map<int, Entry> table{
        {1, {"instanton-closed-form", instanton_vs_closed_form}},
        {2, {"energy-basis-sine", energy_basis_vs_closed}},
        {3, {"hatI-gap", hat_gap}},
        {4, {"detailed-balance", detailed_balance}},
        {5, {"small-lattice-stationarity", small_stationarity}},
        {6, {"law-of-large-numbers", law_of_large_numbers}},
        {7, {"entropy-identity", entropy_identity}},
        {8, {"lambda-interval-bound", lambda_interval_bound}},
        {9, {"summation-by-parts", summation_by_parts}},
        {10, {"martingale-identity", martingale_identity}},
        {11, {"superexponential-trends", superexponential_trends}},
    };
    return table;
}

}  // namespace

Suite parse_suite(const std::string& name) {
    if (name == "fast") return Suite::fast;
    if (name == "full") return Suite::full;
    throw ConfigError("--suite", "must be fast or full");
}

std::string to_string(Suite s) { return s == Suite::fast ? "fast" : "full"; }

std::vector<int> suite_criteria(Suite s) {
    if (s == Suite::fast) return {1, 2, 3, 4, 5, 8, 9, 10};
    std::vector<int> all;
    for (int i = 1; i <= kCriterionCount; ++i) all.push_back(i);
    return all;
}

std::string criterion_name(int id) {
    const auto it = registry().find(id);
    if (it == registry().end()) throw ConfigError("criterion", "no criterion " + std::to_string(id));
    return it->second.name;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    Context ctx(options);
    auto ids = options.only.empty() ? suite_criteria(options.suite) : options.only;
    std::vector<CriterionResult> out;
    for (int id : ids) {
        const auto it = registry().find(id);
        if (it == registry().end()) throw ConfigError("criterion", "no criterion " + std::to_string(id));
        const auto t0 = Clock::now();
        CriterionResult r;
        try {
            r = it->second.run(ctx);
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("error: ") + e.what();
        }
        r.id = id;
        r.name = it->second.name;
        r.seconds = seconds_since(t0);
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_result_line(const CriterionResult& r) {
    return fmt("[%s] %2d %-28s %7.1fs  ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
               r.seconds) +
           r.detail;
}

json to_json(const CriterionResult& r) {
    return {{"id", r.id},         {"name", r.name},       {"passed", r.passed},
            {"detail", r.detail}, {"seconds", r.seconds}, {"metrics", r.metrics}};
}

}  // namespace ssep2d::harness
