#include "ssep2d/harness/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ssep2d/basis.hpp"
#include "ssep2d/errors.hpp"
#include "ssep2d/functionals.hpp"
#include "ssep2d/girsanov.hpp"
#include "ssep2d/harness/acceptance.hpp"
#include "ssep2d/harness/io.hpp"
#include "ssep2d/polar.hpp"
#include "ssep2d/rate.hpp"

namespace ssep2d::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

json header(const std::string& command, const RunConfig& c) {
    return {{"schema", kSchema}, {"command", command}, {"config_hash", c.hash()},
            {"config", c.to_json()}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json energy_json(const EnergyValue& v) {
    json j{{"value", finite_or_null(v.value)}, {"infinite", v.infinite}};
    if (v.infinite) j["location"] = v.location;
    return j;
}

json basis_json(const BasisValue& v) {
    return {{"value", finite_or_null(v.value)},
            {"infinite", v.infinite},
            {"regularized", v.regularized},
            {"size", v.size}};
}

std::string default_name(const std::string& command, const RunConfig& c) {
    return command + "-" + c.hash().substr(0, 12);
}

std::vector<ReplicaRun> simulate_runs(const LatticeBall& ball, const RunConfig& c) {
    return run_replicas(ball, c.make_tilt(), c.make_drive(), c.seed, c.replicas, c.workers);
}

void write_girsanov_csv(const std::filesystem::path& path, const std::string& hash,
                        const std::vector<ReplicaRun>& runs) {
    CsvWriter csv(path, hash,
                  {"replica_id", "log_psi_stat", "log_psi_pot", "log_psi_dyn", "log_rn_total",
                   "scaled_total"});
    for (const auto& r : runs) {
        csv.cell(r.replica)
            .cell(r.rn.log_psi_stat)
            .cell(r.rn.log_psi_pot)
            .cell(r.rn.log_psi_dyn)
            .cell(r.rn.log_rn_total)
            .cell(r.rn.scaled_total);
        csv.end_row();
    }
    csv.close();
}

double I_Q_alpha_of_tilt(const TiltProfile& tilt, double r_max) {
    const auto gamma = RadialDensity::sample([&](double x) { return tilt.gamma(x).value; }, 0.0,
                                             std::max(r_max, 0.55), 4096, tilt.alpha());
    return rate_I_Q_alpha(gamma).value;
}

}  // namespace

RunConfig resolve_config(const CommandOptions& o) {
    RunConfig c = o.config_path.empty() ? RunConfig::from_json(json::object())
                                        : RunConfig::load(o.config_path);
    if (o.seed) c.seed = *o.seed;
    if (o.replicas) c.replicas = *o.replicas;
    if (o.workers) c.workers = *o.workers;
    if (o.alpha) c.alpha = *o.alpha;
    if (o.beta) c.instanton.beta = c.rate.beta = *o.beta;
    if (o.N) c.instanton.N = *o.N;
    if (o.mode) c.instanton.mode = *o.mode;
    if (o.density) c.rate.density = *o.density;
    if (o.density_file) c.rate.file = *o.density_file;
    if (o.basis) c.rate.basis = *o.basis;
    c.validate();
    return c;
}

int cmd_simulate(const CommandOptions& o, std::ostream& out) {
    const RunConfig c = resolve_config(o);
    const std::string hash = c.hash();
    RunDirectory dir(resolve_output(o.out, c.output, default_name("simulate", c)));

    auto t0 = Clock::now();
    const auto ball = LatticeBall::build(c.T, c.r_max);
    const double t_build = seconds_since(t0);
    const auto tilt = c.make_tilt();

    t0 = Clock::now();
    const auto runs = simulate_runs(ball, c);
    const double t_sim = seconds_since(t0);

    t0 = Clock::now();
    TrajectoryAccumulator total;
    for (const auto& r : runs) total.merge(r.path.accumulator);
    const double n = static_cast<double>(runs.size());

    {
        CsvWriter csv(dir.file("occupations.csv"), hash,
                      {"x1", "x2", "radius", "sigma", "occ_time"});
        for (std::size_t i = 0; i < ball.size(); ++i) {
            const Site s = ball.site(i);
            csv.cell(s.x1).cell(s.x2).cell(ball.norm(i));
            if (ball.is_origin(i))
                csv.cell(std::string_view());
            else
                csv.cell(ball.sigma(i));
            csv.cell(total.occ_time[i] / n);
            csv.end_row();
        }
        csv.close();
    }
    {
        CsvWriter csv(dir.file("bonds.csv"), hash,
                      {"tail_x1", "tail_x2", "dir", "disagreement", "signed_difference"});
        const auto bonds = ball.bonds();
        for (std::size_t b = 0; b < bonds.size(); ++b) {
            const Site s = ball.site(bonds[b].tail);
            csv.cell(s.x1).cell(s.x2).cell(static_cast<int>(bonds[b].dir));
            csv.cell(total.bond_disagreement[b] / n).cell(total.signed_bond(ball, b) / n);
            csv.end_row();
        }
        csv.close();
    }
    if (!tilt.is_flat()) write_girsanov_csv(dir.file("girsanov.csv"), hash, runs);

    const auto mu = PolarMeasure::time_averaged(ball, total);
    const auto k = c.make_mollifier();
    if (c.wants("measure")) {
        CsvWriter csv(dir.file("measure.csv"), hash, {"sigma", "weight", "radius"});
        for (const auto& a : mu.atoms()) {
            csv.cell(a.sigma).cell(a.weight).cell(a.radius);
            csv.end_row();
        }
        csv.close();
    }
    if (c.wants("density")) {
        std::vector<double> grid;
        const double lo = 2.0 * k.delta(), hi = c.r_max - 2.0 * k.delta();
        for (int i = 0; lo + 0.005 * i <= hi + 1e-12; ++i) grid.push_back(lo + 0.005 * i);
        const auto m = mollified_density(mu, k, grid, c.alpha);
        CsvWriter csv(dir.file("density.csv"), hash, {"r", "m"});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            csv.cell(grid[i]).cell(m.m[i]);
            csv.end_row();
        }
        csv.close();
    }

    json functionals = json::object();
    const auto h = c.make_test_function();
    if (c.wants("W_J")) {
        const BondFunctionalSpec spec{h, k.delta(), c.alpha};
        std::vector<double> per;
        for (const auto& r : runs) per.push_back(W_J_delta(ball, r.path.accumulator, spec));
        functionals["W_J"] = {{"J", h.name()}, {"delta", k.delta()}, {"per_replica", per},
                              {"mean", std::accumulate(per.begin(), per.end(), 0.0) / n}};
    }
    if (c.wants("V_H")) {
        json per = json::array();
        double mean = 0.0;
        for (const auto& r : runs) {
            const auto e = V_H_energy(ball, r.path.accumulator, h);
            per.push_back({{"linear", e.linear}, {"quadratic", e.quadratic}, {"value", e.value()}});
            mean += e.value() / n;
        }
        functionals["V_H"] = {{"H", h.name()}, {"per_replica", per}, {"mean", mean}};
    }
    if (c.wants("W_gamma")) {
        double mean = 0.0;
        for (const auto& r : runs) mean += W_gamma(ball, r.path.accumulator, tilt) / n;
        functionals["W_gamma"] = {{"mean", mean},
                                  {"expected", W_gamma_expected(ball, tilt)},
                                  {"limit", W_gamma_limit(tilt)}};
    }
    if (!tilt.is_flat()) {
        json g{{"rn_bound_constant", rn_bound_constant(runs, c.T)}};
        if (runs.size() >= 2 && c.make_drive() == Drive::tilted) {
            const auto e = entropy_estimate(runs, c.T);
            g["entropy_estimate"] = {{"mean", e.mean}, {"standard_error", e.standard_error}};
            g["minus_I_Q_alpha"] = -I_Q_alpha_of_tilt(tilt, c.r_max);
        }
        if (runs.size() >= 2 && c.make_drive() == Drive::reference) {
            const auto m = martingale_check(runs);
            g["martingale"] = {{"mean", m.mean},
                               {"standard_error", m.standard_error},
                               {"deviation", m.deviation},
                               {"effective_sample_size", m.effective_sample_size},
                               {"variance_blowup", m.variance_blowup}};
        }
        functionals["girsanov"] = g;
    }
    functionals["origin_occupation"] = total.origin_occupation / n;
    const double t_obs = seconds_since(t0);

    json summary = header("simulate", c);
    summary["ball"] = {{"radius", ball.radius()}, {"sites", ball.size()}, {"bonds", ball.bond_count()}};
    summary["tilt"] = tilt.description();
    summary["mollifier"] = k.describe();
    summary["seeds"] = {{"seed", c.seed}, {"replicas", c.replicas}};
    summary["events"] = total.event_count;
    summary["timings"] = {{"build_seconds", t_build},
                          {"simulate_seconds", t_sim},
                          {"observables_seconds", t_obs}};
    summary["functionals"] = functionals;
    write_text(dir.file("summary.json"), summary.dump(2) + "\n");
    dir.commit();
    if (!o.quiet) out << dir.destination().string() << "\n";
    return kExitOk;
}

json rate_report(const RunConfig& c, const RadialDensity& m, const std::string& source) {
    const auto grading = c.rate.grading == "ends" ? KnotGrading::ends : KnotGrading::uniform;
    const double upper = m.r.back() - 0.05;
    if (upper <= 0.5) throw ConfigError("rate.density", "density grid must extend past r = 0.55");
    const auto full = TestBasis::cubic(0.0, upper, c.rate.basis, grading);
    const auto half = TestBasis::cubic(0.0, 0.5 - kHalfIntervalMargin, c.rate.basis, grading);
    const auto tilt = c.make_tilt();
    // The instanton connects the density at the origin to alpha.
    const double beta = m.m.front();
    const auto numeric = solve_instanton(m.alpha, beta, c.instanton.N, InstantonMode::arcsin);
    json report;
    report["density"] = {{"source", source},
                         {"alpha", m.alpha},
                         {"grid_size", m.size()},
                         {"alpha_extended", m.is_alpha_extended()}};
    report["basis"] = {{"size", full.size()},
                       {"intervals", c.rate.basis},
                       {"grading", c.rate.grading},
                       {"support", {0.0, upper}},
                       {"hatI_support", {0.0, 0.5 - kHalfIntervalMargin}}};
    report["Q_closed"] = energy_json(energy_closed(m, EnergyVariant::plain));
    report["Q_basis"] = basis_json(energy_basis(m, full, BasisVariant::Q));
    report["Q_alpha_closed"] = energy_json(energy_closed(m, EnergyVariant::alpha));
    report["Q_alpha_basis"] = basis_json(energy_basis(m, full, BasisVariant::Q_alpha));
    report["I_Q_alpha"] = energy_json(rate_I_Q_alpha(m));
    report["hat_I_alpha"] = basis_json(energy_basis(m, half, BasisVariant::hatI));
    report["J_Q"] = basis_json(energy_basis(m, full, BasisVariant::J_Q));
    report["J_Q_closed"] = energy_json(energy_closed(m, EnergyVariant::half_interval));
    report["J_gamma"] = {{"tilt", tilt.description()}, {"value", J_gamma_linearized(m, tilt)}};
    report["Upsilon_closed"] = {{"alpha", m.alpha}, {"beta", beta},
                                {"value", upsilon_closed(m.alpha, beta)}};
    report["Upsilon_numeric"] = {{"N", c.instanton.N}, {"value", numeric.value}};
    return report;
}

int cmd_rate(const CommandOptions& o, std::ostream& out) {
    const RunConfig c = resolve_config(o);
    RadialDensity m;
    std::string source;
    if (!c.rate.file.empty()) {
        m = read_density_csv(c.rate.file, c.alpha);
        source = "file:" + c.rate.file;
    } else {
        const double alpha = c.rate.density == "sine-instanton" ? 1.0 : c.alpha;
        m = density_preset(c.rate.density, alpha, c.rate.beta, c.r_max, c.rate.grid);
        source = "preset:" + c.rate.density;
    }
    RunDirectory dir(resolve_output(o.out, c.output, default_name("rate", c)));
    json report = header("rate", c);
    report.update(rate_report(c, m, source));
    const std::string text = report.dump(2) + "\n";
    write_text(dir.file("rate.json"), text);
    dir.commit();
    out << text;
    return kExitOk;
}

int cmd_instanton(const CommandOptions& o, std::ostream& out) {
    const RunConfig c = resolve_config(o);
    const auto mode = c.instanton.mode == "direct" ? InstantonMode::direct : InstantonMode::arcsin;
    const auto t0 = Clock::now();
    const auto res = solve_instanton(c.alpha, c.instanton.beta, c.instanton.N, mode);
    const double secs = seconds_since(t0);
    const double exact = upsilon_closed(c.alpha, c.instanton.beta);
    const double gap = std::abs(res.value - exact) / std::max(exact, 1e-6);
    double profile_error = 0.0;
    for (std::size_t i = 0; i < res.profile.size(); ++i)
        profile_error = std::max(profile_error,
                                 std::abs(res.profile.m[i] - instanton_profile(c.alpha, c.instanton.beta,
                                                                               res.profile.r[i])));

    RunDirectory dir(resolve_output(o.out, c.output, default_name("instanton", c)));
    {
        CsvWriter csv(dir.file("profile.csv"), c.hash(), {"r", "m"});
        for (std::size_t i = 0; i < res.profile.size(); ++i) {
            csv.cell(res.profile.r[i]).cell(res.profile.m[i]);
            csv.end_row();
        }
        csv.close();
    }
    json summary = header("instanton", c);
    summary["instanton"] = {{"alpha", c.alpha},
                            {"beta", c.instanton.beta},
                            {"N", c.instanton.N},
                            {"mode", to_string(mode)},
                            {"value", res.value},
                            {"upsilon", exact},
                            {"relative_gap", gap},
                            {"max_profile_error", profile_error},
                            {"iterations", res.iterations},
                            {"gradient_norm", res.gradient_norm},
                            {"seconds", secs}};
    write_text(dir.file("summary.json"), summary.dump(2) + "\n");
    dir.commit();
    char line[256];
    std::snprintf(line, sizeof line, "value %.12g  upsilon %.12g  relative gap %.3g  (%s, N=%zu)\n",
                  res.value, exact, gap, to_string(mode).c_str(), c.instanton.N);
    out << line;
    if (!o.quiet) out << dir.destination().string() << "\n";
    return kExitOk;
}

int cmd_girsanov(const CommandOptions& o, std::ostream& out) {
    const RunConfig c = resolve_config(o);
    const auto tilt = c.make_tilt();
    if (tilt.is_flat()) throw ConfigError("tilt.preset", "girsanov needs a non-flat tilt");
    if (c.replicas < 2) throw ConfigError("replicas", "girsanov needs at least 2 replicas");
    RunDirectory dir(resolve_output(o.out, c.output, default_name("girsanov", c)));
    const auto ball = LatticeBall::build(c.T, c.r_max);
    const auto t0 = Clock::now();
    const auto runs = simulate_runs(ball, c);
    const double secs = seconds_since(t0);
    write_girsanov_csv(dir.file("girsanov.csv"), c.hash(), runs);

    json summary = header("girsanov", c);
    summary["seeds"] = {{"seed", c.seed}, {"replicas", c.replicas}};
    summary["timings"] = {{"simulate_seconds", secs}};
    char line[256];
    if (c.make_drive() == Drive::tilted) {
        const auto e = entropy_estimate(runs, c.T);
        const double target = -I_Q_alpha_of_tilt(tilt, c.r_max);
        summary["entropy_estimate"] = {{"mean", e.mean},
                                       {"standard_error", e.standard_error},
                                       {"minus_I_Q_alpha", target}};
        std::snprintf(line, sizeof line, "entropy estimate %.6g +- %.3g  (-I_Q_alpha %.6g)\n",
                      e.mean, e.standard_error, target);
    } else {
        const auto m = martingale_check(runs);
        summary["martingale"] = {{"mean", m.mean},
                                 {"standard_error", m.standard_error},
                                 {"deviation", m.deviation},
                                 {"effective_sample_size", m.effective_sample_size},
                                 {"variance_blowup", m.variance_blowup}};
        std::snprintf(line, sizeof line, "E[exp log RN] %.6g +- %.3g  (%.2f se from 1%s)\n", m.mean,
                      m.standard_error, m.deviation, m.variance_blowup ? ", variance blow-up" : "");
    }
    summary["rn_bound_constant"] = rn_bound_constant(runs, c.T);
    write_text(dir.file("summary.json"), summary.dump(2) + "\n");
    dir.commit();
    out << line;
    if (!o.quiet) out << dir.destination().string() << "\n";
    return kExitOk;
}

int cmd_verify(const CommandOptions& o, std::ostream& out) {
    AcceptanceOptions a;
    a.suite = parse_suite(o.suite);
    if (o.seed) a.seed = *o.seed;
    if (o.workers) a.workers = *o.workers;
    a.detailed_balance_fault = o.fault;
    a.only = o.criteria;
    for (int id : a.only) (void)criterion_name(id);

    RunDirectory dir(resolve_output(o.out, "", "verify-" + to_string(a.suite)));
    const auto results = run_acceptance(a, [&](const CriterionResult& r) {
        out << format_result_line(r) << std::endl;
    });
    json report{{"schema", kSchema}, {"command", "verify"}, {"suite", to_string(a.suite)},
                {"seed", a.seed}};
    json list = json::array();
    bool all = true;
    std::vector<std::string> failed;
    for (const auto& r : results) {
        list.push_back(to_json(r));
        all = all && r.passed;
        if (!r.passed) failed.push_back(std::to_string(r.id) + " " + r.name);
    }
    report["criteria"] = list;
    report["passed"] = all;
    report["failed"] = failed;
    write_text(dir.file("verify.json"), report.dump(2) + "\n");
    dir.commit();
    out << (all ? "all criteria passed" : std::to_string(failed.size()) + " criteria failed") << "\n";
    return all ? kExitOk : kExitCriterion;
}

}  // namespace ssep2d::harness
