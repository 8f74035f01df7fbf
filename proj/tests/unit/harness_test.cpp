#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "ssep2d/errors.hpp"
#include "ssep2d/harness/acceptance.hpp"
#include "ssep2d/harness/commands.hpp"
#include "ssep2d/harness/config.hpp"
#include "ssep2d/harness/io.hpp"

using namespace ssep2d;
using namespace ssep2d::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("ssep2d-test-" + std::to_string(::getpid())) / name;
    fs::create_directories(p.parent_path());
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path write_config(const std::string& name, const json& j) {
    const auto p = scratch(name);
    std::ofstream(p) << j.dump();
    return p;
}

std::size_t data_rows(const fs::path& csv) {
    std::ifstream in(csv);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') ++rows;
    return rows - 1;
}

}  // namespace

TEST_CASE("config parsing rejects unknown keys with the field name") {
    try {
        (void)RunConfig::from_json(json{{"T", 100}, {"tilt", {{"preset", "bump"}, {"widht", 0.1}}}});
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "tilt.widht");
    }
    CHECK_THROWS_AS(RunConfig::from_json(json{{"delta", 0.05}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"T", "big"}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"T", 1.0}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"r_max", 0.45}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"mollifier", {{"delta", 0.2}}}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"instanton", {{"beta", 1.5}}}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"observables", {"W_J", "entropy"}}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"tilt", {{"preset", "bump"}, {"hi", 0.7}}}}),
                    ConfigError);
}

TEST_CASE("config echo round-trips and the hash is stable") {
    const auto c = RunConfig::from_json(json{{"T", 1000}, {"seed", 7}, {"tilt", {{"preset", "smoothstep"}}}});
    const auto again = RunConfig::from_json(c.to_json());
    CHECK(again.hash() == c.hash());
    CHECK(c.hash().size() == 16);
    auto other = c;
    other.seed = 8;
    CHECK(other.hash() != c.hash());
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(std::stod(format_double(-2.5e-301)) == -2.5e-301);
    CHECK(std::stod(format_double(M_PI)) == M_PI);
}

TEST_CASE("density CSV reader") {
    const auto good = scratch("good.csv");
    std::ofstream(good) << "# comment\nr,m\n0,0.5\n0.25,0.5\n0.5,0.5\n0.6,0.5\n";
    const auto d = read_density_csv(good, 0.5);
    CHECK(d.size() == 4);
    CHECK(d.alpha_extended);

    const auto bad = scratch("bad.csv");
    std::ofstream(bad) << "r,m\n0,0.5\n0.1,abc\n";
    CHECK_THROWS_AS(read_density_csv(bad, 0.5), ConfigError);
    const auto range = scratch("range.csv");
    std::ofstream(range) << "0,0.5\n0.1,1.5\n0.2,0.5\n0.3,0.5\n";
    CHECK_THROWS_AS(read_density_csv(range, 0.5), ConfigError);
}

TEST_CASE("run directories are removed unless committed") {
    const auto p = scratch("rundir");
    {
        RunDirectory dir(p);
        write_text(dir.file("x.txt"), "x");
        CHECK(fs::exists(dir.staging()));
    }
    CHECK(!fs::exists(p));
    CHECK(!fs::exists(fs::path(p.string() + ".partial")));
    {
        RunDirectory dir(p);
        write_text(dir.file("x.txt"), "x");
        dir.commit();
    }
    CHECK(fs::exists(p / "x.txt"));
}

TEST_CASE("simulate writes reproducible outputs") {
    const auto cfg = write_config("sim.json", json{{"T", 100},
                                                   {"seed", 5},
                                                   {"replicas", 16},
                                                   {"workers", 2},
                                                   {"tilt", {{"preset", "smoothstep"}, {"beta", 0.7}}}});
    const auto first = scratch("sim-a"), second = scratch("sim-b");
    CommandOptions o;
    o.config_path = cfg.string();
    o.quiet = true;
    std::ostringstream sink;
    o.out = first.string();
    REQUIRE(cmd_simulate(o, sink) == kExitOk);
    o.out = second.string();
    o.workers = 1;
    REQUIRE(cmd_simulate(o, sink) == kExitOk);

    for (const char* f : {"occupations.csv", "bonds.csv", "girsanov.csv", "summary.json",
                          "measure.csv", "density.csv"})
        CHECK(fs::exists(first / f));
    for (const char* f : {"occupations.csv", "bonds.csv", "girsanov.csv", "measure.csv", "density.csv"})
        CHECK(slurp(first / f) == slurp(second / f));
    CHECK(data_rows(first / "girsanov.csv") == 16);

    const auto summary = json::parse(slurp(first / "summary.json"));
    CHECK(summary["schema"] == kSchema);
    CHECK(summary["config"]["T"] == 100.0);
    const std::string hash = summary["config_hash"];
    CHECK(slurp(first / "bonds.csv").rfind("# config_hash=" + hash + "\n", 0) == 0);
    CHECK(summary["functionals"].contains("W_J"));
    CHECK(summary["functionals"]["girsanov"].contains("entropy_estimate"));
}

TEST_CASE("simulate with an invalid config leaves no output") {
    const auto cfg = write_config("broken.json", json{{"T", 100}, {"mollifier", {{"delta", 0.3}}}});
    CommandOptions o;
    o.config_path = cfg.string();
    o.out = scratch("sim-broken").string();
    std::ostringstream sink;
    CHECK_THROWS_AS(cmd_simulate(o, sink), ConfigError);
    CHECK(!fs::exists(o.out));
    CHECK(!fs::exists(o.out + ".partial"));
}

TEST_CASE("rate reports") {
    CommandOptions o;
    o.quiet = true;
    std::ostringstream out;
    o.density = "constant-alpha";
    o.out = scratch("rate-const").string();
    REQUIRE(cmd_rate(o, out) == kExitOk);
    auto report = json::parse(out.str());
    for (const char* key : {"Q_closed", "Q_basis", "Q_alpha_closed", "Q_alpha_basis", "I_Q_alpha",
                            "hat_I_alpha", "J_Q", "J_Q_closed", "J_gamma", "Upsilon_closed",
                            "Upsilon_numeric"})
        CHECK(report[key]["value"].get<double>() == 0.0);

    std::ostringstream out2;
    o.density = "sine-instanton";
    o.out = scratch("rate-sine").string();
    REQUIRE(cmd_rate(o, out2) == kExitOk);
    report = json::parse(out2.str());
    const double target = M_PI * M_PI * M_PI / 8.0;
    CHECK(std::abs(report["J_Q"]["value"].get<double>() / target - 1.0) < 0.01);
    CHECK(report["J_Q_closed"]["value"].get<double>() == doctest::Approx(target).epsilon(1e-3));
    CHECK(report["Upsilon_closed"]["value"].get<double>() == doctest::Approx(target).epsilon(1e-12));
    CHECK(fs::exists(fs::path(o.out) / "rate.json"));

    const auto bad = scratch("malformed.csv");
    std::ofstream(bad) << "r,m\n0;0.5\n";
    o.density.reset();
    o.density_file = bad.string();
    o.out = scratch("rate-bad").string();
    std::ostringstream out3;
    CHECK_THROWS_AS(cmd_rate(o, out3), ConfigError);
}

TEST_CASE("instanton command") {
    CommandOptions o;
    o.quiet = true;
    o.alpha = 0.4;
    o.beta = 0.4;
    o.out = scratch("inst-flat").string();
    std::ostringstream out;
    REQUIRE(cmd_instanton(o, out) == kExitOk);
    const auto summary = json::parse(slurp(fs::path(o.out) / "summary.json"));
    CHECK(summary["instanton"]["value"].get<double>() <= 1e-20);
    CHECK(data_rows(fs::path(o.out) / "profile.csv") == 1025);

    o.alpha = 0.5;
    o.beta = 0.9;
    o.out = scratch("inst-09").string();
    REQUIRE(cmd_instanton(o, out) == kExitOk);
    const auto s2 = json::parse(slurp(fs::path(o.out) / "summary.json"));
    CHECK(s2["instanton"]["relative_gap"].get<double>() < 1e-3);
    CHECK(s2["instanton"]["max_profile_error"].get<double>() < 1e-3);

    o.beta = 1.5;
    CHECK_THROWS_AS(cmd_instanton(o, out), ConfigError);
}

TEST_CASE("verify names the faulty criterion") {
    CommandOptions o;
    o.criteria = {4};
    o.fault = 1.1;
    o.out = scratch("verify-fault").string();
    std::ostringstream out;
    CHECK(cmd_verify(o, out) == kExitCriterion);
    CHECK(out.str().find("[FAIL]  4 detailed-balance") != std::string::npos);
    const auto report = json::parse(slurp(fs::path(o.out) / "verify.json"));
    CHECK(report["failed"][0] == "4 detailed-balance");

    o.fault = 1.0;
    std::ostringstream ok;
    CHECK(cmd_verify(o, ok) == kExitOk);
}

TEST_CASE("suites") {
    CHECK(suite_criteria(Suite::full).size() == kCriterionCount);
    CHECK(suite_criteria(Suite::fast).size() < kCriterionCount);
    CHECK_THROWS_AS(parse_suite("medium"), ConfigError);
}

TEST_CASE("output root override") {
    ::setenv(kOutputRootVariable, "/tmp/elsewhere", 1);
    CHECK(resolve_output("", "", "run") == fs::path("/tmp/elsewhere/run"));
    CHECK(resolve_output("", "named", "run") == fs::path("/tmp/elsewhere/named"));
    CHECK(resolve_output("explicit", "named", "run") == fs::path("explicit"));
    ::unsetenv(kOutputRootVariable);
    CHECK(resolve_output("", "", "run") == fs::path("runs/run"));
}
