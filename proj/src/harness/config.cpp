#include "ssep2d/harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ssep2d/errors.hpp"
#include "ssep2d/rate.hpp"

namespace ssep2d::harness {

namespace {

const std::set<std::string> kObservables{"W_J", "V_H", "W_gamma", "density", "measure"};

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(where.empty() ? "<root>" : where, "expected an object");
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (const char* allowed : keys) ok = ok || k == allowed;
        if (!ok) throw ConfigError(where.empty() ? k : where + "." + k, "unknown key");
    }
}

std::string path(const std::string& where, const char* key) {
    return where.empty() ? key : where + "." + key;
}

template <class T>
void read(const json& j, const std::string& where, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(path(where, key), std::string("wrong type: ") + e.what());
    }
}

void read_count(const json& j, const std::string& where, const char* key, std::size_t& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(path(where, key), "expected a nonnegative integer");
    out = v.get<std::size_t>();
}

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigError(field, message);
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
    only_keys(j, "", {"T", "r_max", "alpha", "seed", "replicas", "workers", "drive", "tilt",
                      "mollifier", "test_function", "observables", "output", "rate", "instanton"});
    RunConfig c;
    read(j, "", "T", c.T);
    read(j, "", "r_max", c.r_max);
    read(j, "", "alpha", c.alpha);
    if (j.contains("seed")) {
        const json& v = j.at("seed");
        require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0), "seed",
                "expected a nonnegative integer");
        c.seed = v.get<std::uint64_t>();
    }
    read_count(j, "", "replicas", c.replicas);
    read_count(j, "", "workers", c.workers);
    read(j, "", "drive", c.drive);
    read(j, "", "output", c.output);
    if (j.contains("observables")) read(j, "", "observables", c.observables);
    if (j.contains("tilt")) {
        const json& t = j.at("tilt");
        only_keys(t, "tilt",
                  {"preset", "beta", "inner", "outer", "amplitude", "lo", "hi", "epsilon", "grid"});
        read(t, "tilt", "preset", c.tilt.preset);
        read(t, "tilt", "beta", c.tilt.beta);
        read(t, "tilt", "inner", c.tilt.inner);
        read(t, "tilt", "outer", c.tilt.outer);
        read(t, "tilt", "amplitude", c.tilt.amplitude);
        read(t, "tilt", "lo", c.tilt.lo);
        read(t, "tilt", "hi", c.tilt.hi);
        read(t, "tilt", "epsilon", c.tilt.epsilon);
        read(t, "tilt", "grid", c.tilt.grid);
        if (t.contains("grid") && !t.contains("preset")) c.tilt.preset = "grid";
    }
    if (j.contains("mollifier")) {
        const json& m = j.at("mollifier");
        only_keys(m, "mollifier", {"kind", "delta"});
        read(m, "mollifier", "kind", c.mollifier.kind);
        read(m, "mollifier", "delta", c.mollifier.delta);
    }
    if (j.contains("test_function")) {
        const json& h = j.at("test_function");
        only_keys(h, "test_function", {"kind", "lo", "hi", "amplitude"});
        read(h, "test_function", "kind", c.test_function.kind);
        read(h, "test_function", "lo", c.test_function.lo);
        read(h, "test_function", "hi", c.test_function.hi);
        read(h, "test_function", "amplitude", c.test_function.amplitude);
    }
    if (j.contains("rate")) {
        const json& r = j.at("rate");
        only_keys(r, "rate", {"density", "file", "beta", "basis", "grading", "grid"});
        read(r, "rate", "density", c.rate.density);
        read(r, "rate", "file", c.rate.file);
        read(r, "rate", "beta", c.rate.beta);
        read_count(r, "rate", "basis", c.rate.basis);
        read(r, "rate", "grading", c.rate.grading);
        read_count(r, "rate", "grid", c.rate.grid);
    }
    if (j.contains("instanton")) {
        const json& s = j.at("instanton");
        only_keys(s, "instanton", {"beta", "N", "mode"});
        read(s, "instanton", "beta", c.instanton.beta);
        read_count(s, "instanton", "N", c.instanton.N);
        read(s, "instanton", "mode", c.instanton.mode);
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("--config", "cannot open " + p.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("parse error: ") + e.what());
    }
    return from_json(j);
}

json RunConfig::to_json() const {
    json j;
    j["T"] = T;
    j["r_max"] = r_max;
    j["alpha"] = alpha;
    j["seed"] = seed;
    j["replicas"] = replicas;
    j["workers"] = workers;
    j["drive"] = drive;
    j["tilt"] = {{"preset", tilt.preset}, {"beta", tilt.beta},   {"inner", tilt.inner},
                 {"outer", tilt.outer},   {"amplitude", tilt.amplitude}, {"lo", tilt.lo},
                 {"hi", tilt.hi},         {"epsilon", tilt.epsilon},     {"grid", tilt.grid}};
    j["mollifier"] = {{"kind", mollifier.kind}, {"delta", mollifier.delta}};
    j["test_function"] = {{"kind", test_function.kind},
                          {"lo", test_function.lo},
                          {"hi", test_function.hi},
                          {"amplitude", test_function.amplitude}};
    j["observables"] = observables;
    j["output"] = output;
    j["rate"] = {{"density", rate.density}, {"file", rate.file},       {"beta", rate.beta},
                 {"basis", rate.basis},     {"grading", rate.grading}, {"grid", rate.grid}};
    j["instanton"] = {{"beta", instanton.beta}, {"N", instanton.N}, {"mode", instanton.mode}};
    return j;
}

void RunConfig::validate() const {
    require(T > 1.0 && std::isfinite(T), "T", "must be a finite number > 1");
    require(r_max > 0.5 && r_max < 1.0, "r_max", "must lie in (1/2, 1)");
    require(alpha > 0.0 && alpha < 1.0, "alpha", "must lie in (0, 1)");
    require(replicas >= 1, "replicas", "must be at least 1");
    require(drive == "tilted" || drive == "reference", "drive", "must be tilted or reference");
    for (const auto& o : observables)
        require(kObservables.count(o) == 1, "observables", "unknown observable " + o);
    require(mollifier.kind == "ramp" || mollifier.kind == "box", "mollifier.kind",
            "must be ramp or box");
    require(mollifier.delta > 0.0 && 4.0 * mollifier.delta < r_max, "mollifier.delta",
            "must satisfy 0 < delta < r_max / 4");
    require(test_function.kind == "bump" || test_function.kind == "tent", "test_function.kind",
            "must be bump or tent");
    require(test_function.lo >= kSupportMargin && test_function.hi <= r_max - kSupportMargin &&
                test_function.hi > test_function.lo,
            "test_function", "support must lie inside [0.05, r_max - 0.05]");
    if (wants("W_J"))
        require(test_function.lo >= 2.0 * mollifier.delta &&
                    test_function.hi <= r_max - 2.0 * mollifier.delta,
                "test_function", "W_J needs the support inside [2 delta, r_max - 2 delta]");
    require(rate.basis >= 4, "rate.basis", "needs at least 4 knot intervals");
    require(rate.grid >= 8, "rate.grid", "needs at least 8 cells");
    require(rate.grading == "uniform" || rate.grading == "ends", "rate.grading",
            "must be uniform or ends");
    require(rate.beta >= 0.0 && rate.beta <= 1.0, "rate.beta", "must lie in [0, 1]");
    require(instanton.beta >= 0.0 && instanton.beta <= 1.0, "instanton.beta", "must lie in [0, 1]");
    require(instanton.N >= 2, "instanton.N", "must be at least 2");
    require(instanton.mode == "arcsin" || instanton.mode == "direct", "instanton.mode",
            "must be arcsin or direct");
    try {
        (void)make_tilt();
    } catch (const Error& e) {
        throw ConfigError("tilt", e.what());
    }
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunConfig::hash() const {
    json j = to_json();
    j.erase("workers");
    j.erase("output");
    return fnv1a_hex(j.dump());
}

TiltProfile RunConfig::make_tilt() const {
    if (tilt.preset == "flat") return TiltProfile::flat(alpha);
    if (tilt.preset == "smoothstep")
        return TiltProfile::smoothstep(alpha, tilt.beta, tilt.inner, tilt.outer, tilt.epsilon);
    if (tilt.preset == "bump")
        return TiltProfile::bump(alpha, tilt.amplitude, tilt.lo, tilt.hi, tilt.epsilon);
    if (tilt.preset == "grid") {
        std::vector<double> r, g;
        for (const auto& [x, y] : tilt.grid) {
            r.push_back(x);
            g.push_back(y);
        }
        return TiltProfile::from_grid(alpha, r, g, tilt.epsilon);
    }
    throw ConfigError("tilt.preset", "unknown preset " + tilt.preset);
}

Mollifier RunConfig::make_mollifier() const {
    return mollifier.kind == "box" ? Mollifier::box(mollifier.delta)
                                   : Mollifier::ramp(mollifier.delta);
}

TestFunction RunConfig::make_test_function() const {
    return test_function.kind == "tent"
               ? TestFunction::tent(test_function.lo, test_function.hi, test_function.amplitude)
               : TestFunction::smooth_bump(test_function.lo, test_function.hi,
                                           test_function.amplitude);
}

Drive RunConfig::make_drive() const { return drive == "reference" ? Drive::reference : Drive::tilted; }

bool RunConfig::wants(const std::string& o) const {
    for (const auto& x : observables)
        if (x == o) return true;
    return false;
}

RadialDensity density_preset(const std::string& name, double alpha, double beta, double r_max,
                             std::size_t grid) {
    const double hi = std::max(r_max, 0.6);
    if (name == "constant-alpha")
        return RadialDensity::sample([alpha](double) { return alpha; }, 0.0, hi, grid, alpha);
    if (name == "sine-instanton")
        return RadialDensity::sample(
            [](double r) { return r < 0.5 ? 0.5 * (1.0 + std::sin(M_PI * r)) : 1.0; }, 0.0, hi,
            grid, 1.0);
    if (name == "instanton")
        return RadialDensity::sample(
            [alpha, beta](double r) { return r < 0.5 ? instanton_profile(alpha, beta, r) : alpha; },
            0.0, hi, grid, alpha);
    if (name == "step")
        return RadialDensity::sample([alpha, beta](double r) { return r < 0.5 ? beta : alpha; },
                                     0.0, hi, grid, alpha);
    throw ConfigError("rate.density", "unknown density preset " + name);
}

}  // namespace ssep2d::harness
