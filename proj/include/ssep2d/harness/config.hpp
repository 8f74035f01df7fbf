#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ssep2d/dynamics.hpp"
#include "ssep2d/polar.hpp"
#include "ssep2d/radial_density.hpp"
#include "ssep2d/test_function.hpp"
#include "ssep2d/tilt.hpp"

namespace ssep2d::harness {

using nlohmann::json;

struct TiltSpec {
    std::string preset = "flat";  // flat | smoothstep | bump | grid
    double beta = 0.2;
    double inner = 0.1;
    double outer = 0.3;
    double amplitude = 0.1;
    double lo = 0.2;
    double hi = 0.4;
    double epsilon = kDefaultClamp;
    std::vector<std::pair<double, double>> grid;  // (r, gamma(r))
};

struct MollifierSpec {
    std::string kind = "ramp";  // ramp | box
    double delta = 0.05;
};

struct TestFunctionSpec {
    std::string kind = "bump";  // bump | tent
    double lo = 0.2;
    double hi = 0.4;
    double amplitude = 1.0;
};

struct RateSpec {
    std::string density = "sine-instanton";  // preset name
    std::string file;                        // two-column CSV (r, m); overrides the preset
    double beta = 0.9;
    std::size_t basis = 64;
    std::string grading = "ends";  // uniform | ends
    std::size_t grid = 2048;
};

struct InstantonSpec {
    double beta = 0.9;
    std::size_t N = 1024;
    std::string mode = "arcsin";  // arcsin | direct
};

struct RunConfig {
    double T = 100.0;
    double r_max = 0.6;
    double alpha = 0.5;
    std::uint64_t seed = 1;
    std::size_t replicas = 1;
    std::size_t workers = 0;
    std::string drive = "tilted";  // tilted | reference
    TiltSpec tilt;
    MollifierSpec mollifier;
    TestFunctionSpec test_function;
    std::vector<std::string> observables{"W_J", "V_H", "W_gamma", "density", "measure"};
    std::string output;
    RateSpec rate;
    InstantonSpec instanton;

    // Throws ConfigError naming the field on any unknown key or bad value.
    static RunConfig from_json(const json& j);
    static RunConfig load(const std::filesystem::path& path);
    json to_json() const;
    // Checks cross-field preconditions (support margins, grid ranges, ...).
    void validate() const;
    // 16 hex digits of FNV-1a over the canonical JSON echo, leaving out the
    // fields that cannot change numeric output (workers, output).
    std::string hash() const;

    TiltProfile make_tilt() const;
    Mollifier make_mollifier() const;
    TestFunction make_test_function() const;
    Drive make_drive() const;
    bool wants(const std::string& observable) const;
};

// Density presets: constant-alpha, sine-instanton, instanton, step.
RadialDensity density_preset(const std::string& name, double alpha, double beta, double r_max,
                             std::size_t grid);

std::string fnv1a_hex(const std::string& text);

}  // namespace ssep2d::harness
