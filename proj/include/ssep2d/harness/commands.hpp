#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ssep2d/harness/config.hpp"

namespace ssep2d::harness {

inline constexpr const char* kSchema = "ssep2d/1";

enum ExitCode : int { kExitOk = 0, kExitCriterion = 1, kExitUsage = 2 };

struct CommandOptions {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    std::optional<std::size_t> workers;
    std::string suite = "fast";
    // instanton
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<std::size_t> N;
    std::optional<std::string> mode;
    // rate
    std::optional<std::string> density;
    std::optional<std::string> density_file;
    std::optional<std::size_t> basis;
    // verify
    std::vector<int> criteria;
    double fault = 1.0;
    bool quiet = false;
};

// Loads the config file (or defaults) and applies flag overrides.
RunConfig resolve_config(const CommandOptions& options);

int cmd_simulate(const CommandOptions& options, std::ostream& out);
int cmd_rate(const CommandOptions& options, std::ostream& out);
int cmd_instanton(const CommandOptions& options, std::ostream& out);
int cmd_girsanov(const CommandOptions& options, std::ostream& out);
int cmd_verify(const CommandOptions& options, std::ostream& out);

// Rate functional report for a density, as written by cmd_rate.
json rate_report(const RunConfig& config, const RadialDensity& m, const std::string& source);

}  // namespace ssep2d::harness
