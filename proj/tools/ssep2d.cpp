#include <CLI11.hpp>

#include <iostream>

#include "ssep2d/errors.hpp"
#include "ssep2d/harness/commands.hpp"

using namespace ssep2d::harness;

namespace {

void common(CLI::App* cmd, CommandOptions& o) {
    cmd->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory (default under $SSEP2D_OUTPUT_ROOT or ./runs)");
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--replicas", o.replicas, "number of replicas");
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and rate-functional workbench for the tilted 2D exclusion process"};
    app.require_subcommand(1);
    CommandOptions o;

    auto* simulate = app.add_subcommand("simulate", "run replicas and write observables");
    common(simulate, o);

    auto* rate = app.add_subcommand("rate", "evaluate the rate functionals of a density profile");
    common(rate, o);
    rate->add_option("--density", o.density,
                     "preset: constant-alpha, sine-instanton, instanton, step");
    rate->add_option("--density-file", o.density_file, "two-column CSV (r, m)");
    rate->add_option("--alpha", o.alpha, "reference density");
    rate->add_option("--beta", o.beta, "density at the origin for the instanton and step presets");
    rate->add_option("--basis", o.basis, "number of knot intervals");

    auto* instanton = app.add_subcommand("instanton", "solve the instanton problem");
    common(instanton, o);
    instanton->add_option("--alpha", o.alpha, "density at r = 1/2");
    instanton->add_option("--beta", o.beta, "density at the origin");
    instanton->add_option("--N", o.N, "grid intervals on [0, 1/2]");
    instanton->add_option("--mode", o.mode, "arcsin or direct");

    auto* girsanov = app.add_subcommand("girsanov", "entropy estimate or martingale check");
    common(girsanov, o);

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    common(verify, o);
    verify->add_option("--suite", o.suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--criteria", o.criteria, "run only these criterion ids")->delimiter(',');
    verify->add_option("--inject-balance-fault", o.fault,
                       "scale forward rates in the detailed-balance check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(o, std::cout);
        if (*rate) return cmd_rate(o, std::cout);
        if (*instanton) return cmd_instanton(o, std::cout);
        if (*girsanov) return cmd_girsanov(o, std::cout);
        if (*verify) return cmd_verify(o, std::cout);
    } catch (const ssep2d::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ssep2d::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return kExitCriterion;
    }
    return kExitUsage;
}
