#include <CLI11.hpp>

#include <iostream>

#include "ssep2d/harness/acceptance.hpp"

using namespace ssep2d::harness;

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string suite = "full";
    AcceptanceOptions options;
    app.add_option("--suite", suite)->check(CLI::IsMember({"fast", "full"}));
    app.add_option("--seed", options.seed);
    app.add_option("--workers", options.workers);
    app.add_option("--criteria", options.only)->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    options.suite = parse_suite(suite);

    const auto results = run_acceptance(options, [](const CriterionResult& r) {
        std::cout << format_result_line(r) << std::endl;
    });
    int failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
