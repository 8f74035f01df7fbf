#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ssep2d::harness {

enum class Suite { fast, full };

Suite parse_suite(const std::string& name);
std::string to_string(Suite s);
// Criterion ids run by each suite, in order.
std::vector<int> suite_criteria(Suite s);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    nlohmann::json metrics = nlohmann::json::object();
};

struct AcceptanceOptions {
    Suite suite = Suite::fast;
    std::uint64_t seed = 20240611;
    std::size_t workers = 0;
    // Multiplies every forward rate inside the detailed-balance check.
    double detailed_balance_fault = 1.0;
    // Restricts the run to these ids when nonempty.
    std::vector<int> only;
};

inline constexpr int kCriterionCount = 11;

std::string criterion_name(int id);

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options,
    const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_result_line(const CriterionResult& r);
nlohmann::json to_json(const CriterionResult& r);

}  // namespace ssep2d::harness
