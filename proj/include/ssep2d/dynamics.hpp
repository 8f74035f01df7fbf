#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ssep2d/configuration.hpp"
#include "ssep2d/lattice.hpp"
#include "ssep2d/tilt.hpp"

namespace ssep2d {

// Which generator moves the particles. The tilt, when present, always feeds the
// dynamical Girsanov integrand, so a reference-driven run with a tilt samples
// P_alpha while accumulating the likelihood ratio against P_{T,gamma}.
enum class Drive { reference, tilted };

inline constexpr double kMaxLogRate = 50.0;

struct DynamicsSpec {
    double T = 0.0;
    std::optional<TiltProfile> tilt;
    Drive drive = Drive::tilted;
    double time_horizon = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t replica = 0;
};

struct TrajectoryAccumulator {
    std::vector<double> occ_time;           // per site
    std::vector<double> bond_disagreement;  // per bond
    double origin_occupation = 0.0;
    double dyn_integral = 0.0;
    double horizon = 0.0;
    std::uint64_t event_count = 0;
    std::uint64_t attempt_count = 0;

    // Time integral of eta(head) - eta(tail) along bond b.
    double signed_bond(const LatticeBall& ball, std::size_t b) const;
    // Adds another accumulator on the same ball.
    void merge(const TrajectoryAccumulator& other);
};

struct Trajectory {
    Configuration final_state;
    TrajectoryAccumulator accumulator;
};

// exp(Gamma(head) - Gamma(tail)) at [2b] and its inverse at [2b + 1].
std::vector<double> jump_rate_factors(const LatticeBall& ball, std::span<const double> potential);

Trajectory run_trajectory(const LatticeBall& ball, const DynamicsSpec& spec,
                          Configuration initial);

// Sum over directed occupied->empty bonds of exp(Gamma(y) - Gamma(x)) - 1.
double dyn_integrand(const LatticeBall& ball, const TiltProfile& tilt, const Configuration& eta);

// Max relative violation of the per-bond balance relation. rate_fault scales
// every tail->head rate and exists to test the check itself.
double check_detailed_balance(const LatticeBall& ball, const TiltProfile& tilt,
                              double rate_fault = 1.0);

struct StationarityReport {
    double tv_distance = 0.0;
    std::size_t states = 0;
    std::uint64_t events = 0;
    std::vector<double> empirical;
    std::vector<double> exact;
};

inline constexpr std::size_t kMaxSmallStates = 10'000;

StationarityReport stationary_check_small(const LatticeBall& ball, const DynamicsSpec& spec,
                                          std::size_t particles, std::uint64_t events);

// (T/4) sum_bonds E_alpha[(f(swap eta) - f(eta))^2] with f indexed by the bit
// pattern sum_i eta(i) 2^i.
double dirichlet_form_exact(const LatticeBall& ball, double alpha, std::span<const double> f);

// Low-level engine, exposed for callers that need to observe individual jumps.
class ExclusionEngine {
public:
    ExclusionEngine(const LatticeBall& ball, const DynamicsSpec& spec, Configuration initial);
    ~ExclusionEngine();
    ExclusionEngine(const ExclusionEngine&) = delete;
    ExclusionEngine& operator=(const ExclusionEngine&) = delete;

    // Advance until the process time reaches until or max_events jumps happened.
    // on_jump(t) runs just before each jump is applied.
    void advance(double until, std::uint64_t max_events = UINT64_MAX,
                 const std::function<void(double)>& on_jump = {});

    double time() const;
    std::uint64_t events() const;
    const Configuration& state() const;
    double current_dyn_integrand() const;
    // Closes all running integrals at the current time.
    TrajectoryAccumulator finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ssep2d
