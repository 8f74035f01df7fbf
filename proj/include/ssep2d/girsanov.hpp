#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ssep2d/configuration.hpp"
#include "ssep2d/dynamics.hpp"
#include "ssep2d/lattice.hpp"
#include "ssep2d/tilt.hpp"

namespace ssep2d {

struct GirsanovBreakdown {
    double log_psi_stat = 0.0;
    double log_psi_pot = 0.0;
    double log_psi_dyn = 0.0;
    double log_rn_total = 0.0;
    double scaled_total = 0.0;  // (log T / T) * log_rn_total

    static GirsanovBreakdown combine(double stat, double pot, double dyn, double T);
};

// The origin is included with gamma(0).
double log_psi_stat(const LatticeBall& ball, const TiltProfile& tilt, const Configuration& eta0);
double log_psi_pot(const LatticeBall& ball, const TiltProfile& tilt, const Configuration& eta0,
                   const Configuration& eta1);
double log_psi_dyn(const TrajectoryAccumulator& acc, double T);

// log dP_{T,gamma}/dP_alpha along one trajectory.
GirsanovBreakdown girsanov_breakdown(const LatticeBall& ball, const TiltProfile& tilt,
                                     const Configuration& eta0, const Trajectory& path);

struct ReplicaRun {
    std::uint64_t replica = 0;
    Configuration initial;
    Trajectory path;
    GirsanovBreakdown rn;
};

// Initial state from nu_{T,gamma} (tilted drive) or nu_alpha (reference drive),
// then one trajectory over the unit horizon. Streams depend only on (seed, replica).
ReplicaRun run_replica(const LatticeBall& ball, const TiltProfile& tilt, Drive drive,
                       std::uint64_t seed, std::uint64_t replica);

std::vector<ReplicaRun> run_replicas(const LatticeBall& ball, const TiltProfile& tilt, Drive drive,
                                     std::uint64_t seed, std::size_t replicas,
                                     std::size_t workers = 0);

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::vector<double> samples;

    static MonteCarloEstimate from_samples(std::vector<double> samples);
};

// Mean of -(log T / T) log dP_{T,gamma}/dP_alpha over runs started from nu_{T,gamma}.
MonteCarloEstimate entropy_estimate(const std::vector<ReplicaRun>& runs, double T);
MonteCarloEstimate entropy_estimate(const LatticeBall& ball, const TiltProfile& tilt,
                                    std::size_t replicas, std::uint64_t seed,
                                    std::size_t workers = 0);

struct MartingaleReport {
    double mean = 0.0;
    double standard_error = 0.0;
    double deviation = 0.0;  // (mean - 1) / standard_error
    double effective_sample_size = 0.0;
    bool variance_blowup = false;
    std::size_t replicas = 0;
};

inline constexpr double kMinEffectiveFraction = 0.1;

// Mean of exp(log dP_{T,gamma}/dP_alpha) under P_alpha.
MartingaleReport martingale_check(const std::vector<ReplicaRun>& runs);
MartingaleReport martingale_check(const LatticeBall& ball, const TiltProfile& tilt,
                                  std::size_t replicas, std::uint64_t seed,
                                  std::size_t workers = 0);

// max |log_rn_total| * log T / T over the runs.
double rn_bound_constant(const std::vector<ReplicaRun>& runs, double T);

}  // namespace ssep2d
