#include "ssep2d/girsanov.hpp"

#include <cmath>
#include <numeric>

#include "ssep2d/errors.hpp"
#include "ssep2d/replicas.hpp"

namespace ssep2d {

namespace {

constexpr std::uint64_t kInitialStream = 1ULL << 63;

void require_match(const LatticeBall& ball, const Configuration& eta) {
    if (eta.size() != ball.size()) throw DomainError("configuration does not match the ball");
}

}  // namespace

GirsanovBreakdown GirsanovBreakdown::combine(double stat, double pot, double dyn, double T) {
    GirsanovBreakdown g;
    g.log_psi_stat = stat;
    g.log_psi_pot = pot;
    g.log_psi_dyn = dyn;
    g.log_rn_total = stat + pot + dyn;
    g.scaled_total = std::log(T) / T * g.log_rn_total;
    return g;
}

double log_psi_stat(const LatticeBall& ball, const TiltProfile& tilt, const Configuration& eta0) {
    require_match(ball, eta0);
    if (tilt.is_flat()) return 0.0;
    const double a = tilt.alpha();
    const SiteTables tables = tilt.tabulate(ball);
    long double total = 0.0L;
    for (std::size_t i = 0; i < ball.size(); ++i) {
        const double g = tables.density[i];
        if (g == a) continue;
        total += eta0[i] ? std::log(g / a) : std::log((1.0 - g) / (1.0 - a));
    }
    return static_cast<double>(total);
}

double log_psi_pot(const LatticeBall& ball, const TiltProfile& tilt, const Configuration& eta0,
                   const Configuration& eta1) {
    require_match(ball, eta0);
    require_match(ball, eta1);
    if (tilt.is_flat()) return 0.0;
    const SiteTables tables = tilt.tabulate(ball);
    long double total = 0.0L;
    for (std::size_t i = 0; i < ball.size(); ++i)
        if (eta0[i] != eta1[i])
            total += tables.potential[i] * (static_cast<int>(eta1[i]) - static_cast<int>(eta0[i]));
    return static_cast<double>(total);
}

double log_psi_dyn(const TrajectoryAccumulator& acc, double T) { return -0.5 * T * acc.dyn_integral; }

GirsanovBreakdown girsanov_breakdown(const LatticeBall& ball, const TiltProfile& tilt,
                                     const Configuration& eta0, const Trajectory& path) {
    const double T = ball.scale();
    return GirsanovBreakdown::combine(log_psi_stat(ball, tilt, eta0),
                                      log_psi_pot(ball, tilt, eta0, path.final_state),
                                      log_psi_dyn(path.accumulator, T), T);
}

ReplicaRun run_replica(const LatticeBall& ball, const TiltProfile& tilt, Drive drive,
                       std::uint64_t seed, std::uint64_t replica) {
    ReplicaRun run;
    run.replica = replica;
    run.initial = drive == Drive::tilted
                      ? sample_product_measure(ball, tilt, seed, kInitialStream | replica)
                      : sample_product_measure(ball, tilt.alpha(), seed, kInitialStream | replica);
    DynamicsSpec spec;
    spec.T = ball.scale();
    spec.tilt = tilt;
    spec.drive = drive;
    spec.seed = seed;
    spec.replica = replica;
    run.path = run_trajectory(ball, spec, run.initial);
    run.rn = girsanov_breakdown(ball, tilt, run.initial, run.path);
    return run;
}

std::vector<ReplicaRun> run_replicas(const LatticeBall& ball, const TiltProfile& tilt, Drive drive,
                                     std::uint64_t seed, std::size_t replicas,
                                     std::size_t workers) {
    return parallel_map(replicas, workers, [&](std::size_t r) {
        return run_replica(ball, tilt, drive, seed, static_cast<std::uint64_t>(r));
    });
}

MonteCarloEstimate MonteCarloEstimate::from_samples(std::vector<double> samples) {
    if (samples.size() < 2) throw DomainError("need at least 2 replicas for a variance estimate");
    MonteCarloEstimate e;
    const double n = static_cast<double>(samples.size());
    e.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : samples) ss += (x - e.mean) * (x - e.mean);
    e.standard_error = std::sqrt(ss / (n - 1.0) / n);
    e.samples = std::move(samples);
    return e;
}

MonteCarloEstimate entropy_estimate(const std::vector<ReplicaRun>& runs, double T) {
    (void)T;
    std::vector<double> samples;
    samples.reserve(runs.size());
    for (const auto& r : runs) samples.push_back(-r.rn.scaled_total);
    return MonteCarloEstimate::from_samples(std::move(samples));
}

MonteCarloEstimate entropy_estimate(const LatticeBall& ball, const TiltProfile& tilt,
                                    std::size_t replicas, std::uint64_t seed, std::size_t workers) {
    if (replicas < 2) throw DomainError("need at least 2 replicas for a variance estimate");
    return entropy_estimate(run_replicas(ball, tilt, Drive::tilted, seed, replicas, workers),
                            ball.scale());
}

MartingaleReport martingale_check(const std::vector<ReplicaRun>& runs) {
    if (runs.size() < 2) throw DomainError("need at least 2 replicas for a variance estimate");
    std::vector<double> w;
    w.reserve(runs.size());
    for (const auto& r : runs) w.push_back(std::exp(r.rn.log_rn_total));
    double sum = 0.0, sum2 = 0.0;
    for (double x : w) {
        sum += x;
        sum2 += x * x;
    }
    const auto est = MonteCarloEstimate::from_samples(w);
    MartingaleReport rep;
    rep.replicas = runs.size();
    rep.mean = est.mean;
    rep.standard_error = est.standard_error;
    rep.deviation = est.standard_error > 0.0 ? (est.mean - 1.0) / est.standard_error
                    : est.mean == 1.0        ? 0.0
                                             : INFINITY;
    rep.effective_sample_size = sum2 > 0.0 ? sum * sum / sum2 : 0.0;
    rep.variance_blowup =
        !std::isfinite(sum2) ||
        rep.effective_sample_size < kMinEffectiveFraction * static_cast<double>(runs.size());
    return rep;
}

MartingaleReport martingale_check(const LatticeBall& ball, const TiltProfile& tilt,
                                  std::size_t replicas, std::uint64_t seed, std::size_t workers) {
    return martingale_check(run_replicas(ball, tilt, Drive::reference, seed, replicas, workers));
}

double rn_bound_constant(const std::vector<ReplicaRun>& runs, double T) {
    double c = 0.0;
    for (const auto& r : runs) c = std::max(c, std::abs(r.rn.log_rn_total) * std::log(T) / T);
    return c;
}

}  // namespace ssep2d
