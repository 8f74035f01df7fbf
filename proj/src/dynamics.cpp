#include "ssep2d/dynamics.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <boost/random/exponential_distribution.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "ssep2d/errors.hpp"
#include "ssep2d/rng.hpp"

namespace ssep2d {

double TrajectoryAccumulator::signed_bond(const LatticeBall& ball, std::size_t b) const {
    const Bond& bond = ball.bonds()[b];
    return occ_time[bond.head] - occ_time[bond.tail];
}

void TrajectoryAccumulator::merge(const TrajectoryAccumulator& other) {
    if (occ_time.empty()) {
        *this = other;
        return;
    }
    if (other.occ_time.size() != occ_time.size() ||
        other.bond_disagreement.size() != bond_disagreement.size())
        throw DomainError("cannot merge accumulators from different balls");
    for (std::size_t i = 0; i < occ_time.size(); ++i) occ_time[i] += other.occ_time[i];
    for (std::size_t i = 0; i < bond_disagreement.size(); ++i)
        bond_disagreement[i] += other.bond_disagreement[i];
    origin_occupation += other.origin_occupation;
    dyn_integral += other.dyn_integral;
    horizon += other.horizon;
    event_count += other.event_count;
    attempt_count += other.attempt_count;
}

std::vector<double> jump_rate_factors(const LatticeBall& ball, std::span<const double> potential) {
    std::vector<double> f(2 * ball.bond_count());
    double worst = 0.0;
    for (std::size_t b = 0; b < ball.bond_count(); ++b) {
        const Bond& bond = ball.bonds()[b];
        const double d = potential[bond.head] - potential[bond.tail];
        worst = std::max(worst, std::abs(d));
        f[2 * b] = std::exp(d);
        f[2 * b + 1] = std::exp(-d);
    }
    if (worst > kMaxLogRate)
        throw RateOverflowError("rate overflow: max |dGamma| = " + std::to_string(worst) +
                                    " exceeds " + std::to_string(kMaxLogRate),
                                worst);
    return f;
}

double dyn_integrand(const LatticeBall& ball, const TiltProfile& tilt, const Configuration& eta) {
    if (tilt.is_flat()) return 0.0;
    const auto tables = tilt.tabulate(ball);
    long double s = 0.0L;
    for (const Bond& bond : ball.bonds()) {
        const bool a = eta[bond.tail], c = eta[bond.head];
        if (a == c) continue;
        const double d = tables.potential[bond.head] - tables.potential[bond.tail];
        s += std::expm1(a ? d : -d);
    }
    return static_cast<double>(s);
}

// Symmetric exclusion realised as stirring: each site owns two bond slots
// (+e1, +e2), every slot carries a Poisson clock and a ring exchanges the two
// sites. Rings on agreeing or missing bonds are no-ops; with a tilt a ring is
// kept with probability exp(dGamma) / m, m the clock's rate bound. Exact in
// distribution, and no per-bond index structure has to be maintained.
struct ExclusionEngine::Impl {
    struct Links {
        std::int32_t nbr[4];
    };

    // Per-site flag byte.
    static constexpr std::uint8_t kOccupied = 1;
    static constexpr std::uint8_t kLevel = 2;  // site and its neighbours share one Gamma
    static constexpr std::uint8_t kInner = 4;  // slots also ring on the inner clock

    const LatticeBall& ball;
    bool tilted_drive = false;
    bool track_dyn = false;
    std::vector<std::uint8_t> flags;  // one extra permanently empty dummy site
    std::int32_t dummy = 0;
    mutable Configuration snapshot;
    mutable bool snapshot_valid = false;
    std::vector<Links> links;
    std::vector<double> boltz, inv_boltz;  // exp(+-Gamma) per site
    // Every slot rings at rate (T/2) m_out; slots of inner sites ring
    // additionally at rate (T/2) (m_in - m_out).
    double m_out = 1.0, m_in = 1.0;
    double rate_out = 0.0, rate_in = 0.0;
    double next_out = 0.0, next_in = 0.0;
    std::vector<std::uint32_t> inner_sites;
    // Outer-clock slots drawn ahead of use so their links can be prefetched.
    static constexpr unsigned kAhead = 8;
    std::array<std::uint64_t, kAhead> ahead{};
    unsigned head = 0;
    std::vector<double> occ, dis;  // dis indexed by slot 2 * site + dir
    long double S = 0.0L;
    long double dyn = 0.0L;
    double t = 0.0, t_dyn = 0.0;
    std::uint64_t events = 0, attempts = 0;
    bool finished = false;
    Rng rng;
    boost::random::exponential_distribution<double> exponential;

    Impl(const LatticeBall& b, const DynamicsSpec& spec, const Configuration& initial)
        : ball(b), rng(spec.seed, spec.replica) {
        if (initial.size() != ball.size())
            throw DomainError("initial configuration does not match the ball");
        if (!(spec.T > 1.0) || std::abs(spec.T - ball.scale()) > 1e-12 * ball.scale())
            throw DomainError("dynamics scale T must match the ball scale");
        const std::size_t n = ball.size();
        dummy = static_cast<std::int32_t>(n);
        flags.assign(n + 1, kLevel);
        for (std::size_t i = 0; i < n; ++i)
            if (initial[i]) flags[i] |= kOccupied;
        links.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            for (int k = 0; k < 4; ++k) {
                const std::int32_t z = ball.neighbor(i, k);
                links[i].nbr[k] = z == kNoSite ? dummy : z;
            }

        const bool has_tilt = spec.tilt && !spec.tilt->is_flat();
        tilted_drive = has_tilt && spec.drive == Drive::tilted;
        track_dyn = has_tilt;
        if (has_tilt) {
            const auto tables = spec.tilt->tabulate(ball);
            const auto factors = jump_rate_factors(ball, tables.potential);
            boltz.assign(n + 1, 1.0);
            inv_boltz.assign(n + 1, 1.0);
            for (std::size_t i = 0; i < n; ++i) {
                boltz[i] = std::exp(tables.potential[i]);
                inv_boltz[i] = std::exp(-tables.potential[i]);
                for (int k = 0; k < 4; ++k) {
                    const std::int32_t z = ball.neighbor(i, k);
                    if (z != kNoSite && tables.potential[z] != tables.potential[i])
                        flags[i] &= static_cast<std::uint8_t>(~kLevel);
                }
            }
            if (tilted_drive) split_clocks(factors);
        }
        for (auto x : inner_sites) flags[x] |= kInner;
        rate_out = spec.T * m_out * static_cast<double>(n);
        rate_in = spec.T * (m_in - m_out) * static_cast<double>(inner_sites.size());
        next_out = exponential(rng.engine()) / rate_out;
        next_in = rate_in > 0.0 ? exponential(rng.engine()) / rate_in
                                : std::numeric_limits<double>::infinity();

        for (auto& slot : ahead) slot = rng.below(2 * static_cast<std::uint64_t>(n));
        dis.assign(2 * n + 2, 0.0);
        occ.assign(n, 0.0);
        if (track_dyn)
            for (const Bond& bond : ball.bonds())
                if (occupied(bond.tail) != occupied(bond.head))
                    S += occupied(bond.tail) ? term(bond.tail, bond.head)
                                             : term(bond.head, bond.tail);
    }

    bool occupied(std::size_t x) const { return flags[x] & kOccupied; }

    // Chooses the inner site set minimising the total clock rate.
    void split_clocks(const std::vector<double>& factors) {
        const std::size_t n = ball.size();
        std::vector<double> bound(n, 1.0);
        for (std::size_t b = 0; b < ball.bond_count(); ++b) {
            const Bond& bond = ball.bonds()[b];
            bound[bond.tail] = std::max({bound[bond.tail], factors[2 * b], factors[2 * b + 1]});
        }
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return bound[a] > bound[b]; });
        m_in = bound[order[0]];
        std::size_t best_k = 0;
        double best = m_in * static_cast<double>(n);
        for (std::size_t k = 1; k < n; ++k) {
            const double mk = bound[order[k]];
            const double cost = mk * static_cast<double>(n) + (m_in - mk) * static_cast<double>(k);
            if (cost < best) {
                best = cost;
                best_k = k;
            }
        }
        m_out = best_k == 0 ? m_in : bound[order[best_k]];
        inner_sites.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_k));
    }

    // exp(Gamma(y) - Gamma(x)) - 1 for a particle moving x -> y.
    double term(std::size_t x, std::size_t y) const { return boltz[y] * inv_boltz[x] - 1.0; }

    // Bond slot touching site x in direction K. Missing neighbours point at the
    // dummy site, whose slots are never read back.
    template <int K>
    std::size_t slot(std::size_t x) const {
        if constexpr (K < 2)
            return 2 * x + K;
        else
            return 2 * static_cast<std::size_t>(links[x].nbr[K]) + (K - 2);
    }

    // Neighbour bond of the site that was just vacated.
    template <bool Dyn, int K>
    double vacated(std::uint32_t from) {
        const std::int32_t z = links[from].nbr[K];
        const double filled_z = flags[static_cast<std::size_t>(z)] & kOccupied;
        dis[slot<K>(from)] += (1.0 - 2.0 * filled_z) * t;
        if constexpr (Dyn) {
            const double valid = z != dummy;
            return valid * (filled_z * term(z, from) - (1.0 - filled_z) * term(from, z));
        }
        return 0.0;
    }

    // Neighbour bond of the site that was just filled.
    template <bool Dyn, int K>
    double filled(std::uint32_t to) {
        const std::int32_t z = links[to].nbr[K];
        const double filled_z = flags[static_cast<std::size_t>(z)] & kOccupied;
        dis[slot<K>(to)] += (2.0 * filled_z - 1.0) * t;
        if constexpr (Dyn) {
            const double valid = z != dummy;
            return valid * ((1.0 - filled_z) * term(to, z) - filled_z * term(z, to));
        }
        return 0.0;
    }

    // All four bonds of both sites are updated without branching on the jump
    // direction; the jump bond itself is corrected afterwards.
    template <bool Dyn>
    void jump(std::uint32_t from, std::uint32_t to, std::size_t jump_slot) {
        if constexpr (Dyn) {
            dyn += S * (t - t_dyn);
            t_dyn = t;
        }
        occ[from] += t;
        occ[to] -= t;
        flags[from] &= static_cast<std::uint8_t>(~kOccupied);
        flags[to] |= kOccupied;
        const double d = vacated<Dyn, 0>(from) + vacated<Dyn, 1>(from) + vacated<Dyn, 2>(from) +
                         vacated<Dyn, 3>(from) + filled<Dyn, 0>(to) + filled<Dyn, 1>(to) +
                         filled<Dyn, 2>(to) + filled<Dyn, 3>(to);
        dis[jump_slot] += 2.0 * t;
        if constexpr (Dyn) S += d - (term(to, from) + term(from, to));
    }

    template <bool Tilted, bool Hooked>
    void loop(double until, std::uint64_t max_events, const std::function<void(double)>& hook) {
        const std::uint64_t stop = events + std::min<std::uint64_t>(max_events, UINT64_MAX - events);
        if (ball.bond_count() == 0) {
            if (std::isfinite(until)) t = std::max(t, until);
            return;
        }
        const double inv_out = 1.0 / rate_out;
        const double inv_in = 1.0 / rate_in;
        const std::uint64_t slots = 2 * static_cast<std::uint64_t>(ball.size());
        const std::uint64_t inner_slots = 2 * static_cast<std::uint64_t>(inner_sites.size());
        const double accept_out = 1.0 / m_out, accept_in = 1.0 / m_in;
        while (events < stop) {
            std::uint64_t s;
            if (next_out <= next_in) {
                if (next_out >= until) break;
                t = next_out;
                next_out += exponential(rng.engine()) * inv_out;
                s = ahead[head];
                const std::uint64_t fresh = rng.below(slots);
                ahead[head] = fresh;
                __builtin_prefetch(&links[fresh >> 1]);
                const std::uint64_t soon = ahead[(head + kAhead / 2) & (kAhead - 1)];
                __builtin_prefetch(&flags[static_cast<std::size_t>(links[soon >> 1].nbr[soon & 1])]);
                head = (head + 1) & (kAhead - 1);
            } else {
                if (next_in >= until) break;
                t = next_in;
                next_in += exponential(rng.engine()) * inv_in;
                const std::uint64_t r = rng.below(inner_slots);
                s = 2 * static_cast<std::uint64_t>(inner_sites[r >> 1]) + (r & 1);
            }
            ++attempts;
            const auto x = static_cast<std::uint32_t>(s >> 1);
            const std::int32_t y = links[x].nbr[s & 1];
            const std::uint8_t fx = flags[x], fy = flags[static_cast<std::size_t>(y)];
            if (!((fx ^ fy) & kOccupied) || y == dummy) continue;
            const bool forward = fx & kOccupied;
            const std::uint32_t from = forward ? x : static_cast<std::uint32_t>(y);
            const std::uint32_t to = forward ? static_cast<std::uint32_t>(y) : x;
            if constexpr (Tilted) {
                const double accept = (fx & kInner) ? accept_in : accept_out;
                if (fx & kLevel) {
                    if (accept < 1.0 && rng.uniform() >= accept) continue;
                } else if (rng.uniform() >= accept * boltz[to] * inv_boltz[from]) {
                    continue;
                }
            }
            if constexpr (Hooked) {
                snapshot_valid = false;
                hook(t);
            }
            // Bonds around two level sites all carry a zero dynamical term.
            if (track_dyn && !(fx & fy & kLevel))
                jump<true>(from, to, s);
            else
                jump<false>(from, to, s);
            ++events;
        }
        if (events < stop && std::isfinite(until)) t = until;
    }

    const Configuration& state() const {
        if (!snapshot_valid) {
            std::vector<std::uint8_t> bits(ball.size());
            for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = flags[i] & kOccupied;
            snapshot = Configuration::from_bits(std::move(bits));
            snapshot_valid = true;
        }
        return snapshot;
    }

    void advance(double until, std::uint64_t max_events, const std::function<void(double)>& hook) {
        snapshot_valid = false;
        if (finished) throw DomainError("engine already finished");
        if (hook) {
            if (tilted_drive)
                loop<true, true>(until, max_events, hook);
            else
                loop<false, true>(until, max_events, hook);
        } else {
            if (tilted_drive)
                loop<true, false>(until, max_events, hook);
            else
                loop<false, false>(until, max_events, hook);
        }
    }

    TrajectoryAccumulator finish() {
        if (finished) throw DomainError("engine already finished");
        finished = true;
        TrajectoryAccumulator acc;
        if (track_dyn) dyn += S * (t - t_dyn);
        for (std::size_t i = 0; i < occ.size(); ++i)
            if (occupied(i)) occ[i] += t;
        acc.bond_disagreement.resize(ball.bond_count());
        for (std::size_t b2 = 0; b2 < ball.bond_count(); ++b2) {
            const Bond& bond = ball.bonds()[b2];
            double v = dis[2 * bond.tail + bond.dir];
            if (occupied(bond.tail) != occupied(bond.head)) v += t;
            acc.bond_disagreement[b2] = v;
        }
        acc.occ_time = std::move(occ);
        acc.origin_occupation = ball.origin() ? acc.occ_time[*ball.origin()] : 0.0;
        acc.dyn_integral = static_cast<double>(dyn);
        acc.horizon = t;
        acc.event_count = events;
        acc.attempt_count = attempts;
        return acc;
    }
};

ExclusionEngine::ExclusionEngine(const LatticeBall& ball, const DynamicsSpec& spec,
                                 Configuration initial)
    : impl_(std::make_unique<Impl>(ball, spec, std::move(initial))) {}

ExclusionEngine::~ExclusionEngine() = default;

void ExclusionEngine::advance(double until, std::uint64_t max_events,
                              const std::function<void(double)>& on_jump) {
    impl_->advance(until, max_events, on_jump);
}

double ExclusionEngine::time() const { return impl_->t; }
std::uint64_t ExclusionEngine::events() const { return impl_->events; }
const Configuration& ExclusionEngine::state() const { return impl_->state(); }
double ExclusionEngine::current_dyn_integrand() const { return static_cast<double>(impl_->S); }
TrajectoryAccumulator ExclusionEngine::finish() { return impl_->finish(); }

Trajectory run_trajectory(const LatticeBall& ball, const DynamicsSpec& spec,
                          Configuration initial) {
    if (!(spec.time_horizon > 0.0) || !std::isfinite(spec.time_horizon))
        throw DomainError("time horizon must be positive and finite");
    ExclusionEngine engine(ball, spec, std::move(initial));
    engine.advance(spec.time_horizon);
    Trajectory out;
    out.accumulator = engine.finish();
    out.final_state = engine.state();
    return out;
}

double check_detailed_balance(const LatticeBall& ball, const TiltProfile& tilt,
                              double rate_fault) {
    const auto tables = tilt.tabulate(ball);
    const auto factors = jump_rate_factors(ball, tables.potential);
    double worst = 0.0;
    for (std::size_t b = 0; b < ball.bond_count(); ++b) {
        const Bond& bond = ball.bonds()[b];
        const double gx = tables.density[bond.tail], gy = tables.density[bond.head];
        // Product-measure ratio nu(eta') / nu(eta) when a particle moves tail -> head.
        const double ratio = (gy * (1.0 - gx)) / (gx * (1.0 - gy));
        const double forward = rate_fault * factors[2 * b];
        const double backward = factors[2 * b + 1];
        worst = std::max(worst, std::abs(forward / (ratio * backward) - 1.0));
        // Reverse orientation: particle moves head -> tail.
        worst = std::max(worst, std::abs(backward * ratio / forward - 1.0));
    }
    return worst;
}

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    long double r = 1.0L;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / i;
    return static_cast<std::size_t>(std::llround(r));
}

std::uint64_t pattern(const Configuration& eta) {
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < eta.size(); ++i)
        if (eta[i]) code |= std::uint64_t{1} << i;
    return code;
}

}  // namespace

StationarityReport stationary_check_small(const LatticeBall& ball, const DynamicsSpec& spec,
                                          std::size_t particles, std::uint64_t events) {
    const std::size_t n = ball.size();
    if (particles > n) throw DomainError("more particles than sites");
    const std::size_t states = binomial(n, particles);
    if (n > 62 || states > kMaxSmallStates)
        throw StateSpaceError("state space of " + std::to_string(states) + " configurations is too large",
                              states);

    // Enumerate k-particle patterns and their exact invariant weights.
    std::vector<std::uint64_t> codes;
    std::unordered_map<std::uint64_t, std::size_t> slot;
    std::vector<double> logit_density(n, 0.0);
    const bool tilted = spec.tilt && !spec.tilt->is_flat() && spec.drive == Drive::tilted;
    if (tilted) {
        const auto tables = spec.tilt->tabulate(ball);
        for (std::size_t i = 0; i < n; ++i) logit_density[i] = logit(tables.density[i]);
    }
    std::vector<double> weights;
    std::vector<int> pick(n, 0);
    std::fill(pick.end() - static_cast<std::ptrdiff_t>(particles), pick.end(), 1);
    do {
        std::uint64_t code = 0;
        double lw = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (pick[i]) {
                code |= std::uint64_t{1} << i;
                lw += logit_density[i];
            }
        slot[code] = codes.size();
        codes.push_back(code);
        weights.push_back(lw);
    } while (std::next_permutation(pick.begin(), pick.end()));
    const double top = *std::max_element(weights.begin(), weights.end());
    for (double& w : weights) w = std::exp(w - top);
    const double z = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= z;

    StationarityReport report;
    report.states = states;
    report.exact = weights;
    report.empirical.assign(states, 0.0);
    if (states == 1 || events == 0) {
        report.empirical[0] = 1.0;
        report.tv_distance = states == 1 ? 0.0 : 1.0;
        return report;
    }

    Configuration initial(n);
    for (std::size_t i = 0; i < particles; ++i) initial.set(i, true);
    ExclusionEngine engine(ball, spec, initial);
    double last = 0.0;
    // The hook sees the state that is about to be left, so each call closes
    // one holding interval.
    engine.advance(std::numeric_limits<double>::infinity(), events, [&](double t) {
        report.empirical[slot.at(pattern(engine.state()))] += t - last;
        last = t;
    });
    const double total = std::accumulate(report.empirical.begin(), report.empirical.end(), 0.0);
    if (!(total > 0.0)) throw DomainError("no jump occurred; the ball may be disconnected");
    double tv = 0.0;
    for (std::size_t s = 0; s < states; ++s) {
        report.empirical[s] /= total;
        tv += std::abs(report.empirical[s] - report.exact[s]);
    }
    report.tv_distance = 0.5 * tv;
    report.events = engine.events();
    return report;
}

double dirichlet_form_exact(const LatticeBall& ball, double alpha, std::span<const double> f) {
    const std::size_t n = ball.size();
    if (n > 20) throw StateSpaceError("state space of 2^" + std::to_string(n) + " is too large", n);
    const std::size_t states = std::size_t{1} << n;
    if (f.size() != states)
        throw DomainError("function table must have 2^sites = " + std::to_string(states) + " entries");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
    long double total = 0.0L;
    for (std::size_t code = 0; code < states; ++code) {
        const int ones = std::popcount(code);
        const double weight =
            std::pow(alpha, ones) * std::pow(1.0 - alpha, static_cast<int>(n) - ones);
        if (weight == 0.0) continue;
        for (const Bond& bond : ball.bonds()) {
            const bool a = (code >> bond.tail) & 1u, c = (code >> bond.head) & 1u;
            if (a == c) continue;
            const std::size_t swapped = code ^ (std::size_t{1} << bond.tail) ^ (std::size_t{1} << bond.head);
            const double d = f[swapped] - f[code];
            total += weight * d * d;
        }
    }
    return 0.25 * ball.scale() * static_cast<double>(total);
}

}  // namespace ssep2d
