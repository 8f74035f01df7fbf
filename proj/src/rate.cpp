#include "ssep2d/rate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <math.h>  // the pchip header calls unqualified isnan
#include <boost/math/interpolators/pchip.hpp>

#include "ssep2d/errors.hpp"

namespace ssep2d {

namespace {

constexpr double kPi = std::numbers::pi;

// Five point Gauss-Legendre rule on [-1, 1], exact to degree 9.
constexpr std::array<double, 5> kNodes{0.0, -0.5384693101056831, 0.5384693101056831,
                                       -0.9061798459386640, 0.9061798459386640};
constexpr std::array<double, 5> kWeights{0.5688888888888889, 0.4786286704993665,
                                         0.4786286704993665, 0.2369268850561891,
                                         0.2369268850561891};

template <class F>
void gauss_nodes(double a, double b, F&& f) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t q = 0; q < kNodes.size(); ++q) f(c + h * kNodes[q], h * kWeights[q]);
}

}  // namespace

double mobility(double a) { return a * (1.0 - a); }

namespace {

// Node `at` has zero mobility and the cell towards `to` leaves it. A quadratic
// touch (increments growing like 1, 3, 5, ...) keeps m'^2 / sigma(m) bounded; a
// linear or jump contact makes it non-integrable.
bool singular_contact(const RadialDensity& m, std::size_t at, std::size_t to) {
    if (mobility(m.m[at]) >= kDegenerateMobility) return false;
    const double first = m.m[to] - m.m[at];
    const bool forward = to > at;
    if (forward ? to + 1 >= m.size() : to == 0) return true;
    const double second = m.m[forward ? to + 1 : to - 1] - m.m[to];
    return std::abs(first) >= 0.5 * std::abs(second);
}

}  // namespace

EnergyValue energy_closed(const RadialDensity& input, EnergyVariant variant) {
    input.validate();
    const RadialDensity m = variant == EnergyVariant::alpha ? input.alpha_extension() : input;
    const double cut = variant == EnergyVariant::half_interval ? 0.5 : kInfinity;
    long double total = 0.0L;
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        const double a = m.r[i], b = std::min(m.r[i + 1], cut);
        if (!(b > a)) break;
        const double slope = (m.m[i + 1] - m.m[i]) / (m.r[i + 1] - m.r[i]);
        if (std::abs(slope) > kDegenerateSlope) {
            if (singular_contact(m, i, i + 1)) return EnergyValue::infinity(m.r[i]);
            if (singular_contact(m, i + 1, i)) return EnergyValue::infinity(m.r[i + 1]);
        }
        const double s = mobility(0.5 * (m.m[i] + m.m[i + 1]));
        if (s < kDegenerateMobility) {
            if (std::abs(slope) > kDegenerateSlope) return EnergyValue::infinity(0.5 * (a + b));
            continue;
        }
        total += slope * slope / s * (b - a);
    }
    const double constant = variant == EnergyVariant::plain   ? 0.25
                            : variant == EnergyVariant::alpha ? 0.125
                                                              : 0.25 * kPi;
    return {constant * static_cast<double>(total), false, 0.0};
}

BasisValue energy_basis(const RadialDensity& input, const TestBasis& basis, BasisVariant variant) {
    input.validate();
    const RadialDensity m = variant == BasisVariant::Q ? input : input.alpha_extension();
    constexpr double slack = 1e-12;
    if (basis.lower() < m.r.front() - slack || basis.upper() > m.r.back() + slack)
        throw SupportError("basis support leaves the density grid");
    if (variant == BasisVariant::hatI &&
        (basis.lower() < -slack || basis.upper() > 0.5 - kHalfIntervalMargin + slack))
        throw SupportError("hatI basis must lie inside (0, 1/2 - margin)");
    const double coef = variant == BasisVariant::Q_alpha ? 2.0 : 1.0;
    const double outer = variant == BasisVariant::hatI || variant == BasisVariant::J_Q ? kPi : 1.0;

    // Monotone cubic interpolation: flat stretches stay flat and extrema keep a
    // quadratic contact, so sigma(m) does not acquire spurious linear zeros.
    std::function<double(double)> shape = m.exact;
    if (!shape) {
        if (m.size() < 4) throw DomainError("density grid needs at least four points");
        shape = boost::math::interpolators::pchip<std::vector<double>>(std::vector<double>(m.r),
                                                                       std::vector<double>(m.m));
    }
    std::vector<double> cuts = basis.knots();
    for (double r : m.r)
        if (r > basis.lower() && r < basis.upper()) cuts.push_back(r);
    if (0.5 > basis.lower() && 0.5 < basis.upper()) cuts.push_back(0.5);
    std::sort(cuts.begin(), cuts.end());

    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    // int G' = 0, so b_k = -int G_k' (m - c_k) for any c_k; centring removes the
    // cancellation that would otherwise dominate where sigma(m) is tiny.
    std::vector<double> centre(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < centre.size(); ++k) {
        const auto [a0, a1] = basis.support(k);
        centre[k] = std::clamp(shape(0.5 * (a0 + a1)), 0.0, 1.0);
    }
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double lo = cuts[c], hi = cuts[c + 1];
        if (!(hi > lo)) continue;
        const auto cell = static_cast<std::ptrdiff_t>(basis.cell(0.5 * (lo + hi)));
        const std::ptrdiff_t first = std::max<std::ptrdiff_t>(0, cell - 3);
        const std::ptrdiff_t last = std::min<std::ptrdiff_t>(n - 1, cell);
        gauss_nodes(lo, hi, [&](double x, double w) {
            const double mx = std::clamp(shape(x), 0.0, 1.0);
            const double s = mobility(mx);
            for (std::ptrdiff_t k = first; k <= last; ++k) {
                const auto ku = static_cast<std::size_t>(k);
                b[k] -= w * basis.derivative(ku, x) * (mx - centre[ku]);
                const double gk = basis.value(ku, x);
                for (std::ptrdiff_t l = first; l <= last; ++l)
                    A(k, l) += w * coef * s * gk * basis.value(static_cast<std::size_t>(l), x);
            }
        });
    }

    BasisValue out;
    out.size = basis.size();
    // Functions living where sigma(m) vanishes identically: any load on them is unbounded.
    const double bscale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (A(k, k) > 0.0) {
            keep.push_back(k);
        } else if (std::abs(b[k]) > 1e-12 * bscale) {
            out.value = kInfinity;
            out.infinite = true;
            return out;
        } else {
            out.regularized = true;
        }
    }
    const auto r = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd S(r, r);
    Eigen::VectorXd v(r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const double di = 1.0 / std::sqrt(A(keep[i], keep[i]));
        v[i] = b[keep[i]] * di;
        for (Eigen::Index j = 0; j < r; ++j)
            S(i, j) = A(keep[i], keep[j]) * di / std::sqrt(A(keep[j], keep[j]));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
    const Eigen::VectorXd proj = eig.eigenvectors().transpose() * v;
    const double vnorm = v.norm();
    long double total = 0.0L;
    for (Eigen::Index i = 0; i < r; ++i) {
        const double lam = eig.eigenvalues()[i];
        if (lam <= 1e-14) {
            if (std::abs(proj[i]) > 1e-9 * vnorm) {
                out.value = kInfinity;
                out.infinite = true;
                return out;
            }
            out.regularized = true;
            continue;
        }
        total += proj[i] * proj[i] / lam;
    }
    out.value = outer * static_cast<double>(total) / 4.0;
    return out;
}

EnergyValue rate_I_Q_alpha(const RadialDensity& m) {
    if (m.r.size() != m.m.size() || m.r.size() < 2) throw DomainError("malformed density");
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!(m.m[i] >= 0.0 && m.m[i] <= 1.0)) return EnergyValue::infinity(m.r[i]);
        if (m.r[i] >= 0.5 && std::abs(m.m[i] - m.alpha) > 1e-12) return EnergyValue::infinity(m.r[i]);
    }
    EnergyValue q = energy_closed(m, EnergyVariant::plain);
    if (!q.infinite) q.value *= kPi;
    return q;
}

double J_gamma_linearized(const RadialDensity& m, const TiltProfile& tilt) {
    m.validate();
    if (tilt.is_flat()) return 0.0;
    long double total = 0.0L;
    for (std::size_t i = 0; i + 1 < m.size(); ++i)
        gauss_nodes(m.r[i], m.r[i + 1], [&](double x, double w) {
            const Jet g = tilt.potential(x);
            const double mx = m.at(x);
            total += w * (g.d2 * mx + mobility(mx) * g.d1 * g.d1);
        });
    return -kPi * static_cast<double>(total);
}

double upsilon_closed(double alpha, double beta) {
    if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0))
        throw DomainError("densities must lie in [0, 1]");
    const double d = std::asin(2.0 * beta - 1.0) - std::asin(2.0 * alpha - 1.0);
    return 0.5 * kPi * d * d;
}

double instanton_profile(double alpha, double beta, double r) {
    const double u0 = std::asin(2.0 * beta - 1.0), u1 = std::asin(2.0 * alpha - 1.0);
    return 0.5 * (1.0 + std::sin(u0 + 2.0 * (u1 - u0) * r));
}

namespace {

// Solves the tridiagonal system (sub, diag, super) x = rhs in place; returns false on a
// nonpositive pivot.
bool thomas(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
            std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        if (!(diag[i - 1] > 0.0)) return false;
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if (n == 0) return true;
    if (!(diag[n - 1] > 0.0)) return false;
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
    return true;
}

RadialDensity half_grid(std::size_t N, double alpha) {
    RadialDensity d;
    d.alpha = alpha;
    d.r.resize(N + 1);
    d.m.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i)
        d.r[i] = 0.5 * static_cast<double>(i) / static_cast<double>(N);
    return d;
}

double cell_energy(double a, double b, double h) {
    const double d = b - a;
    return d * d / (h * mobility(0.5 * (a + b)));
}

InstantonResult solve_arcsin(double alpha, double beta, std::size_t N) {
    const double h = 0.5 / static_cast<double>(N);
    const double u0 = std::asin(2.0 * beta - 1.0), u1 = std::asin(2.0 * alpha - 1.0);
    // Interior equations -u_{i-1} + 2 u_i - u_{i+1} = 0.
    const std::size_t k = N - 1;
    std::vector<double> sub(k, -1.0), diag(k, 2.0), sup(k, -1.0), rhs(k, 0.0);
    if (k > 0) {
        rhs.front() += u0;
        rhs.back() += u1;
    }
    thomas(sub, diag, sup, rhs);
    std::vector<double> u(N + 1);
    u.front() = u0;
    u.back() = u1;
    for (std::size_t i = 0; i < k; ++i) u[i + 1] = rhs[i];

    InstantonResult out;
    out.mode = InstantonMode::arcsin;
    out.profile = half_grid(N, alpha);
    long double value = 0.0L, grad = 0.0L;
    for (std::size_t i = 0; i <= N; ++i) out.profile.m[i] = 0.5 * (1.0 + std::sin(u[i]));
    for (std::size_t i = 0; i < N; ++i) value += (u[i + 1] - u[i]) * (u[i + 1] - u[i]) / h;
    for (std::size_t i = 1; i < N; ++i) {
        const double g = (2.0 * u[i] - u[i - 1] - u[i + 1]) / h;
        grad = std::max<long double>(grad, std::abs(g));
    }
    out.profile.m.front() = beta;
    out.profile.m.back() = alpha;
    out.value = 0.25 * kPi * static_cast<double>(value);
    out.gradient_norm = static_cast<double>(grad);
    out.iterations = 1;
    return out;
}

InstantonResult solve_direct(double alpha, double beta, std::size_t N, int max_iterations,
                             double tolerance) {
    const double lo = kInstantonClamp, hi = 1.0 - kInstantonClamp;
    const double a = std::clamp(alpha, lo, hi), b = std::clamp(beta, lo, hi);
    const double h = 0.5 / static_cast<double>(N);
    InstantonResult out;
    out.mode = InstantonMode::direct;
    out.profile = half_grid(N, alpha);
    std::vector<double>& m = out.profile.m;
    for (std::size_t i = 0; i <= N; ++i)
        m[i] = b + (a - b) * static_cast<double>(i) / static_cast<double>(N);

    auto objective = [&](const std::vector<double>& v) {
        long double e = 0.0L;
        for (std::size_t i = 0; i < N; ++i) e += cell_energy(v[i], v[i + 1], h);
        return static_cast<double>(e);
    };

    const std::size_t k = N - 1;
    std::vector<double> grad(N + 1), hdiag(N + 1), hoff(N + 1);
    double energy = objective(m);
    for (int it = 0; it <= max_iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        std::fill(hdiag.begin(), hdiag.end(), 0.0);
        std::fill(hoff.begin(), hoff.end(), 0.0);
        for (std::size_t i = 0; i < N; ++i) {
            const double d = m[i + 1] - m[i], c = 0.5 * (m[i] + m[i + 1]);
            const double s = mobility(c), s1 = 1.0 - 2.0 * c;
            const double g_d = 2.0 * d / s, g_c = -d * d * s1 / (s * s);
            const double g_dd = 2.0 / s, g_dc = -2.0 * d * s1 / (s * s);
            const double g_cc = d * d * (2.0 * s + 2.0 * s1 * s1) / (s * s * s);
            grad[i] += (-g_d + 0.5 * g_c) / h;
            grad[i + 1] += (g_d + 0.5 * g_c) / h;
            hdiag[i] += (g_dd - g_dc + 0.25 * g_cc) / h;
            hdiag[i + 1] += (g_dd + g_dc + 0.25 * g_cc) / h;
            hoff[i] += (-g_dd + 0.25 * g_cc) / h;
        }
        double gnorm = 0.0;
        for (std::size_t i = 1; i < N; ++i) gnorm = std::max(gnorm, std::abs(grad[i]) * h);
        out.gradient_norm = gnorm;
        out.iterations = it;
        if (gnorm < tolerance || k == 0) break;
        if (it == max_iterations) {
            std::ostringstream os;
            os << "instanton solver stalled after " << max_iterations << " iterations";
            throw ConvergenceError(os.str(), gnorm);
        }
        std::vector<double> sub(k), diag(k), sup(k), step(k);
        for (std::size_t i = 0; i < k; ++i) {
            diag[i] = hdiag[i + 1];
            sub[i] = hoff[i];
            sup[i] = hoff[i + 1];
            step[i] = -grad[i + 1];
        }
        if (!thomas(sub, diag, sup, step))
            for (std::size_t i = 0; i < k; ++i) step[i] = -grad[i + 1] / std::max(hdiag[i + 1], 1e-300);
        double t = 1.0;
        std::vector<double> trial(m);
        bool improved = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < k; ++i) trial[i + 1] = std::clamp(m[i + 1] + t * step[i], lo, hi);
            const double e = objective(trial);
            if (e <= energy) {
                improved = true;
                energy = e;
                m.swap(trial);
                break;
            }
            t *= 0.5;
        }
        if (!improved) break;  // no descent left at machine precision
    }
    out.value = 0.25 * kPi * energy;
    m.front() = beta;
    m.back() = alpha;
    return out;
}

}  // namespace

InstantonResult solve_instanton(double alpha, double beta, std::size_t N, InstantonMode mode,
                                int max_iterations, double tolerance) {
    if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0))
        throw DomainError("instanton endpoints must lie in [0, 1]");
    if (N < 2) throw DomainError("instanton grid needs N >= 2");
    if (mode == InstantonMode::arcsin) return solve_arcsin(alpha, beta, N);
    return solve_direct(alpha, beta, N, max_iterations, tolerance);
}

double instanton_objective(const RadialDensity& m) {
    long double e = 0.0L;
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        const double h = m.r[i + 1] - m.r[i];
        e += cell_energy(m.m[i], m.m[i + 1], h);
    }
    return 0.25 * kPi * static_cast<double>(e);
}

std::string to_string(EnergyVariant v) {
    switch (v) {
        case EnergyVariant::plain: return "plain";
        case EnergyVariant::alpha: return "alpha";
        case EnergyVariant::half_interval: return "half_interval";
    }
    return "?";
}

std::string to_string(BasisVariant v) {
    switch (v) {
        case BasisVariant::Q: return "Q";
        case BasisVariant::Q_alpha: return "Q_alpha";
        case BasisVariant::hatI: return "hatI";
        case BasisVariant::J_Q: return "J_Q";
    }
    return "?";
}

std::string to_string(InstantonMode v) { return v == InstantonMode::arcsin ? "arcsin" : "direct"; }

}  // namespace ssep2d
