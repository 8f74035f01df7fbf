#include "ssep2d/test_function.hpp"

#include <cmath>
#include <sstream>

#include "ssep2d/errors.hpp"
#include "ssep2d/quadrature.hpp"

namespace ssep2d {

namespace {

void require_interval(double lo, double hi) {
    if (!(lo > 0.0 && hi > lo)) throw DomainError("test function support must satisfy 0 < lo < hi");
}

std::string label(const char* kind, double lo, double hi, double amplitude) {
    std::ostringstream os;
    os.precision(17);
    os << kind << "(lo=" << lo << ", hi=" << hi << ", amplitude=" << amplitude << ")";
    return os.str();
}

}  // namespace

TestFunction TestFunction::zero() {
    TestFunction h;
    h.lo_ = 0.25;
    h.hi_ = 0.25;
    h.zero_ = true;
    h.value_ = [](double) { return 0.0; };
    h.derivative_ = [](double) { return 0.0; };
    h.name_ = "zero";
    return h;
}

TestFunction TestFunction::smooth_bump(double lo, double hi, double amplitude) {
    require_interval(lo, hi);
    const double c = 0.5 * (lo + hi), w = 0.5 * (hi - lo);
    TestFunction h;
    h.lo_ = lo;
    h.hi_ = hi;
    h.zero_ = amplitude == 0.0;
    h.value_ = [=](double r) {
        const double s = (r - c) / w;
        const double u = 1.0 - s * s;
        return amplitude * u * u * u * u;
    };
    h.derivative_ = [=](double r) {
        const double s = (r - c) / w;
        const double u = 1.0 - s * s;
        return amplitude * (-8.0 * s * u * u * u) / w;
    };
    h.name_ = label("smooth_bump", lo, hi, amplitude);
    return h;
}

TestFunction TestFunction::tent(double lo, double hi, double amplitude) {
    require_interval(lo, hi);
    const double c = 0.5 * (lo + hi), w = 0.5 * (hi - lo);
    TestFunction h;
    h.lo_ = lo;
    h.hi_ = hi;
    h.zero_ = amplitude == 0.0;
    h.value_ = [=](double r) { return amplitude * (1.0 - std::abs(r - c) / w); };
    h.derivative_ = [=](double r) { return r < c ? amplitude / w : -amplitude / w; };
    h.name_ = label("tent", lo, hi, amplitude);
    h.kinks_ = {c};
    return h;
}

TestFunction TestFunction::custom(double lo, double hi, Fn value, Fn derivative, std::string name,
                                  std::vector<double> kinks) {
    require_interval(lo, hi);
    TestFunction h;
    h.lo_ = lo;
    h.hi_ = hi;
    h.value_ = std::move(value);
    h.derivative_ = std::move(derivative);
    h.name_ = std::move(name);
    h.kinks_ = std::move(kinks);
    return h;
}

double TestFunction::operator()(double r) const {
    if (zero_ || r <= lo_ || r >= hi_) return 0.0;
    return value_(r);
}

double TestFunction::derivative(double r) const {
    if (zero_ || r <= lo_ || r >= hi_) return 0.0;
    return derivative_(r);
}

TestFunction TestFunction::scaled(double factor) const {
    TestFunction h = *this;
    auto v = value_;
    auto d = derivative_;
    h.value_ = [v, factor](double r) { return factor * v(r); };
    h.derivative_ = [d, factor](double r) { return factor * d(r); };
    h.zero_ = zero_ || factor == 0.0;
    std::ostringstream os;
    os.precision(17);
    os << factor << "*" << name_;
    h.name_ = os.str();
    return h;
}

double TestFunction::integral(const std::function<double(double, double)>& g) const {
    if (zero_) return 0.0;
    std::vector<double> cuts{lo_};
    for (double k : kinks_)
        if (k > lo_ && k < hi_) cuts.push_back(k);
    cuts.push_back(hi_);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += integrate([&](double r) { return g((*this)(r), r); }, cuts[i], cuts[i + 1]);
    return total;
}

double TestFunction::integral() const {
    return integral([](double h, double) { return h; });
}

void require_support(const TestFunction& h, double r_max, double margin) {
    if (h.is_zero()) return;
    if (h.lower() < margin || h.upper() > r_max - margin) {
        std::ostringstream os;
        os << "support [" << h.lower() << ", " << h.upper() << "] of " << h.name()
           << " escapes [" << margin << ", " << r_max - margin << "]";
        throw SupportError(os.str());
    }
}

}  // namespace ssep2d
