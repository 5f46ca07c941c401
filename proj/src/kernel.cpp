#include "gridres/kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gridres {

namespace {

constexpr double kPi = std::numbers::pi;

void check_theta_domain(double theta, const char* fn) {
    if (!(theta >= 0.0 && theta <= kPi))
        throw std::domain_error(std::string(fn) + ": theta must lie in [0, pi], got " +
                                std::to_string(theta));
}

// x - sin(x), cancellation-free for small x.
double x_minus_sin(double x) {
    if (std::abs(x) < 0.1) {
        const double x2 = x * x;
        return x * x2 * (1.0 / 6.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 5040.0 - x2 / 362880.0)));
    }
    return x - std::sin(x);
}

}  // namespace

Anisotropy::Anisotropy(double a) : alpha(a) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::domain_error("anisotropy must be positive and finite, got " +
                                std::to_string(a));
}

double dispersion_lambda(double theta, const Anisotropy& alpha) {
    check_theta_domain(theta, "dispersion_lambda");
    const double s = std::sin(0.5 * theta);
    const double y = 2.0 * alpha.alpha * s * s;  // cosh(lambda) - 1
    return std::log1p(y + std::sqrt(y * (y + 2.0)));
}

double sinh_lambda(double theta, const Anisotropy& alpha) {
    check_theta_domain(theta, "sinh_lambda");
    const double s = std::sin(0.5 * theta);
    return 2.0 * std::sqrt(alpha.alpha) * s * std::sqrt(1.0 + alpha.alpha * s * s);
}

double omega_exact(Displacement d, const Anisotropy& alpha, const QuadratureConfig& cfg) {
    const double p = std::abs(d.dx);
    const double q = std::abs(d.dy);
    if (p == 0.0 && q == 0.0) return 0.0;

    const double a = alpha.alpha;
    auto f = [p, q, a](double t) -> double {
        const double s = std::sin(0.5 * t);
        const double y = 2.0 * a * s * s;
        const double sh = std::sqrt(y * (y + 2.0));
        if (sh == 0.0) return p;  // removable singularity at t = 0
        const double lam = std::log1p(y + sh);
        const double sq = std::sin(0.5 * q * t);
        const double num = 2.0 * sq * sq - std::cos(q * t) * std::expm1(-p * lam);
        return num / sh;
    };
    const int panels = std::max(1, static_cast<int>(q));
    return a / kPi * integrate_panels(f, 0.0, kPi, panels, cfg);
}

double r2_closed(const Anisotropy& alpha) {
    const double a = alpha.alpha;
    return std::sqrt(a) / (4.0 * kPi) * std::log(16.0 / (kPi * kPi * (a + 1.0)));
}

double r2_quadrature(const Anisotropy& alpha, const QuadratureConfig& cfg) {
    const double a = alpha.alpha;
    auto g = [a](double u) -> double {
        const double su = std::sin(u);
        if (su == 0.0) return 0.0;  // u -> 0 limit
        const double w = 1.0 + a * su * su;
        const double rw = std::sqrt(w);
        // Split as (1/sin u - 1/u)/sqrt(w) + (1/sqrt(w) - 1)/u to avoid the
        // 1/sin(u) - 1/u cancellation near zero.
        const double t1 = x_minus_sin(u) / (u * su) / rw;
        const double t2 = -a * su * su / (u * rw * (1.0 + rw));
        return t1 + t2;
    };
    return std::sqrt(a) / (2.0 * kPi) * integrate(g, 0.0, 0.5 * kPi, cfg);
}

double r1_quadrature(Displacement d, const Anisotropy& alpha, const QuadratureConfig& cfg) {
    const double p = std::abs(d.dx);
    const double q = std::abs(d.dy);
    if (p == 0.0 && q == 0.0) return 0.0;

    const double ra = std::sqrt(alpha.alpha);
    auto f = [p, q, ra](double t) -> double {
        if (t == 0.0) return p * ra;
        const double sq = std::sin(0.5 * q * t);
        const double num = 2.0 * sq * sq - std::cos(q * t) * std::expm1(-p * ra * t);
        return num / t;
    };
    const int panels = std::max(1, static_cast<int>(q));
    return ra / (2.0 * kPi) * integrate_panels(f, 0.0, kPi, panels, cfg);
}

double omega_analytic_infinite(Displacement d, const Anisotropy& alpha) {
    if (d.dx == 0 && d.dy == 0) return 0.0;
    const double a = alpha.alpha;
    const double metric = a * double(d.dx) * d.dx + double(d.dy) * d.dy;
    return std::sqrt(a) / (2.0 * kPi) *
           (std::log(metric) + 2.0 * kEulerGamma + std::log(16.0) - std::log1p(a));
}

}  // namespace gridres
