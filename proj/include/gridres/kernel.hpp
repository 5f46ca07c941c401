#pragma once

#include "gridres/quadrature.hpp"

namespace gridres {

/// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Anisotropy ratio alpha = r_h / r_v of the lattice.
struct Anisotropy {
    double alpha;

    explicit Anisotropy(double a);
    [[nodiscard]] double k() const { return 1.0 / alpha; }
};

/// Integer lattice displacement between two nodes.
struct Displacement {
    int dx = 0;
    int dy = 0;

    friend bool operator==(const Displacement&, const Displacement&) = default;
};

/// Decay exponent of the lattice kernel: cosh(lambda) = 1 + alpha*(1 - cos(theta)).
/// Domain: theta in [0, pi].
double dispersion_lambda(double theta, const Anisotropy& alpha);

/// sinh of the dispersion exponent in the cancellation-free radical form
/// 2*sqrt(alpha)*sin(theta/2)*sqrt(1 + alpha*sin^2(theta/2)).
double sinh_lambda(double theta, const Anisotropy& alpha);

/// Infinite-grid two-point resistance (units of r0) by adaptive quadrature:
///   (alpha/pi) * Int_0^pi [1 - exp(-|dx|*lambda) * cos(dy*t)] / sinh(lambda) dt.
/// Even in both displacement components; zero exactly at the origin.
double omega_exact(Displacement d, const Anisotropy& alpha, const QuadratureConfig& cfg = {});

/// Closed form of the singular part of the kernel decomposition:
///   (sqrt(alpha)/(4*pi)) * ln(16 / (pi^2 * (alpha + 1))).
double r2_closed(const Anisotropy& alpha);

/// Quadrature route to the same quantity, as an independent cross-check:
///   (sqrt(alpha)/(2*pi)) * Int_0^{pi/2} [1/(sin(u)*sqrt(1+alpha*sin^2(u))) - 1/u] du.
double r2_quadrature(const Anisotropy& alpha, const QuadratureConfig& cfg = {});

/// Logarithmic part of the kernel decomposition,
///   (sqrt(alpha)/(2*pi)) * Int_0^pi [1 - exp(-|dx|*sqrt(alpha)*t) * cos(dy*t)] / t dt.
/// Only used by the asymptotic decomposition property test.
double r1_quadrature(Displacement d, const Anisotropy& alpha, const QuadratureConfig& cfg = {});

/// Far-field logarithmic form of the infinite-grid resistance:
///   (sqrt(alpha)/(2*pi)) * [ln(alpha*dx^2 + dy^2) + 2*gamma + ln 16 - ln(alpha+1)],
/// defined as exactly 0 at the origin (the formula diverges there; the near-field
/// path always overrides it).
double omega_analytic_infinite(Displacement d, const Anisotropy& alpha);

}  // namespace gridres
