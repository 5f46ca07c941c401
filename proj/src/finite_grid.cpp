#include "gridres/finite_grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gridres {

namespace {

constexpr double kPi = std::numbers::pi;

// A theta factor this far (in ln) below its natural 2*q^{1/4} scale has
// collapsed onto a lattice zero.
constexpr double kDegenerateLogGap = -690.0;  // ~ln(1e-300)

// Swap threshold |q| > 0.9 expressed on Im(tau): -ln(0.9)/pi.
constexpr double kMinImTau = 0.033510226925945901;

}  // namespace

GridSpec::GridSpec(int lx_, int ly_, double rh, double rv) : lx(lx_), ly(ly_), r_h(rh), r_v(rv) {
    if (lx < 1 || ly < 1 || lx * ly < 2)
        throw std::invalid_argument("grid must have at least two nodes");
    if (!(rh > 0.0) || !(rv > 0.0) || !std::isfinite(rh) || !std::isfinite(rv))
        throw std::invalid_argument("unit resistances must be positive and finite");
}

MirrorFamily mirror_images(NodeCoord n) {
    return {{{{n.x, n.y}, {-n.x - 1, n.y}, {n.x, -n.y - 1}, {-n.x - 1, -n.y - 1}}}};
}

Complex isotropic_point(double x, double y, const Anisotropy& alpha) {
    return {x, y / std::sqrt(alpha.alpha)};
}

ThetaContext theta_context(const GridSpec& grid) {
    const double ra = std::sqrt(grid.alpha());
    const Complex tau(0.0, grid.ly / (ra * grid.lx));
    if (tau.imag() >= kMinImTau) return {tau, nome_from_tau(tau), false};
    const Complex tau_swapped = -1.0 / tau;
    // For extreme aspect ratios the stored nome may underflow to 0; consumers
    // work from tau, the nome is informational.
    return {tau_swapped, nome_from_tau(tau_swapped), true};
}

double r_theta_closed(NodeCoord s, NodeCoord d, const GridSpec& grid) {
    require_in_bounds(s, grid);
    require_in_bounds(d, grid);
    if (s == d) return 0.0;

    const ThetaContext ctx = theta_context(grid);
    if (ctx.swapped) {
        // Transposed problem: dimensions, coordinates and resistor roles all
        // exchange; the physical resistance is invariant.
        return r_theta_closed({s.y, s.x}, {d.y, d.x}, grid.transposed());
    }

    const Anisotropy alpha = grid.anisotropy();
    const double a = alpha.alpha;
    const double scale = kPi / (2.0 * grid.lx);
    // Natural magnitude scale of a theta factor; factors far below it sit on a
    // lattice zero.
    const double factor_scale = std::log(2.0) - 0.25 * kPi * ctx.tau.imag();

    const MirrorFamily si = mirror_images(s);
    const MirrorFamily di = mirror_images(d);
    const Complex zs = isotropic_point(s.x, s.y, alpha);
    const Complex zd = isotropic_point(d.x, d.y, alpha);

    auto log_theta = [&](Complex from, ImagePoint to) {
        const Complex u = scale * (from - isotropic_point(to.x, to.y, alpha));
        return theta1_log_abs(u, ctx);
    };

    double cross = 0.0;
    for (int k = 0; k < 4; ++k)
        cross += log_theta(zd, si.images[k]) + log_theta(zs, di.images[k]);

    double self = 0.0;
    for (int k = 1; k < 4; ++k) {
        const double ls = log_theta(zs, si.images[k]);
        const double ld = log_theta(zd, di.images[k]);
        if (ls - factor_scale < kDegenerateLogGap || ld - factor_scale < kDegenerateLogGap)
            throw DegenerateThetaError("theta denominator factor collapsed to zero");
        self += ls + ld;
    }

    const double lp = theta1_prime_zero_log_abs(ctx);
    if (lp - factor_scale < kDegenerateLogGap)
        throw DegenerateThetaError("theta1'(0) collapsed to zero");
    if (!std::isfinite(cross))
        throw DegenerateThetaError("theta numerator factor collapsed to zero");

    const double log_c = std::log(a) + 2.0 * std::log(2.0 * grid.lx / kPi) +
                         2.0 * kEulerGamma + std::log(16.0 / (a + 1.0));
    return grid.r0() * std::sqrt(a) / (2.0 * kPi) * (log_c + cross - 2.0 * lp - self);
}

std::vector<SignedDisplacement> image_displacements_in_ellipse(NodeCoord a, NodeCoord b,
                                                               const GridSpec& grid,
                                                               double limit, int sign) {
    std::vector<SignedDisplacement> out;
    if (limit < 0.0) return out;

    const double alpha = grid.alpha();
    const MirrorFamily bi = mirror_images(b);

    const double base_x = std::max(std::abs(a.x - b.x), std::abs(a.x + b.x + 1));
    const double base_y = std::max(std::abs(a.y - b.y), std::abs(a.y + b.y + 1));
    const int m_max = static_cast<int>(std::ceil((std::sqrt(limit / alpha) + base_x) /
                                                 (2.0 * grid.lx)));
    const int n_max = static_cast<int>(std::ceil((std::sqrt(limit) + base_y) /
                                                 (2.0 * grid.ly)));

    for (int m = -m_max; m <= m_max; ++m) {
        for (int n = -n_max; n <= n_max; ++n) {
            for (int k = 0; k < 4; ++k) {
                const int dx = a.x - (bi.images[k].x + 2 * m * grid.lx);
                const int dy = a.y - (bi.images[k].y + 2 * n * grid.ly);
                if (alpha * double(dx) * dx + double(dy) * dy <= limit)
                    out.push_back({{dx, dy}, sign});
            }
        }
    }
    return out;
}

}  // namespace gridres
