#pragma once

#include "gridres/grid.hpp"
#include "gridres/theta.hpp"

#include <array>
#include <vector>

namespace gridres {

/// Lattice point that may lie outside the physical grid (mirror images do).
struct ImagePoint {
    int x = 0;
    int y = 0;

    friend bool operator==(const ImagePoint&, const ImagePoint&) = default;
};

/// The four base reflections of a node across the insulating walls at
/// x = -1/2 and y = -1/2; the first entry is the node itself.
struct MirrorFamily {
    std::array<ImagePoint, 4> images;
};

[[nodiscard]] MirrorFamily mirror_images(NodeCoord n);

/// Complex coordinate z = x + i*y/sqrt(alpha) in which the anisotropic lattice
/// metric alpha*dx^2 + dy^2 becomes alpha*|z|^2.
[[nodiscard]] Complex isotropic_point(double x, double y, const Anisotropy& alpha);

/// Lattice modulus tau = i*L_y/(sqrt(alpha)*L_x) and nome for the grid. If the
/// raw nome exceeds 0.9 in magnitude the context is built for the transposed
/// problem instead (tau -> -1/tau) and `swapped` is set; the returned nome then
/// always satisfies |q| <= 0.9.
[[nodiscard]] ThetaContext theta_context(const GridSpec& grid);

/// Closed-form finite-grid effective resistance (ohms) via the theta-function
/// representation of the doubly infinite mirror-image sum. Exact reciprocity
/// and positivity; returns 0 for s == d.
[[nodiscard]] double r_theta_closed(NodeCoord s, NodeCoord d, const GridSpec& grid);

struct SignedDisplacement {
    Displacement d;
    int sign = 1;
};

/// All displacements a - b' where b' runs over the four reflections of b
/// translated by (2m*L_x, 2n*L_y), restricted to the ellipse
/// alpha*dx^2 + dy^2 <= limit. Ordering is lexicographic in (m, n, reflection);
/// the caller assigns `sign` (+1 cross pairs, -1 self pairs).
[[nodiscard]] std::vector<SignedDisplacement> image_displacements_in_ellipse(
    NodeCoord a, NodeCoord b, const GridSpec& grid, double limit, int sign);

}  // namespace gridres
