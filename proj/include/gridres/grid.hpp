#pragma once

#include "gridres/kernel.hpp"

#include <stdexcept>

namespace gridres {

/// Finite rectangular grid: lx-by-ly nodes, horizontal resistors r_h and
/// vertical resistors r_v (ohms). Boundaries are insulating (absent edges).
struct GridSpec {
    int lx;
    int ly;
    double r_h;
    double r_v;

    GridSpec(int lx_, int ly_, double rh, double rv);

    [[nodiscard]] double alpha() const { return r_h / r_v; }
    [[nodiscard]] Anisotropy anisotropy() const { return Anisotropy(alpha()); }
    [[nodiscard]] double r0() const { return r_v; }
    [[nodiscard]] int node_count() const { return lx * ly; }
    [[nodiscard]] GridSpec transposed() const { return GridSpec(ly, lx, r_v, r_h); }
};

struct NodeCoord {
    int x = 0;
    int y = 0;

    friend bool operator==(const NodeCoord&, const NodeCoord&) = default;
};

[[nodiscard]] inline bool in_bounds(NodeCoord n, const GridSpec& g) {
    return n.x >= 0 && n.x < g.lx && n.y >= 0 && n.y < g.ly;
}

inline void require_in_bounds(NodeCoord n, const GridSpec& g) {
    if (!in_bounds(n, g))
        throw std::out_of_range("node (" + std::to_string(n.x) + "," + std::to_string(n.y) +
                                ") outside " + std::to_string(g.lx) + "x" +
                                std::to_string(g.ly) + " grid");
}

/// Row-major node index.
[[nodiscard]] inline int node_index(NodeCoord n, const GridSpec& g) { return n.y * g.lx + n.x; }

}  // namespace gridres
