#pragma once

#include "gridres/grid.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace gridres {

class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Weighted graph Laplacian of the 4-neighbor lattice; edge conductances are
/// 1/r_h (horizontal) and 1/r_v (vertical), insulating boundary = absent edges.
struct GridLaplacian {
    GridSpec grid;
    Eigen::SparseMatrix<double> matrix;  // node_count x node_count, row-major node index
};

[[nodiscard]] GridLaplacian build_laplacian(const GridSpec& grid);

enum class SolveMethod { DensePseudoInverse, GroundedDirect, Iterative };

struct OracleSolution {
    SolveMethod method = SolveMethod::GroundedDirect;
    double residual_norm = 0.0;
};

/// Ground-truth two-point effective resistance (ohms): grounds d and solves the
/// reduced Laplacian system for a unit current at s. Dense factorization up to
/// 3000 nodes, diagonally preconditioned conjugate gradients beyond.
double r_oracle(NodeCoord s, NodeCoord d, const GridSpec& grid, double tol = 1e-12,
                OracleSolution* info = nullptr);

/// Resistances from s to every node (row-major indexing, 0 at s) via one
/// pseudo-inverse: R(s,t) = G_ss + G_tt - 2*G_st.
[[nodiscard]] std::vector<double> all_resistances_from(NodeCoord s, const GridSpec& grid,
                                                       double tol = 1e-12);

/// SPICE-dialect netlist for the grid with a 1 A source from d to s, ground
/// tied to d, operating-point analysis, and a print of the s-node voltage.
/// Ordering is deterministic: horizontal cards row-major, then vertical.
[[nodiscard]] std::string emit_netlist(const GridSpec& grid, NodeCoord s, NodeCoord d);

}  // namespace gridres
