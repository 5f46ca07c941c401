#include "gridres/oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gridres {

namespace {

constexpr int kDenseNodeLimit = 3000;

// Reduced system with one node grounded (row/column removed). Indices above
// the grounded node shift down by one.
Eigen::SparseMatrix<double> grounded(const Eigen::SparseMatrix<double>& full, int ground) {
    const int n = static_cast<int>(full.rows());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(full.nonZeros()));
    for (int col = 0; col < n; ++col) {
        if (col == ground) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(full, col); it; ++it) {
            const int row = static_cast<int>(it.row());
            if (row == ground) continue;
            trips.emplace_back(row < ground ? row : row - 1, col < ground ? col : col - 1,
                               it.value());
        }
    }
    Eigen::SparseMatrix<double> reduced(n - 1, n - 1);
    reduced.setFromTriplets(trips.begin(), trips.end());
    return reduced;
}

// b - A*v accumulated in extended precision: the plain-double evaluation noise
// eps*|A|*|v| already exceeds the residual contract on large-resistance grids.
Eigen::VectorXd residual_extended(const Eigen::SparseMatrix<double>& a,
                                  const Eigen::VectorXd& v, const Eigen::VectorXd& b) {
    std::vector<long double> acc(static_cast<std::size_t>(b.size()));
    for (Eigen::Index i = 0; i < b.size(); ++i) acc[static_cast<std::size_t>(i)] = b[i];
    for (int col = 0; col < a.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, col); it; ++it)
            acc[static_cast<std::size_t>(it.row())] -=
                static_cast<long double>(it.value()) * static_cast<long double>(v[col]);
    Eigen::VectorXd r(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i)
        r[i] = static_cast<double>(acc[static_cast<std::size_t>(i)]);
    return r;
}

std::string format_netlist_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    std::string s(buf);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
        s += ".0";
    return s;
}

std::string node_name(int x, int y) {
    return "n_" + std::to_string(x) + "_" + std::to_string(y);
}

}  // namespace

GridLaplacian build_laplacian(const GridSpec& grid) {
    const int n = grid.node_count();
    const double gh = 1.0 / grid.r_h;
    const double gv = 1.0 / grid.r_v;

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n) * 5);
    auto add_edge = [&](int i, int j, double g) {
        trips.emplace_back(i, i, g);
        trips.emplace_back(j, j, g);
        trips.emplace_back(i, j, -g);
        trips.emplace_back(j, i, -g);
    };
    for (int y = 0; y < grid.ly; ++y) {
        for (int x = 0; x < grid.lx; ++x) {
            const int i = node_index({x, y}, grid);
            if (x + 1 < grid.lx) add_edge(i, node_index({x + 1, y}, grid), gh);
            if (y + 1 < grid.ly) add_edge(i, node_index({x, y + 1}, grid), gv);
        }
    }

    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    return {grid, std::move(m)};
}

double r_oracle(NodeCoord s, NodeCoord d, const GridSpec& grid, double tol,
                OracleSolution* info) {
    require_in_bounds(s, grid);
    require_in_bounds(d, grid);
    if (s == d) {
        if (info) *info = {SolveMethod::GroundedDirect, 0.0};
        return 0.0;
    }

    const GridLaplacian lap = build_laplacian(grid);
    const int n = grid.node_count();
    const int ground = node_index(d, grid);
    int source = node_index(s, grid);
    if (source > ground) --source;

    const Eigen::SparseMatrix<double> reduced = grounded(lap.matrix, ground);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n - 1);
    rhs[source] = 1.0;

    Eigen::VectorXd v;
    SolveMethod method;
    if (n <= kDenseNodeLimit) {
        method = SolveMethod::GroundedDirect;
        const Eigen::MatrixXd dense(reduced);
        const auto ldlt = dense.ldlt();
        v = ldlt.solve(rhs);
        // Iterative refinement: the raw backward error scales with |A||v|,
        // which on long-chain grids overshoots the tol*|b| contract.
        for (int pass = 0; pass < 3; ++pass) {
            const Eigen::VectorXd r = residual_extended(reduced, v, rhs);
            if (r.norm() <= tol * rhs.norm()) break;
            v += ldlt.solve(r);
        }
    } else {
        method = SolveMethod::Iterative;
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>
            cg;
        // CG's recursive residual drifts from the true one near machine
        // precision, so run to a modest target and let refinement passes on
        // the true residual close the gap to the contract.
        cg.setTolerance(std::max(tol, 1e-11));
        cg.setMaxIterations(20000);
        cg.compute(reduced);
        v = cg.solve(rhs);
        if (cg.info() != Eigen::Success)
            throw SolverError("conjugate gradient did not converge");
        for (int pass = 0; pass < 3; ++pass) {
            const Eigen::VectorXd r = residual_extended(reduced, v, rhs);
            if (r.norm() <= tol * rhs.norm()) break;
            v += cg.solve(r);
        }
    }

    const double residual = residual_extended(reduced, v, rhs).norm();
    if (!(residual <= tol * rhs.norm())) {
        char msg[96];
        std::snprintf(msg, sizeof(msg), "oracle solve residual %.3e exceeds tolerance %.3e",
                      residual, tol * rhs.norm());
        throw SolverError(msg);
    }
    if (info) *info = {method, residual};
    return v[source];
}

std::vector<double> all_resistances_from(NodeCoord s, const GridSpec& grid, double tol) {
    require_in_bounds(s, grid);
    const int n = grid.node_count();
    const int si = node_index(s, grid);

    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    if (n <= kDenseNodeLimit) {
        // Pseudo-inverse via the rank-completing shift: (L + J/n)^{-1} = L^+ + J/n;
        // the J/n parts cancel in the resistance combination.
        const GridLaplacian lap = build_laplacian(grid);
        Eigen::MatrixXd shifted(lap.matrix);
        shifted.array() += 1.0 / n;
        const Eigen::MatrixXd inv =
            shifted.ldlt().solve(Eigen::MatrixXd::Identity(n, n));

        // Spot-check one column of the factorization instead of the O(n^3)
        // full residual.
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[si] = 1.0;
        const double residual = (shifted * inv.col(si) - e).norm();
        if (!(residual <= 1e-8))
            throw SolverError("pseudo-inverse residual " + std::to_string(residual) +
                              " too large");

        for (int t = 0; t < n; ++t)
            out[t] = t == si ? 0.0 : inv(si, si) + inv(t, t) - 2.0 * inv(si, t);
        return out;
    }

    for (int y = 0; y < grid.ly; ++y)
        for (int x = 0; x < grid.lx; ++x) {
            const NodeCoord t{x, y};
            if (t == s) continue;
            out[node_index(t, grid)] = r_oracle(s, t, grid, tol);
        }
    return out;
}

std::string emit_netlist(const GridSpec& grid, NodeCoord s, NodeCoord d) {
    require_in_bounds(s, grid);
    require_in_bounds(d, grid);
    if (s == d) throw std::invalid_argument("netlist source and drain must be distinct");

    std::ostringstream os;
    os << "* resistor grid " << grid.lx << "x" << grid.ly << " rh=" << format_netlist_value(grid.r_h)
       << " rv=" << format_netlist_value(grid.r_v) << " src=(" << s.x << "," << s.y
       << ") dst=(" << d.x << "," << d.y << ")\n";

    const std::string rh = format_netlist_value(grid.r_h);
    const std::string rv = format_netlist_value(grid.r_v);
    for (int y = 0; y < grid.ly; ++y)
        for (int x = 0; x + 1 < grid.lx; ++x)
            os << "RH_" << x << "_" << y << " " << node_name(x, y) << " " << node_name(x + 1, y)
               << " " << rh << "\n";
    for (int y = 0; y + 1 < grid.ly; ++y)
        for (int x = 0; x < grid.lx; ++x)
            os << "RV_" << x << "_" << y << " " << node_name(x, y) << " " << node_name(x, y + 1)
               << " " << rv << "\n";

    os << "I1 " << node_name(d.x, d.y) << " " << node_name(s.x, s.y) << " 1.0\n";
    os << "VGND " << node_name(d.x, d.y) << " 0 0.0\n";
    os << ".op\n";
    os << ".print op v(" << node_name(s.x, s.y) << ")\n";
    os << ".end\n";
    return os.str();
}

}  // namespace gridres
