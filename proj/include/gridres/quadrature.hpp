#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace gridres {

/// Tolerances and subdivision budget for adaptive quadrature.
struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 200;
};

class QuadratureError : public std::runtime_error {
public:
    explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive Gauss-Kronrod integration of f over [a, b].
/// Throws QuadratureError if the error estimate cannot be brought under
/// max(abs_tol, rel_tol * |I|) within the subdivision budget.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg = {});

/// Same, but [a, b] is pre-split into `panels` equal panels before adaptation.
/// Used for oscillatory integrands whose period is known up front.
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, const QuadratureConfig& cfg = {});

}  // namespace gridres
