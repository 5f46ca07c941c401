#include "gridres/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <mutex>

namespace gridres {

namespace {

void validate(const QuadratureConfig& cfg) {
    if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0))
        throw std::invalid_argument("quadrature tolerances must be positive");
    if (cfg.max_subdivisions < 1)
        throw std::invalid_argument("max_subdivisions must be >= 1");
}

void disable_gsl_abort() {
    static std::once_flag flag;
    std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

double call_target(double x, void* params) {
    return (*static_cast<const std::function<double(double)>*>(params))(x);
}

struct WorkspaceDeleter {
    void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

}  // namespace

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        int panels, const QuadratureConfig& cfg) {
    validate(cfg);
    if (panels < 1) panels = 1;
    disable_gsl_abort();

    std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
        gsl_integration_workspace_alloc(static_cast<std::size_t>(cfg.max_subdivisions)));
    if (!ws) throw std::bad_alloc();

    gsl_function gf;
    gf.function = &call_target;
    gf.params = const_cast<std::function<double(double)>*>(&f);

    const double width = (b - a) / panels;
    double total = 0.0;
    double total_err = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double lo = a + k * width;
        const double hi = (k + 1 == panels) ? b : a + (k + 1) * width;
        double result = 0.0;
        double abserr = 0.0;
        // Status is advisory; acceptance is decided by the aggregate estimate below.
        gsl_integration_qag(&gf, lo, hi, cfg.abs_tol / panels, cfg.rel_tol,
                            static_cast<std::size_t>(cfg.max_subdivisions),
                            GSL_INTEG_GAUSS15, ws.get(), &result, &abserr);
        total += result;
        total_err += abserr;
    }

    if (!std::isfinite(total) ||
        total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
        throw QuadratureError("adaptive quadrature did not converge: estimated error " +
                              std::to_string(total_err) + " over " + std::to_string(panels) +
                              " panel(s)");
    }
    return total;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg) {
    return integrate_panels(f, a, b, 1, cfg);
}

}  // namespace gridres
