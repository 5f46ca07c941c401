#include "gridres/selftest.hpp"

#include "gridres/correction.hpp"
#include "gridres/finite_grid.hpp"
#include "gridres/kernel.hpp"
#include "gridres/oracle.hpp"
#include "gridres/theta.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace gridres {

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
    std::string name;
    bool heavy = false;
    std::function<bool(std::ostringstream&)> run;
};

double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// ---- kernel ----

bool kernel_symmetry(std::ostringstream& os) {
    const Anisotropy a(3.0);
    for (const auto& [dx, dy] : {std::pair{2, 3}, {1, 0}, {0, 4}, {5, 2}}) {
        const double ref = omega_exact({dx, dy}, a);
        for (const auto& [sx, sy] : {std::pair{-1, 1}, {1, -1}, {-1, -1}}) {
            if (omega_exact({sx * dx, sy * dy}, a) != ref) {
                os << "sign flip changed omega at (" << dx << "," << dy << ")";
                return false;
            }
        }
    }
    return true;
}

bool kernel_isotropy(std::ostringstream& os) {
    const Anisotropy one(1.0);
    for (const auto& [dx, dy] : {std::pair{1, 2}, {3, 5}, {0, 7}, {4, 4}}) {
        const double r = rel_diff(omega_exact({dx, dy}, one), omega_exact({dy, dx}, one));
        if (r > 1e-9) {
            os << "omega(" << dx << "," << dy << ") vs transposed rel diff " << r;
            return false;
        }
    }
    return true;
}

bool kernel_r2_agreement(std::ostringstream& os) {
    for (double a : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0}) {
        const Anisotropy alpha(a);
        const double diff = std::abs(r2_closed(alpha) - r2_quadrature(alpha));
        if (diff >= 1e-8) {
            os << "alpha=" << a << " |closed - quadrature| = " << diff;
            return false;
        }
    }
    return true;
}

bool kernel_far_field(std::ostringstream& os) {
    const Anisotropy one(1.0);
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {1, 2, 4, 8, 16}) {
        const double ex = omega_exact({n, n}, one);
        const double dev = std::abs(omega_analytic_infinite({n, n}, one) - ex) / ex;
        if (dev >= prev) {
            os << "deviation not decreasing at n=" << n;
            return false;
        }
        if (n == 16 && dev >= 5e-4) {
            os << "deviation at n=16 is " << dev;
            return false;
        }
        prev = dev;
    }
    return true;
}

bool kernel_axis_monotone(std::ostringstream& os) {
    const Anisotropy a(2.0);
    double prev = -1.0;
    for (int n = 0; n <= 6; ++n) {
        const double v = omega_exact({n, 0}, a);
        if (v <= prev) {
            os << "omega((n,0)) not increasing at n=" << n;
            return false;
        }
        prev = v;
    }
    return true;
}

bool kernel_sinh_consistency(std::ostringstream& os) {
    for (double a : {0.5, 1.0, 2.0, 10.0}) {
        const Anisotropy alpha(a);
        for (double t = 1e-4; t <= kPi; t *= 2.3) {
            const double th = std::min(t, kPi);
            const double direct = sinh_lambda(th, alpha);
            const double via = std::sinh(dispersion_lambda(th, alpha));
            if (rel_diff(direct, via) > 1e-12) {
                os << "alpha=" << a << " theta=" << th << " rel diff " << rel_diff(direct, via);
                return false;
            }
        }
    }
    return true;
}

bool kernel_decomposition(std::ostringstream& os) {
    const Anisotropy one(1.0);
    const double om = omega_exact({10, 0}, one);
    const double sum = 2.0 * (r1_quadrature({10, 0}, one) + r2_closed(one));
    if (std::abs(sum - om) / om >= 5e-3) {
        os << "2*(r1+r2) = " << sum << " vs omega = " << om;
        return false;
    }
    if (rel_diff(r1_quadrature({10, 0}, one), r1_quadrature({0, 10}, one)) > 1e-3) {
        os << "r1 axis symmetry broken";
        return false;
    }
    return true;
}

// ---- theta ----

bool theta_oddness(std::ostringstream& os) {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> re(-2.0, 2.0), im(-1.0, 1.0), qd(0.05, 0.9);
    for (int i = 0; i < 50; ++i) {
        const Complex z(re(rng), im(rng));
        const Complex q(qd(rng), 0.0);
        const Complex lhs = theta1(-z, q);
        const Complex rhs = -theta1(z, q);
        if (std::abs(lhs - rhs) > 1e-14 * (1.0 + std::abs(rhs))) {
            os << "oddness violated at z=" << z << " q=" << q;
            return false;
        }
    }
    return true;
}

bool theta_quasi_periodicity(std::ostringstream& os) {
    std::mt19937_64 rng(999);
    std::uniform_real_distribution<double> re(0.0, kPi), qd(0.05, 0.9);
    for (int i = 0; i < 50; ++i) {
        const Complex z(re(rng), 0.0);
        const Complex q(qd(rng), 0.0);
        const Complex lhs = theta1(z + kPi, q);
        const Complex rhs = -theta1(z, q);
        if (std::abs(lhs - rhs) > 1e-12 * (1.0 + std::abs(rhs))) {
            os << "quasi-periodicity violated at z=" << z << " q=" << q;
            return false;
        }
    }
    return true;
}

bool theta_triple_product(std::ostringstream& os) {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> re(0.0, kPi);
    for (double q : {0.1, 0.3, 0.5, 0.7}) {
        for (int i = 0; i < 8; ++i) {
            const Complex z(re(rng), 0.0);
            const Complex s = theta4_series(z, Complex(q, 0.0));
            const Complex p = theta4_product(z, Complex(q, 0.0));
            if (std::abs(s - p) > 1e-12) {
                os << "series/product gap " << std::abs(s - p) << " at q=" << q;
                return false;
            }
        }
    }
    return true;
}

bool theta_modular_identity(std::ostringstream& os) {
    for (double im : {0.05, 0.1, 0.3, 0.5, 1.0}) {
        const Complex tau(0.0, im);
        for (double zr : {0.3, 0.7, 1.1}) {
            const Complex z(zr, 0.0);
            const Complex direct = theta1(z, nome_from_tau(tau));
            const Complex via = modular_transform_theta1(z, tau);
            if (std::abs(direct - via) > 1e-9 * (1.0 + std::abs(direct))) {
                os << "modular gap " << std::abs(direct - via) << " at Im tau=" << im;
                return false;
            }
        }
    }
    return true;
}

bool theta_gaussian_truncation(std::ostringstream& os) {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> re(0.1, kPi - 0.1);
    for (double q : {0.3, 0.6, 0.9}) {
        for (int i = 0; i < 10; ++i) {
            int terms = 0;
            theta1(Complex(re(rng), 0.0), Complex(q, 0.0), 1e-15, &terms);
            if (terms > 40) {
                os << "theta1 took " << terms << " terms at q=" << q;
                return false;
            }
        }
    }
    return true;
}

// ---- finite grid ----

bool grid_reciprocity(std::ostringstream& os) {
    const GridSpec grid(17, 11, 3.0, 1.0);
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> xd(0, grid.lx - 1), yd(0, grid.ly - 1);
    for (int i = 0; i < 100; ++i) {
        const NodeCoord s{xd(rng), yd(rng)};
        const NodeCoord d{xd(rng), yd(rng)};
        const double fwd = r_theta_closed(s, d, grid);
        const double bwd = r_theta_closed(d, s, grid);
        if (rel_diff(fwd, bwd) > 5e-15) {
            os << "reciprocity gap " << rel_diff(fwd, bwd);
            return false;
        }
        if (!(s == d) && !(fwd > 0.0)) {
            os << "non-positive resistance " << fwd;
            return false;
        }
    }
    return true;
}

bool grid_swap_invariance(std::ostringstream& os) {
    const GridSpec grid(100, 4, 4.0, 1.0);  // raw |q| = 0.939 > 0.9, swap path
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> xd(0, grid.lx - 1), yd(0, grid.ly - 1);
    for (int i = 0; i < 20; ++i) {
        const NodeCoord s{xd(rng), yd(rng)};
        NodeCoord d{xd(rng), yd(rng)};
        if (s == d) d.x = (d.x + 1) % grid.lx;
        const double direct = r_theta_closed(s, d, grid);
        const double transposed =
            r_theta_closed({s.y, s.x}, {d.y, d.x}, grid.transposed());
        if (rel_diff(direct, transposed) > 1e-9) {
            os << "swap gap " << rel_diff(direct, transposed);
            return false;
        }
    }
    return true;
}

bool grid_translation_limit(std::ostringstream& os) {
    // At the center of a large grid the boundary images are negligible, so the
    // closed form approaches the infinite-grid analytic baseline.
    const GridSpec grid(201, 201, 1.0, 1.0);
    const Anisotropy one(1.0);
    const NodeCoord center{100, 100};
    for (const auto& [dx, dy] : {std::pair{1, 0}, {1, 1}, {3, 2}, {5, 0}, {4, 4}}) {
        const NodeCoord d{center.x + dx, center.y + dy};
        const double closed = r_theta_closed(center, d, grid);
        const double infinite = grid.r0() * omega_analytic_infinite({dx, dy}, one);
        if (rel_diff(closed, infinite) > 5e-3) {
            os << "center pair (" << dx << "," << dy << ") rel diff "
               << rel_diff(closed, infinite);
            return false;
        }
    }
    return true;
}

bool grid_ellipse_enumeration(std::ostringstream& os) {
    std::mt19937_64 rng(555);
    for (const auto& grid : {GridSpec(4, 4, 1.0, 1.0), GridSpec(7, 5, 4.0, 1.0),
                             GridSpec(20, 20, 1.0, 4.0)}) {
        std::uniform_int_distribution<int> xd(0, grid.lx - 1), yd(0, grid.ly - 1);
        for (double limit : {0.0, 10.0, 25.0, 250.0}) {
            const NodeCoord a{xd(rng), yd(rng)};
            const NodeCoord b{xd(rng), yd(rng)};
            auto got = image_displacements_in_ellipse(a, b, grid, limit, +1);

            // Brute force over a generous translation window.
            std::vector<std::pair<int, int>> expect;
            const MirrorFamily bi = mirror_images(b);
            for (int m = -10; m <= 10; ++m)
                for (int n = -10; n <= 10; ++n)
                    for (int k = 0; k < 4; ++k) {
                        const int dx = a.x - (bi.images[k].x + 2 * m * grid.lx);
                        const int dy = a.y - (bi.images[k].y + 2 * n * grid.ly);
                        if (grid.alpha() * double(dx) * dx + double(dy) * dy <= limit)
                            expect.emplace_back(dx, dy);
                    }
            std::vector<std::pair<int, int>> have;
            for (const auto& s : got) have.emplace_back(s.d.dx, s.d.dy);
            std::sort(expect.begin(), expect.end());
            std::sort(have.begin(), have.end());
            if (have != expect) {
                os << "enumeration mismatch (" << have.size() << " vs " << expect.size()
                   << ") limit=" << limit;
                return false;
            }
        }
    }
    return true;
}

// ---- correction ----

bool correction_hybrid_exactness(std::ostringstream& os) {
    const Anisotropy a(10.0);
    const HybridConfig cfg;
    CorrectionCache cache(cfg.cache_capacity);
    const double limit = near_field_limit(a, cfg);
    for (const auto& [dx, dy] : {std::pair{1, 0}, {0, 3}, {2, 3}, {5, 0}, {1, 15}}) {
        if (!within_near_field({dx, dy}, a, limit)) continue;
        const double hybrid = omega_hybrid({dx, dy}, a, cache, cfg);
        const double exact = omega_exact({dx, dy}, a, cfg.quadrature);
        if (std::abs(hybrid - exact) > 2.0 * cfg.quadrature.abs_tol) {
            os << "hybrid vs exact gap " << std::abs(hybrid - exact);
            return false;
        }
    }
    return true;
}

bool correction_boundary_continuity(std::ostringstream& os) {
    const HybridConfig cfg;
    for (double av : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const Anisotropy a(av);
        const double limit = near_field_limit(a, cfg);
        std::vector<Displacement> probes;
        probes.push_back({int(std::floor(std::sqrt(limit / av))) + 1, 0});
        probes.push_back({0, int(std::floor(std::sqrt(limit))) + 1});
        int k = 1;
        while (av * k * k + double(k) * k <= limit) ++k;
        probes.push_back({k, k});
        for (const Displacement d : probes) {
            const double ex = omega_exact(d, a, cfg.quadrature);
            const double an = omega_analytic_infinite(d, a);
            if (std::abs(an - ex) / ex >= 0.01) {
                os << "alpha=" << av << " (" << d.dx << "," << d.dy << ") rel "
                   << std::abs(an - ex) / ex;
                return false;
            }
        }
    }
    return true;
}

bool correction_cache_determinism(std::ostringstream& os) {
    const Anisotropy a(2.0);
    const HybridConfig cfg;
    std::vector<Displacement> seq = {{1, 0}, {0, 1}, {1, 1}, {1, 0}, {2, 1},
                                     {0, 1}, {1, 1}, {3, 0}, {1, 0}, {2, 1}};
    CorrectionCache cache(cfg.cache_capacity);
    for (const Displacement d : seq) {
        const double cached = delta_omega(d, a, cache, cfg);
        const double fresh = omega_exact(d, a, cfg.quadrature) - omega_analytic_infinite(d, a);
        if (cached != fresh) {
            os << "cache value differs from fresh computation at (" << d.dx << "," << d.dy
               << ")";
            return false;
        }
    }
    return true;
}

bool correction_lru_eviction(std::ostringstream& os) {
    CorrectionCache cache(10000);
    auto key = [](int i) { return CorrectionKey{i % 200, i / 200, 42}; };
    for (int i = 0; i < 20000; ++i)
        cache.get_or_compute(key(i), [i] { return double(i); });
    if (cache.size() != 10000) {
        os << "size after eviction " << cache.size();
        return false;
    }
    const auto before = cache.stats();
    cache.get_or_compute(key(0), [] { return -1.0; });  // oldest key: must be a miss
    const auto after = cache.stats();
    if (after.misses != before.misses + 1) {
        os << "oldest key was not evicted";
        return false;
    }
    return true;
}

bool correction_symmetry_canonicalization(std::ostringstream& os) {
    const Anisotropy a(5.0);
    const HybridConfig cfg;
    CorrectionCache cache(cfg.cache_capacity);
    const double v1 = delta_omega({-2, 3}, a, cache, cfg);
    const double v2 = delta_omega({2, -3}, a, cache, cfg);
    const double v3 = delta_omega({2, 3}, a, cache, cfg);
    if (v1 != v2 || v2 != v3) {
        os << "sign variants disagree";
        return false;
    }
    if (cache.size() != 1) {
        os << "expected a single cache entry, got " << cache.size();
        return false;
    }
    return true;
}

bool correction_cross_error_elimination(std::ostringstream& os) {
    const GridSpec grid(50, 50, 10.0, 1.0);
    const NodeCoord src{0, 0};
    const HybridConfig cfg;
    CorrectionCache cache(cfg.cache_capacity);

    const std::vector<double> oracle = all_resistances_from(src, grid);
    double hybrid_on = 0.0, hybrid_off = 0.0, theta_on = 0.0;
    for (int y = 0; y < grid.ly; ++y)
        for (int x = 0; x < grid.lx; ++x) {
            const NodeCoord t{x, y};
            if (t == src) continue;
            const double ref = oracle[node_index(t, grid)];
            const double eh =
                std::abs(r_finite_hybrid(src, t, grid, cache, cfg).ohms - ref) / ref;
            const double et = std::abs(r_theta_closed(src, t, grid) - ref) / ref;
            const bool on_axis = x == src.x || y == src.y;
            (on_axis ? hybrid_on : hybrid_off) = std::max(on_axis ? hybrid_on : hybrid_off, eh);
            if (on_axis) theta_on = std::max(theta_on, et);
        }
    if (hybrid_on > 2.0 * hybrid_off) {
        os << "hybrid on-axis max " << hybrid_on << " > 2x off-axis " << hybrid_off;
        return false;
    }
    if (hybrid_on >= 0.005) {
        os << "hybrid on-axis max " << hybrid_on;
        return false;
    }
    if (theta_on < 2.0 * hybrid_on) {
        os << "theta on-axis max " << theta_on << " not >= 2x hybrid " << hybrid_on;
        return false;
    }
    if (cache.stats().hit_rate < 0.90) {
        os << "hit rate after the full map " << cache.stats().hit_rate;
        return false;
    }
    return true;
}

// ---- oracle ----

bool oracle_metric_and_reciprocity(std::ostringstream& os) {
    const GridSpec grid(10, 10, 2.0, 1.0);
    std::mt19937_64 rng(808);
    std::uniform_int_distribution<int> coord(0, 9);
    for (int i = 0; i < 50; ++i) {
        const NodeCoord a{coord(rng), coord(rng)};
        const NodeCoord b{coord(rng), coord(rng)};
        const NodeCoord c{coord(rng), coord(rng)};
        const double rab = r_oracle(a, b, grid);
        const double rbc = r_oracle(b, c, grid);
        const double rac = r_oracle(a, c, grid);
        if (rac > rab + rbc + 1e-12) {
            os << "triangle inequality violated";
            return false;
        }
        if (rel_diff(rab, r_oracle(b, a, grid)) > 1e-12) {
            os << "reciprocity violated";
            return false;
        }
    }
    return true;
}

bool oracle_row_sums(std::ostringstream& os) {
    const GridLaplacian lap = build_laplacian(GridSpec(9, 7, 3.0, 0.5));
    const Eigen::VectorXd sums = Eigen::MatrixXd(lap.matrix).rowwise().sum();
    const double max_diag = Eigen::MatrixXd(lap.matrix).diagonal().maxCoeff();
    if (sums.cwiseAbs().maxCoeff() > 1e-12 * max_diag) {
        os << "row sum " << sums.cwiseAbs().maxCoeff();
        return false;
    }
    return true;
}

bool oracle_batch_consistency(std::ostringstream& os) {
    const GridSpec grid(5, 5, 1.0, 1.0);
    const NodeCoord s{0, 0};
    const std::vector<double> batch = all_resistances_from(s, grid);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) {
            const NodeCoord t{x, y};
            if (t == s) continue;
            if (rel_diff(batch[node_index(t, grid)], r_oracle(s, t, grid)) > 1e-10) {
                os << "batch vs pairwise mismatch at (" << x << "," << y << ")";
                return false;
            }
        }
    return true;
}

bool oracle_rayleigh_vs_infinite(std::ostringstream& os) {
    const GridSpec grid(201, 201, 1.0, 1.0);
    const Anisotropy one(1.0);
    const NodeCoord center{100, 100};
    for (const auto& [dx, dy] : {std::pair{1, 0}, {2, 1}, {3, 3}}) {
        const double finite = r_oracle(center, {center.x + dx, center.y + dy}, grid, 1e-12);
        const double infinite = grid.r0() * omega_exact({dx, dy}, one);
        if (finite < infinite - 1e-9) {
            os << "finite " << finite << " below infinite " << infinite;
            return false;
        }
        if (rel_diff(finite, infinite) > 1e-3) {
            os << "center pair deviates " << rel_diff(finite, infinite);
            return false;
        }
    }
    return true;
}

bool oracle_gamma_constant(std::ostringstream& os) {
    // Euler-Maclaurin tripwire for the stored constant.
    const int n = 2000;
    double h = 0.0;
    for (int k = 1; k <= n; ++k) h += 1.0 / k;
    const double est = h - std::log(double(n)) - 0.5 / n + 1.0 / (12.0 * double(n) * n) -
                       1.0 / (120.0 * std::pow(double(n), 4));
    if (std::abs(est - kEulerGamma) > 1e-13) {
        os << "gamma constant deviates from recomputation by " << std::abs(est - kEulerGamma);
        return false;
    }
    return true;
}

}  // namespace

std::vector<CheckResult> run_selftest(bool fast) {
    const std::vector<Check> checks = {
        {"kernel/symmetry", false, kernel_symmetry},
        {"kernel/isotropy", false, kernel_isotropy},
        {"kernel/r2-closed-vs-quadrature", false, kernel_r2_agreement},
        {"kernel/far-field-convergence", false, kernel_far_field},
        {"kernel/axis-monotonicity", false, kernel_axis_monotone},
        {"kernel/sinh-consistency", false, kernel_sinh_consistency},
        {"kernel/asymptotic-decomposition", false, kernel_decomposition},
        {"theta/oddness", false, theta_oddness},
        {"theta/quasi-periodicity", false, theta_quasi_periodicity},
        {"theta/triple-product", false, theta_triple_product},
        {"theta/modular-identity", false, theta_modular_identity},
        {"theta/gaussian-truncation", false, theta_gaussian_truncation},
        {"finite-grid/reciprocity-positivity", false, grid_reciprocity},
        {"finite-grid/swap-invariance", false, grid_swap_invariance},
        {"finite-grid/translation-limit", false, grid_translation_limit},
        {"finite-grid/ellipse-enumeration", false, grid_ellipse_enumeration},
        {"correction/hybrid-exactness", false, correction_hybrid_exactness},
        {"correction/boundary-continuity", false, correction_boundary_continuity},
        {"correction/cache-determinism", false, correction_cache_determinism},
        {"correction/lru-eviction", false, correction_lru_eviction},
        {"correction/symmetry-canonicalization", false, correction_symmetry_canonicalization},
        {"correction/cross-error-elimination", true, correction_cross_error_elimination},
        {"oracle/metric-reciprocity", false, oracle_metric_and_reciprocity},
        {"oracle/laplacian-row-sums", false, oracle_row_sums},
        {"oracle/batch-consistency", false, oracle_batch_consistency},
        {"oracle/rayleigh-vs-infinite", true, oracle_rayleigh_vs_infinite},
        {"constants/euler-gamma", false, oracle_gamma_constant},
    };

    std::vector<CheckResult> results;
    results.reserve(checks.size());
    for (const Check& c : checks) {
        if (fast && c.heavy) continue;
        std::ostringstream os;
        CheckResult r;
        r.name = c.name;
        try {
            r.passed = c.run(os);
            r.detail = os.str();
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace gridres
