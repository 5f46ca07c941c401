#include "gridres/theta.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gridres {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;
constexpr int kMaxTerms = 1000;
constexpr double kUnderflowFloor = std::numeric_limits<double>::min();

void check_nome(Complex q, const char* fn) {
    if (!(std::abs(q) < 1.0))
        throw std::domain_error(std::string(fn) + ": |nome| must be < 1");
}

// sin(w) * exp(-|Im w|), evaluated so that no intermediate exponent is positive.
Complex scaled_sin(Complex w) {
    const double m = std::abs(w.imag());
    const Complex a = std::exp(Complex(-w.imag() - m, w.real()));
    const Complex b = std::exp(Complex(w.imag() - m, -w.real()));
    return (a - b) / Complex(0.0, 2.0);
}

// Stop once the a-priori bound on the next term falls below the running
// tolerance threshold; comparison in log space so extreme magnitudes are safe.
bool converged(double next_term_log_bound, double partial_abs, double tol) {
    return next_term_log_bound < std::log(tol * (partial_abs + kUnderflowFloor));
}

}  // namespace

Complex nome_from_tau(Complex tau) {
    if (!(tau.imag() > 0.0))
        throw std::domain_error("nome_from_tau: Im(tau) must be positive");
    return std::exp(Complex(0.0, 1.0) * kPi * tau);
}

Complex theta1(Complex z, Complex nome, double trunc_tol, int* term_count) {
    check_nome(nome, "theta1");
    if (term_count) *term_count = 0;
    if (z == Complex(0.0) || nome == Complex(0.0)) return Complex(0.0);

    const double lq = std::log(std::abs(nome));
    const double aq = std::arg(nome);
    const double m = std::abs(z.imag());

    Complex sum(0.0);
    for (int n = 0; n < kMaxTerms; ++n) {
        const double e = (n + 0.5) * (n + 0.5);
        const Complex term = std::exp(Complex(e * lq + (2 * n + 1) * m, e * aq)) *
                             scaled_sin(double(2 * n + 1) * z);
        sum += (n % 2 == 0) ? term : -term;
        if (term_count) *term_count = n + 1;

        const double e_next = (n + 1.5) * (n + 1.5);
        const double bound = kLn2 + e_next * lq + std::max(0.0, (2 * n + 3) * m);
        if (converged(bound, 2.0 * std::abs(sum), trunc_tol)) return 2.0 * sum;
    }
    throw std::runtime_error("theta1: series did not converge (nome too close to 1?)");
}

Complex theta1_prime_zero(Complex nome, double trunc_tol, int* term_count) {
    check_nome(nome, "theta1_prime_zero");
    if (term_count) *term_count = 0;
    if (nome == Complex(0.0)) return Complex(0.0);

    const Complex lq = std::log(nome);
    Complex sum(0.0);
    for (int n = 0; n < kMaxTerms; ++n) {
        const Complex term = double(2 * n + 1) * std::exp((n + 0.5) * (n + 0.5) * lq);
        sum += (n % 2 == 0) ? term : -term;
        if (term_count) *term_count = n + 1;

        const double bound = kLn2 + std::log(double(2 * n + 3)) +
                             (n + 1.5) * (n + 1.5) * lq.real();
        if (converged(bound, 2.0 * std::abs(sum), trunc_tol)) return 2.0 * sum;
    }
    throw std::runtime_error("theta1_prime_zero: series did not converge");
}

Complex theta4_series(Complex z, Complex nome) {
    check_nome(nome, "theta4_series");
    constexpr double tol = 1e-14;
    if (nome == Complex(0.0)) return Complex(1.0);

    const Complex lq = std::log(nome);
    const double m = std::abs(z.imag());
    Complex sum(1.0);
    for (int n = 1; n < kMaxTerms; ++n) {
        const Complex term = 2.0 * std::exp(double(n) * n * lq) * std::cos(2.0 * n * z);
        sum += (n % 2 == 0) ? term : -term;

        const double bound = kLn2 + double(n + 1) * (n + 1) * lq.real() +
                             std::max(0.0, 2.0 * (n + 1) * m);
        if (converged(bound, std::abs(sum), tol)) return sum;
    }
    throw std::runtime_error("theta4_series: series did not converge");
}

Complex theta4_product(Complex z, Complex nome) {
    check_nome(nome, "theta4_product");
    constexpr double tol = 1e-14;
    if (nome == Complex(0.0)) return Complex(1.0);

    const Complex q2 = nome * nome;
    const Complex c2z = std::cos(2.0 * z);
    const double growth = std::max(1.0, std::exp(2.0 * std::abs(z.imag())));

    Complex prod(1.0);
    Complex q_odd = nome;      // q^{2n-1}
    Complex q_even = q2;       // q^{2n}
    for (int n = 1; n < kMaxTerms; ++n) {
        prod *= (1.0 - q_even) * (1.0 - 2.0 * q_odd * c2z + q_odd * q_odd);
        // All remaining factors deviate from 1 by at most ~this much.
        const double tail = std::abs(q_odd) * std::abs(q2) * (2.0 * growth + 2.0);
        if (tail < tol) return prod;
        q_odd *= q2;
        q_even *= q2;
    }
    throw std::runtime_error("theta4_product: product did not converge");
}

Complex modular_transform_theta1(Complex z, Complex tau, double trunc_tol) {
    if (!(tau.imag() > 0.0))
        throw std::domain_error("modular_transform_theta1: Im(tau) must be positive");
    const Complex i(0.0, 1.0);
    const Complex pref = i * std::sqrt(i / tau) * std::exp(-i * z * z / (kPi * tau));
    return pref * theta1(z / tau, nome_from_tau(-1.0 / tau), trunc_tol);
}

namespace {

// Core of ln|theta1| parameterized by ln|q| and arg(q), so callers with an
// underflowed nome can still pass the exact log magnitude.
double theta1_log_abs_core(Complex z, double lq, double aq, double trunc_tol) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    if (z == Complex(0.0)) return neg_inf;

    // |theta1| depends only on (|Re z|, |Im z|) when the nome is real positive.
    if (aq == 0.0) z = Complex(std::abs(z.real()), std::abs(z.imag()));

    const double m = std::abs(z.imag());

    // Term log-magnitudes peak near (n + 1/2) = m / (-lq); pull the peak out as
    // a scale factor K so every summed term has non-positive log magnitude.
    auto term_log = [&](int n) { return (n + 0.5) * (n + 0.5) * lq + (2 * n + 1) * m; };
    const int n_peak = std::max(0, static_cast<int>(std::lround(m / (-lq) - 0.5)));
    double big = std::max(term_log(n_peak), term_log(n_peak + 1));
    if (n_peak > 0) big = std::max(big, term_log(n_peak - 1));

    Complex sum(0.0);
    for (int n = 0; n < kMaxTerms; ++n) {
        const double e = (n + 0.5) * (n + 0.5);
        const Complex term = std::exp(Complex(e * lq + (2 * n + 1) * m - big, e * aq)) *
                             scaled_sin(double(2 * n + 1) * z);
        sum += (n % 2 == 0) ? term : -term;

        if (n >= n_peak) {
            const double bound = kLn2 + term_log(n + 1) - big;
            if (converged(bound, 2.0 * std::abs(sum), trunc_tol)) {
                const double s = std::abs(sum);
                return s == 0.0 ? neg_inf : big + kLn2 + std::log(s);
            }
        }
    }
    throw std::runtime_error("theta1_log_abs: series did not converge");
}

// theta1'(0) = 2 q^{1/4} Sum (-1)^n (2n+1) q^{n(n+1)}; the prefactor is kept
// in log space so tiny nomes do not underflow.
double theta1_prime_zero_log_abs_core(double lq, double aq, double trunc_tol) {
    Complex sum(0.0);
    for (int n = 0; n < kMaxTerms; ++n) {
        const double e = double(n) * (n + 1);
        const Complex term = double(2 * n + 1) * std::exp(Complex(e * lq, e * aq));
        sum += (n % 2 == 0) ? term : -term;

        const double bound = std::log(double(2 * n + 3)) + double(n + 1) * (n + 2) * lq;
        if (converged(bound, std::abs(sum), trunc_tol))
            return kLn2 + 0.25 * lq + std::log(std::abs(sum));
    }
    throw std::runtime_error("theta1_prime_zero_log_abs: series did not converge");
}

void check_context(const ThetaContext& ctx, const char* fn) {
    if (!(ctx.tau.imag() > 0.0))
        throw std::domain_error(std::string(fn) + ": Im(tau) must be positive");
}

}  // namespace

double theta1_log_abs(Complex z, Complex nome, double trunc_tol) {
    check_nome(nome, "theta1_log_abs");
    if (nome == Complex(0.0)) return -std::numeric_limits<double>::infinity();
    return theta1_log_abs_core(z, std::log(std::abs(nome)), std::arg(nome), trunc_tol);
}

double theta1_log_abs(Complex z, const ThetaContext& ctx, double trunc_tol) {
    check_context(ctx, "theta1_log_abs");
    return theta1_log_abs_core(z, -kPi * ctx.tau.imag(),
                               std::remainder(kPi * ctx.tau.real(), 2.0 * kPi), trunc_tol);
}

double theta1_prime_zero_log_abs(Complex nome, double trunc_tol) {
    check_nome(nome, "theta1_prime_zero_log_abs");
    if (nome == Complex(0.0)) return -std::numeric_limits<double>::infinity();
    return theta1_prime_zero_log_abs_core(std::log(std::abs(nome)), std::arg(nome),
                                          trunc_tol);
}

double theta1_prime_zero_log_abs(const ThetaContext& ctx, double trunc_tol) {
    check_context(ctx, "theta1_prime_zero_log_abs");
    return theta1_prime_zero_log_abs_core(
        -kPi * ctx.tau.imag(), std::remainder(kPi * ctx.tau.real(), 2.0 * kPi), trunc_tol);
}

}  // namespace gridres
