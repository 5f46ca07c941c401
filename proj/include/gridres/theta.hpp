#pragma once

#include <complex>

namespace gridres {

using Complex = std::complex<double>;

/// Lattice modulus, nome, and a flag recording whether the modular swap
/// (aspect-ratio transposition) was applied when the context was built.
struct ThetaContext {
    Complex tau;
    Complex nome;
    bool swapped = false;
};

class DegenerateThetaError : public std::runtime_error {
public:
    explicit DegenerateThetaError(const std::string& what) : std::runtime_error(what) {}
};

/// Nome q = exp(i*pi*tau); requires Im(tau) > 0 so that |q| < 1.
Complex nome_from_tau(Complex tau);

/// First Jacobi theta function,
///   theta1(z, q) = 2 * Sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) z).
/// Truncation stops once the a-priori bound on the next term,
/// 2*|q|^{(n+1/2)^2} * max(1, e^{|Im z|(2n+1)}), drops below
/// trunc_tol * (partial-sum magnitude + underflow floor). The bound (rather than
/// the observed term) guards against accidental zeros of the sine factor.
/// If term_count is non-null it receives the number of series terms summed.
Complex theta1(Complex z, Complex nome, double trunc_tol = 1e-15, int* term_count = nullptr);

/// z-derivative of theta1 at z = 0:
///   2 * Sum_{n>=0} (-1)^n (2n+1) q^{(n+1/2)^2}.
Complex theta1_prime_zero(Complex nome, double trunc_tol = 1e-15, int* term_count = nullptr);

/// Fourth theta function, series form: 1 + 2 * Sum_{n>=1} (-1)^n q^{n^2} cos(2nz).
Complex theta4_series(Complex z, Complex nome);

/// Fourth theta function, Jacobi triple product form:
///   Prod_{n>=1} (1 - q^{2n})(1 - 2 q^{2n-1} cos(2z) + q^{4n-2}).
Complex theta4_product(Complex z, Complex nome);

/// theta1 evaluated through the modular transformation (DLMF 20.7.30 rearranged):
///   theta1(z, tau) = i * sqrt(i/tau) * exp(-i z^2 / (pi tau)) * theta1(z/tau, q(-1/tau)),
/// principal branch of the square root. Requires Im(tau) > 0.
Complex modular_transform_theta1(Complex z, Complex tau, double trunc_tol = 1e-15);

/// ln|theta1(z, q)|, computed with the dominant Gaussian term factored out so the
/// result stays finite where the raw value would overflow or underflow (large
/// |Im z|, nome near 0). Returns -infinity at the lattice zeros of theta1.
double theta1_log_abs(Complex z, Complex nome, double trunc_tol = 1e-15);

/// Same, parameterized by the context's tau so extreme aspect ratios whose
/// nome underflows the double range (|q| < 1e-308) still evaluate exactly.
double theta1_log_abs(Complex z, const ThetaContext& ctx, double trunc_tol = 1e-15);

/// ln|theta1'(0, q)| with the q^{1/4} prefactor handled in log space.
double theta1_prime_zero_log_abs(Complex nome, double trunc_tol = 1e-15);

double theta1_prime_zero_log_abs(const ThetaContext& ctx, double trunc_tol = 1e-15);

}  // namespace gridres
