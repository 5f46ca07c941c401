#include "gridres/theta.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gridres;

namespace {

constexpr double kPi = std::numbers::pi;

// Long-truncation reference summation, independent of the production path.
Complex theta1_reference(Complex z, Complex q, int terms) {
    Complex sum(0.0);
    for (int n = 0; n < terms; ++n) {
        const Complex power = std::pow(q, (n + 0.5) * (n + 0.5));
        if (std::abs(power) == 0.0) break;
        const Complex t = power * std::sin(double(2 * n + 1) * z);
        sum += (n % 2 == 0) ? t : -t;
    }
    return 2.0 * sum;
}

}  // namespace

TEST_CASE("nome from tau") {
    CHECK(std::abs(nome_from_tau({0.0, 1.0}) - Complex(std::exp(-kPi), 0.0)) < 1e-16);
    CHECK(nome_from_tau({0.0, 1.0}).real() == doctest::Approx(0.0432139).epsilon(1e-5));
    CHECK(nome_from_tau({0.0, 2.0}).real() == doctest::Approx(0.00186744).epsilon(1e-5));
    CHECK(nome_from_tau({0.0, 0.01}).real() == doctest::Approx(0.96907).epsilon(1e-5));
    CHECK_THROWS_AS(nome_from_tau({0.0, -1.0}), std::domain_error);
    CHECK_THROWS_AS(nome_from_tau({1.0, 0.0}), std::domain_error);
}

TEST_CASE("theta1 basics") {
    CHECK(theta1({0.0, 0.0}, {0.3, 0.0}) == Complex(0.0));
    CHECK_THROWS_AS(theta1({0.5, 0.0}, {1.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(theta1({0.5, 0.0}, {1.3, 0.0}), std::domain_error);

    // First few series terms dominate at q = 0.1.
    const double expected = 2.0 * (std::pow(0.1, 0.25) + std::pow(0.1, 2.25) +
                                   std::pow(0.1, 6.25) + std::pow(0.1, 12.25));
    const Complex v = theta1({kPi / 2, 0.0}, {0.1, 0.0});
    CHECK(v.real() == doctest::Approx(expected).epsilon(1e-13));
    CHECK(v.real() == doctest::Approx(1.1359306).epsilon(1e-7));
    CHECK(v.imag() == 0.0);

    const Complex ref = theta1_reference({0.7, 0.0}, {0.3, 0.0}, 200);
    CHECK(std::abs(theta1({0.7, 0.0}, {0.3, 0.0}) - ref) < 1e-14);
}

TEST_CASE("theta1 prime at zero") {
    CHECK(theta1_prime_zero({0.0, 0.0}) == Complex(0.0));

    const double expected = 2.0 * (std::pow(0.1, 0.25) - 3.0 * std::pow(0.1, 2.25) +
                                   5.0 * std::pow(0.1, 6.25) - 7.0 * std::pow(0.1, 12.25));
    CHECK(theta1_prime_zero({0.1, 0.0}).real() == doctest::Approx(expected).epsilon(1e-13));
    CHECK(theta1_prime_zero({0.1, 0.0}).real() == doctest::Approx(1.0909478).epsilon(1e-7));

    // Central finite difference against the series derivative.
    const Complex q(std::exp(-kPi), 0.0);
    const double h = 1e-5;
    const Complex fd = (theta1({h, 0.0}, q) - theta1({-h, 0.0}, q)) / (2.0 * h);
    const Complex deriv = theta1_prime_zero(q);
    CHECK(std::abs(deriv - fd) / std::abs(deriv) < 1e-8);
}

TEST_CASE("theta4 series and product") {
    CHECK(theta4_series({0.9, 0.2}, {0.0, 0.0}) == Complex(1.0));
    CHECK(theta4_product({0.9, 0.2}, {0.0, 0.0}) == Complex(1.0));

    CHECK(std::abs(theta4_series({0.3, 0.0}, {0.2, 0.0}) -
                   theta4_product({0.3, 0.0}, {0.2, 0.0})) < 1e-12);
    CHECK(std::abs(theta4_series({0.0, 0.0}, {0.5, 0.0}) -
                   theta4_product({0.0, 0.0}, {0.5, 0.0})) < 1e-12);
}

TEST_CASE("modular transformation") {
    // Self-dual point tau = i.
    const Complex direct = theta1({0.5, 0.0}, nome_from_tau({0.0, 1.0}));
    const Complex via = modular_transform_theta1({0.5, 0.0}, {0.0, 1.0});
    CHECK(std::abs(direct - via) < 1e-10);

    // Slowly converging side checked against a long reference summation.
    const Complex ref = theta1_reference({0.3, 0.0}, nome_from_tau({0.0, 0.05}), 5000);
    CHECK(std::abs(modular_transform_theta1({0.3, 0.0}, {0.0, 0.05}) - ref) < 1e-9);

    CHECK(std::abs(modular_transform_theta1({0.0, 0.0}, {0.0, 0.7})) < 1e-15);
    CHECK_THROWS_AS(modular_transform_theta1({0.3, 0.0}, {0.0, -0.1}), std::domain_error);
}

TEST_CASE("log-magnitude evaluation") {
    // Agrees with the raw series where the raw series is representable.
    for (const Complex z : {Complex(0.4, 0.2), Complex(1.3, -0.7), Complex(0.05, 1.4)}) {
        for (double q : {0.05, 0.4, 0.85}) {
            const double raw = std::log(std::abs(theta1(z, {q, 0.0})));
            CHECK(theta1_log_abs(z, Complex(q, 0.0)) == doctest::Approx(raw).epsilon(1e-10));
        }
    }
    CHECK(std::isinf(theta1_log_abs(Complex(0.0, 0.0), Complex(0.3, 0.0))));

    // Quasi-periodicity ladder in the tau direction reaches magnitudes far
    // beyond double range; ln|theta1(z + k*pi*tau)| = ln|theta1(z)| +
    // pi*Im(tau)*k^2 + 2*k*Im(z) for real nome.
    const double q = 0.3;
    const double im_tau = -std::log(q) / kPi;
    const Complex z(0.4, 0.2);
    const double base = theta1_log_abs(z, Complex(q, 0.0));
    for (int k : {5, 30}) {
        const Complex shifted = z + Complex(0.0, k * kPi * im_tau);
        const double expected = base + kPi * im_tau * k * k + 2.0 * k * z.imag();
        CHECK(theta1_log_abs(shifted, Complex(q, 0.0)) ==
              doctest::Approx(expected).epsilon(1e-9));
    }

    // Prime-at-zero log form handles nomes whose quarter power underflows.
    for (double qq : {0.5, 0.1, std::exp(-10.0 * kPi)}) {
        const double raw = std::log(std::abs(theta1_prime_zero({qq, 0.0})));
        CHECK(theta1_prime_zero_log_abs(Complex(qq, 0.0)) == doctest::Approx(raw).epsilon(1e-12));
    }
    const double tiny_log = theta1_prime_zero_log_abs(Complex(1e-280, 0.0));
    CHECK(tiny_log == doctest::Approx(std::log(2.0) + 0.25 * std::log(1e-280)).epsilon(1e-12));
}

TEST_CASE("gaussian truncation bound") {
    int terms = 0;
    theta1({1.1, 0.0}, {0.9, 0.0}, 1e-15, &terms);
    CHECK(terms <= 40);
    theta1({0.3, 0.0}, {0.5, 0.0}, 1e-15, &terms);
    CHECK(terms <= 40);
    theta1_prime_zero({0.9, 0.0}, 1e-15, &terms);
    CHECK(terms <= 40);
}
