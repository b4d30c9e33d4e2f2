// Grid and spectral-transform conventions:
//   points[j] = x_min + j dx, wavenumbers in FFT bin order (0..n/2-1, -n/2..-1
//   times 2 pi / L), rectangle-rule inner products, and Parseval in the form
//   ||f||^2 = (dx/n) sum |F_k|^2 for the unnormalized forward transform.

#include "doctest.h"

#include "hartree/fft.hpp"
#include "hartree/grid.hpp"
#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace hartree;
using std::numbers::pi;

namespace {

WaveFunction unit_gaussian(const Grid1D& g, double center = 0.0) {
    WaveFunction f = sample(g, [&](double x) {
        return cplx(std::pow(pi, -0.25) * std::exp(-0.5 * (x - center) * (x - center)), 0.0);
    });
    return f;
}

} // namespace

TEST_CASE("grid constructor enforces power-of-two size and ordered bounds") {
    CHECK_NOTHROW(Grid1D(8, -1.0, 1.0));
    CHECK_THROWS(Grid1D(12, -1.0, 1.0));   // not a power of two
    CHECK_THROWS(Grid1D(4, -1.0, 1.0));    // too small
    CHECK_THROWS(Grid1D(16, 1.0, 1.0));    // empty interval
    CHECK_THROWS(Grid1D(16, 2.0, -2.0));   // reversed
}

TEST_CASE("points and wavenumbers on n = 8, [0, 8)") {
    const Grid1D g(8, 0.0, 8.0);
    CHECK(g.dx() == 1.0);
    for (std::size_t j = 0; j < 8; ++j) CHECK(g.points()[j] == static_cast<double>(j));

    // dk = 2 pi / 8; bins ordered 0, 1, 2, 3, -4, -3, -2, -1.
    const double dk = 2.0 * pi / 8.0;
    const int m[8] = {0, 1, 2, 3, -4, -3, -2, -1};
    for (std::size_t j = 0; j < 8; ++j)
        CHECK(g.wavenumbers()[j] == doctest::Approx(m[j] * dk).epsilon(1e-15));
}

TEST_CASE("forward/inverse transform round-trips and Parseval holds") {
    const Grid1D g(64, -5.0, 3.0);
    auto data = oracle::random_complex(g.n(), 42);
    const auto orig = data;

    fft::forward(data.data(), g.n());

    // Parseval for the unnormalized DFT: sum |f|^2 dx = (dx/n) sum |F|^2.
    double time_side = 0.0, freq_side = 0.0;
    for (const auto& z : orig) time_side += std::norm(z);
    for (const auto& z : data) freq_side += std::norm(z);
    time_side *= g.dx();
    freq_side *= g.dx() / static_cast<double>(g.n());
    CHECK(time_side == doctest::Approx(freq_side).epsilon(1e-13));

    fft::inverse(data.data(), g.n());
    for (std::size_t j = 0; j < g.n(); ++j)
        CHECK(std::abs(data[j] - orig[j]) <= 1e-14);
}

TEST_CASE("transform of a pure on-grid mode lands in a single bin") {
    const Grid1D g(32, 0.0, 2.0 * pi);
    const double k3 = g.wavenumbers()[3];
    auto f = sample(g, [&](double x) { return std::exp(cplx(0.0, k3 * x)); });

    auto data = f.values;
    fft::forward(data.data(), g.n());
    for (std::size_t j = 0; j < g.n(); ++j) {
        if (j == 3)
            CHECK(std::abs(data[j] - cplx(32.0, 0.0)) <= 1e-12);
        else
            CHECK(std::abs(data[j]) <= 1e-12);
    }
}

TEST_CASE("norms and inner products agree with direct quadrature") {
    const Grid1D g(256, -12.0, 12.0);
    WaveFunction f = unit_gaussian(g);

    // continuum-normalized Gaussian: quadrature picks up only ~1e-15 error
    CHECK(l2_norm(f) == doctest::Approx(1.0).epsilon(1e-13));

    const double direct =
        oracle::quad(g, [&](double x) { return std::exp(-x * x) / std::sqrt(pi); });
    CHECK(l2_norm(f) * l2_norm(f) == doctest::Approx(direct).epsilon(1e-14));

    WaveFunction h = unit_gaussian(g, 1.0);
    const cplx ip = inner_product(f, h);
    // <f, h> for two real Gaussians offset by a: exp(-a^2/4)
    CHECK(ip.real() == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
    CHECK(std::abs(ip.imag()) <= 1e-15);

    // conjugate symmetry
    const cplx ba = inner_product(h, f);
    CHECK(std::abs(ip - std::conj(ba)) <= 1e-15);

    const Grid1D other(256, -12.0, 12.000001);
    WaveFunction q(other);
    CHECK_THROWS_AS((void)inner_product(f, q), std::invalid_argument);
}

TEST_CASE("kinetic energy is spectral: exact on plane waves, 1/4 on the unit gaussian") {
    const Grid1D g(128, 0.0, 16.0);
    const double k5 = g.wavenumbers()[5];
    WaveFunction pw = sample(g, [&](double x) { return std::exp(cplx(0.0, k5 * x)); });
    normalize(pw);
    CHECK(kinetic_energy(pw) == doctest::Approx(0.5 * k5 * k5).epsilon(1e-13));

    const Grid1D gg(256, -12.0, 12.0);
    WaveFunction f = unit_gaussian(gg);
    // <phi, -1/2 d^2 phi> = 1/4 for phi = pi^{-1/4} e^{-x^2/2}
    CHECK(kinetic_energy(f) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("kinetic multiplier applies a diagonal factor in k space") {
    const Grid1D g(64, -8.0, 8.0);
    const double k2 = g.wavenumbers()[2];
    WaveFunction pw = sample(g, [&](double x) { return std::exp(cplx(0.0, k2 * x)); });

    const double dt = 0.37;
    WaveFunction f = pw;
    apply_kinetic_multiplier(f, [&](double k) {
        return std::exp(cplx(0.0, -dt * k * k / 4.0));
    });
    const cplx expected_phase = std::exp(cplx(0.0, -dt * k2 * k2 / 4.0));
    for (std::size_t j = 0; j < g.n(); ++j)
        CHECK(std::abs(f.values[j] - expected_phase * pw.values[j]) <= 1e-13);

    // table form matches the functional form
    std::vector<cplx> table(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) {
        const double k = g.wavenumbers()[j];
        table[j] = std::exp(cplx(0.0, -dt * k * k / 4.0));
    }
    WaveFunction f2 = pw;
    apply_kinetic_multiplier(f2, table);
    for (std::size_t j = 0; j < g.n(); ++j) CHECK(std::abs(f2.values[j] - f.values[j]) <= 1e-15);
}

TEST_CASE("spectral derivative beats finite differences on a smooth mode") {
    // d^2/dx^2 sin(k x) = -k^2 sin(k x); compare both routes to the truth.
    const Grid1D g(128, 0.0, 2.0 * pi);
    const double k = g.wavenumbers()[4];
    std::vector<double> s(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) s[j] = std::sin(k * g.points()[j]);

    // spectral second derivative via the multiplier -k^2
    WaveFunction f = sample(g, [&](double x) { return cplx(std::sin(k * x), 0.0); });
    apply_kinetic_multiplier(f, [](double kk) { return cplx(-kk * kk, 0.0); });

    const auto fd = oracle::fd2(g, s);
    double spectral_err = 0.0, fd_err = 0.0;
    for (std::size_t j = 1; j + 1 < g.n(); ++j) {
        const double truth = -k * k * s[j];
        spectral_err = std::max(spectral_err, std::abs(f.values[j].real() - truth));
        fd_err = std::max(fd_err, std::abs(fd[j] - truth));
    }
    CHECK(spectral_err <= 1e-10);
    CHECK(fd_err >= 1e-3);  // centered differences are O(dx^2) here
}

TEST_CASE("second moment of displaced gaussians") {
    const Grid1D g(256, -14.0, 14.0);
    WaveFunction f = unit_gaussian(g);
    // |phi|^2 = e^{-x^2}/sqrt(pi) has variance 1/2
    CHECK(second_moment(f) == doctest::Approx(0.5).epsilon(1e-12));

    WaveFunction h = unit_gaussian(g, 2.0);
    CHECK(second_moment(h) == doctest::Approx(4.0 + 0.5).epsilon(1e-12));
}

TEST_CASE("normalize scales to unit norm and rejects zero or non-finite input") {
    const Grid1D g(64, -6.0, 6.0);
    WaveFunction f = sample(g, [](double x) { return cplx(std::exp(-x * x), 0.5); });
    normalize(f);
    CHECK(l2_norm(f) == doctest::Approx(1.0).epsilon(1e-14));

    WaveFunction z(g);
    CHECK_THROWS(normalize(z));

    WaveFunction bad(g);
    bad.values[3] = cplx(std::nan(""), 0.0);
    CHECK(has_nan(bad));
    CHECK_THROWS(normalize(bad));
}

TEST_CASE("boundary mass sums the outermost points only") {
    const Grid1D g(64, 0.0, 64.0);
    WaveFunction f(g);
    f.values[0] = 2.0;         // within the left margin
    f.values[63] = 3.0;        // within the right margin
    f.values[32] = 100.0;      // interior: must not count
    CHECK(boundary_mass(f) == doctest::Approx((4.0 + 9.0) * g.dx()).epsilon(1e-15));

    WaveFunction h(g);
    h.values[5] = 1.0;  // first point outside the default margin of 5
    CHECK(boundary_mass(h) == 0.0);
}

TEST_CASE("potential energy and density weight by |phi|^2") {
    const Grid1D g(128, -10.0, 10.0);
    WaveFunction f = unit_gaussian(g);
    std::vector<double> v(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) v[j] = 0.5 * g.points()[j] * g.points()[j];
    // <phi, x^2/2 phi> = 1/4 for the unit gaussian
    CHECK(potential_energy(f, v) == doctest::Approx(0.25).epsilon(1e-12));

    std::vector<double> rho(g.n());
    density(f, rho);
    double sum = 0.0;
    for (const double r : rho) sum += r;
    CHECK(sum * g.dx() == doctest::Approx(1.0).epsilon(1e-13));
}
