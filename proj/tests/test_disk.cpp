#include <doctest.h>

#include <cmath>
#include <random>

#include "gaussray/disk.hpp"

using namespace gaussray;

TEST_CASE("metric density values") {
    CHECK(metricDensity(Complex(0, 0)) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(metricDensity(Complex(0.5, 0)) == doctest::Approx(4.0 / (0.75 * 0.75)).epsilon(1e-14));
    CHECK(metricDensity(Complex(0.9, 0)) > metricDensity(Complex(0.8, 0)));
    CHECK_THROWS_AS(metricDensity(Complex(1.0, 0)), std::domain_error);
    CHECK_THROWS_AS(metricDensity(Complex(0.8, 0.7)), std::domain_error);
}

TEST_CASE("disk isometry algebra") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    auto randomIsometry = [&]() {
        // Unit-determinant pair: a = cosh(s) e^{i p}, b = sinh(s) e^{i q}.
        const double s = 0.5 + std::abs(dist(rng));
        const double p = dist(rng) * 3.0, q = dist(rng) * 3.0;
        return DiskIsometry{std::cosh(s) * std::polar(1.0, p), std::sinh(s) * std::polar(1.0, q)};
    };

    for (int i = 0; i < 50; ++i) {
        const DiskIsometry g = randomIsometry(), h = randomIsometry(), k = randomIsometry();
        CHECK(std::abs(g.determinantDefect()) < 1e-12);

        // Associativity of composition.
        const DiskIsometry lhs = (g * h) * k, rhs = g * (h * k);
        CHECK(std::abs(lhs.a - rhs.a) < 1e-12);
        CHECK(std::abs(lhs.b - rhs.b) < 1e-12);

        // Inverse is (conj(a), -b).
        const DiskIsometry gi = g * g.inverse();
        CHECK(std::abs(gi.signNormalized().a - 1.0) < 1e-12);
        CHECK(std::abs(gi.b) < 1e-12);

        // Action matches the matrix product.
        const Complex z(0.3 * dist(rng), 0.3 * dist(rng));
        CHECK(std::abs((g * h).apply(z) - g.apply(h.apply(z))) < 1e-12);
    }
}

TEST_CASE("isometries preserve hyperbolic distance") {
    const DiskIsometry h{std::cosh(0.7) * std::polar(1.0, 0.3),
                         std::sinh(0.7) * std::polar(1.0, -1.1)};
    CHECK(std::abs(h.determinantDefect()) < 1e-13);
    const Complex z(0.2, -0.5), w(-0.4, 0.1);
    CHECK(hypDistance(h.apply(z), h.apply(w)) == doctest::Approx(hypDistance(z, w)).epsilon(1e-12));
    CHECK(hypDistance0(h.apply(Complex(0, 0))) ==
          doctest::Approx(hypDistance(Complex(0, 0), h.apply(Complex(0, 0)))).epsilon(1e-12));
}
