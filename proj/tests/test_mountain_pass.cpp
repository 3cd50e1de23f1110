#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gaussray/mountain_pass.hpp"
#include "gaussray/quad_diff.hpp"

using namespace gaussray;

namespace {
constexpr double kPi = std::numbers::pi;

const BolzaDomain& domain() {
    static const BolzaDomain d = buildBolzaDomain();
    return d;
}

const SurfaceMesh& mesh2() {
    static const SurfaceMesh m = buildMesh(domain(), 2);
    return m;
}

double lowerRoot(double W) { return 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * W)); }
double upperRoot(double W) { return 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * W)); }
}  // namespace

TEST_CASE("truncated nonlinearities match the exact ones for s <= 0") {
    const SmoothedNonlinearity b(3.0);
    for (double s : {-5.0, -1.0, -0.25, 0.0}) {
        CHECK(b.F1(s) == doctest::Approx(s - 0.5 * std::exp(2 * s)).epsilon(1e-15));
        CHECK(b.f1(s) == doctest::Approx(1.0 - std::exp(2 * s)).epsilon(1e-15));
        CHECK(b.F2(s) == doctest::Approx(0.5 * (s * s + std::exp(-2 * s))).epsilon(1e-15));
        CHECK(b.f2(s) == doctest::Approx(s - std::exp(-2 * s)).epsilon(1e-15));
    }
    for (double s : {1.0, 1.5, 3.0}) {
        CHECK(b.F1(s) == doctest::Approx(-std::pow(s, 3.0)).epsilon(1e-15));
        CHECK(b.F2(s) == 0.0);
        CHECK(b.f2(s) == 0.0);
    }
}

TEST_CASE("sign conditions hold on a dense grid") {
    const SmoothedNonlinearity b(3.0);
    for (int i = 1; i <= 20000; ++i) {
        const double s = 3.0 * i / 20000.0;
        CHECK(b.f1(s) < 0.0);
    }
    for (int i = 0; i <= 20000; ++i) {
        const double s = -5.0 + 8.0 * i / 20000.0;
        CHECK(b.f2(s) <= 1e-15);
    }
}

TEST_CASE("bridge joins with two continuous derivatives") {
    const SmoothedNonlinearity b(3.0);
    const double h = 1e-6;
    for (double s0 : {0.0, 0.5, 1.0}) {
        // Value continuity.
        CHECK(b.F1(s0 - 1e-12) == doctest::Approx(b.F1(s0 + 1e-12)).epsilon(1e-9));
        CHECK(b.F2(s0 - 1e-12) == doctest::Approx(b.F2(s0 + 1e-12)).epsilon(1e-9));
        // First derivative continuity via f_i, second via finite differences.
        CHECK(b.f1(s0 - 1e-12) == doctest::Approx(b.f1(s0 + 1e-12)).epsilon(1e-9));
        const double left = (b.f1(s0) - b.f1(s0 - h)) / h;
        const double right = (b.f1(s0 + h) - b.f1(s0)) / h;
        CHECK(left == doctest::Approx(right).epsilon(1e-3));
    }
}

TEST_CASE("functional values at simple fields") {
    const SurfaceMesh& m = mesh2();
    const Vec ones = Vec::Ones(m.numCanonical());
    const double t = 0.4;  // V = 0.16
    const TruncatedFunctional tf(m, ones, t);

    // F(0) = 2 pi - (1/2) integral of V.
    const Vec zero = Vec::Zero(m.numCanonical());
    const double expected = 2.0 * kPi - 0.5 * 0.16 * 4.0 * kPi;
    CHECK(tf.value(zero) == doctest::Approx(expected).epsilon(1e-10));

    // F diverges to -infinity along negative constants.
    const double fm2 = tf.value(Vec::Constant(m.numCanonical(), -2.0));
    const double fm5 = tf.value(Vec::Constant(m.numCanonical(), -5.0));
    const double fm10 = tf.value(Vec::Constant(m.numCanonical(), -10.0));
    CHECK(fm10 < fm5);
    CHECK(fm5 < fm2);

    // Euclidean gradient at zero: -M (f1(0) + V f2(0)) = M V.
    const Vec g = tf.euclideanGradient(zero);
    const Vec expectedGrad = m.lumpedMass * 0.16;
    CHECK((g - expectedGrad).cwiseAbs().maxCoeff() < 1e-14);

    // Overflow clamp diagnostic.
    bool clamped = false;
    tf.value(Vec::Constant(m.numCanonical(), -400.0), &clamped);
    CHECK(clamped);
}

TEST_CASE("V-gradient is the Riesz representative") {
    const SurfaceMesh& m = mesh2();
    const Vec ones = Vec::Ones(m.numCanonical());
    const double t = 0.35;
    const TruncatedFunctional tf(m, ones, t);

    Vec u(m.numCanonical());
    for (int i = 0; i < m.numCanonical(); ++i) {
        const Complex z = m.canonicalPoint(i);
        u[i] = -0.4 + 0.15 * std::sin(3.0 * z.real()) * std::cos(2.0 * z.imag());
    }

    // Directional finite differences of F match <g, phi>_V.
    std::mt19937_64 rng(41);
    std::normal_distribution<double> n01(0.0, 1.0);
    const Vec g = tf.gradientV(u);
    const SpMat gram = m.stiffness;  // plus mass-V handled through vNorm identity below
    const double eps = 1e-5;
    for (int trial = 0; trial < 10; ++trial) {
        Vec phi(m.numCanonical());
        for (int i = 0; i < m.numCanonical(); ++i) phi[i] = n01(rng);
        const double fd = (tf.value(u + eps * phi) - tf.value(u - eps * phi)) / (2 * eps);
        const double vip = phi.dot(gram * g) +
                           phi.dot((m.lumpedMass.cwiseProduct(tf.V())).cwiseProduct(g));
        CHECK(fd == doctest::Approx(vip).epsilon(1e-6));
    }

    // For u <= 0 the V-gradient is the V-preconditioned Gauss residual.
    const Vec res = residualField(m, u, t, ones);
    const Vec viaResidual = -(m.lumpedMass.cwiseProduct(res));
    const Vec lhs = gram * g + (m.lumpedMass.cwiseProduct(tf.V())).cwiseProduct(g);
    CHECK((lhs - viaResidual).cwiseAbs().maxCoeff() < 1e-10);

    // Degenerate inner product at t = 0.
    CHECK_THROWS_AS(TruncatedFunctional(m, ones, 0.0).gradientV(u), std::invalid_argument);
}

TEST_CASE("gradient norm vanishes at critical points") {
    const SurfaceMesh& m = mesh2();
    const Vec ones = Vec::Ones(m.numCanonical());
    const double t = 0.4;
    const Solution s = newtonSolve(m, ones, Vec::Zero(m.numCanonical()), t);
    REQUIRE(s.converged);
    const TruncatedFunctional tf(m, ones, t);
    CHECK(tf.vNorm(tf.gradientV(s.u)) <= 1e-8);
}

TEST_CASE("mountain pass on the constant weight") {
    const SurfaceMesh& m = mesh2();
    const Vec ones = Vec::Ones(m.numCanonical());

    for (double t : {0.4, 0.49}) {
        const double W = t * t;
        const Solution stable = newtonSolve(m, ones, Vec::Zero(m.numCanonical()), t);
        REQUIRE(stable.converged);
        REQUIRE(stable.mu1 > 0);

        const Solution second = mountainPassSolve(stable, m, ones, t);
        CHECK(second.converged);
        CHECK(second.residualNorm <= 1e-10);
        const double expected = 0.5 * std::log(lowerRoot(W));
        CHECK((second.u - Vec::Constant(m.numCanonical(), expected)).lpNorm<Eigen::Infinity>() <
              1e-8);
        if (t == 0.4) CHECK(second.mu1 == doctest::Approx(-1.2).epsilon(1e-4));

        // Solution invariants: sign, integral identity, truncation inactive.
        CHECK(second.u.maxCoeff() <= -1e-10);
        CHECK(gaussIdentityDefect(m, second.u, t, ones) <= 1e-8);

        // Minimax level sits above the local minimum.
        const TruncatedFunctional tf(m, ones, t);
        CHECK(tf.value(second.u) >= tf.value(stable.u));
    }
}

TEST_CASE("path endpoints stay pinned") {
    const SurfaceMesh& m = mesh2();
    const Vec ones = Vec::Ones(m.numCanonical());
    const double t = 0.4;
    const Solution stable = newtonSolve(m, ones, Vec::Zero(m.numCanonical()), t);
    PathState path;
    (void)mountainPassSolve(stable, m, ones, t, {}, nullptr, &path);
    REQUIRE(path.nodes.size() >= 2);
    REQUIRE(path.energies.size() == path.nodes.size());
    const TruncatedFunctional tf(m, ones, t);
    CHECK((path.nodes.front() - stable.u).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(path.energies.back() < tf.value(stable.u) - 1.0);
    CHECK(path.maxIndex > 0);
    CHECK(path.maxIndex < static_cast<int>(path.nodes.size()) - 1);
}

TEST_CASE("mountain pass energies decrease monotonically along the trace") {
    const SurfaceMesh& m = mesh2();
    const Vec ones = Vec::Ones(m.numCanonical());
    const double t = 0.4;
    const Solution stable = newtonSolve(m, ones, Vec::Zero(m.numCanonical()), t);
    MinimaxTrace trace;
    (void)mountainPassSolve(stable, m, ones, t, {}, &trace);
    REQUIRE(trace.rows.size() > 1);
    // Nonincreasing up to the line-search and node-resampling tolerance: the
    // level may slosh within the sampling resolution but must not climb.
    const double first = trace.rows.front().maxEnergy;
    for (std::size_t i = 1; i < trace.rows.size(); ++i) {
        const double prev = trace.rows[i - 1].maxEnergy;
        CHECK(trace.rows[i].maxEnergy <= prev + 1e-2 * (1.0 + std::abs(prev)));
        CHECK(trace.rows[i].maxEnergy <= first + 1e-2 * (1.0 + std::abs(first)));
    }
}

TEST_CASE("no ridge beyond the fold") {
    const SurfaceMesh& m = mesh2();
    const Vec ones = Vec::Ones(m.numCanonical());
    // Fabricate an unstable "stable" input: the solver must reject it.
    Solution fake;
    fake.u = Vec::Constant(m.numCanonical(), 0.5 * std::log(upperRoot(0.16)));
    fake.t = 0.4;
    fake.converged = true;
    fake.mu1 = -1.0;
    CHECK_THROWS_AS(mountainPassSolve(fake, m, ones, 0.4), std::invalid_argument);
}
