#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "bhmf/gibbs.hpp"
#include "test_helpers.hpp"

using namespace bhmf;

namespace {

// independent scalar-summation oracle for diagonal K(0)
double scalar_log_partition(double beta, double mu, double lambda, int terms) {
    std::vector<double> diag(terms);
    for (int n = 0; n < terms; ++n)
        diag[n] = (mu + lambda - 1.0) * n - lambda * static_cast<double>(n) * n;
    return log_sum_exp(diag, beta);
}

double scalar_occupation(double beta, double mu, double lambda, int terms) {
    double z = 0.0, zn = 0.0;
    for (int n = 0; n < terms; ++n) {
        const double w = std::exp(beta * ((mu + lambda - 1.0) * n - lambda * static_cast<double>(n) * n));
        z += w;
        zn += n * w;
    }
    return zn / z;
}

DensityMatrix as_density(const Matrix& m) { return DensityMatrix{m}; }

}  // namespace

TEST_CASE("free-gas pressure matches the geometric series") {
    // Tr e^{beta K(0)} = 1 / (1 - e^{beta(mu-1)}) for lambda = 0, mu < 1
    ModelParams a{1.0, -1.0, 0.0, {}};
    REQUIRE(pressure_tilde(a, 0.0) == Catch::Approx(-std::log1p(-std::exp(-2.0))).margin(1e-10));
    REQUIRE(pressure_tilde(a, 0.0) == Catch::Approx(0.14541345786885906).margin(1e-10));

    ModelParams b{2.0, 0.5, 0.0, {}};
    REQUIRE(pressure_tilde(b, 0.0) == Catch::Approx(-0.5 * std::log1p(-std::exp(-1.0))).margin(1e-10));
    REQUIRE(pressure_tilde(b, 0.0) == Catch::Approx(0.22933757269354095).margin(1e-10));

    REQUIRE_THROWS_AS(pressure_tilde(b, 0.5), domain_error);
    REQUIRE_THROWS_AS(pressure_tilde({1.0, 1.5, 0.0, {}}, 0.0), domain_error);
}

TEST_CASE("diagonal K(0) agrees with direct scalar summation") {
    ModelParams p{1.0, 0.0, 1.0, {}};
    const double direct = scalar_log_partition(1.0, 0.0, 1.0, 200);
    REQUIRE(pressure_tilde(p, 0.0) == Catch::Approx(direct).margin(1e-10));
}

TEST_CASE("zero-temperature limit concentrates all weight on the ground sector") {
    ModelParams p{500.0, 0.5, 1.0, {}};
    const GibbsState g = gibbs_state(p, 0.0);
    REQUIRE(g.weights.back() == 1.0);
}

TEST_CASE("gibbs weights follow e^{beta K_nn} for diagonal K") {
    ModelParams p{1.0, 0.0, 1.0, 16};
    const GibbsState g = gibbs_state(p, 0.0);
    // diagonal entries -n^2 sorted ascending put occupation n at slot dim-1-n
    const int dim = g.cutoff + 1;
    for (int n = 0; n + 1 < 5; ++n) {
        const double ratio = g.weights[dim - 1 - (n + 1)] / g.weights[dim - 1 - n];
        const double expected = std::exp(-(2.0 * n + 1.0));  // e^{-(n+1)^2} / e^{-n^2}
        REQUIRE(ratio == Catch::Approx(expected).epsilon(1e-12));
    }

    // at mu = 1 the levels n = 0, 1 are exactly degenerate
    ModelParams degen{1.0, 1.0, 1.0, 16};
    const GibbsState gd = gibbs_state(degen, 0.0);
    const int d = gd.cutoff + 1;
    REQUIRE(gd.weights[d - 1] == Catch::Approx(gd.weights[d - 2]).epsilon(1e-13));
}

TEST_CASE("weights always sum to one") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> beta_d(0.2, 5.0), mu_d(-2.0, 2.0), lam_d(0.2, 5.0),
        r_d(0.0, 3.0);
    for (int rep = 0; rep < 10; ++rep) {
        ModelParams p{beta_d(rng), mu_d(rng), lam_d(rng), {}};
        const GibbsState g = gibbs_state(p, r_d(rng));
        double sum = 0.0;
        for (double w : g.weights) sum += w;
        REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(g.log_partition >= p.beta * g.decomposition.eigenvalues.back());
        REQUIRE(g.log_partition <=
                p.beta * g.decomposition.eigenvalues.back() + std::log(g.cutoff + 1.0));
    }
}

TEST_CASE("expectation basics") {
    ModelParams p{1.0, 0.0, 1.0, 8};
    const GibbsState g = gibbs_state(p, 0.0);
    const FockOperators ops = build_fock_operators(8);

    REQUIRE(expectation(g, Matrix::identity(9)) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(expectation(g, ops.quad) == 0.0);  // gauge symmetry: K(0) is diagonal

    const double direct = scalar_occupation(1.0, 0.0, 1.0, 9);
    REQUIRE(expectation(g, ops.number) == Catch::Approx(direct).margin(1e-12));
    REQUIRE(expectation(g, ops.number) == Catch::Approx(0.29205508594235593).margin(1e-9));

    // fast paths agree with the generic contraction
    REQUIRE(occupation_mean(g) == Catch::Approx(expectation(g, ops.number)).margin(1e-13));
    REQUIRE(occupation_sq_mean(g) == Catch::Approx(expectation(g, ops.number_sq)).margin(1e-13));
    const GibbsState gr = gibbs_state({1.0, 0.0, 1.0, 8}, 0.8);
    REQUIRE(quad_expectation(gr, ops) == Catch::Approx(expectation(gr, ops.quad)).margin(1e-13));

    REQUIRE_THROWS_AS(expectation(g, Matrix::identity(5)), domain_error);
}

TEST_CASE("relative entropy: identity, disjoint support, classical KL") {
    Matrix half(2, 2), skew(2, 2);
    half(0, 0) = 0.5;
    half(1, 1) = 0.5;
    skew(0, 0) = 0.75;
    skew(1, 1) = 0.25;
    REQUIRE(relative_entropy(as_density(half), as_density(half)) == 0.0);

    Matrix e0(2, 2), e1(2, 2);
    e0(0, 0) = 1.0;
    e1(1, 1) = 1.0;
    REQUIRE(std::isinf(relative_entropy(as_density(e0), as_density(e1))));

    const double kl = 0.5 * std::log(2.0 / 3.0) + 0.5 * std::log(2.0);
    REQUIRE(relative_entropy(as_density(half), as_density(skew)) == Catch::Approx(kl).margin(1e-12));
    REQUIRE(relative_entropy(as_density(half), as_density(skew)) ==
            Catch::Approx(0.14384103622589046).margin(1e-12));

    REQUIRE_THROWS_AS(relative_entropy(as_density(half), as_density(e0 = Matrix(3, 3))), domain_error);
}

TEST_CASE("relative entropy is nonnegative and zero only for equal states") {
    std::mt19937 rng(21);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 5);
        const Matrix phi = bhmf_test::random_density(n, rng);
        const Matrix omega = bhmf_test::random_density(n, rng);
        const double s = relative_entropy(as_density(phi), as_density(omega));
        REQUIRE(s >= 0.0);
        if (s == 0.0) REQUIRE(max_abs(phi - omega) <= 1e-10);
    }
}

TEST_CASE("joint convexity and the almost-affinity lower bound") {
    std::mt19937 rng(22);
    std::uniform_real_distribution<double> mix(0.05, 0.95);
    for (int rep = 0; rep < 15; ++rep) {
        const int n = 3 + static_cast<int>(rng() % 3);
        const Matrix phi1 = bhmf_test::random_density(n, rng);
        const Matrix phi2 = bhmf_test::random_density(n, rng);
        const Matrix omega = bhmf_test::random_density(n, rng);
        const double t = mix(rng);

        Matrix blend(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) blend(i, j) = t * phi1(i, j) + (1.0 - t) * phi2(i, j);

        const double s_blend = relative_entropy(as_density(blend), as_density(omega));
        const double s1 = relative_entropy(as_density(phi1), as_density(omega));
        const double s2 = relative_entropy(as_density(phi2), as_density(omega));

        REQUIRE(s_blend <= t * s1 + (1.0 - t) * s2 + 1e-10);
        REQUIRE(s_blend >=
                t * s1 + (1.0 - t) * s2 + t * std::log(t) + (1.0 - t) * std::log1p(-t) - 1e-10);
    }
}

TEST_CASE("relative entropy is additive on tensor products") {
    std::mt19937 rng(23);
    for (int rep = 0; rep < 8; ++rep) {
        const int n1 = 2 + static_cast<int>(rng() % 5);
        const int n2 = 2 + static_cast<int>(rng() % 5);
        const Matrix phi1 = bhmf_test::random_density(n1, rng);
        const Matrix phi2 = bhmf_test::random_density(n2, rng);
        const Matrix om1 = bhmf_test::random_density(n1, rng);
        const Matrix om2 = bhmf_test::random_density(n2, rng);

        const double joint =
            relative_entropy(as_density(kron(phi1, phi2)), as_density(kron(om1, om2)));
        const double split = relative_entropy(as_density(phi1), as_density(om1)) +
                             relative_entropy(as_density(phi2), as_density(om2));
        REQUIRE(joint == Catch::Approx(split).margin(1e-9));
    }
}

TEST_CASE("Gibbs-level relative entropy matches the matrix route on mild states") {
    // moderate beta keeps every weight well above matrix-assembly noise
    ModelParams p{0.4, 0.3, 0.6, 6};
    const GibbsState phi = gibbs_state(p, 0.9);
    const GibbsState omega = gibbs_state(p, 0.0);
    const double via_gibbs = relative_entropy(phi, omega);
    const double via_matrix = relative_entropy(density_matrix(phi), density_matrix(omega));
    REQUIRE(via_gibbs == Catch::Approx(via_matrix).margin(1e-10));
    REQUIRE(via_gibbs > 0.0);
}

TEST_CASE("variational lower bound never exceeds the relative entropy") {
    // beta phi(A) - ln Tr e^{beta(K0 + A)} + ln Tr e^{beta K0} <= S(phi || omega)
    std::mt19937 rng(31);
    const int dim = 7;
    ModelParams p{0.5, 0.3, 0.5, dim - 1};
    const GibbsState ref = gibbs_state(p, 0.0);
    const DensityMatrix omega = density_matrix(ref);
    const FockOperators ops = build_fock_operators(dim - 1);
    const Matrix k0 = build_k(p, ops, 0.0);

    for (int rep = 0; rep < 30; ++rep) {
        Matrix a = bhmf_test::random_symmetric(dim, rng);
        const double norm = std::sqrt(frobenius_norm(a));
        for (double& v : a.data()) v *= 3.0 / std::max(1.0, norm);

        const Matrix phi = bhmf_test::random_density(dim, rng);

        double phi_a = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) phi_a += phi(i, j) * a(j, i);

        const auto eig = eig_symmetric(k0 + a);
        const double log_z_a = log_sum_exp(eig.eigenvalues, p.beta);
        const double lower = p.beta * phi_a - log_z_a + ref.log_partition;
        const double s = relative_entropy(as_density(phi), omega);
        REQUIRE(lower <= s + 1e-9);
    }
}

TEST_CASE("Feynman-Hellmann: dp~/dr equals the quad expectation") {
    const double h = 1e-4;
    for (auto [beta, mu, lambda, r] : {std::tuple{1.0, 0.5, 1.0, 0.7}, std::tuple{2.0, -0.5, 2.0, 1.5},
                                       std::tuple{0.5, 1.2, 0.7, 0.2}}) {
        ModelParams p{beta, mu, lambda, {}};
        const GibbsState g = gibbs_state(p, r);
        const double lhs = (pressure_tilde(p, r + h) - pressure_tilde(p, r - h)) / (2.0 * h);
        const double rhs = quad_expectation(g, build_fock_operators(g.cutoff));
        REQUIRE(lhs == Catch::Approx(rhs).margin(1e-6));
    }
}

TEST_CASE("entropy identity residual vanishes") {
    ModelParams a{1.0, 0.5, 1.0, {}};
    REQUIRE(entropy_identity_residual(a, {0.0, 0.0}) == 0.0);
    REQUIRE(entropy_identity_residual(a, {0.7, 0.0}) < 1e-9);

    ModelParams b{0.5, -0.3, 2.0, {}};
    REQUIRE(entropy_identity_residual(b, {1.3, 0.0}) < 1e-9);

    // gauge rotation: only |nu| matters
    const double rotated = entropy_identity_residual(a, {0.42, -0.56});
    const double straight = entropy_identity_residual(a, {0.7, 0.0});
    REQUIRE(rotated == Catch::Approx(straight).margin(1e-12));

    REQUIRE_THROWS_AS(entropy_identity_residual({1.0, -1.0, 0.0, {}}, {0.5, 0.0}), domain_error);
}

TEST_CASE("density matrices from Gibbs states are unit-trace and PSD") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> beta_d(0.2, 3.0), mu_d(-2.0, 2.0), lam_d(0.2, 4.0),
        r_d(0.0, 2.0);
    for (int rep = 0; rep < 6; ++rep) {
        ModelParams p{beta_d(rng), mu_d(rng), lam_d(rng), {}};
        const DensityMatrix rho = density_matrix(gibbs_state(p, r_d(rng)));
        REQUIRE(trace(rho.matrix) == Catch::Approx(1.0).margin(1e-12));
        const auto eig = eig_symmetric(rho.matrix);
        REQUIRE(eig.eigenvalues.front() >= -1e-12);
    }
}
