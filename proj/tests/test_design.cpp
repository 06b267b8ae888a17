#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "toepsim/analytics.hpp"
#include "toepsim/channel.hpp"
#include "toepsim/design.hpp"
#include "toepsim/errors.hpp"
#include "toepsim/matrix.hpp"
#include "toepsim/rng.hpp"
#include "toepsim/toeplitz.hpp"

using namespace toepsim;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::vector<double> random_feasible(Rng& rng, size_t k) {
    std::vector<double> x(k);
    double total = 0.0;
    for (double& v : x) {
        v = rng.uniform() + 1e-12;
        total += v;
    }
    double budget = rng.uniform();
    for (double& v : x) v *= budget / total;
    return x;
}

double chernoff_product_objective(const std::vector<double>& lambdas,
                                  const std::vector<double>& x, double eps) {
    double det = 1.0;
    for (size_t i = 0; i < lambdas.size(); ++i) det *= 1.0 + eps * lambdas[i] * x[i];
    return 1.0 / det;
}

ComplexMatrix diagonal_covariance(const std::vector<double>& entries) {
    ComplexMatrix m(static_cast<int>(entries.size()), static_cast<int>(entries.size()));
    for (size_t i = 0; i < entries.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = entries[i];
    return m;
}

}  // namespace

TEST_CASE("beamformer method tokens round trip") {
    for (BeamformerMethod m :
         {BeamformerMethod::Identity, BeamformerMethod::Waterfill, BeamformerMethod::Exact}) {
        CHECK(beamformer_from_token(beamformer_token(m)) == m);
    }
    CHECK_THROWS_AS(beamformer_from_token("mrc"), ArgumentError);
}

TEST_CASE("objective with zero gains is exactly one half") {
    CHECK(g_objective({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0}, 1.5) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("single-mode objective matches the closed form") {
    for (double lambda : {0.3, 1.0, 4.0}) {
        for (double x : {0.1, 0.5, 1.0}) {
            for (double eps : {0.2, 1.0, 10.0}) {
                double c = eps * lambda * x;
                double expected = 0.5 * (1.0 - std::sqrt(c / (1.0 + c)));
                CHECK(g_objective({lambda}, {x}, eps) ==
                      doctest::Approx(expected).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("objective strictly decreases when any gain grows") {
    std::vector<double> lambdas = {2.0, 0.7};
    double base = g_objective(lambdas, {0.3, 0.3}, 1.0);
    CHECK(g_objective(lambdas, {0.4, 0.3}, 1.0) < base);
    CHECK(g_objective(lambdas, {0.3, 0.4}, 1.0) < base);
}

TEST_CASE("objective validates its arguments") {
    CHECK_THROWS_AS(g_objective({1.0}, {0.1, 0.2}, 1.0), ArgumentError);
    CHECK_THROWS_AS(g_objective({1.0}, {-0.1}, 1.0), ArgumentError);
    CHECK_THROWS_AS(g_objective({1.0}, {0.1}, 0.0), ArgumentError);
    CHECK_THROWS_AS(g_objective({}, {}, 1.0), ArgumentError);
}

TEST_CASE("analytic gradient agrees with central differences") {
    Rng rng(321);
    for (int trial = 0; trial < 10; ++trial) {
        size_t k = 2 + rng.next_u64() % 3;
        std::vector<double> lambdas(k), x(k);
        for (size_t i = 0; i < k; ++i) {
            lambdas[i] = 0.2 + 3.0 * rng.uniform();
            x[i] = 0.05 + 0.2 * rng.uniform();
        }
        double eps = 0.5 + 2.5 * rng.uniform();
        std::vector<double> grad = g_gradient(lambdas, x, eps);
        const double h = 1e-6;
        for (size_t i = 0; i < k; ++i) {
            std::vector<double> hi(x), lo(x);
            hi[i] += h;
            lo[i] -= h;
            double numeric = (g_objective(lambdas, hi, eps) - g_objective(lambdas, lo, eps)) /
                             (2.0 * h);
            CHECK(grad[i] == doctest::Approx(numeric).epsilon(1e-6));
            CHECK(grad[i] < 0.0);
        }
    }
}

TEST_CASE("objective is convex along random chords") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        size_t k = 2 + rng.next_u64() % 3;
        std::vector<double> lambdas(k);
        for (double& l : lambdas) l = 0.1 + 4.0 * rng.uniform();
        double eps = 0.2 + 5.0 * rng.uniform();
        std::vector<double> a = random_feasible(rng, k);
        std::vector<double> b = random_feasible(rng, k);
        std::vector<double> mid(k);
        for (size_t i = 0; i < k; ++i) mid[i] = 0.5 * (a[i] + b[i]);
        double lhs = g_objective(lambdas, mid, eps);
        double rhs = 0.5 * (g_objective(lambdas, a, eps) + g_objective(lambdas, b, eps));
        CHECK(lhs <= rhs + 1e-12);
    }
}

TEST_CASE("white covariance splits the exact design evenly") {
    for (int m : {2, 4}) {
        BeamformerDesign d = optimize_exact(ComplexMatrix::identity(m), 2.0, 0.5);
        CHECK(d.k == m);
        CHECK(d.method == BeamformerMethod::Exact);
        double power = 0.0;
        for (double gamma : d.gammas) {
            CHECK(gamma == doctest::Approx(1.0 / std::sqrt(double(m))).epsilon(1e-4));
            power += gamma * gamma;
        }
        CHECK(power == doctest::Approx(1.0).epsilon(1e-9));
        // Rows of B are orthogonal with squared norms gamma_k^2.
        ComplexMatrix bbh = matmul(d.b, adjoint(d.b));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                double expected = i == j ? 1.0 / m : 0.0;
                CHECK(std::abs(bbh(i, j) - cplx(expected, 0.0)) < 1e-6);
            }
        }
    }
}

TEST_CASE("exact design dominates water-filling and uniform allocations") {
    ComplexMatrix sigma = correlation_broadside(4, 0.5, 5.0 * kDeg);
    for (double sigma2 : {0.05, 0.2, 1.0}) {
        BeamformerDesign exact = optimize_exact(sigma, 2.0, sigma2);
        BeamformerDesign water = optimize_waterfill(sigma, 2.0, sigma2);
        CHECK(exact.objective_value <= water.objective_value + 1e-10);

        EigResult eig = hermitian_eig(sigma);
        std::vector<double> uniform(eig.values.size(), 1.0 / eig.values.size());
        double eps = 4.0 / (8.0 * sigma2);
        double uniform_value = g_objective(eig.values, uniform, eps);
        CHECK(exact.objective_value <= uniform_value + 1e-10);
    }
}

TEST_CASE("exact design satisfies the stationarity conditions") {
    ComplexMatrix sigma = diagonal_covariance({2.5, 1.2, 0.6, 0.1});
    std::vector<double> lambdas = {2.5, 1.2, 0.6, 0.1};
    for (double sigma2 : {0.2, 1.0}) {
        BeamformerDesign d = optimize_exact(sigma, 2.0, sigma2);
        double eps = 4.0 / (8.0 * sigma2);
        // Rebuild the full allocation: B rows point along coordinate axes
        // because the covariance is diagonal.
        std::vector<double> x(4, 0.0);
        for (int r = 0; r < d.k; ++r) {
            int mode = 0;
            double best = -1.0;
            for (int col = 0; col < 4; ++col) {
                if (std::abs(d.b(r, col)) > best) {
                    best = std::abs(d.b(r, col));
                    mode = col;
                }
            }
            x[mode] = d.gammas[r] * d.gammas[r];
        }
        std::vector<double> grad = g_gradient(lambdas, x, eps);
        double active_value = 0.0;
        int active_count = 0;
        for (size_t i = 0; i < 4; ++i) {
            if (x[i] > 1e-8) {
                active_value += grad[i];
                ++active_count;
            }
        }
        active_value /= active_count;
        for (size_t i = 0; i < 4; ++i) {
            if (x[i] > 1e-8) {
                CHECK(std::abs(grad[i] - active_value) < 1e-6);
            } else {
                CHECK(grad[i] >= active_value - 1e-8);
            }
        }
    }
}

TEST_CASE("strong correlation concentrates the design at low snr") {
    ComplexMatrix sigma = correlation_broadside(4, 0.5, 5.0 * kDeg);
    BeamformerDesign low_snr = optimize_exact(sigma, 2.0, 0.4);
    CHECK(low_snr.k == 1);
    CHECK(low_snr.gammas[0] == doctest::Approx(1.0).epsilon(1e-6));
    BeamformerDesign high_snr = optimize_exact(sigma, 2.0, 0.1);
    CHECK(high_snr.k == 2);
}

TEST_CASE("optimized worst-case objective equals the pairwise error integral") {
    ComplexMatrix sigma = correlation_broadside(4, 0.5, 5.0 * kDeg);
    for (double sigma2 : {0.4, 0.1}) {
        BeamformerDesign d = optimize_exact(sigma, 2.0, sigma2);
        ToeplitzCode code(4, d.k, 3, d.b);
        cvec e(3, cplx(0.0, 0.0));
        e[0] = cplx(2.0, 0.0);  // minimum-distance 4-QAM difference
        double pep = pep_exact(code, sigma, e, sigma2);
        CHECK(pep == doctest::Approx(d.objective_value).epsilon(1e-9));
    }
}

TEST_CASE("white covariance water-fills evenly") {
    for (int m : {2, 4, 8}) {
        BeamformerDesign d = optimize_waterfill(ComplexMatrix::identity(m), 2.0, 0.7);
        CHECK(d.k == m);
        CHECK(d.method == BeamformerMethod::Waterfill);
        for (double gamma : d.gammas) {
            CHECK(gamma == doctest::Approx(1.0 / std::sqrt(double(m))).epsilon(1e-12));
        }
    }
}

TEST_CASE("water-filling drops weak modes in heavy noise") {
    ComplexMatrix sigma = diagonal_covariance({1.0, 0.01});
    BeamformerDesign d = optimize_waterfill(sigma, 2.0, 1.0);
    CHECK(d.k == 1);
    CHECK(d.gammas[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("water-filling spends the power budget exactly") {
    Rng rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
        int m = 2 + static_cast<int>(rng.next_u64() % 5);
        std::vector<double> entries(m);
        for (double& v : entries) v = 0.05 + 3.0 * rng.uniform();
        double sigma2 = 0.05 + rng.uniform();
        BeamformerDesign d = optimize_waterfill(diagonal_covariance(entries), 2.0, sigma2);
        double power = 0.0;
        for (double gamma : d.gammas) power += gamma * gamma;
        CHECK(power == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("water-filling excludes zero covariance modes") {
    ComplexMatrix sigma = diagonal_covariance({1.0, 0.5, 0.0});
    BeamformerDesign d = optimize_waterfill(sigma, 2.0, 0.01);
    CHECK(d.k == 2);
    CHECK(d.b.rows() == 2);
    CHECK(d.b.cols() == 3);
}

TEST_CASE("water-filling minimizes the product relaxation") {
    Rng rng(777);
    std::vector<double> lambdas = {3.0, 1.1, 0.4, 0.15};
    double sigma2 = 0.15;
    double eps = 4.0 / (8.0 * sigma2);
    BeamformerDesign d = optimize_waterfill(diagonal_covariance(lambdas), 2.0, sigma2);
    std::vector<double> x_opt(lambdas.size(), 0.0);
    for (int r = 0; r < d.k; ++r) x_opt[r] = d.gammas[r] * d.gammas[r];
    double best = chernoff_product_objective(lambdas, x_opt, eps);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x = random_feasible(rng, lambdas.size());
        CHECK(best <= chernoff_product_objective(lambdas, x, eps) + 1e-12);
    }
}

TEST_CASE("identity benchmark produces the padded scaled identity") {
    BeamformerDesign full = identity_beamformer(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            double expected = i == j ? 0.5 : 0.0;
            CHECK(std::abs(full.b(i, j) - cplx(expected, 0.0)) < 1e-15);
        }
    }
    BeamformerDesign rate_matched = identity_beamformer(4, 2);
    CHECK(rate_matched.b.rows() == 2);
    CHECK(rate_matched.b.cols() == 4);
    CHECK(std::abs(rate_matched.b(0, 0) - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(rate_matched.b(1, 2)) < 1e-15);
    double power = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 4; ++j) power += std::norm(rate_matched.b(i, j));
    }
    CHECK(power == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isnan(rate_matched.objective_value));
    CHECK_THROWS_AS(identity_beamformer(2, 3), ArgumentError);
}

TEST_CASE("scaled unitary maximizes the high-snr determinant criterion") {
    Rng rng(2718);
    cvec e = {cplx(2.0, 0.0), cplx(0.0, -2.0), cplx(2.0, 2.0)};
    ComplexMatrix t = toeplitz_matrix(e, 2);
    ComplexMatrix d = gram(t);
    ComplexMatrix scaled_identity(2, 2);
    scaled_identity(0, 0) = 1.0 / std::sqrt(2.0);
    scaled_identity(1, 1) = 1.0 / std::sqrt(2.0);
    double best = psd_det(matmul(adjoint(scaled_identity), matmul(d, scaled_identity)));
    for (int trial = 0; trial < 200; ++trial) {
        ComplexMatrix b(2, 2);
        double power = 0.0;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                b(i, j) = rng.standard_complex_gaussian();
                power += std::norm(b(i, j));
            }
        }
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) b(i, j) /= std::sqrt(power);
        }
        double sampled = psd_det(matmul(adjoint(b), matmul(d, b)));
        CHECK(sampled <= best + 1e-12);
    }
}

TEST_CASE("design entry points validate their inputs") {
    ComplexMatrix sigma = ComplexMatrix::identity(2);
    CHECK_THROWS_AS(optimize_exact(sigma, 0.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(optimize_exact(sigma, 2.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(optimize_waterfill(sigma, -1.0, 1.0), ArgumentError);
    ComplexMatrix zero(2, 2);
    CHECK_THROWS_AS(optimize_exact(zero, 2.0, 1.0), ArgumentError);
}
