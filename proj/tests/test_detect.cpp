#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "toepsim/channel.hpp"
#include "toepsim/constellation.hpp"
#include "toepsim/detect.hpp"
#include "toepsim/errors.hpp"
#include "toepsim/matrix.hpp"
#include "toepsim/rng.hpp"
#include "toepsim/toeplitz.hpp"

using namespace toepsim;

namespace {

ComplexMatrix random_matrix(Rng& rng, int rows, int cols) {
    ComplexMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) m(i, j) = rng.standard_complex_gaussian();
    }
    return m;
}

cvec random_symbols(Rng& rng, const Constellation& c, int count, std::vector<int>* indices) {
    cvec s(count);
    for (int i = 0; i < count; ++i) {
        int idx = static_cast<int>(rng.next_u64() % c.points.size());
        if (indices != nullptr) (*indices)[i] = idx;
        s[i] = c.points[idx];
    }
    return s;
}

cvec add_noise(Rng& rng, const cvec& clean, double sigma2) {
    cvec y(clean);
    const double scale = std::sqrt(sigma2);
    for (cplx& v : y) v += scale * rng.standard_complex_gaussian();
    return y;
}

// Least squares through the normal equations, inverted by eigendecomposition;
// slow but an independent path from the QR solver.
cvec normal_equation_solve(const ComplexMatrix& h, const cvec& y) {
    ComplexMatrix g = gram(h);
    EigResult eig = hermitian_eig(g);
    cvec hy = matvec(adjoint(h), y);
    const int l = h.cols();
    cvec coeffs(l, cplx(0.0, 0.0));
    for (int k = 0; k < l; ++k) {
        cplx dot(0.0, 0.0);
        for (int i = 0; i < l; ++i) dot += std::conj(eig.vectors(i, k)) * hy[i];
        coeffs[k] = dot / eig.values[k];
    }
    cvec x(l, cplx(0.0, 0.0));
    for (int i = 0; i < l; ++i) {
        for (int k = 0; k < l; ++k) x[i] += eig.vectors(i, k) * coeffs[k];
    }
    return x;
}

ComplexMatrix banded_channel(Rng& rng, int k, int l) {
    cvec taps(k);
    for (int d = 0; d < k; ++d) taps[d] = rng.standard_complex_gaussian();
    return toeplitz_matrix(taps, l);
}

}  // namespace

TEST_CASE("all detectors recover the sent block without noise") {
    Rng rng(811);
    for (Scheme scheme : {Scheme::Qam, Scheme::Pam, Scheme::Psk}) {
        Constellation c = make_constellation(scheme, scheme == Scheme::Qam ? 16 : 8);
        for (int trial = 0; trial < 25; ++trial) {
            const int l = 4;
            const int k = 3;
            ComplexMatrix h = banded_channel(rng, k, l);
            std::vector<int> sent(l);
            cvec s = random_symbols(rng, c, l, &sent);
            cvec y = matvec(h, s);
            DetectionProblem p(h, y, 0.0, &c);
            CHECK(zf_detect(p).indices == sent);
            CHECK(mmse_detect(p).indices == sent);
            CHECK(zf_dfe_detect(p).indices == sent);
            CHECK(ml_detect_viterbi(p, k).indices == sent);
            if (c.mu == 8 ? l <= 6 : true) CHECK(ml_detect_exhaustive(p).indices == sent);
        }
    }
}

TEST_CASE("zero forcing equals the normal-equation least squares solution") {
    Rng rng(9120);
    Constellation c = make_constellation(Scheme::Qam, 4);
    for (int trial = 0; trial < 40; ++trial) {
        int l = 1 + static_cast<int>(rng.next_u64() % 5);
        int n = l + static_cast<int>(rng.next_u64() % 4);
        ComplexMatrix h = random_matrix(rng, n, l);
        cvec y(n);
        for (cplx& v : y) v = rng.standard_complex_gaussian();
        DetectionProblem p(h, y, 0.0, &c);
        cvec raw = zf_detect(p).raw;
        cvec oracle = normal_equation_solve(h, y);
        for (int i = 0; i < l; ++i) CHECK(std::abs(raw[i] - oracle[i]) < 1e-9);
    }
}

TEST_CASE("hand-worked overdetermined system yields the known estimate") {
    // H = [[1,0],[1,1],[0,1]], y = [1,2,1]: H^H H = [[2,1],[1,2]],
    // H^H y = [3,3], so the least squares solution is exactly [1,1].
    Constellation c = make_constellation(Scheme::Qam, 4);
    ComplexMatrix h(3, 2);
    h(0, 0) = 1.0;
    h(1, 0) = 1.0;
    h(1, 1) = 1.0;
    h(2, 1) = 1.0;
    cvec y = {cplx(1.0, 0.0), cplx(2.0, 0.0), cplx(1.0, 0.0)};
    DetectionProblem p(h, y, 0.0, &c);
    Detection d = zf_detect(p);
    CHECK(std::abs(d.raw[0] - cplx(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(d.raw[1] - cplx(1.0, 0.0)) < 1e-12);
    CHECK(d.symbols[0] == c.points[d.indices[0]]);
}

TEST_CASE("mmse approaches zero forcing as the noise vanishes") {
    Rng rng(77);
    Constellation c = make_constellation(Scheme::Qam, 16);
    ComplexMatrix h = random_matrix(rng, 6, 4);
    cvec y(6);
    for (cplx& v : y) v = rng.standard_complex_gaussian();
    cvec zf_raw = zf_detect(DetectionProblem(h, y, 0.0, &c)).raw;
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double sigma2 : {1e-2, 1e-4, 1e-6, 1e-8}) {
        cvec mmse_raw = mmse_detect(DetectionProblem(h, y, sigma2, &c)).raw;
        double gap = 0.0;
        for (size_t i = 0; i < mmse_raw.size(); ++i) {
            gap = std::max(gap, std::abs(mmse_raw[i] - zf_raw[i]));
        }
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-6);
}

TEST_CASE("mmse shrinks the estimate norm relative to zero forcing") {
    Rng rng(78);
    Constellation c = make_constellation(Scheme::Qam, 4);
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix h = random_matrix(rng, 5, 3);
        cvec y(5);
        for (cplx& v : y) v = rng.standard_complex_gaussian();
        cvec zf_raw = zf_detect(DetectionProblem(h, y, 0.0, &c)).raw;
        cvec mmse_raw = mmse_detect(DetectionProblem(h, y, 0.5, &c)).raw;
        double zf_norm = 0.0;
        double mmse_norm = 0.0;
        for (size_t i = 0; i < zf_raw.size(); ++i) {
            zf_norm += std::norm(zf_raw[i]);
            mmse_norm += std::norm(mmse_raw[i]);
        }
        CHECK(mmse_norm <= zf_norm + 1e-12);
    }
}

TEST_CASE("mmse handles a rank-deficient channel that breaks zero forcing") {
    Constellation c = make_constellation(Scheme::Qam, 4);
    ComplexMatrix h(3, 2);
    h(0, 0) = 1.0;
    h(0, 1) = 1.0;
    h(1, 0) = 1.0;
    h(1, 1) = 1.0;
    h(2, 0) = 1.0;
    h(2, 1) = 1.0;
    cvec y = {cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0)};
    CHECK_THROWS_AS(zf_detect(DetectionProblem(h, y, 0.0, &c)), SingularChannelError);
    CHECK_THROWS_AS(zf_dfe_detect(DetectionProblem(h, y, 0.0, &c)), SingularChannelError);
    CHECK_THROWS_AS(zf_noise_gains(DetectionProblem(h, y, 0.0, &c)), SingularChannelError);
    CHECK_NOTHROW(mmse_detect(DetectionProblem(h, y, 0.1, &c)));
}

TEST_CASE("decision feedback equals plain slicing for a single symbol") {
    Rng rng(31);
    Constellation c = make_constellation(Scheme::Psk, 8);
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix h = random_matrix(rng, 4, 1);
        cvec y(4);
        for (cplx& v : y) v = rng.standard_complex_gaussian();
        DetectionProblem p(h, y, 0.0, &c);
        CHECK(zf_dfe_detect(p).indices == zf_detect(p).indices);
    }
}

TEST_CASE("decision feedback never does worse than zero forcing without noise") {
    // With y = H s exactly, both must be perfect; checked jointly above. Here
    // verify the feedback path really differs from plain ZF under noise at
    // least once (so the test is not vacuous) while staying a valid labelling.
    Rng rng(32);
    Constellation c = make_constellation(Scheme::Qam, 16);
    int differ = 0;
    for (int trial = 0; trial < 60; ++trial) {
        ComplexMatrix h = banded_channel(rng, 3, 5);
        std::vector<int> sent(5);
        cvec s = random_symbols(rng, c, 5, &sent);
        cvec y = add_noise(rng, matvec(h, s), 1.5);
        DetectionProblem p(h, y, 1.5, &c);
        Detection a = zf_detect(p);
        Detection b = zf_dfe_detect(p);
        if (a.indices != b.indices) ++differ;
        for (int idx : b.indices) {
            CHECK(idx >= 0);
            CHECK(idx < c.mu);
        }
    }
    CHECK(differ > 0);
}

TEST_CASE("trellis search matches exhaustive maximum likelihood") {
    Rng rng(5150);
    struct Shape {
        int taps;
        int l;
        int mu;
        Scheme scheme;
    };
    for (Shape shape : {Shape{2, 4, 4, Scheme::Qam}, Shape{3, 3, 4, Scheme::Qam},
                        Shape{1, 5, 8, Scheme::Psk}, Shape{2, 5, 2, Scheme::Pam},
                        Shape{4, 4, 2, Scheme::Pam}}) {
        Constellation c = make_constellation(shape.scheme, shape.mu);
        for (int trial = 0; trial < 60; ++trial) {
            ComplexMatrix h = banded_channel(rng, shape.taps, shape.l);
            std::vector<int> sent(shape.l);
            cvec s = random_symbols(rng, c, shape.l, &sent);
            // Heavy noise so ML genuinely has to arbitrate between candidates.
            cvec y = add_noise(rng, matvec(h, s), 2.0);
            DetectionProblem p(h, y, 2.0, &c);
            Detection via_trellis = ml_detect_viterbi(p, shape.taps);
            Detection via_search = ml_detect_exhaustive(p);
            CHECK(via_trellis.indices == via_search.indices);
        }
    }
}

TEST_CASE("trellis search beats linear detection on a deep fade") {
    // Construct a channel whose Gram matrix is nearly singular; ZF noise
    // amplification then causes errors that the exact search avoids.
    Rng rng(616);
    Constellation c = make_constellation(Scheme::Qam, 4);
    cvec taps = {cplx(1.0, 0.0), cplx(-0.999, 0.0)};
    ComplexMatrix h = toeplitz_matrix(taps, 6);
    int zf_symbol_errors = 0;
    int ml_symbol_errors = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> sent(6);
        cvec s = random_symbols(rng, c, 6, &sent);
        cvec y = add_noise(rng, matvec(h, s), 0.4);
        DetectionProblem p(h, y, 0.4, &c);
        Detection zf = zf_detect(p);
        Detection ml = ml_detect_viterbi(p, 2);
        for (int i = 0; i < 6; ++i) {
            if (zf.indices[i] != sent[i]) ++zf_symbol_errors;
            if (ml.indices[i] != sent[i]) ++ml_symbol_errors;
        }
    }
    CHECK(ml_symbol_errors < zf_symbol_errors);
}

TEST_CASE("exact metric ties resolve to the lexicographically smallest block") {
    Constellation c = make_constellation(Scheme::Qam, 4);
    SUBCASE("single tap, zero received block ties every sequence") {
        cvec taps = {cplx(1.0, 0.0)};
        ComplexMatrix h = toeplitz_matrix(taps, 3);
        cvec y(3, cplx(0.0, 0.0));
        DetectionProblem p(h, y, 0.0, &c);
        std::vector<int> zeros(3, 0);
        CHECK(ml_detect_exhaustive(p).indices == zeros);
        CHECK(ml_detect_viterbi(p, 1).indices == zeros);
    }
    SUBCASE("explicit zero tap keeps the tie across merging trellis paths") {
        cvec taps = {cplx(1.0, 0.0), cplx(0.0, 0.0)};
        ComplexMatrix h = toeplitz_matrix(taps, 3);
        cvec y(4, cplx(0.0, 0.0));
        DetectionProblem p(h, y, 0.0, &c);
        std::vector<int> zeros(3, 0);
        CHECK(ml_detect_exhaustive(p).indices == zeros);
        CHECK(ml_detect_viterbi(p, 2).indices == zeros);
    }
}

TEST_CASE("search-space guards reject oversized problems") {
    Constellation c4 = make_constellation(Scheme::Qam, 4);
    Constellation c16 = make_constellation(Scheme::Qam, 16);
    {
        // 4^11 = 2^22 sequences exceeds the exhaustive cap.
        ComplexMatrix h = toeplitz_matrix(cvec{cplx(1.0, 0.0)}, 11);
        cvec y(11, cplx(0.0, 0.0));
        DetectionProblem p(h, y, 0.0, &c4);
        CHECK_THROWS_AS(ml_detect_exhaustive(p), CapacityError);
        CHECK_NOTHROW(ml_detect_viterbi(p, 1));
    }
    {
        // 16^5 = 2^20 states exceeds the trellis cap.
        cvec taps(6, cplx(1.0, 0.0));
        ComplexMatrix h = toeplitz_matrix(taps, 4);
        cvec y(9, cplx(0.0, 0.0));
        DetectionProblem p(h, y, 0.0, &c16);
        CHECK_THROWS_AS(ml_detect_viterbi(p, 6), CapacityError);
    }
}

TEST_CASE("trellis argument validation") {
    Constellation c = make_constellation(Scheme::Qam, 4);
    ComplexMatrix h = toeplitz_matrix(cvec{cplx(1.0, 0.0), cplx(0.5, 0.0)}, 3);
    cvec y(4, cplx(0.0, 0.0));
    DetectionProblem p(h, y, 0.0, &c);
    CHECK_THROWS_AS(ml_detect_viterbi(p, 3), ArgumentError);
    CHECK_THROWS_AS(ml_detect_viterbi(p, 0), ArgumentError);
}

TEST_CASE("problem validation rejects malformed inputs") {
    Constellation c = make_constellation(Scheme::Qam, 4);
    ComplexMatrix wide(2, 3);
    CHECK_THROWS_AS(DetectionProblem(wide, cvec(2), 0.0, &c), ArgumentError);
    ComplexMatrix ok(3, 2);
    CHECK_THROWS_AS(DetectionProblem(ok, cvec(2), 0.0, &c), ArgumentError);
    CHECK_THROWS_AS(DetectionProblem(ok, cvec(3), -1.0, &c), ArgumentError);
    CHECK_THROWS_AS(DetectionProblem(ok, cvec(3), 0.0, nullptr), ArgumentError);
}

TEST_CASE("zero-forcing noise gains match the explicit gram inverse") {
    Rng rng(4242);
    Constellation c = make_constellation(Scheme::Qam, 4);
    for (int trial = 0; trial < 20; ++trial) {
        int l = 2 + static_cast<int>(rng.next_u64() % 4);
        ComplexMatrix h = random_matrix(rng, l + 3, l);
        DetectionProblem p(h, cvec(l + 3), 0.0, &c);
        std::vector<double> gains = zf_noise_gains(p);
        EigResult eig = hermitian_eig(gram(h));
        for (int i = 0; i < l; ++i) {
            double oracle = 0.0;
            for (int k = 0; k < l; ++k) {
                oracle += std::norm(eig.vectors(i, k)) / eig.values[k];
            }
            CHECK(gains[i] == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
}
