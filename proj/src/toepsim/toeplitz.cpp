#include "toepsim/toeplitz.hpp"

#include <numeric>
#include <utility>

#include "toepsim/errors.hpp"

namespace toepsim {

ComplexMatrix toeplitz_matrix(const cvec& alpha, int k) {
    const int l = static_cast<int>(alpha.size());
    if (l < 1) throw ArgumentError("toeplitz_matrix: generator must be non-empty");
    if (k < 1) throw ArgumentError("toeplitz_matrix: column count must be positive");
    ComplexMatrix t(k + l - 1, k);
    for (int j = 0; j < k; ++j) {
        for (int d = 0; d < l; ++d) t(j + d, j) = alpha[d];
    }
    return t;
}

ToeplitzCode::ToeplitzCode(int m_, int k_, int l_, ComplexMatrix b_)
    : m(m_), k(k_), l(l_), n(k_ + l_ - 1), b(std::move(b_)) {
    if (m < 1 || k < 1 || l < 1) {
        throw ArgumentError("ToeplitzCode: dimensions must be positive");
    }
    if (k > m) throw ArgumentError("ToeplitzCode: K must not exceed M");
    if (b.rows() != k || b.cols() != m) {
        throw ArgumentError("ToeplitzCode: B must be K x M");
    }
    if (min_singular_value(adjoint(b)) <= 1e-10) {
        throw ArgumentError("ToeplitzCode: B must have full row rank");
    }
}

ComplexMatrix encode(const ToeplitzCode& code, const cvec& s) {
    if (static_cast<int>(s.size()) != code.l) {
        throw ArgumentError("encode: symbol vector must have length L");
    }
    return matmul(toeplitz_matrix(s, code.k), code.b);
}

cvec equivalent_taps(const ToeplitzCode& code, const cvec& h) {
    if (static_cast<int>(h.size()) != code.m) {
        throw ArgumentError("equivalent_channel: channel vector must have length M");
    }
    return matvec(code.b, h);
}

ComplexMatrix equivalent_channel(const ToeplitzCode& code, const cvec& h) {
    return toeplitz_matrix(equivalent_taps(code, h), code.l);
}

Rational symbol_rate(const ToeplitzCode& code) {
    const long long num = code.l;
    const long long den = code.n;
    const long long g = std::gcd(num, den);
    return Rational{num / g, den / g};
}

}  // namespace toepsim
