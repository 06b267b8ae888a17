#pragma once

#include "toepsim/matrix.hpp"

namespace toepsim {

struct Rational {
    long long num;
    long long den;
    double value() const { return static_cast<double>(num) / den; }
};

// Banded Toeplitz matrix generated by alpha (length L): (K+L-1) x K with
// entry (i, j) = alpha[i - j] for 0 <= i - j < L (zero-based), else 0.
ComplexMatrix toeplitz_matrix(const cvec& alpha, int k);

// Space-time block code: a length-L symbol vector s maps to the
// (K+L-1) x M codeword T(s, L, K) * B over M transmit antennas.
struct ToeplitzCode {
    int m;             // transmit antennas
    int k;             // inner dimension (rows of B)
    int l;             // symbols per block
    int n;             // block length K + L - 1
    ComplexMatrix b;   // K x M, full row rank

    ToeplitzCode(int m_, int k_, int l_, ComplexMatrix b_);
};

// Codeword T(s, L, K) * B, dimension N x M.
ComplexMatrix encode(const ToeplitzCode& code, const cvec& s);

// Equivalent single-input channel T(B h, K, L), dimension N x L, satisfying
// encode(code, s) * h == equivalent_channel(code, h) * s.
ComplexMatrix equivalent_channel(const ToeplitzCode& code, const cvec& h);

// Virtual ISI taps B h of the equivalent channel, length K.
cvec equivalent_taps(const ToeplitzCode& code, const cvec& h);

// Symbols per channel use, L / (K + L - 1), in lowest terms.
Rational symbol_rate(const ToeplitzCode& code);

}  // namespace toepsim
