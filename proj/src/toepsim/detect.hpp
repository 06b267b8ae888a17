#pragma once

#include <vector>

#include "toepsim/constellation.hpp"
#include "toepsim/matrix.hpp"

namespace toepsim {

// One received block through the equivalent single-input channel.
struct DetectionProblem {
    ComplexMatrix channel;  // N x L, N >= L
    cvec received;          // length N
    double noise_var;
    const Constellation* constellation;

    DetectionProblem(ComplexMatrix channel_, cvec received_, double noise_var_,
                     const Constellation* constellation_);
};

struct Detection {
    std::vector<int> indices;  // detected point index per symbol
    cvec symbols;              // detected constellation points
    cvec raw;                  // pre-slice linear estimate (empty for ML)
};

// Zero-forcing: least squares followed by symbol-wise slicing. Throws
// SingularChannelError when the channel loses column rank.
Detection zf_detect(const DetectionProblem& p);

// Linear MMSE with shrinkage (H^H H + (sigma^2 / E_s) I)^{-1} H^H y.
Detection mmse_detect(const DetectionProblem& p);

// Zero-forcing decision feedback: QR then back substitution with a slice at
// every step, detecting the last symbol first.
Detection zf_dfe_detect(const DetectionProblem& p);

// Exact maximum likelihood by exhaustive enumeration; metric ties resolve to
// the lexicographically smallest index tuple. Guarded to mu^L <= 2^20.
Detection ml_detect_exhaustive(const DetectionProblem& p);

// Exact maximum likelihood over the trellis of the virtual ISI channel whose
// taps are the first column of the banded channel matrix (num_taps entries).
// Guarded to mu^(num_taps - 1) <= 2^16 states. Tie handling matches the
// exhaustive search.
Detection ml_detect_viterbi(const DetectionProblem& p, int num_taps);

// Diagonal of (H^H H)^{-1} for the problem's channel.
std::vector<double> zf_noise_gains(const DetectionProblem& p);

}  // namespace toepsim
