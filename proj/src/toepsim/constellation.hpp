#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toepsim/matrix.hpp"

namespace toepsim {

enum class Scheme { Qam, Pam, Psk };

Scheme scheme_from_token(const std::string& token);
std::string scheme_token(Scheme scheme);

// Constellation with a Gray bit labelling. Conventions:
//  - QAM: square lattice at odd-integer coordinates (spacing 2), point index
//    a * side + b for in-phase index a and quadrature index b, each axis
//    Gray coded independently (in-phase bits first).
//  - PAM: real odd multiples of sqrt(2)/2 (spacing sqrt(2)), Gray coded.
//  - PSK: unit-circle phases 2*pi*k/mu, Gray coded over the phase index.
struct Constellation {
    Scheme scheme;
    int mu;
    int bits_per_symbol;
    cvec points;
    std::vector<int> value_to_index;  // bit-group value -> point index
    std::vector<int> index_to_value;  // point index -> bit-group value
    double energy;                    // average |point|^2 over the alphabet
    double d_min;                     // minimum pairwise distance
};

// Builds the constellation; mu must be a square in {4,16,64,256} for QAM and
// a power of two >= 2 for PAM and PSK.
Constellation make_constellation(Scheme scheme, int mu);

// Nearest point; exact distance ties resolve to the lowest point index.
int slice_index(const Constellation& c, cplx z);

// Hamming weight of the label difference between two point indices.
int bit_errors_between(const Constellation& c, int index_a, int index_b);

}  // namespace toepsim
