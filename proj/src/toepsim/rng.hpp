#pragma once

#include <cstdint>
#include <random>

#include "toepsim/matrix.hpp"

namespace toepsim {

// splitmix64 finalizer; the published seed-mixing primitive.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for worker chunk `chunk` at sweep point `point`:
// base ^ splitmix64(point * 2^32 + chunk). Independent of worker count.
inline uint64_t derive_seed(uint64_t base, uint64_t point, uint64_t chunk) {
    return splitmix64(base ^ splitmix64((point << 32) | (chunk & 0xffffffffULL)));
}

// Deterministic stream of uniforms, bits, and circular complex Gaussians.
// The Gaussian transform is explicit so that identical seeds give identical
// streams on any platform.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // One uniformly random bit.
    int bit() {
        if (bit_count_ == 0) {
            bit_buffer_ = gen_();
            bit_count_ = 64;
        }
        const int b = static_cast<int>(bit_buffer_ & 1ULL);
        bit_buffer_ >>= 1;
        --bit_count_;
        return b;
    }

    // Circularly symmetric complex Gaussian with E|z|^2 = 1.
    cplx standard_complex_gaussian() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1));
        const double phi = 6.283185307179586476925286766559 * u2;
        return cplx(r * std::cos(phi), r * std::sin(phi));
    }

  private:
    std::mt19937_64 gen_;
    uint64_t bit_buffer_ = 0;
    int bit_count_ = 0;
};

}  // namespace toepsim
