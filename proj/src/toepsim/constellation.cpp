#include "toepsim/constellation.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "toepsim/errors.hpp"

namespace toepsim {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

int int_sqrt(int v) {
    int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v))));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

int gray_encode(int i) { return i ^ (i >> 1); }

int gray_decode(int g) {
    int i = 0;
    for (; g != 0; g >>= 1) i ^= g;
    return i;
}

// Nearest level index on a uniform grid of `levels` points at
// offset + spacing * index; ties resolve to the lower index.
int slice_axis(double x, int levels, double offset, double spacing) {
    const double t = (x - offset) / spacing;
    int idx = static_cast<int>(std::ceil(t - 0.5));
    if (idx < 0) idx = 0;
    if (idx > levels - 1) idx = levels - 1;
    return idx;
}

}  // namespace

Scheme scheme_from_token(const std::string& token) {
    if (token == "qam") return Scheme::Qam;
    if (token == "pam") return Scheme::Pam;
    if (token == "psk") return Scheme::Psk;
    throw ArgumentError("unknown scheme token '" + token + "' (expected qam, pam, or psk)");
}

std::string scheme_token(Scheme scheme) {
    switch (scheme) {
        case Scheme::Qam: return "qam";
        case Scheme::Pam: return "pam";
        case Scheme::Psk: return "psk";
    }
    throw ArgumentError("invalid scheme");
}

Constellation make_constellation(Scheme scheme, int mu) {
    Constellation c;
    c.scheme = scheme;
    c.mu = mu;

    switch (scheme) {
        case Scheme::Qam: {
            const int side = int_sqrt(mu);
            if (mu < 4 || side * side != mu || !is_power_of_two(side)) {
                throw ArgumentError("QAM order must be one of 4, 16, 64, 256");
            }
            c.points.resize(mu);
            c.value_to_index.resize(mu);
            const int axis_bits = std::countr_zero(static_cast<unsigned>(side));
            for (int a = 0; a < side; ++a) {
                for (int b = 0; b < side; ++b) {
                    const int index = a * side + b;
                    c.points[index] = cplx(2.0 * a - (side - 1), 2.0 * b - (side - 1));
                    const int value = (gray_encode(a) << axis_bits) | gray_encode(b);
                    c.value_to_index[value] = index;
                }
            }
            break;
        }
        case Scheme::Pam: {
            if (mu < 2 || !is_power_of_two(mu)) {
                throw ArgumentError("PAM order must be a power of two >= 2");
            }
            c.points.resize(mu);
            c.value_to_index.resize(mu);
            const double half = std::numbers::sqrt2 / 2.0;
            for (int i = 0; i < mu; ++i) {
                c.points[i] = cplx((2.0 * i - (mu - 1)) * half, 0.0);
                c.value_to_index[gray_encode(i)] = i;
            }
            break;
        }
        case Scheme::Psk: {
            if (mu < 2 || !is_power_of_two(mu)) {
                throw ArgumentError("PSK order must be a power of two >= 2");
            }
            c.points.resize(mu);
            c.value_to_index.resize(mu);
            auto snap = [](double v) {
                if (std::abs(v) < 1e-15) return 0.0;
                if (std::abs(v - 1.0) < 1e-15) return 1.0;
                if (std::abs(v + 1.0) < 1e-15) return -1.0;
                return v;
            };
            for (int k = 0; k < mu; ++k) {
                const double phi = 2.0 * std::numbers::pi * k / mu;
                c.points[k] = cplx(snap(std::cos(phi)), snap(std::sin(phi)));
                c.value_to_index[gray_encode(k)] = k;
            }
            break;
        }
    }

    c.bits_per_symbol = std::countr_zero(static_cast<unsigned>(mu));
    c.index_to_value.resize(mu);
    for (int value = 0; value < mu; ++value) c.index_to_value[c.value_to_index[value]] = value;

    double energy = 0.0;
    for (const cplx& p : c.points) energy += std::norm(p);
    c.energy = energy / mu;

    double dmin2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < mu; ++i) {
        for (int j = i + 1; j < mu; ++j) {
            dmin2 = std::min(dmin2, std::norm(c.points[i] - c.points[j]));
        }
    }
    c.d_min = std::sqrt(dmin2);
    return c;
}

int slice_index(const Constellation& c, cplx z) {
    switch (c.scheme) {
        case Scheme::Qam: {
            const int side = int_sqrt(c.mu);
            const int a = slice_axis(z.real(), side, -(side - 1.0), 2.0);
            const int b = slice_axis(z.imag(), side, -(side - 1.0), 2.0);
            return a * side + b;
        }
        case Scheme::Pam: {
            const double half = std::numbers::sqrt2 / 2.0;
            return slice_axis(z.real(), c.mu, -(c.mu - 1.0) * half, 2.0 * half);
        }
        case Scheme::Psk: {
            if (z == cplx(0.0, 0.0)) return 0;
            const double sector = 2.0 * std::numbers::pi / c.mu;
            const double r = std::atan2(z.imag(), z.real()) / sector;
            int k = static_cast<int>(std::ceil(r - 0.5)) % c.mu;
            if (k < 0) k += c.mu;
            // Sector-boundary tie against the numerically lower wrapped index.
            const int next = (k + 1) % c.mu;
            if (next < k && std::norm(z - c.points[next]) == std::norm(z - c.points[k])) {
                return next;
            }
            return k;
        }
    }
    throw ArgumentError("invalid scheme");
}

int bit_errors_between(const Constellation& c, int index_a, int index_b) {
    const unsigned diff = static_cast<unsigned>(c.index_to_value[index_a] ^
                                                c.index_to_value[index_b]);
    return std::popcount(diff);
}

}  // namespace toepsim
