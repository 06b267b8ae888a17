#pragma once

#include "toepsim/constellation.hpp"
#include "toepsim/matrix.hpp"
#include "toepsim/rng.hpp"

namespace toepsim {

// Transmit correlation of a uniform linear array in a broadside scattering
// ring: entry (p, q) = (1/2pi) int_0^{2pi} exp(-j 2pi (p-q) spread * ratio *
// sin t) dt, with `spacing_ratio` the antenna spacing over wavelength and
// `angle_spread` in radians. Real symmetric Toeplitz with unit diagonal.
ComplexMatrix correlation_broadside(int m, double spacing_ratio, double angle_spread);

// Flat MISO fading channel h = Sigma^{1/2} w with w i.i.d. CN(0, 1).
struct ChannelModel {
    int m;
    ComplexMatrix sigma;
    ComplexMatrix coloring;  // Hermitian square root of sigma

    static ChannelModel iid(int m);
    static ChannelModel correlated(const ComplexMatrix& sigma);
};

cvec draw_channel(const ChannelModel& model, Rng& rng);

// y = X h + xi with xi i.i.d. CN(0, sigma2) per component.
cvec transmit(const ComplexMatrix& x, const cvec& h, double sigma2, Rng& rng);

struct SnrPoint {
    int scheme_index;   // 1 = QAM, 2 = PAM, 3 = PSK
    double symbol_snr;  // E_s / sigma^2
    double block_snr;   // E_s * M * L / (N * sigma^2)
    double noise_var;
};

// SNR bookkeeping for a block of L symbols over N channel uses and M
// antennas at the given noise variance.
SnrPoint block_snr(Scheme scheme, int mu, int m, int l, int n, double sigma2);

// Average symbol energy of a scheme in closed form.
double scheme_energy(Scheme scheme, int mu);

}  // namespace toepsim
