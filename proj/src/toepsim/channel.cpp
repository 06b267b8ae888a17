#include "toepsim/channel.hpp"

#include <cmath>
#include <numbers>

#include "toepsim/errors.hpp"
#include "toepsim/quadrature.hpp"

namespace toepsim {

ComplexMatrix correlation_broadside(int m, double spacing_ratio, double angle_spread) {
    if (m < 1) throw ArgumentError("correlation_broadside: antenna count must be positive");
    if (spacing_ratio < 0.0 || angle_spread < 0.0) {
        throw ArgumentError("correlation_broadside: spacing and spread must be non-negative");
    }
    // The odd (sine) part of the integrand cancels over the full period, so
    // only the cosine part is evaluated; one lag per antenna offset.
    std::vector<double> lag(m);
    for (int d = 0; d < m; ++d) {
        const double a = 2.0 * std::numbers::pi * d * angle_spread * spacing_ratio;
        lag[d] = integrate([a](double t) { return std::cos(a * std::sin(t)); }, 0.0,
                           2.0 * std::numbers::pi, 256) /
                 (2.0 * std::numbers::pi);
    }
    ComplexMatrix sigma(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) sigma(i, j) = lag[std::abs(i - j)];
    }
    return sigma;
}

ChannelModel ChannelModel::iid(int m) {
    if (m < 1) throw ArgumentError("ChannelModel: antenna count must be positive");
    ChannelModel model;
    model.m = m;
    model.sigma = ComplexMatrix::identity(m);
    model.coloring = ComplexMatrix::identity(m);
    return model;
}

ChannelModel ChannelModel::correlated(const ComplexMatrix& sigma) {
    if (sigma.rows() != sigma.cols()) {
        throw ArgumentError("ChannelModel: correlation matrix must be square");
    }
    if (!is_hermitian(sigma, 1e-12)) {
        throw ArgumentError("ChannelModel: correlation matrix must be Hermitian");
    }
    ChannelModel model;
    model.m = sigma.rows();
    model.sigma = sigma;
    model.coloring = psd_sqrt(sigma);
    return model;
}

cvec draw_channel(const ChannelModel& model, Rng& rng) {
    cvec w(model.m);
    for (auto& v : w) v = rng.standard_complex_gaussian();
    return matvec(model.coloring, w);
}

cvec transmit(const ComplexMatrix& x, const cvec& h, double sigma2, Rng& rng) {
    if (sigma2 < 0.0) throw ArgumentError("transmit: noise variance must be non-negative");
    cvec y = matvec(x, h);
    if (sigma2 > 0.0) {
        const double scale = std::sqrt(sigma2);
        for (auto& v : y) v += scale * rng.standard_complex_gaussian();
    }
    return y;
}

double scheme_energy(Scheme scheme, int mu) {
    switch (scheme) {
        case Scheme::Qam: return 2.0 * (mu - 1) / 3.0;
        case Scheme::Pam: return (static_cast<double>(mu) * mu - 1.0) / 6.0;
        case Scheme::Psk: return 1.0;
    }
    throw ArgumentError("invalid scheme");
}

SnrPoint block_snr(Scheme scheme, int mu, int m, int l, int n, double sigma2) {
    if (sigma2 <= 0.0) throw ArgumentError("block_snr: noise variance must be positive");
    if (m < 1 || l < 1 || n < 1) throw ArgumentError("block_snr: dimensions must be positive");
    const double es = scheme_energy(scheme, mu);
    SnrPoint point;
    point.scheme_index = (scheme == Scheme::Qam) ? 1 : (scheme == Scheme::Pam ? 2 : 3);
    point.symbol_snr = es / sigma2;
    point.block_snr = es * m * l / (static_cast<double>(n) * sigma2);
    point.noise_var = sigma2;
    return point;
}

}  // namespace toepsim
