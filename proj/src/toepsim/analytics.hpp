#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "toepsim/constellation.hpp"
#include "toepsim/matrix.hpp"
#include "toepsim/toeplitz.hpp"

namespace toepsim {

// Exponential-bound constants per signalling scheme. The SNR argument rho of
// every function below is the average symbol energy divided by the noise
// variance *per real dimension*; with circular complex noise of total
// variance sigma^2 that is rho = E_s / (sigma^2 / 2).
struct SchemeConstants {
    int scheme_index;  // 1 = QAM, 2 = PAM, 3 = PSK
    double a;          // exponent coefficient
    double prefactor;  // (mu - 1) / mu
};

SchemeConstants scheme_constants(Scheme scheme, int mu);

// Exact symbol error probability of a zero-forcing receiver for symbol slot
// ell, where gram_inv_diag = [(Hc^H Hc)^{-1}]_{ell,ell}.
double sep_zf(Scheme scheme, int mu, double rho, double gram_inv_diag);

// Same quantity evaluated purely through finite-interval integral
// representations (quadrature instead of erfc); agrees with sep_zf to
// near machine precision.
double sep_zf_theta(Scheme scheme, int mu, double rho, double gram_inv_diag);

// Chernoff-style bound (mu-1)/mu * exp(-a rho / gram_inv_diag); always
// dominates sep_zf on the same arguments.
double sep_upper_bound(Scheme scheme, int mu, double rho, double gram_inv_diag);

// Channel-averaged SEP bound (mu-1)/mu * det(I + a rho c0 Sigma)^{-1} for a
// Gaussian channel with covariance Sigma and Gram lower-bound constant c0.
double avg_sep_bound(Scheme scheme, int mu, double rho, double c0,
                     const ComplexMatrix& sigma);

// Average pairwise error probability of mistaking one block for another
// whose symbol difference is `error` (length L), for a Gaussian channel with
// covariance Sigma and complex noise variance sigma2:
//   (1/pi) int_0^{pi/2} det(I + Sigma X^H X / (8 sigma2 sin^2 t))^{-1} dt
// with X the codeword difference encode(code, error).
double pep_exact(const ToeplitzCode& code, const ComplexMatrix& sigma, const cvec& error,
                 double sigma2);

// Chernoff bound of the same pairwise error probability: the integrand at
// sin t = 1 times 1/2. Always >= pep_exact.
double pep_chernoff(const ToeplitzCode& code, const ComplexMatrix& sigma, const cvec& error,
                    double sigma2);

// Sampled extremes of det(H^H H) over unit-norm generator vectors h, where
// H = family(h). For families whose Gram determinant is homogeneous in
// ||h||, these bracket the existence constants:
//   c_min_hat >= true infimum, c_max_hat <= true supremum.
// c0_hat additionally tracks min det(H^H H) / max-over-slots det of the
// channel with one column deleted, the constant appearing in avg_sep_bound.
struct ConstantEstimate {
    double c_min_hat;
    double c_max_hat;
    double c0_hat;
    int samples;
};

ConstantEstimate estimate_constants(const std::function<ComplexMatrix(const cvec&)>& family,
                                    int vector_dim, int samples, std::uint64_t seed);

// Diversity order achieved at multiplexing gain g (0 <= g <= 1) by a
// full-rate-matched code (K = M, N = L + M - 1) under each scheme, next to
// the optimal MISO tradeoff M (1 - g).
struct DiversityPrediction {
    double achieved;
    double optimal;
};

DiversityPrediction diversity_prediction(Scheme scheme, int m, int l, double g);

// Least-squares diversity order from (snr_db, error_rate) samples: the slope
// of log10(rate) against snr_db scaled by -10. Zero-rate points are dropped;
// fewer than three usable points is an error.
double diversity_slope_estimate(const std::vector<std::pair<double, double>>& points);

}  // namespace toepsim
