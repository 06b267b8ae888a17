#include "toepsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "toepsim/errors.hpp"
#include "toepsim/quadrature.hpp"
#include "toepsim/rng.hpp"

namespace toepsim {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_mu(Scheme scheme, int mu) {
    if (mu < 2 || (mu & (mu - 1)) != 0) {
        throw ArgumentError("constellation order must be a power of two >= 2");
    }
    if (scheme == Scheme::Qam) {
        int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(mu))));
        if (side * side != mu || side < 2) {
            throw ArgumentError("QAM order must be an even power of two");
        }
    }
}

void validate_sep_args(double rho, double gram_inv_diag) {
    if (!(rho >= 0.0) || !std::isfinite(rho)) {
        throw ArgumentError("snr must be finite and non-negative");
    }
    if (!(gram_inv_diag > 0.0) || !std::isfinite(gram_inv_diag)) {
        throw ArgumentError("gram inverse diagonal entry must be positive");
    }
}

// Eigenvalues of Sigma^{1/2} (X^H X) Sigma^{1/2} for the codeword difference
// generated by `error`; the determinant in the pairwise error integrand is
// the product of (1 + nu / (8 sigma2 sin^2 t)) over these.
std::vector<double> pep_eigenvalues(const ToeplitzCode& code, const ComplexMatrix& sigma,
                                    const cvec& error, double sigma2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw ArgumentError("noise variance must be positive");
    }
    if (sigma.rows() != code.m || sigma.cols() != code.m) {
        throw ArgumentError("covariance dimension must match the antenna count");
    }
    double magnitude = 0.0;
    for (const cplx& e : error) magnitude = std::max(magnitude, std::abs(e));
    if (magnitude == 0.0) throw ArgumentError("error vector must be nonzero");

    ComplexMatrix x = encode(code, error);
    ComplexMatrix root = psd_sqrt(sigma);
    ComplexMatrix a = matmul(root, matmul(gram(x), root));
    EigResult eig = hermitian_eig(a, 1e-10);
    std::vector<double> nu = eig.values;
    for (double& v : nu) v = std::max(v, 0.0);
    return nu;
}

}  // namespace

SchemeConstants scheme_constants(Scheme scheme, int mu) {
    validate_mu(scheme, mu);
    SchemeConstants c;
    c.prefactor = (mu - 1.0) / mu;
    switch (scheme) {
        case Scheme::Qam:
            c.scheme_index = 1;
            c.a = 3.0 / (4.0 * (mu - 1.0));
            break;
        case Scheme::Pam:
            c.scheme_index = 2;
            c.a = 3.0 / (2.0 * (static_cast<double>(mu) * mu - 1.0));
            break;
        case Scheme::Psk: {
            c.scheme_index = 3;
            double s = std::sin(kPi / mu);
            c.a = s * s / 2.0;
            break;
        }
    }
    return c;
}

double sep_zf(Scheme scheme, int mu, double rho, double gram_inv_diag) {
    validate_mu(scheme, mu);
    validate_sep_args(rho, gram_inv_diag);
    const double g = gram_inv_diag;
    switch (scheme) {
        case Scheme::Qam: {
            double root_mu = std::sqrt(static_cast<double>(mu));
            double frac = 1.0 - 1.0 / root_mu;
            double z = std::sqrt(3.0 * rho / (2.0 * (mu - 1.0) * g));
            double q = q_function(z);
            return 4.0 * frac * q - 4.0 * frac * frac * q_squared(z);
        }
        case Scheme::Pam: {
            double z = std::sqrt(3.0 * rho / ((static_cast<double>(mu) * mu - 1.0) * g));
            return 2.0 * (mu - 1.0) / mu * q_function(z);
        }
        case Scheme::Psk: {
            double s = std::sin(kPi / mu);
            double coeff = rho * s * s / (2.0 * g);
            auto integrand = [coeff](double t) {
                double st = std::sin(t);
                return std::exp(-coeff / (st * st));
            };
            return integrate(integrand, 0.0, (mu - 1.0) * kPi / mu, 256) / kPi;
        }
    }
    throw ArgumentError("unknown signalling scheme");
}

double sep_zf_theta(Scheme scheme, int mu, double rho, double gram_inv_diag) {
    validate_mu(scheme, mu);
    validate_sep_args(rho, gram_inv_diag);
    const double g = gram_inv_diag;
    switch (scheme) {
        case Scheme::Qam: {
            // Split of the Q/Q^2 closed form into two angular integrals with
            // the shared exponent 3 rho / (4 (mu-1) g sin^2 t): weight
            // 4 frac / (pi sqrt(mu)) below pi/4 and 4 frac / pi above it.
            double root_mu = std::sqrt(static_cast<double>(mu));
            double frac = 1.0 - 1.0 / root_mu;
            double coeff = 3.0 * rho / (4.0 * (mu - 1.0) * g);
            auto integrand = [coeff](double t) {
                double st = std::sin(t);
                return std::exp(-coeff / (st * st));
            };
            double low = integrate(integrand, 0.0, kPi / 4.0, 512);
            double high = integrate(integrand, kPi / 4.0, kPi / 2.0, 512);
            return 4.0 * frac / (kPi * root_mu) * low + 4.0 * frac / kPi * high;
        }
        case Scheme::Pam: {
            double coeff = 3.0 * rho / (2.0 * (static_cast<double>(mu) * mu - 1.0) * g);
            auto integrand = [coeff](double t) {
                double st = std::sin(t);
                return std::exp(-coeff / (st * st));
            };
            return 2.0 * (mu - 1.0) / mu * integrate(integrand, 0.0, kPi / 2.0, 512) / kPi;
        }
        case Scheme::Psk:
            return sep_zf(scheme, mu, rho, gram_inv_diag);
    }
    throw ArgumentError("unknown signalling scheme");
}

double sep_upper_bound(Scheme scheme, int mu, double rho, double gram_inv_diag) {
    SchemeConstants c = scheme_constants(scheme, mu);
    validate_sep_args(rho, gram_inv_diag);
    return c.prefactor * std::exp(-c.a * rho / gram_inv_diag);
}

double avg_sep_bound(Scheme scheme, int mu, double rho, double c0,
                     const ComplexMatrix& sigma) {
    SchemeConstants c = scheme_constants(scheme, mu);
    if (!(c0 > 0.0) || !std::isfinite(c0)) {
        throw ArgumentError("gram lower-bound constant must be positive");
    }
    if (!(rho >= 0.0) || !std::isfinite(rho)) {
        throw ArgumentError("snr must be finite and non-negative");
    }
    EigResult eig = hermitian_eig(sigma, 1e-10);
    double det = 1.0;
    for (double lambda : eig.values) {
        if (lambda < -1e-10 * std::max(1.0, eig.values.front())) {
            throw ArgumentError("covariance must be positive semidefinite");
        }
        det *= 1.0 + c.a * rho * c0 * std::max(lambda, 0.0);
    }
    return c.prefactor / det;
}

double pep_exact(const ToeplitzCode& code, const ComplexMatrix& sigma, const cvec& error,
                 double sigma2) {
    std::vector<double> nu = pep_eigenvalues(code, sigma, error, sigma2);
    auto integrand = [&nu, sigma2](double t) {
        double st = std::sin(t);
        double scale = 8.0 * sigma2 * st * st;
        double det = 1.0;
        for (double v : nu) det *= 1.0 + v / scale;
        return 1.0 / det;
    };
    return integrate(integrand, 0.0, kPi / 2.0, 512) / kPi;
}

double pep_chernoff(const ToeplitzCode& code, const ComplexMatrix& sigma, const cvec& error,
                    double sigma2) {
    std::vector<double> nu = pep_eigenvalues(code, sigma, error, sigma2);
    double det = 1.0;
    for (double v : nu) det *= 1.0 + v / (8.0 * sigma2);
    return 0.5 / det;
}

ConstantEstimate estimate_constants(const std::function<ComplexMatrix(const cvec&)>& family,
                                    int vector_dim, int samples, std::uint64_t seed) {
    if (samples < 1000) throw ArgumentError("need at least 1000 samples");
    if (vector_dim < 1) throw ArgumentError("generator dimension must be positive");
    Rng rng(seed);
    double min_det = std::numeric_limits<double>::infinity();
    double max_det = 0.0;
    double max_minor = 0.0;
    for (int trial = 0; trial < samples; ++trial) {
        cvec h(vector_dim);
        double norm_sq = 0.0;
        for (cplx& v : h) {
            v = rng.standard_complex_gaussian();
            norm_sq += std::norm(v);
        }
        double inv_norm = 1.0 / std::sqrt(norm_sq);
        for (cplx& v : h) v *= inv_norm;
        ComplexMatrix hc = family(h);
        double det = psd_det(gram(hc));
        min_det = std::min(min_det, det);
        max_det = std::max(max_det, det);
        const int l = hc.cols();
        if (l == 1) {
            max_minor = std::max(max_minor, 1.0);
        } else {
            for (int drop = 0; drop < l; ++drop) {
                ComplexMatrix sub(hc.rows(), l - 1);
                for (int i = 0; i < hc.rows(); ++i) {
                    int col = 0;
                    for (int j = 0; j < l; ++j) {
                        if (j == drop) continue;
                        sub(i, col++) = hc(i, j);
                    }
                }
                max_minor = std::max(max_minor, psd_det(gram(sub)));
            }
        }
    }
    ConstantEstimate est;
    est.c_min_hat = min_det;
    est.c_max_hat = max_det;
    est.c0_hat = max_minor > 0.0 ? min_det / max_minor : 0.0;
    est.samples = samples;
    return est;
}

DiversityPrediction diversity_prediction(Scheme scheme, int m, int l, double g) {
    if (m < 1 || l < 1) throw ArgumentError("antenna count and block length must be positive");
    if (!(g >= 0.0 && g <= 1.0)) throw ArgumentError("multiplexing gain must lie in [0, 1]");
    const double n = l + m - 1.0;
    DiversityPrediction p;
    p.optimal = m * (1.0 - g);
    if (scheme == Scheme::Qam) {
        p.achieved = m * (1.0 - n / l * g);
    } else {
        p.achieved = m * (1.0 - 2.0 * n / l * g);
    }
    return p;
}

double diversity_slope_estimate(const std::vector<std::pair<double, double>>& points) {
    std::vector<std::pair<double, double>> usable;
    for (const auto& [snr_db, rate] : points) {
        if (rate > 0.0 && std::isfinite(rate) && std::isfinite(snr_db)) {
            usable.emplace_back(snr_db, std::log10(rate));
        }
    }
    if (usable.size() < 3) {
        throw ArgumentError("need at least three positive-rate points for a slope fit");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : usable) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double count = static_cast<double>(usable.size());
    double denom = count * sxx - sx * sx;
    if (denom <= 0.0) throw ArgumentError("snr grid is degenerate for a slope fit");
    double slope = (count * sxy - sx * sy) / denom;
    return -10.0 * slope;
}

}  // namespace toepsim
