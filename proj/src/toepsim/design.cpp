#include "toepsim/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "toepsim/errors.hpp"
#include "toepsim/quadrature.hpp"

namespace toepsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kQuadraturePoints = 256;
constexpr int kMaxIterations = 10000;
constexpr double kStationarityTol = 1e-9;
constexpr double kActiveThreshold = 1e-8;  // gamma^2 below this counts as off

void validate_allocation(const std::vector<double>& lambdas,
                         const std::vector<double>& gamma_sq, double eps) {
    if (lambdas.size() != gamma_sq.size()) {
        throw ArgumentError("eigenvalue and allocation lengths must match");
    }
    if (lambdas.empty()) throw ArgumentError("allocation must be non-empty");
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw ArgumentError("snr scale must be positive and finite");
    }
    for (double l : lambdas) {
        if (!(l >= 0.0) || !std::isfinite(l)) {
            throw ArgumentError("eigenvalues must be non-negative and finite");
        }
    }
    for (double x : gamma_sq) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw ArgumentError("squared gains must be non-negative and finite");
        }
    }
}

// Projection onto {x >= 0, sum x <= 1}.
std::vector<double> project_simplex(std::vector<double> x) {
    double positive_sum = 0.0;
    for (double& v : x) {
        v = std::max(v, 0.0);
        positive_sum += v;
    }
    if (positive_sum <= 1.0) return x;
    std::vector<double> sorted(x);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cumulative = 0.0;
    double tau = 0.0;
    for (size_t i = 0; i < sorted.size(); ++i) {
        cumulative += sorted[i];
        double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (i + 1 == sorted.size() || sorted[i + 1] <= candidate) {
            tau = candidate;
            break;
        }
    }
    for (double& v : x) v = std::max(v - tau, 0.0);
    return x;
}

struct SortedSpectrum {
    std::vector<double> lambdas;  // positive eigenvalues, descending
    ComplexMatrix vectors;        // matching eigenvectors as columns
};

SortedSpectrum positive_spectrum(const ComplexMatrix& sigma) {
    EigResult eig = hermitian_eig(sigma, 1e-10);
    if (eig.values.empty() || !(eig.values.front() > 0.0)) {
        throw ArgumentError("covariance must have at least one positive eigenvalue");
    }
    const double cutoff = 1e-12 * eig.values.front();
    int keep = 0;
    for (double v : eig.values) {
        if (v <= cutoff) break;
        ++keep;
    }
    SortedSpectrum s;
    s.lambdas.assign(eig.values.begin(), eig.values.begin() + keep);
    s.vectors = ComplexMatrix(sigma.rows(), keep);
    for (int i = 0; i < sigma.rows(); ++i) {
        for (int j = 0; j < keep; ++j) s.vectors(i, j) = eig.vectors(i, j);
    }
    return s;
}

double validate_eps(double d_min, double sigma2) {
    if (!(d_min > 0.0) || !std::isfinite(d_min)) {
        throw ArgumentError("minimum distance must be positive");
    }
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw ArgumentError("noise variance must be positive");
    }
    return d_min * d_min / (8.0 * sigma2);
}

// Assembles diag(gamma) V_K^H from the active coordinates of an allocation.
BeamformerDesign finish_design(const SortedSpectrum& spectrum, const std::vector<double>& x,
                               double eps, BeamformerMethod method) {
    std::vector<int> active;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] > kActiveThreshold) active.push_back(static_cast<int>(i));
    }
    if (active.empty()) {
        // All power vanished numerically; keep the strongest mode.
        active.push_back(0);
    }
    BeamformerDesign d;
    d.method = method;
    d.k = static_cast<int>(active.size());
    d.gammas.resize(active.size());
    d.b = ComplexMatrix(d.k, spectrum.vectors.rows());
    std::vector<double> lam(active.size());
    std::vector<double> xs(active.size());
    for (size_t r = 0; r < active.size(); ++r) {
        int mode = active[r];
        lam[r] = spectrum.lambdas[mode];
        xs[r] = x[mode];
        d.gammas[r] = std::sqrt(x[mode]);
        for (int col = 0; col < spectrum.vectors.rows(); ++col) {
            d.b(static_cast<int>(r), col) =
                d.gammas[r] * std::conj(spectrum.vectors(col, mode));
        }
    }
    d.objective_value = g_objective(lam, xs, eps);
    return d;
}

}  // namespace

BeamformerMethod beamformer_from_token(const std::string& token) {
    if (token == "identity") return BeamformerMethod::Identity;
    if (token == "waterfill") return BeamformerMethod::Waterfill;
    if (token == "exact") return BeamformerMethod::Exact;
    throw ArgumentError("unknown beamformer method: " + token);
}

std::string beamformer_token(BeamformerMethod method) {
    switch (method) {
        case BeamformerMethod::Identity: return "identity";
        case BeamformerMethod::Waterfill: return "waterfill";
        case BeamformerMethod::Exact: return "exact";
    }
    throw ArgumentError("unknown beamformer method");
}

double g_objective(const std::vector<double>& lambdas, const std::vector<double>& gamma_sq,
                   double eps) {
    validate_allocation(lambdas, gamma_sq, eps);
    const size_t k = lambdas.size();
    auto integrand = [&](double t) {
        double st = std::sin(t);
        double s2 = st * st;
        double product = 1.0;
        for (size_t i = 0; i < k; ++i) {
            product *= 1.0 + eps * lambdas[i] * gamma_sq[i] / s2;
        }
        return 1.0 / product;
    };
    return integrate(integrand, 0.0, kPi / 2.0, kQuadraturePoints) / kPi;
}

std::vector<double> g_gradient(const std::vector<double>& lambdas,
                               const std::vector<double>& gamma_sq, double eps) {
    validate_allocation(lambdas, gamma_sq, eps);
    const size_t k = lambdas.size();
    const QuadratureRule& rule = gauss_legendre(kQuadraturePoints);
    std::vector<double> grad(k, 0.0);
    const double half_width = kPi / 4.0;  // map [-1,1] -> [0, pi/2]
    for (size_t q = 0; q < rule.nodes.size(); ++q) {
        double t = half_width * (rule.nodes[q] + 1.0);
        double weight = rule.weights[q] * half_width;
        double s2 = std::sin(t) * std::sin(t);
        double product = 1.0;
        for (size_t i = 0; i < k; ++i) {
            product *= 1.0 + eps * lambdas[i] * gamma_sq[i] / s2;
        }
        double base = 1.0 / product;
        for (size_t i = 0; i < k; ++i) {
            double factor = eps * lambdas[i] / s2;
            grad[i] -= weight * base * factor / (1.0 + factor * gamma_sq[i]);
        }
    }
    for (double& gval : grad) gval /= kPi;
    return grad;
}

BeamformerDesign optimize_exact(const ComplexMatrix& sigma, double d_min, double sigma2) {
    const double eps = validate_eps(d_min, sigma2);
    SortedSpectrum spectrum = positive_spectrum(sigma);
    const size_t k = spectrum.lambdas.size();

    std::vector<double> x(k, 1.0 / static_cast<double>(k));
    double value = g_objective(spectrum.lambdas, x, eps);
    double step = 1.0;
    bool converged = false;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        std::vector<double> grad = g_gradient(spectrum.lambdas, x, eps);

        std::vector<double> probe(k);
        for (size_t i = 0; i < k; ++i) probe[i] = x[i] - grad[i];
        probe = project_simplex(probe);
        double stationarity = 0.0;
        for (size_t i = 0; i < k; ++i) {
            double diff = probe[i] - x[i];
            stationarity += diff * diff;
        }
        if (std::sqrt(stationarity) < kStationarityTol) {
            converged = true;
            break;
        }

        step = std::min(step * 2.0, 1e6);
        bool accepted = false;
        for (int backtrack = 0; backtrack < 80; ++backtrack) {
            std::vector<double> candidate(k);
            for (size_t i = 0; i < k; ++i) candidate[i] = x[i] - step * grad[i];
            candidate = project_simplex(candidate);
            double directional = 0.0;
            for (size_t i = 0; i < k; ++i) {
                directional += grad[i] * (candidate[i] - x[i]);
            }
            double candidate_value = g_objective(spectrum.lambdas, candidate, eps);
            if (candidate_value <= value + 1e-4 * directional) {
                x = std::move(candidate);
                value = candidate_value;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // Steps underflowed: the iterate is as stationary as the
            // quadrature allows.
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "beamformer optimization did not reach stationarity within " << kMaxIterations
            << " iterations; best objective " << value;
        throw NumericError(msg.str());
    }
    return finish_design(spectrum, x, eps, BeamformerMethod::Exact);
}

BeamformerDesign optimize_waterfill(const ComplexMatrix& sigma, double d_min, double sigma2) {
    const double eps = validate_eps(d_min, sigma2);
    const double beta = 1.0 / eps;  // 8 sigma^2 / d_min^2
    SortedSpectrum spectrum = positive_spectrum(sigma);
    const int modes = static_cast<int>(spectrum.lambdas.size());

    int m0 = 0;
    double level = 0.0;
    double inv_sum = 0.0;
    for (int count = 1; count <= modes; ++count) {
        inv_sum += 1.0 / spectrum.lambdas[count - 1];
        double candidate_level = (1.0 + beta * inv_sum) / count;
        // The weakest admitted mode decides positivity for the whole set.
        if (candidate_level - beta / spectrum.lambdas[count - 1] > 0.0) {
            m0 = count;
            level = candidate_level;
        } else {
            break;
        }
    }
    std::vector<double> x(spectrum.lambdas.size(), 0.0);
    for (int i = 0; i < m0; ++i) {
        x[i] = level - beta / spectrum.lambdas[i];
    }
    return finish_design(spectrum, x, eps, BeamformerMethod::Waterfill);
}

BeamformerDesign identity_beamformer(int m, int k) {
    if (k < 1 || m < 1) throw ArgumentError("dimensions must be positive");
    if (k > m) throw ArgumentError("active dimensions cannot exceed antennas");
    BeamformerDesign d;
    d.method = BeamformerMethod::Identity;
    d.k = k;
    const double gain = 1.0 / std::sqrt(static_cast<double>(k));
    d.gammas.assign(k, gain);
    d.b = ComplexMatrix(k, m);
    for (int i = 0; i < k; ++i) d.b(i, i) = gain;
    d.objective_value = std::numeric_limits<double>::quiet_NaN();
    return d;
}

}  // namespace toepsim
