#pragma once

#include <string>
#include <vector>

#include "toepsim/matrix.hpp"

namespace toepsim {

enum class BeamformerMethod { Identity, Waterfill, Exact };

BeamformerMethod beamformer_from_token(const std::string& token);
std::string beamformer_token(BeamformerMethod method);

// Transmission matrix design: B = diag(gammas) * V_K^H where V_K stacks the
// leading eigenvectors of the channel covariance. Power satisfies
// sum(gamma_k^2) <= 1. For the identity method there is no covariance, so
// objective_value is NaN; otherwise it is the worst-case pairwise error
// integral at the returned allocation.
struct BeamformerDesign {
    int k;                       // active dimensions (rows of B)
    std::vector<double> gammas;  // k positive singular values
    ComplexMatrix b;             // k x m
    double objective_value;
    BeamformerMethod method;
};

// Worst-case pairwise error objective
//   G = (1/pi) int_0^{pi/2} prod_k (1 + eps lambda_k gamma_k^2 / sin^2 t)^{-1} dt
// with gamma_sq the squared singular values and eps = d_min^2 / (8 sigma^2).
double g_objective(const std::vector<double>& lambdas, const std::vector<double>& gamma_sq,
                   double eps);

// Gradient of g_objective with respect to gamma_sq (same quadrature).
std::vector<double> g_gradient(const std::vector<double>& lambdas,
                               const std::vector<double>& gamma_sq, double eps);

// Exact design: minimizes g_objective over the simplex {x >= 0, sum x <= 1}
// by projected gradient with backtracking. Throws NumericError when the
// projected gradient has not vanished after the iteration cap.
BeamformerDesign optimize_exact(const ComplexMatrix& sigma, double d_min, double sigma2);

// Water-filling allocation that minimizes the product Chernoff relaxation in
// closed form; spends the full power budget exactly.
BeamformerDesign optimize_waterfill(const ComplexMatrix& sigma, double d_min, double sigma2);

// Uninformed benchmark (1/sqrt(K)) [I_K | 0], unit power.
BeamformerDesign identity_beamformer(int m, int k);

}  // namespace toepsim
