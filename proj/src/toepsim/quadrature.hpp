#pragma once

#include <functional>
#include <vector>

namespace toepsim {

struct QuadratureRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre rule of the given order, cached per order.
const QuadratureRule& gauss_legendre(int points);

// Fixed-order Gauss-Legendre integration of f over [a, b]. Throws
// NumericError when the integrand produces a non-finite value.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int points = 128);

// Gaussian tail probability evaluated through its finite-interval integral
// representation: (1/pi) * int_0^{pi/2} exp(-z^2 / (2 sin^2 t)) dt, z >= 0.
double q_function(double z);

// Squared tail probability through the same representation truncated at
// pi/4; equals q_function(z)^2.
double q_squared(double z);

}  // namespace toepsim
