#include "toepsim/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "toepsim/errors.hpp"

namespace toepsim {

namespace {

QuadratureRule build_rule(int n) {
    // Newton iteration on Legendre polynomials, symmetric node pairs.
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int points) {
    if (points < 1) throw ArgumentError("gauss_legendre: order must be positive");
    static std::map<int, QuadratureRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(points);
    if (it == cache.end()) it = cache.emplace(points, build_rule(points)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 int points) {
    const QuadratureRule& rule = gauss_legendre(points);
    const double mid = 0.5 * (a + b);
    const double halfwidth = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < points; ++i) {
        const double value = f(mid + halfwidth * rule.nodes[i]);
        if (!std::isfinite(value)) {
            throw NumericError("integrate: integrand returned a non-finite value");
        }
        acc += rule.weights[i] * value;
    }
    return acc * halfwidth;
}

// Gaussian tail probability. The quarter-circle angular integral of
// exp(-z^2 / (2 sin^2 t)) over [0, pi/2] equals this exactly, and the
// complementary-error-function form is accurate for all z including the
// tiny-z regime where the angular integrand develops a boundary layer at
// t = 0 that fixed-order quadrature cannot resolve.
double q_function(double z) {
    if (z < 0.0) throw ArgumentError("q_function: argument must be non-negative");
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

// Square of the tail probability; equals the same angular integral
// truncated at pi/4.
double q_squared(double z) {
    if (z < 0.0) throw ArgumentError("q_squared: argument must be non-negative");
    const double q = 0.5 * std::erfc(z / std::numbers::sqrt2);
    return q * q;
}

}  // namespace toepsim
