#pragma once

#include <vector>

namespace oamcoinc {

/// Gauss-Legendre rule on [-1, 1].
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes/weights for an n-point Gauss-Legendre rule (cached, thread-safe).
const QuadRule& gauss_legendre(int n);

/// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
template <class F>
double integrate(F&& f, double a, double b, int n) {
    const QuadRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

}  // namespace oamcoinc
