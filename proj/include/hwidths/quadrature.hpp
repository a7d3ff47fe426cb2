#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "hwidths/errors.hpp"

namespace hwidths {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1)
        throw BadParameter("gauss_legendre: need at least one node");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = -p1 / pp;
            z += dz;
            if (std::abs(dz) < std::numeric_limits<double>::epsilon())
                break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return rule;
}

/// Composite rule over [0, T] with geometrically graded panels, finest near
/// zero: boundaries 0, T/2^{p-1}, T/2^{p-2}, ..., T.
inline QuadratureRule graded_panels(double horizon, int nodes_per_panel, int panels) {
    if (!(horizon > 0.0))
        throw BadParameter("graded_panels: horizon must be positive");
    if (nodes_per_panel < 1 || panels < 1)
        throw BadParameter("graded_panels: need at least one node and one panel");
    const QuadratureRule base = gauss_legendre(nodes_per_panel);
    QuadratureRule rule;
    rule.nodes.reserve(static_cast<size_t>(nodes_per_panel) * panels);
    rule.weights.reserve(static_cast<size_t>(nodes_per_panel) * panels);
    double left = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double right = horizon * std::pow(2.0, static_cast<double>(p + 1 - panels));
        const double mid = 0.5 * (left + right);
        const double halfwidth = 0.5 * (right - left);
        for (int j = 0; j < nodes_per_panel; ++j) {
            rule.nodes.push_back(mid + halfwidth * base.nodes[j]);
            rule.weights.push_back(halfwidth * base.weights[j]);
        }
        left = right;
    }
    return rule;
}

} // namespace hwidths
