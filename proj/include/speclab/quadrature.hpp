#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace speclab {

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2q-1.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussRule(int q) : nodes(q), weights(q) {
        for (int i = 0; i < q; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= q; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = q * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    /// Integral of g over [a, b].
    template <class F>
    double integrate(F&& g, double a, double b) const {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * g(mid + half * nodes[i]);
        return half * s;
    }
};

} // namespace speclab
