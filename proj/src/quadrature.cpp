#include "patsvd/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "patsvd/error.hpp"

namespace patsvd {

GaussLegendre gauss_legendre(std::size_t n) {
    if (n == 0) throw ConfigError("Gauss-Legendre rule needs at least one node");
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess, then Newton on P_n
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double dk = static_cast<double>(k);
                const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
                p0 = p1;
                p1 = p2;
            }
            dp = dn * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double dk = static_cast<double>(k);
            const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
            p0 = p1;
            p1 = p2;
        }
        dp = dn * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[n - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[i] = rule.weights[n - 1 - i] = w;
    }
    return rule;
}

double integrate(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
    static const GaussLegendre rule = gauss_legendre(8);
    const double h = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * h;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
    return 0.5 * h * sum;
}

} // namespace patsvd
