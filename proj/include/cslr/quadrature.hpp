#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace cslr {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Rules are computed once per order and cached; safe to call concurrently.
const GaussLegendreRule& gauss_legendre(int order);

template <class F>
double integrate_gauss_legendre(const F& f, double a, double b, int order) {
    const auto& rule = gauss_legendre(order);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

// Applies the rule on each cell between consecutive breakpoints. Breakpoints
// must be ascending; integrands with kinks should list the kinks here.
template <class F>
double integrate_piecewise(const F& f, std::span<const double> breakpoints, int order) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (breakpoints[i + 1] > breakpoints[i])
            sum += integrate_gauss_legendre(f, breakpoints[i], breakpoints[i + 1], order);
    }
    return sum;
}

struct QuadratureResult {
    double value = 0.0;
    double change = 0.0;  // |last - previous| refinement difference
    int order = 0;
    bool converged = false;
};

// Doubles the order (64 -> 128 -> 256 by default) until two successive
// estimates agree to `tol`.
template <class F>
QuadratureResult integrate_refined(const F& f, std::span<const double> breakpoints, double tol,
                                   int first_order = 64, int max_order = 256) {
    QuadratureResult res;
    double previous = integrate_piecewise(f, breakpoints, first_order);
    for (int order = 2 * first_order; order <= max_order; order *= 2) {
        const double current = integrate_piecewise(f, breakpoints, order);
        res.value = current;
        res.change = std::abs(current - previous);
        res.order = order;
        if (res.change < tol) {
            res.converged = true;
            return res;
        }
        previous = current;
    }
    return res;
}

// Sorts, clips to [lo, hi] and deduplicates a list of candidate kinks.
std::vector<double> make_breakpoints(double lo, double hi, std::vector<double> interior);

}  // namespace cslr
