#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cslr/model.hpp"

namespace cslr {

// Right-continuous non-decreasing step function with values in [0, 1]:
// F(u) = values[j] for knots[j] <= u < knots[j + 1], 0 before the first knot.
class StepDistribution {
public:
    StepDistribution() = default;
    StepDistribution(std::vector<double> knots, std::vector<double> values);

    double operator()(double u) const;

    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<double>& values() const noexcept { return values_; }
    bool empty() const noexcept { return knots_.empty(); }

    // Value reached after the last knot.
    double total_mass() const noexcept { return values_.empty() ? 0.0 : values_.back(); }

    // (location, mass) for every strictly positive jump.
    std::vector<std::pair<double, double>> jumps() const;

private:
    std::vector<double> knots_;
    std::vector<double> values_;
};

struct CusumPoint {
    std::size_t index = 0;
    double cumulative = 0.0;
};

// (0, 0) followed by (i, sum_{j <= i} delta_(j)), i = 1..n.
std::vector<CusumPoint> cusum_diagram(const ResidualOrder& order);

// Weighted isotonic (non-decreasing) least squares fit by pool adjacent
// violators. Equals the left slopes of the greatest convex minorant of the
// cumulative sum diagram of (w, w * y).
std::vector<double> pava(std::span<const double> y, std::span<const double> w);

// Fixed-beta NPMLE together with the residual ordering it was computed from.
struct MleFit {
    ResidualOrder order;
    StepDistribution distribution;
    std::vector<double> fitted;  // F-hat at each entry of `order`
};

MleFit fit_mle(const Sample& sample, std::span<const double> beta);
StepDistribution mle_fixed_beta(const Sample& sample, std::span<const double> beta);

// Bernoulli log likelihood sum_i delta_i log F_i + (1 - delta_i) log(1 - F_i)
// with 0 log 0 = 0. Points with F in {0, 1} and a contradicting indicator
// give -infinity.
double log_likelihood(std::span<const int> delta, std::span<const double> fitted);

// Same sum restricted to F_i in [eps, 1 - eps].
double truncated_log_likelihood(std::span<const int> delta, std::span<const double> fitted,
                                const TruncationSpec& trunc);

// Truncated log likelihood of the fixed-beta MLE, as a function of beta.
double profile_log_likelihood(const Sample& sample, std::span<const double> beta,
                              const TruncationSpec& trunc);

}  // namespace cslr
