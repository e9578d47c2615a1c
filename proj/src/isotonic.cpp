#include "cslr/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cslr/error.hpp"

namespace cslr {

StepDistribution::StepDistribution(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.size() != values_.size())
        throw Error(ErrorCode::DimensionMismatch, "knots and values differ in length");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (i > 0 && !(knots_[i] > knots_[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "knots must be strictly ascending");
        if (i > 0 && values_[i] < values_[i - 1])
            throw Error(ErrorCode::InvalidArgument, "values must be non-decreasing");
        if (values_[i] < 0.0 || values_[i] > 1.0)
            throw Error(ErrorCode::InvalidArgument, "values must lie in [0, 1]");
    }
}

double StepDistribution::operator()(double u) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
    if (it == knots_.begin()) return 0.0;
    return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

std::vector<std::pair<double, double>> StepDistribution::jumps() const {
    std::vector<std::pair<double, double>> out;
    double previous = 0.0;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        const double mass = values_[i] - previous;
        if (mass > 0.0) out.emplace_back(knots_[i], mass);
        previous = values_[i];
    }
    return out;
}

std::vector<CusumPoint> cusum_diagram(const ResidualOrder& order) {
    if (order.entries.empty()) throw Error(ErrorCode::InvalidArgument, "empty residual order");
    std::vector<CusumPoint> points;
    points.reserve(order.size() + 1);
    points.push_back({0, 0.0});
    double sum = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        sum += order.entries[i].delta;
        points.push_back({i + 1, sum});
    }
    return points;
}

std::vector<double> pava(std::span<const double> y, std::span<const double> w) {
    if (y.size() != w.size()) throw Error(ErrorCode::DimensionMismatch, "pava: y and w differ in length");
    struct Block {
        double sum_wy;
        double sum_w;
        std::size_t count;
        double mean() const { return sum_wy / sum_w; }
    };
    std::vector<Block> stack;
    stack.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        stack.push_back({w[i] * y[i], w[i], 1});
        while (stack.size() > 1 && stack[stack.size() - 2].mean() >= stack.back().mean()) {
            const Block top = stack.back();
            stack.pop_back();
            stack.back().sum_wy += top.sum_wy;
            stack.back().sum_w += top.sum_w;
            stack.back().count += top.count;
        }
    }
    std::vector<double> fit;
    fit.reserve(y.size());
    for (const auto& b : stack) fit.insert(fit.end(), b.count, b.mean());
    return fit;
}

MleFit fit_mle(const Sample& sample, std::span<const double> beta) {
    MleFit fit;
    fit.order = residual_order(sample, beta);
    const auto& entries = fit.order.entries;

    // Pool exactly equal residuals into weighted blocks first.
    std::vector<double> knots;
    std::vector<double> means;
    std::vector<double> weights;
    std::vector<std::size_t> block_of(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (knots.empty() || entries[i].u != knots.back()) {
            knots.push_back(entries[i].u);
            means.push_back(0.0);
            weights.push_back(0.0);
        }
        means.back() += entries[i].delta;
        weights.back() += 1.0;
        block_of[i] = knots.size() - 1;
    }
    for (std::size_t b = 0; b < means.size(); ++b) means[b] /= weights[b];

    auto values = pava(means, weights);
    for (double& v : values) v = std::clamp(v, 0.0, 1.0);

    fit.fitted.resize(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) fit.fitted[i] = values[block_of[i]];
    fit.distribution = StepDistribution(std::move(knots), std::move(values));
    return fit;
}

StepDistribution mle_fixed_beta(const Sample& sample, std::span<const double> beta) {
    return fit_mle(sample, beta).distribution;
}

namespace {

double bernoulli_term(int delta, double f) {
    if (delta == 1) return f > 0.0 ? std::log(f) : -std::numeric_limits<double>::infinity();
    return f < 1.0 ? std::log1p(-f) : -std::numeric_limits<double>::infinity();
}

}  // namespace

double log_likelihood(std::span<const int> delta, std::span<const double> fitted) {
    if (delta.size() != fitted.size())
        throw Error(ErrorCode::DimensionMismatch, "log likelihood: lengths differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) sum += bernoulli_term(delta[i], fitted[i]);
    return sum;
}

double truncated_log_likelihood(std::span<const int> delta, std::span<const double> fitted,
                                const TruncationSpec& trunc) {
    if (delta.size() != fitted.size())
        throw Error(ErrorCode::DimensionMismatch, "log likelihood: lengths differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i)
        if (trunc.contains(fitted[i])) sum += bernoulli_term(delta[i], fitted[i]);
    return sum;
}

double profile_log_likelihood(const Sample& sample, std::span<const double> beta,
                              const TruncationSpec& trunc) {
    const auto fit = fit_mle(sample, beta);
    std::vector<int> delta(fit.order.size());
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = fit.order.entries[i].delta;
    return truncated_log_likelihood(delta, fit.fitted, trunc);
}

}  // namespace cslr
