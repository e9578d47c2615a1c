#include "cslr/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cslr/error.hpp"
#include "cslr/quadrature.hpp"
#include "cslr/rng.hpp"

namespace cslr {

Sample::Sample(std::vector<double> t, std::vector<double> x, std::vector<int> delta, std::size_t k)
    : t_(std::move(t)), x_(std::move(x)), delta_(std::move(delta)), k_(k) {
    if (k_ == 0) throw Error(ErrorCode::InvalidArgument, "covariate dimension must be positive");
    if (t_.empty()) throw Error(ErrorCode::InvalidArgument, "sample must contain at least one observation");
    if (delta_.size() != t_.size() || x_.size() != t_.size() * k_)
        throw Error(ErrorCode::DimensionMismatch, "sample columns have inconsistent lengths");
    for (int d : delta_)
        if (d != 0 && d != 1) throw Error(ErrorCode::InvalidArgument, "delta must be 0 or 1");
}

Sample Sample::from_observations(std::span<const Observation> observations) {
    if (observations.empty())
        throw Error(ErrorCode::InvalidArgument, "sample must contain at least one observation");
    const std::size_t k = observations.front().x.size();
    std::vector<double> t;
    std::vector<double> x;
    std::vector<int> delta;
    t.reserve(observations.size());
    x.reserve(observations.size() * k);
    delta.reserve(observations.size());
    for (const auto& obs : observations) {
        if (obs.x.size() != k)
            throw Error(ErrorCode::DimensionMismatch, "observations have different covariate lengths");
        t.push_back(obs.t);
        x.insert(x.end(), obs.x.begin(), obs.x.end());
        delta.push_back(obs.delta);
    }
    return Sample(std::move(t), std::move(x), std::move(delta), k);
}

Observation Sample::observation(std::size_t i) const {
    auto row = x(i);
    return Observation{t_[i], std::vector<double>(row.begin(), row.end()), delta_[i]};
}

Sample Sample::with_deltas(std::vector<int> deltas) const {
    return Sample(t_, x_, std::move(deltas), k_);
}

Sample Sample::permuted(std::span<const std::size_t> perm) const {
    if (perm.size() != size()) throw Error(ErrorCode::DimensionMismatch, "permutation length differs from n");
    std::vector<double> t(size());
    std::vector<double> x(x_.size());
    std::vector<int> d(size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        t[i] = t_[perm[i]];
        d[i] = delta_[perm[i]];
        std::copy_n(x_.begin() + perm[i] * k_, k_, x.begin() + i * k_);
    }
    return Sample(std::move(t), std::move(x), std::move(d), k_);
}

void check_dimension(const Sample& sample, std::span<const double> beta) {
    if (beta.size() != sample.dim())
        throw Error(ErrorCode::DimensionMismatch,
                    "beta has length " + std::to_string(beta.size()) + " but the sample has k = " +
                        std::to_string(sample.dim()));
}

double residual(const Sample& sample, std::size_t i, std::span<const double> beta) {
    double u = sample.t(i);
    auto x = sample.x(i);
    for (std::size_t j = 0; j < x.size(); ++j) u -= beta[j] * x[j];
    return u;
}

std::vector<double> residuals(const Sample& sample, std::span<const double> beta) {
    check_dimension(sample, beta);
    std::vector<double> u(sample.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = residual(sample, i, beta);
    return u;
}

ResidualOrder residual_order(const Sample& sample, std::span<const double> beta) {
    const auto u = residuals(sample, beta);
    ResidualOrder order;
    order.entries.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) order.entries[i] = {u[i], sample.delta(i), i};
    std::stable_sort(order.entries.begin(), order.entries.end(),
                     [](const ResidualEntry& a, const ResidualEntry& b) { return a.u < b.u; });
    return order;
}

void TruncationSpec::validate() const {
    if (!(eps >= 0.0 && eps < 0.5))
        throw Error(ErrorCode::InvalidArgument, "truncation eps must lie in [0, 0.5)");
}

double rescaled_beta22_cdf(double u) noexcept {
    const double s = std::clamp((u - 0.375) / 0.25, 0.0, 1.0);
    return s * s * (3.0 - 2.0 * s);
}

double rescaled_beta22_density(double u) noexcept {
    if (u <= 0.375 || u >= 0.625) return 0.0;
    return 384.0 * (u - 0.375) * (0.625 - u);
}

ErrorLaw ErrorLaw::rescaled_beta22() {
    return ErrorLaw{rescaled_beta22_cdf, rescaled_beta22_density, 0.375, 0.625};
}

void ModelSpec::validate() const {
    if (beta0.empty()) throw Error(ErrorCode::InvalidArgument, "model needs at least one covariate");
    if (x_ranges.size() != beta0.size())
        throw Error(ErrorCode::DimensionMismatch, "one covariate range is needed per coefficient");
    if (!(t_range.hi > t_range.lo)) throw Error(ErrorCode::InvalidArgument, "empty T range");
    for (const auto& r : x_ranges)
        if (!(r.hi > r.lo)) throw Error(ErrorCode::InvalidArgument, "empty X range");
    if (!error.cdf || !error.density || !(error.upper > error.lower))
        throw Error(ErrorCode::InvalidArgument, "incomplete error law");
}

ModelSpec ModelSpec::simulation_default() {
    ModelSpec m;
    m.beta0 = {0.5};
    m.t_range = {0.0, 2.0};
    m.x_ranges = {{0.0, 2.0}};
    m.error = ErrorLaw::rescaled_beta22();
    return m;
}

double error_cdf(const ModelSpec& model, double u) {
    if (u <= model.error.lower) return 0.0;
    if (u >= model.error.upper) return 1.0;
    return model.error.cdf(u);
}

double error_density(const ModelSpec& model, double u) {
    if (u < model.error.lower || u > model.error.upper) return 0.0;
    return model.error.density(u);
}

double error_quantile(const ModelSpec& model, double p) {
    double lo = model.error.lower;
    double hi = model.error.upper;
    if (p <= 0.0) return lo;
    if (p >= 1.0) return hi;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (model.error.cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double draw_error(const ModelSpec& model, double uniform) { return error_quantile(model, uniform); }

Sample simulate(const ModelSpec& model, std::size_t n, std::uint64_t seed) {
    model.validate();
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
    const std::size_t k = model.dim();
    std::vector<double> t(n);
    std::vector<double> x(n * k);
    std::vector<int> delta(n);
    for (std::size_t i = 0; i < n; ++i) {
        CounterRng rng(seed, i);
        t[i] = rng.uniform(model.t_range.lo, model.t_range.hi);
        double y = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double xij = rng.uniform(model.x_ranges[j].lo, model.x_ranges[j].hi);
            x[i * k + j] = xij;
            y += model.beta0[j] * xij;
        }
        y += draw_error(model, rng.uniform());
        delta[i] = y <= t[i] ? 1 : 0;
    }
    return Sample(std::move(t), std::move(x), std::move(delta), k);
}

namespace {

void require_scalar_model(const ModelSpec& model) {
    if (model.dim() != 1 || model.x_ranges.size() != 1)
        throw Error(ErrorCode::UnsupportedModel, "closed-form conditionals need a single covariate");
}

}  // namespace

CovariateConditional covariate_conditional(const ModelSpec& model, double beta, double u) {
    require_scalar_model(model);
    const auto& xr = model.x_ranges[0];
    const auto& tr = model.t_range;
    CovariateConditional c;
    c.lo = xr.lo;
    c.hi = xr.hi;
    // Feasible x: x in the X range and u + beta x in the T range.
    if (beta > 0.0) {
        c.lo = std::max(c.lo, (tr.lo - u) / beta);
        c.hi = std::min(c.hi, (tr.hi - u) / beta);
    } else if (beta < 0.0) {
        c.lo = std::max(c.lo, (tr.hi - u) / beta);
        c.hi = std::min(c.hi, (tr.lo - u) / beta);
    } else if (u < tr.lo || u > tr.hi) {
        c.hi = c.lo;
    }
    if (c.hi > c.lo)
        c.density = (c.hi - c.lo) / (xr.width() * tr.width());
    else
        c.hi = c.lo;
    return c;
}

double residual_density(const ModelSpec& model, double beta, double u) {
    return covariate_conditional(model, beta, u).density;
}

std::vector<double> residual_density_knots(const ModelSpec& model, double beta) {
    require_scalar_model(model);
    const auto& xr = model.x_ranges[0];
    const auto& tr = model.t_range;
    std::vector<double> knots = {tr.lo - beta * xr.lo, tr.lo - beta * xr.hi, tr.hi - beta * xr.lo,
                                 tr.hi - beta * xr.hi};
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    return knots;
}

double f_beta(const ModelSpec& model, double beta, double u) {
    const auto cond = covariate_conditional(model, beta, u);
    if (!cond.feasible())
        throw Error(ErrorCode::InvalidArgument, "density of T - beta X is zero at u = " + std::to_string(u));
    const double shift = beta - model.beta0[0];
    if (shift == 0.0) return error_cdf(model, u);
    // Average of F0(u + shift * x) over x uniform on [lo, hi]; the integrand
    // has kinks where u + shift * x leaves the error support.
    auto integrand = [&](double x) { return error_cdf(model, u + shift * x); };
    const auto breaks = make_breakpoints(
        cond.lo, cond.hi, {(model.error.lower - u) / shift, (model.error.upper - u) / shift});
    const auto res = integrate_refined(integrand, breaks, 1e-12, 16, 256);
    return std::clamp(res.value / (cond.hi - cond.lo), 0.0, 1.0);
}

double f_beta_quadrature(const ModelSpec& model, double beta, double u) {
    require_scalar_model(model);
    const auto& xr = model.x_ranges[0];
    const auto& tr = model.t_range;
    const double shift = beta - model.beta0[0];
    auto joint = [&](double x) {
        const double t = u + beta * x;
        const double ft = (t >= tr.lo && t <= tr.hi) ? 1.0 / tr.width() : 0.0;
        return ft / xr.width();
    };
    std::vector<double> kinks;
    if (beta != 0.0) {
        kinks.push_back((tr.lo - u) / beta);
        kinks.push_back((tr.hi - u) / beta);
    }
    if (shift != 0.0) {
        kinks.push_back((model.error.lower - u) / shift);
        kinks.push_back((model.error.upper - u) / shift);
    }
    const auto breaks = make_breakpoints(xr.lo, xr.hi, kinks);
    const double mass = integrate_piecewise(joint, breaks, 64);
    if (!(mass > 0.0))
        throw Error(ErrorCode::InvalidArgument, "density of T - beta X is zero at u = " + std::to_string(u));
    const double weighted = integrate_piecewise(
        [&](double x) { return error_cdf(model, u + shift * x) * joint(x); }, breaks, 64);
    return std::clamp(weighted / mass, 0.0, 1.0);
}

}  // namespace cslr
