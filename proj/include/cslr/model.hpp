#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace cslr {

// One current status observation: inspection time t, covariates x and the
// indicator delta = 1{Y <= t}.
struct Observation {
    double t = 0.0;
    std::vector<double> x;
    int delta = 0;
};

// Immutable censored sample. Covariates are stored row-major, n rows of k.
class Sample {
public:
    Sample(std::vector<double> t, std::vector<double> x, std::vector<int> delta, std::size_t k);

    static Sample from_observations(std::span<const Observation> observations);

    std::size_t size() const noexcept { return t_.size(); }
    std::size_t dim() const noexcept { return k_; }

    double t(std::size_t i) const { return t_[i]; }
    int delta(std::size_t i) const { return delta_[i]; }
    std::span<const double> x(std::size_t i) const { return {x_.data() + i * k_, k_}; }
    double x(std::size_t i, std::size_t j) const { return x_[i * k_ + j]; }

    const std::vector<double>& times() const noexcept { return t_; }
    const std::vector<double>& covariates() const noexcept { return x_; }
    const std::vector<int>& deltas() const noexcept { return delta_; }

    Observation observation(std::size_t i) const;

    // Same (t, x) with replaced indicators; used by the bootstrap.
    Sample with_deltas(std::vector<int> deltas) const;

    // Same rows in the order given by `perm` (row i of the result is row
    // perm[i] of this sample).
    Sample permuted(std::span<const std::size_t> perm) const;

    friend bool operator==(const Sample&, const Sample&) = default;

private:
    std::vector<double> t_;
    std::vector<double> x_;
    std::vector<int> delta_;
    std::size_t k_;
};

void check_dimension(const Sample& sample, std::span<const double> beta);

// u_i = t_i - beta'x_i.
double residual(const Sample& sample, std::size_t i, std::span<const double> beta);
std::vector<double> residuals(const Sample& sample, std::span<const double> beta);

struct ResidualEntry {
    double u = 0.0;
    int delta = 0;
    std::size_t index = 0;
};

// Residuals in ascending order, ties kept in original row order.
struct ResidualOrder {
    std::vector<ResidualEntry> entries;

    std::size_t size() const noexcept { return entries.size(); }
};

ResidualOrder residual_order(const Sample& sample, std::span<const double> beta);

// Scores and likelihoods only use points whose distribution estimate lies in
// [eps, 1 - eps]. eps = 0 is accepted (no truncation).
struct TruncationSpec {
    double eps = 0.001;

    void validate() const;
    bool contains(double value) const noexcept { return value >= eps && value <= 1.0 - eps; }
};

// Distribution of the regression error. `cdf` and `density` may be replaced
// to plug in another law; `lower`/`upper` bound its support.
struct ErrorLaw {
    std::function<double(double)> cdf;
    std::function<double(double)> density;
    double lower = 0.0;
    double upper = 1.0;

    // Rescaled Beta(2,2): f(u) = 384 (u - 0.375)(0.625 - u) on [0.375, 0.625].
    static ErrorLaw rescaled_beta22();
};

double rescaled_beta22_cdf(double u) noexcept;
double rescaled_beta22_density(double u) noexcept;

struct UniformRange {
    double lo = 0.0;
    double hi = 1.0;

    double width() const noexcept { return hi - lo; }
};

// Y = beta0'X + eps with T and the components of X independent uniforms and
// eps independent of (T, X).
struct ModelSpec {
    std::vector<double> beta0;
    UniformRange t_range{0.0, 2.0};
    std::vector<UniformRange> x_ranges;
    ErrorLaw error;

    std::size_t dim() const noexcept { return beta0.size(); }
    void validate() const;

    // beta0 = 0.5, T and X uniform on (0, 2), rescaled Beta(2,2) errors.
    static ModelSpec simulation_default();
};

// Row i is drawn from its own counter-based stream keyed by (seed, i), so a
// sample of size n is a prefix of the sample of size n + 1 with the same seed.
Sample simulate(const ModelSpec& model, std::size_t n, std::uint64_t seed);

double draw_error(const ModelSpec& model, double uniform);

double error_cdf(const ModelSpec& model, double u);
double error_density(const ModelSpec& model, double u);

// Inverts the error CDF by bisection to 1e-12.
double error_quantile(const ModelSpec& model, double p);

// Conditional law of X given T - beta X = u for k = 1: uniform on [lo, hi];
// `density` is the marginal density of T - beta X at u.
struct CovariateConditional {
    double lo = 0.0;
    double hi = 0.0;
    double density = 0.0;

    bool feasible() const noexcept { return hi > lo && density > 0.0; }
    double mean() const noexcept { return 0.5 * (lo + hi); }
    double variance() const noexcept { return (hi - lo) * (hi - lo) / 12.0; }
    double second_moment() const noexcept { return variance() + mean() * mean(); }
};

CovariateConditional covariate_conditional(const ModelSpec& model, double beta, double u);

// Density of T - beta X (trapezoidal convolution of two uniforms).
double residual_density(const ModelSpec& model, double beta, double u);

// Support of T - beta X and the points where its density has kinks.
std::vector<double> residual_density_knots(const ModelSpec& model, double beta);

// F_beta(u) = E[F0(u + (beta - beta0) X) | T - beta X = u]: the limit of the
// fixed-beta MLE when beta is not the true parameter.
double f_beta(const ModelSpec& model, double beta, double u);

// Same quantity computed from the joint densities by 64-node Gauss-Legendre
// quadrature over the covariate axis, without the closed-form conditional.
double f_beta_quadrature(const ModelSpec& model, double beta, double u);

}  // namespace cslr
