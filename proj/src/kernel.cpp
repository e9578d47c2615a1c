#include "cslr/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cslr/error.hpp"

namespace cslr {

double triweight(double u) noexcept {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    const double a = 1.0 - u * u;
    return 1.09375 * a * a * a;
}

double triweight_derivative(double u) noexcept {
    if (u <= -1.0 || u >= 1.0) return 0.0;
    const double a = 1.0 - u * u;
    return -6.5625 * u * a * a;
}

void KernelConfig::validate() const {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
    if (kernel.value == nullptr || kernel.derivative == nullptr)
        throw Error(ErrorCode::InvalidArgument, "kernel functions are not set");
}

double bandwidth_for(double c, std::size_t n, double rate) {
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "bandwidth constant must be positive");
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
    return c * std::pow(static_cast<double>(n), -rate);
}

double smoothed_density(const StepDistribution& F, const KernelConfig& cfg, double u) {
    cfg.validate();
    const double h = cfg.bandwidth;
    const auto& knots = F.knots();
    const auto& values = F.values();
    auto first = std::lower_bound(knots.begin(), knots.end(), u - h);
    auto last = std::upper_bound(knots.begin(), knots.end(), u + h);
    double sum = 0.0;
    for (auto it = first; it != last; ++it) {
        const auto j = static_cast<std::size_t>(it - knots.begin());
        const double mass = values[j] - (j == 0 ? 0.0 : values[j - 1]);
        if (mass > 0.0) sum += mass * cfg.kernel.value((u - knots[j]) / h);
    }
    return sum / h;
}

PluginSmoother::PluginSmoother(const Sample& sample, std::span<const double> beta, KernelConfig cfg)
    : n_(sample.size()),
      k_(sample.dim()),
      beta_(beta.begin(), beta.end()),
      cfg_(cfg),
      t_(sample.times()),
      x_(sample.covariates()) {
    cfg_.validate();
    const auto u = residuals(sample, beta);
    std::vector<std::size_t> order(n_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
    sorted_u_.resize(n_);
    sorted_delta_.resize(n_);
    sorted_x_.resize(n_ * k_);
    rank_.resize(n_);
    for (std::size_t r = 0; r < n_; ++r) {
        const std::size_t i = order[r];
        sorted_u_[r] = u[i];
        sorted_delta_[r] = sample.delta(i);
        std::copy_n(x_.begin() + i * k_, k_, sorted_x_.begin() + r * k_);
        rank_[i] = r;
    }
}

std::optional<double> PluginSmoother::distribution(double v) const {
    const double h = cfg_.bandwidth;
    const auto first = static_cast<std::size_t>(
        std::lower_bound(sorted_u_.begin(), sorted_u_.end(), v - h) - sorted_u_.begin());
    const auto last = static_cast<std::size_t>(
        std::upper_bound(sorted_u_.begin(), sorted_u_.end(), v + h) - sorted_u_.begin());
    double s0 = 0.0;
    double s1 = 0.0;
    for (std::size_t r = first; r < last; ++r) {
        const double w = cfg_.kernel.value((v - sorted_u_[r]) / h);
        s0 += w;
        s1 += sorted_delta_[r] * w;
    }
    if (!(s0 > 0.0)) return std::nullopt;
    return std::clamp(s1 / s0, 0.0, 1.0);
}

namespace {

struct InlineTriweight {
    static double value(double z) noexcept {
        if (z <= -1.0 || z >= 1.0) return 0.0;
        const double a = 1.0 - z * z;
        return 1.09375 * a * a * a;
    }
    static double derivative(double z) noexcept {
        if (z <= -1.0 || z >= 1.0) return 0.0;
        const double a = 1.0 - z * z;
        return -6.5625 * z * a * a;
    }
};

struct DynamicKernel {
    const Kernel* kernel;
    double value(double z) const noexcept { return kernel->value(z); }
    double derivative(double z) const noexcept { return kernel->derivative(z); }
};

// Kernel sums over the sorted rows [first, last) for one evaluation point.
struct WindowSums {
    double s0 = 0.0;   // sum K
    double s1 = 0.0;   // sum delta K
    double d0 = 0.0;   // sum K'
    double d1 = 0.0;   // sum delta K'
    double dx = 0.0;   // sum x K'        (k = 1 only)
    double ddx = 0.0;  // sum delta x K'  (k = 1 only)
};

template <class K>
WindowSums accumulate(const K& kern, double v, double inv_h, std::span<const double> u,
                      std::span<const double> delta, std::span<const double> x, std::size_t first,
                      std::size_t last, std::size_t skip, bool with_derivative) {
    WindowSums s;
    if (!with_derivative) {
        for (std::size_t r = first; r < last; ++r) {
            if (r == skip) continue;
            const double w = kern.value((v - u[r]) * inv_h);
            s.s0 += w;
            s.s1 += delta[r] * w;
        }
        return s;
    }
    for (std::size_t r = first; r < last; ++r) {
        if (r == skip) continue;
        const double z = (v - u[r]) * inv_h;
        const double w = kern.value(z);
        const double wd = kern.derivative(z);
        const double dj = delta[r];
        s.s0 += w;
        s.s1 += dj * w;
        s.d0 += wd;
        s.d1 += dj * wd;
        if (!x.empty()) {
            s.dx += x[r] * wd;
            s.ddx += dj * x[r] * wd;
        }
    }
    return s;
}

}  // namespace

std::optional<PluginSmoother::Value> PluginSmoother::evaluate(double t, std::span<const double> x,
                                                              bool with_derivative,
                                                              std::optional<std::size_t> skip) const {
    const std::size_t k = k_;
    if (x.size() != k) throw Error(ErrorCode::DimensionMismatch, "evaluation point has wrong dimension");
    double v = t;
    for (std::size_t j = 0; j < k; ++j) v -= beta_[j] * x[j];

    const double h = cfg_.bandwidth;
    const double inv_h = 1.0 / h;
    const auto first = static_cast<std::size_t>(
        std::lower_bound(sorted_u_.begin(), sorted_u_.end(), v - h) - sorted_u_.begin());
    const auto last = static_cast<std::size_t>(
        std::upper_bound(sorted_u_.begin(), sorted_u_.end(), v + h) - sorted_u_.begin());
    const std::size_t skip_rank = skip ? rank_[*skip] : n_;

    // F needs sum K and sum delta K. The derivative numerator
    //   sum_j (x_j - x)(delta_j - F) K'
    // expands into sums of delta x K', delta K', x K' and K', so one pass
    // suffices.
    const bool scalar = k == 1;
    const std::span<const double> xs = scalar ? std::span<const double>(sorted_x_) : std::span<const double>();
    const bool triweight_kernel =
        cfg_.kernel.value == kTriweight.value && cfg_.kernel.derivative == kTriweight.derivative;
    const WindowSums s =
        triweight_kernel
            ? accumulate(InlineTriweight{}, v, inv_h, sorted_u_, sorted_delta_, xs, first, last, skip_rank,
                         with_derivative)
            : accumulate(DynamicKernel{&cfg_.kernel}, v, inv_h, sorted_u_, sorted_delta_, xs, first, last,
                         skip_rank, with_derivative);
    if (!(s.s0 > 0.0)) return std::nullopt;

    Value out;
    const double F = s.s1 / s.s0;
    out.density = s.s0 / (h * static_cast<double>(n_));
    out.F = std::clamp(F, 0.0, 1.0);
    if (!with_derivative) return out;

    if (scalar) {
        out.dF_dbeta.assign(1, ((s.ddx - x[0] * s.d1) - F * (s.dx - x[0] * s.d0)) / (h * s.s0));
        return out;
    }
    std::vector<double> dx(k, 0.0);
    std::vector<double> ddx(k, 0.0);
    for (std::size_t r = first; r < last; ++r) {
        if (r == skip_rank) continue;
        const double wd = cfg_.kernel.derivative((v - sorted_u_[r]) * inv_h);
        for (std::size_t c = 0; c < k; ++c) {
            const double xj = sorted_x_[r * k + c];
            dx[c] += xj * wd;
            ddx[c] += sorted_delta_[r] * xj * wd;
        }
    }
    out.dF_dbeta.resize(k);
    for (std::size_t c = 0; c < k; ++c)
        out.dF_dbeta[c] = ((ddx[c] - x[c] * s.d1) - F * (dx[c] - x[c] * s.d0)) / (h * s.s0);
    return out;
}

std::optional<PluginSmoother::Value> PluginSmoother::at_observation(std::size_t i,
                                                                    bool with_derivative) const {
    std::optional<std::size_t> skip;
    if (cfg_.leave_one_out) skip = i;
    return evaluate(t_[i], std::span<const double>(x_.data() + i * k_, k_), with_derivative, skip);
}

std::optional<double> plugin_F(const Sample& sample, std::span<const double> beta,
                               const KernelConfig& cfg, double v) {
    return PluginSmoother(sample, beta, cfg).distribution(v);
}

std::optional<std::vector<double>> plugin_dF_dbeta(const Sample& sample, std::span<const double> beta,
                                                   const KernelConfig& cfg, double t,
                                                   std::span<const double> x) {
    auto value = PluginSmoother(sample, beta, cfg).evaluate(t, x, true);
    if (!value) return std::nullopt;
    return std::move(value->dF_dbeta);
}

}  // namespace cslr
