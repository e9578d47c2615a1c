#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cslr/isotonic.hpp"
#include "cslr/model.hpp"

namespace cslr {

// K(u) = (35/32)(1 - u^2)^3 on [-1, 1].
double triweight(double u) noexcept;
// K'(u) = -(105/16) u (1 - u^2)^2 on [-1, 1].
double triweight_derivative(double u) noexcept;

// A second-order kernel supported on [-1, 1]; `derivative` must be K'.
struct Kernel {
    double (*value)(double) noexcept;
    double (*derivative)(double) noexcept;
};

inline constexpr Kernel kTriweight{&triweight, &triweight_derivative};

struct KernelConfig {
    double bandwidth = 0.1;
    Kernel kernel = kTriweight;
    // Drop the j = i term when smoothing at an observation. Off by default:
    // the sums include the diagonal term.
    bool leave_one_out = false;

    void validate() const;
};

// h = c * n^(-rate).
double bandwidth_for(double c, std::size_t n, double rate);

// f_nh(u) = sum over jumps w of F of (jump mass) * K_h(u - w).
double smoothed_density(const StepDistribution& F, const KernelConfig& cfg, double u);

// Nadaraya-Watson estimate of the error distribution at a fixed beta and its
// derivative in beta. Residuals are kept sorted so each evaluation only
// touches the observations within one bandwidth.
class PluginSmoother {
public:
    PluginSmoother(const Sample& sample, std::span<const double> beta, KernelConfig cfg);

    struct Value {
        double F = 0.0;
        std::vector<double> dF_dbeta;  // empty unless requested
        double density = 0.0;          // g_nh = n^-1 sum_j K_h(v - u_j)
    };

    // F_nh at residual v; nullopt when no residual lies within h of v.
    std::optional<double> distribution(double v) const;

    // F_nh and its beta-derivative at the point (t, x). `skip` names a
    // sample row to leave out of the sums.
    std::optional<Value> evaluate(double t, std::span<const double> x, bool with_derivative,
                                  std::optional<std::size_t> skip = std::nullopt) const;

    // Evaluates at sample row i, honouring `leave_one_out`.
    std::optional<Value> at_observation(std::size_t i, bool with_derivative) const;

    const KernelConfig& config() const noexcept { return cfg_; }
    std::span<const double> beta() const noexcept { return beta_; }

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<double> beta_;
    KernelConfig cfg_;
    // Columns permuted into ascending residual order.
    std::vector<double> sorted_u_;
    std::vector<double> sorted_delta_;
    std::vector<double> sorted_x_;
    std::vector<std::size_t> rank_;  // original row -> sorted position
    std::vector<double> t_;
    std::vector<double> x_;
};

std::optional<double> plugin_F(const Sample& sample, std::span<const double> beta,
                               const KernelConfig& cfg, double v);

std::optional<std::vector<double>> plugin_dF_dbeta(const Sample& sample, std::span<const double> beta,
                                                   const KernelConfig& cfg, double t,
                                                   std::span<const double> x);

}  // namespace cslr
