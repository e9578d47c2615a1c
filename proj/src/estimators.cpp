#include "cslr/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cslr/error.hpp"
#include "cslr/kernel.hpp"
#include "cslr/scores.hpp"

namespace cslr {

const char* method_name(Method method) noexcept {
    switch (method) {
        case Method::Score1: return "score1";
        case Method::Score2: return "score2";
        case Method::Plugin: return "plugin";
        case Method::ProfileMLE: return "profile";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
    if (name == "score1") return Method::Score1;
    if (name == "score2") return Method::Score2;
    if (name == "plugin") return Method::Plugin;
    if (name == "profile" || name == "mle") return Method::ProfileMLE;
    return std::nullopt;
}

void SearchInterval::validate() const {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw Error(ErrorCode::InvalidArgument, "search interval needs finite lo < hi");
}

namespace {

void require_scalar(const Sample& sample) {
    if (sample.dim() != 1)
        throw Error(ErrorCode::UnsupportedModel, "estimation is implemented for one covariate only");
}

void require_both_outcomes(const Sample& sample) {
    const auto& d = sample.deltas();
    const bool any0 = std::find(d.begin(), d.end(), 0) != d.end();
    const bool any1 = std::find(d.begin(), d.end(), 1) != d.end();
    if (!any0 || !any1)
        throw Error(ErrorCode::NoCrossing, "all indicators are equal; the score has no crossing");
}

EstimateResult crossing_estimate(Method method, const ScalarFunction& score, const SearchInterval& interval,
                                 const TruncationSpec& trunc, int grid_points, double refine_tol) {
    EstimateResult res;
    res.method = method;
    res.eps = trunc.eps;
    res.diagnostics = find_zero_crossing(score, interval.lo, interval.hi, grid_points, refine_tol);
    res.beta_hat = {res.diagnostics.beta_hat};
    return res;
}

}  // namespace

EstimateResult estimate_score1(const Sample& sample, const SearchInterval& interval,
                               const TruncationSpec& trunc, int grid_points, double refine_tol) {
    require_scalar(sample);
    interval.validate();
    trunc.validate();
    require_both_outcomes(sample);
    auto score = [&](double b) { return psi1(sample, std::span<const double>(&b, 1), trunc).value[0]; };
    return crossing_estimate(Method::Score1, score, interval, trunc, grid_points, refine_tol);
}

EstimateResult estimate_score2(const Sample& sample, const SearchInterval& interval,
                               const TruncationSpec& trunc, double c, int grid_points, double refine_tol) {
    require_scalar(sample);
    interval.validate();
    trunc.validate();
    require_both_outcomes(sample);
    const KernelConfig cfg{bandwidth_for(c, sample.size(), kScore2BandwidthRate)};
    auto score = [&](double b) { return psi2(sample, std::span<const double>(&b, 1), trunc, cfg).value[0]; };
    auto res = crossing_estimate(Method::Score2, score, interval, trunc, grid_points, refine_tol);
    res.h_beta = cfg.bandwidth;
    return res;
}

EstimateResult estimate_plugin(const Sample& sample, const SearchInterval& interval,
                               const TruncationSpec& trunc, double c, int grid_points, double refine_tol) {
    require_scalar(sample);
    interval.validate();
    trunc.validate();
    require_both_outcomes(sample);
    const KernelConfig cfg{bandwidth_for(c, sample.size(), kPluginBandwidthRate)};
    auto score = [&](double b) { return psi3(sample, std::span<const double>(&b, 1), trunc, cfg).value[0]; };

    // The plug-in score is continuous apart from small jumps where points
    // enter or leave the truncation set, so a grid bracket plus Brent is
    // enough.
    const auto cell = bracket_on_grid(score, interval.lo, interval.hi, grid_points);
    EstimateResult res;
    res.method = Method::Plugin;
    res.eps = trunc.eps;
    res.h_beta = cfg.bandwidth;
    res.diagnostics = find_root_brent(score, cell.lo, cell.hi, refine_tol);
    res.diagnostics.evaluations += cell.evaluations;
    res.diagnostics.crossings = cell.crossings;
    res.diagnostics.method = "grid+brent";
    res.beta_hat = {res.diagnostics.beta_hat};
    return res;
}

EstimateResult estimate_profile_mle(const Sample& sample, const SearchInterval& interval,
                                    const TruncationSpec& trunc, int grid_points) {
    require_scalar(sample);
    interval.validate();
    trunc.validate();
    if (grid_points < 1) throw Error(ErrorCode::InvalidArgument, "need at least one grid point");

    const double centre = 0.5 * (interval.lo + interval.hi);
    const int m = grid_points;
    double best_beta = centre;
    double best_value = -std::numeric_limits<double>::infinity();
    int ties = 0;
    for (int i = 0; i < m; ++i) {
        const double b = m == 1 ? centre
                         : i == m - 1 ? interval.hi
                                      : interval.lo + (interval.hi - interval.lo) * i / (m - 1);
        const double value = profile_log_likelihood(sample, std::span<const double>(&b, 1), trunc);
        if (value > best_value) {
            best_value = value;
            best_beta = b;
            ties = 1;
        } else if (value == best_value) {
            ++ties;
            if (std::abs(b - centre) < std::abs(best_beta - centre)) best_beta = b;
        }
    }

    EstimateResult res;
    res.method = Method::ProfileMLE;
    res.eps = trunc.eps;
    res.beta_hat = {best_beta};
    res.diagnostics.beta_hat = best_beta;
    res.diagnostics.lo = best_beta;
    res.diagnostics.hi = best_beta;
    res.diagnostics.evaluations = m;
    res.diagnostics.crossings = ties;
    res.diagnostics.method = "grid-argmax";
    return res;
}

InterceptResult intercept_from_mle(const StepDistribution& F) {
    InterceptResult res;
    for (const auto& [knot, mass] : F.jumps()) {
        res.alpha += knot * mass;
        res.mass += mass;
    }
    res.mass_deficit = F.total_mass() < 1.0;
    return res;
}

double intercept_from_plugin(const Sample& sample, double beta_hat, double c_alpha, int grid_points) {
    require_scalar(sample);
    if (grid_points < 2) throw Error(ErrorCode::InvalidArgument, "need at least two grid points");
    const std::span<const double> beta(&beta_hat, 1);
    const KernelConfig cfg{bandwidth_for(c_alpha, sample.size(), kInterceptBandwidthRate)};
    const PluginSmoother smoother(sample, beta, cfg);

    const auto u = residuals(sample, beta);
    const auto [min_it, max_it] = std::minmax_element(u.begin(), u.end());
    const double a = *min_it;
    const double b = *max_it;
    if (!(b > a)) return a;  // all residuals coincide: a point mass

    const int m = grid_points;
    std::vector<std::optional<double>> values(m);
    bool any = false;
    for (int i = 0; i < m; ++i) {
        const double v = i == m - 1 ? b : a + (b - a) * i / (m - 1);
        values[i] = smoother.distribution(v);
        any = any || values[i].has_value();
    }
    if (!any) throw Error(ErrorCode::AllExcluded, "plug-in estimate is undefined on the whole grid");

    // Fill undefined grid points from the nearest defined neighbour.
    std::vector<double> filled(m);
    for (int i = 0; i < m; ++i) {
        if (values[i]) {
            filled[i] = *values[i];
            continue;
        }
        for (int d = 1;; ++d) {
            if (i - d >= 0 && values[i - d]) {
                filled[i] = *values[i - d];
                break;
            }
            if (i + d < m && values[i + d]) {
                filled[i] = *values[i + d];
                break;
            }
        }
    }

    const double step = (b - a) / (m - 1);
    double integral = 0.0;
    for (int i = 0; i + 1 < m; ++i) integral += 0.5 * step * (filled[i] + filled[i + 1]);
    return b - integral;
}

EstimateResult estimate(const Sample& sample, const EstimatorOptions& options) {
    EstimateResult res;
    switch (options.method) {
        case Method::Score1:
            res = estimate_score1(sample, options.interval, options.trunc, options.grid_points,
                                  options.refine_tol);
            break;
        case Method::Score2:
            res = estimate_score2(sample, options.interval, options.trunc, options.c_beta,
                                  options.grid_points, options.refine_tol);
            break;
        case Method::Plugin:
            res = estimate_plugin(sample, options.interval, options.trunc, options.c_beta,
                                  options.grid_points, options.refine_tol);
            break;
        case Method::ProfileMLE:
            res = estimate_profile_mle(sample, options.interval, options.trunc, options.grid_points);
            break;
    }
    if (!options.with_intercept) return res;

    if (options.method == Method::Plugin) {
        res.alpha_hat = intercept_from_plugin(sample, res.beta_hat[0], options.c_alpha);
        res.h_alpha = bandwidth_for(options.c_alpha, sample.size(), kInterceptBandwidthRate);
    } else {
        const auto intercept = intercept_from_mle(mle_fixed_beta(sample, res.beta_hat));
        res.alpha_hat = intercept.alpha;
        res.alpha_mass_deficit = intercept.mass_deficit;
    }
    return res;
}

}  // namespace cslr
