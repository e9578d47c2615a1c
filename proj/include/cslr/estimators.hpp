#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "cslr/isotonic.hpp"
#include "cslr/model.hpp"
#include "cslr/root_finding.hpp"

namespace cslr {

enum class Method { Score1, Score2, Plugin, ProfileMLE };

const char* method_name(Method method) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

// Bandwidth constants and rates used when none are given:
// h = 0.5 n^(-1/7) for Score2, 0.5 n^(-1/5) for Plugin, 0.75 n^(-1/3) for
// the plug-in intercept.
inline constexpr double kDefaultBetaBandwidthConstant = 0.5;
inline constexpr double kDefaultAlphaBandwidthConstant = 0.75;
inline constexpr double kScore2BandwidthRate = 1.0 / 7.0;
inline constexpr double kPluginBandwidthRate = 1.0 / 5.0;
inline constexpr double kInterceptBandwidthRate = 1.0 / 3.0;

// The parameter set searched over; estimation routines handle k = 1 only.
struct SearchInterval {
    double lo = 0.3;
    double hi = 0.7;

    void validate() const;
};

struct EstimateResult {
    std::vector<double> beta_hat;
    std::optional<double> alpha_hat;
    bool alpha_mass_deficit = false;
    Method method = Method::Score1;
    double eps = 0.0;
    double h_beta = 0.0;   // 0 when the method does not smooth
    double h_alpha = 0.0;  // 0 unless the plug-in intercept was used
    CrossingResult diagnostics;
};

EstimateResult estimate_score1(const Sample& sample, const SearchInterval& interval,
                               const TruncationSpec& trunc, int grid_points = 100,
                               double refine_tol = 1e-6);

EstimateResult estimate_score2(const Sample& sample, const SearchInterval& interval,
                               const TruncationSpec& trunc, double c = kDefaultBetaBandwidthConstant,
                               int grid_points = 100, double refine_tol = 1e-6);

EstimateResult estimate_plugin(const Sample& sample, const SearchInterval& interval,
                               const TruncationSpec& trunc, double c = kDefaultBetaBandwidthConstant,
                               int grid_points = 100, double refine_tol = 1e-6);

// Grid maximiser of the truncated profile log likelihood; ties go to the grid
// point closest to the interval midpoint. A one-point grid is the midpoint.
EstimateResult estimate_profile_mle(const Sample& sample, const SearchInterval& interval,
                                    const TruncationSpec& trunc, int grid_points = 100);

struct InterceptResult {
    double alpha = 0.0;
    double mass = 0.0;
    bool mass_deficit = false;  // mass < 1: alpha integrates the available mass only
};

// alpha = sum over jumps of knot * mass.
InterceptResult intercept_from_mle(const StepDistribution& F);

// alpha = b - int_a^b F_nh(u) du over the residual range [a, b] at beta_hat,
// trapezoid rule on `grid_points` points, h = c_alpha n^(-1/3).
double intercept_from_plugin(const Sample& sample, double beta_hat,
                             double c_alpha = kDefaultAlphaBandwidthConstant, int grid_points = 1000);

struct EstimatorOptions {
    Method method = Method::Score1;
    SearchInterval interval;
    TruncationSpec trunc;
    double c_beta = kDefaultBetaBandwidthConstant;
    double c_alpha = kDefaultAlphaBandwidthConstant;
    int grid_points = 100;
    double refine_tol = 1e-6;
    bool with_intercept = true;
};

// Estimates beta with the chosen method and, if requested, the intercept:
// from the MLE at beta-hat for Score1, Score2 and ProfileMLE, from the
// plug-in estimate for Plugin.
EstimateResult estimate(const Sample& sample, const EstimatorOptions& options);

}  // namespace cslr
