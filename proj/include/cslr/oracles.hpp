#pragma once

#include <string>
#include <vector>

#include "cslr/model.hpp"

namespace cslr {

// A population quantity computed by quadrature under the model. `change` is
// the difference between the last two refinement levels.
struct PopulationReport {
    std::string quantity;
    double value = 0.0;
    double eps = 0.0;
    double tol = 0.0;
    double change = 0.0;
    bool converged = false;
};

inline constexpr double kInformationTolerance = 1e-4;
inline constexpr double kScoreTolerance = 1e-6;

// Region {u : F0(u) in [eps, 1 - eps]}; the full error support for eps = 0.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};
Interval truncation_region(const ModelSpec& model, double eps);

// Region {u : F_beta(u) in [eps, 1 - eps]} (strictly inside (0, 1) for
// eps = 0), assuming F_beta is monotone.
Interval truncation_region_f_beta(const ModelSpec& model, double beta, double eps);

// Information for beta when F0 is known:
//   int E(X^2 | u) f0(u)^2 / {F0(u)(1 - F0(u))} f_{T - beta0 X}(u) du,
// restricted to F0 in [eps, 1 - eps].
PopulationReport fisher_parametric(const ModelSpec& model, double eps = 0.0);

// Efficient information with Var(X | u) in place of E(X^2 | u); eps > 0
// gives the truncated information I_eps(beta0).
PopulationReport fisher_semiparametric(const ModelSpec& model, double eps = 0.0);

// Sandwich variance A^-1 B A^-1 of the simple score estimator with
// A = E_eps[f0 Var(X | U)] and B = E_eps[F0 (1 - F0) Var(X | U)].
PopulationReport score1_asymptotic_variance(const ModelSpec& model, double eps);

// sigma^2 = a^2 V + int F0 (1 - F0) / f_{T - beta0 X}, a = int E(X | u) f0(u) du,
// with V = I_eps^-1 (efficient) or the sandwich variance (simple).
PopulationReport intercept_variance(const ModelSpec& model, double eps, bool efficient);

// Second summand of the intercept variance on its own.
double intercept_variance_current_status_term(const ModelSpec& model);

// Population simple score: int over F_beta in [eps, 1 - eps] of
// Cov(X, F0(u + (beta - beta0) X) | u) f_{T - beta X}(u) du.
PopulationReport population_score1(const ModelSpec& model, double beta, double eps);

// Covariance form of the plug-in identifiability integral:
// int over F_beta in [eps, 1 - eps] of
//   f0(u) Cov((beta - beta0) X, F0(u + (beta - beta0) X) | u) / {F_beta (1 - F_beta)} f_{T - beta X}(u) du.
PopulationReport identifiability_integral(const ModelSpec& model, double beta, double eps);

// Leading term of the efficient expansion of sqrt(n)(beta-hat - beta0),
// evaluated at the true (beta0, F0) on the simulated sample.
struct InfluenceCheck {
    double representation = 0.0;  // n^-1/2 I_eps^-1 sum_{i in J} summand_i
    double scaled_error = 0.0;    // sqrt(n) (beta_hat - beta0)
    double summand_mean = 0.0;
    std::size_t n_in_set = 0;
};

InfluenceCheck influence_representation_check(const ModelSpec& model, const Sample& sample, double beta_hat,
                                              double eps);

}  // namespace cslr
