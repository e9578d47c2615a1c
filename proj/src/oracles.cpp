#include "cslr/oracles.hpp"

#include <cmath>

#include "cslr/error.hpp"
#include "cslr/quadrature.hpp"

namespace cslr {

namespace {

void require_scalar(const ModelSpec& model) {
    model.validate();
    if (model.dim() != 1) throw Error(ErrorCode::UnsupportedModel, "oracles are implemented for k = 1");
}

void require_eps(double eps) {
    if (!(eps >= 0.0 && eps < 0.5)) throw Error(ErrorCode::InvalidArgument, "eps must lie in [0, 0.5)");
}

// Integrates over `region` with breakpoints at the kinks of the residual
// density, throwing if refinement does not settle.
template <class F>
QuadratureResult integrate_region(const F& f, const ModelSpec& model, double beta, Interval region,
                                  double tol, std::vector<double> extra_kinks = {}) {
    auto kinks = residual_density_knots(model, beta);
    kinks.insert(kinks.end(), extra_kinks.begin(), extra_kinks.end());
    const auto breaks = make_breakpoints(region.lo, region.hi, kinks);
    auto res = integrate_refined(f, breaks, tol);
    if (!res.converged)
        throw Error(ErrorCode::DivergentIntegral,
                    "quadrature did not converge (last change " + std::to_string(res.change) + ")");
    return res;
}

PopulationReport make_report(std::string quantity, double value, double eps, double tol,
                             const QuadratureResult& q) {
    return PopulationReport{std::move(quantity), value, eps, tol, q.change, q.converged};
}

double fisher_weight(const ModelSpec& model, double u) {
    const double F = error_cdf(model, u);
    const double var = F * (1.0 - F);
    if (!(var > 0.0)) return 0.0;
    const double f = error_density(model, u);
    return f * f / var;
}

// E[X F0(u + shift X) | T - beta X = u] for the uniform conditional.
double conditional_cross_moment(const ModelSpec& model, const CovariateConditional& cond, double u,
                                double shift) {
    if (shift == 0.0) return cond.mean() * error_cdf(model, u);
    const auto breaks = make_breakpoints(
        cond.lo, cond.hi, {(model.error.lower - u) / shift, (model.error.upper - u) / shift});
    auto g = [&](double x) { return x * error_cdf(model, u + shift * x); };
    return integrate_refined(g, breaks, 1e-13, 16, 256).value / (cond.hi - cond.lo);
}

double conditional_mean_cdf(const ModelSpec& model, const CovariateConditional& cond, double u, double shift) {
    if (shift == 0.0) return error_cdf(model, u);
    const auto breaks = make_breakpoints(
        cond.lo, cond.hi, {(model.error.lower - u) / shift, (model.error.upper - u) / shift});
    auto g = [&](double x) { return error_cdf(model, u + shift * x); };
    return integrate_refined(g, breaks, 1e-13, 16, 256).value / (cond.hi - cond.lo);
}

// Kinks of F_beta: where the shifted support ends meet the conditional
// interval ends.
std::vector<double> f_beta_kinks(const ModelSpec& model, double beta) {
    const double shift = beta - model.beta0[0];
    std::vector<double> kinks = {model.error.lower, model.error.upper};
    for (double end : {model.error.lower, model.error.upper})
        for (double x : {model.x_ranges[0].lo, model.x_ranges[0].hi}) kinks.push_back(end - shift * x);
    return kinks;
}

}  // namespace

Interval truncation_region(const ModelSpec& model, double eps) {
    require_eps(eps);
    if (eps == 0.0) return {model.error.lower, model.error.upper};
    return {error_quantile(model, eps), error_quantile(model, 1.0 - eps)};
}

Interval truncation_region_f_beta(const ModelSpec& model, double beta, double eps) {
    require_scalar(model);
    require_eps(eps);
    const auto knots = residual_density_knots(model, beta);
    const double support_lo = knots.front();
    const double support_hi = knots.back();
    auto value = [&](double u) {
        const auto cond = covariate_conditional(model, beta, u);
        if (!cond.feasible()) return u < 0.5 * (support_lo + support_hi) ? 0.0 : 1.0;
        return conditional_mean_cdf(model, cond, u, beta - model.beta0[0]);
    };
    // Lower end: first u with F_beta(u) >= eps (> 0 when eps = 0).
    auto above_lower = [&](double u) { return eps > 0.0 ? value(u) >= eps : value(u) > 0.0; };
    auto above_upper = [&](double u) { return eps > 0.0 ? value(u) > 1.0 - eps : value(u) >= 1.0; };
    auto bisect = [&](auto&& pred) {
        double a = support_lo;
        double b = support_hi;
        if (pred(a)) return a;
        if (!pred(b)) return b;
        while (b - a > 1e-12) {
            const double m = 0.5 * (a + b);
            if (pred(m))
                b = m;
            else
                a = m;
        }
        return 0.5 * (a + b);
    };
    return {bisect(above_lower), bisect(above_upper)};
}

PopulationReport fisher_parametric(const ModelSpec& model, double eps) {
    require_scalar(model);
    const double beta0 = model.beta0[0];
    auto integrand = [&](double u) {
        const auto cond = covariate_conditional(model, beta0, u);
        return cond.second_moment() * fisher_weight(model, u) * cond.density;
    };
    const auto q = integrate_region(integrand, model, beta0, truncation_region(model, eps), kInformationTolerance);
    return make_report("ip", q.value, eps, kInformationTolerance, q);
}

PopulationReport fisher_semiparametric(const ModelSpec& model, double eps) {
    require_scalar(model);
    const double beta0 = model.beta0[0];
    auto integrand = [&](double u) {
        const auto cond = covariate_conditional(model, beta0, u);
        return cond.variance() * fisher_weight(model, u) * cond.density;
    };
    const auto q = integrate_region(integrand, model, beta0, truncation_region(model, eps), kInformationTolerance);
    return make_report(eps == 0.0 ? "i" : "ieps", q.value, eps, kInformationTolerance, q);
}

PopulationReport score1_asymptotic_variance(const ModelSpec& model, double eps) {
    require_scalar(model);
    const double beta0 = model.beta0[0];
    const auto region = truncation_region(model, eps);
    auto a_integrand = [&](double u) {
        const auto cond = covariate_conditional(model, beta0, u);
        return error_density(model, u) * cond.variance() * cond.density;
    };
    auto b_integrand = [&](double u) {
        const auto cond = covariate_conditional(model, beta0, u);
        const double F = error_cdf(model, u);
        return F * (1.0 - F) * cond.variance() * cond.density;
    };
    const auto qa = integrate_region(a_integrand, model, beta0, region, kScoreTolerance);
    const auto qb = integrate_region(b_integrand, model, beta0, region, kScoreTolerance);
    if (std::abs(qa.value) < 1e-12) throw Error(ErrorCode::SingularMatrix, "A is singular");
    QuadratureResult q = qa;
    q.change = std::max(qa.change, qb.change);
    return make_report("score1var", qb.value / (qa.value * qa.value), eps, kInformationTolerance, q);
}

double intercept_variance_current_status_term(const ModelSpec& model) {
    require_scalar(model);
    const double beta0 = model.beta0[0];
    auto integrand = [&](double v) {
        const double F = error_cdf(model, v);
        const double g = residual_density(model, beta0, v);
        if (!(F * (1.0 - F) > 0.0)) return 0.0;
        if (!(g > 0.0))
            throw Error(ErrorCode::DivergentIntegral, "residual density vanishes inside the error support");
        return F * (1.0 - F) / g;
    };
    return integrate_region(integrand, model, beta0, truncation_region(model, 0.0), kScoreTolerance).value;
}

PopulationReport intercept_variance(const ModelSpec& model, double eps, bool efficient) {
    require_scalar(model);
    const double beta0 = model.beta0[0];
    auto a_integrand = [&](double u) {
        return covariate_conditional(model, beta0, u).mean() * error_density(model, u);
    };
    const auto qa = integrate_region(a_integrand, model, beta0, truncation_region(model, 0.0), kScoreTolerance);
    double beta_variance = 0.0;
    if (efficient)
        beta_variance = 1.0 / fisher_semiparametric(model, eps).value;
    else
        beta_variance = score1_asymptotic_variance(model, eps).value;
    const double second = intercept_variance_current_status_term(model);
    return make_report(efficient ? "interceptvar-efficient" : "interceptvar-simple",
                       qa.value * qa.value * beta_variance + second, eps, kInformationTolerance, qa);
}

PopulationReport population_score1(const ModelSpec& model, double beta, double eps) {
    require_scalar(model);
    const double shift = beta - model.beta0[0];
    if (shift == 0.0) {
        // Cov(X, F0(u) | u) vanishes identically.
        return PopulationReport{"popscore", 0.0, eps, kScoreTolerance, 0.0, true};
    }
    const auto region = truncation_region_f_beta(model, beta, eps);
    auto integrand = [&](double u) {
        const auto cond = covariate_conditional(model, beta, u);
        if (!cond.feasible()) return 0.0;
        const double cross = conditional_cross_moment(model, cond, u, shift);
        const double fb = conditional_mean_cdf(model, cond, u, shift);
        return (cross - cond.mean() * fb) * cond.density;
    };
    const auto q = integrate_region(integrand, model, beta, region, kScoreTolerance, f_beta_kinks(model, beta));
    return make_report("popscore", q.value, eps, kScoreTolerance, q);
}

PopulationReport identifiability_integral(const ModelSpec& model, double beta, double eps) {
    require_scalar(model);
    const double shift = beta - model.beta0[0];
    if (shift == 0.0) return PopulationReport{"ident", 0.0, eps, kScoreTolerance, 0.0, true};
    const auto region = truncation_region_f_beta(model, beta, eps);
    auto integrand = [&](double u) {
        const auto cond = covariate_conditional(model, beta, u);
        if (!cond.feasible()) return 0.0;
        const double f0 = error_density(model, u);
        if (f0 == 0.0) return 0.0;
        const double fb = conditional_mean_cdf(model, cond, u, shift);
        const double var = fb * (1.0 - fb);
        if (!(var > 0.0)) return 0.0;
        const double cov = shift * (conditional_cross_moment(model, cond, u, shift) - cond.mean() * fb);
        return f0 * cov / var * cond.density;
    };
    const auto q = integrate_region(integrand, model, beta, region, kScoreTolerance, f_beta_kinks(model, beta));
    return make_report("ident", q.value, eps, kScoreTolerance, q);
}

InfluenceCheck influence_representation_check(const ModelSpec& model, const Sample& sample, double beta_hat,
                                              double eps) {
    require_scalar(model);
    require_eps(eps);
    if (sample.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "sample must have one covariate");
    const double beta0 = model.beta0[0];
    const double info = fisher_semiparametric(model, eps).value;
    const std::size_t n = sample.size();

    InfluenceCheck out;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = sample.t(i) - beta0 * sample.x(i, 0);
        const double F = error_cdf(model, u);
        if (!(F >= eps && F <= 1.0 - eps)) continue;
        ++out.n_in_set;
        const double var = F * (1.0 - F);
        if (!(var > 0.0)) continue;  // f0 = 0 there as well
        const auto cond = covariate_conditional(model, beta0, u);
        sum += error_density(model, u) * (cond.mean() - sample.x(i, 0)) * (sample.delta(i) - F) / var;
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    out.summand_mean = out.n_in_set > 0 ? sum / static_cast<double>(out.n_in_set) : 0.0;
    out.representation = sum / (root_n * info);
    out.scaled_error = root_n * (beta_hat - beta0);
    return out;
}

}  // namespace cslr
