#include "cslr/scores.hpp"

#include "cslr/error.hpp"
#include "cslr/isotonic.hpp"

namespace cslr {

namespace {

void finish(ScoreValue& score, std::size_t n) {
    for (double& v : score.value) v /= static_cast<double>(n);
}

}  // namespace

ScoreValue psi1(const Sample& sample, std::span<const double> beta, const TruncationSpec& trunc) {
    trunc.validate();
    const auto fit = fit_mle(sample, beta);
    const std::size_t k = sample.dim();
    ScoreValue score;
    score.value.assign(k, 0.0);
    for (std::size_t r = 0; r < fit.order.size(); ++r) {
        const auto& e = fit.order.entries[r];
        const double F = fit.fitted[r];
        if (!trunc.contains(F)) {
            ++score.n_outside;
            continue;
        }
        ++score.n_used;
        const auto x = sample.x(e.index);
        for (std::size_t c = 0; c < k; ++c) score.value[c] += x[c] * (e.delta - F);
    }
    finish(score, sample.size());
    return score;
}

ScoreValue psi2(const Sample& sample, std::span<const double> beta, const TruncationSpec& trunc,
                const KernelConfig& cfg) {
    trunc.validate();
    cfg.validate();
    const auto fit = fit_mle(sample, beta);
    const std::size_t k = sample.dim();
    ScoreValue score;
    score.value.assign(k, 0.0);
    for (std::size_t r = 0; r < fit.order.size(); ++r) {
        const auto& e = fit.order.entries[r];
        const double F = fit.fitted[r];
        if (!trunc.contains(F)) {
            ++score.n_outside;
            continue;
        }
        const double var = F * (1.0 - F);
        if (!(var > 0.0)) {
            ++score.n_excluded;
            continue;
        }
        ++score.n_used;
        const double weight = smoothed_density(fit.distribution, cfg, e.u) * (e.delta - F) / var;
        const auto x = sample.x(e.index);
        for (std::size_t c = 0; c < k; ++c) score.value[c] += x[c] * weight;
    }
    finish(score, sample.size());
    return score;
}

ScoreValue psi3(const Sample& sample, std::span<const double> beta, const TruncationSpec& trunc,
                const KernelConfig& cfg) {
    trunc.validate();
    check_dimension(sample, beta);
    const PluginSmoother smoother(sample, beta, cfg);
    const std::size_t k = sample.dim();
    ScoreValue score;
    score.value.assign(k, 0.0);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        // Cheap pass first: most points sit where F_nh is exactly 0 or 1.
        const auto level = smoother.at_observation(i, false);
        if (!level) {
            ++score.n_excluded;
            continue;
        }
        if (!trunc.contains(level->F)) {
            ++score.n_outside;
            continue;
        }
        const auto point = smoother.at_observation(i, true);
        const double F = point->F;
        const double var = F * (1.0 - F);
        if (!(var > 0.0)) {
            ++score.n_excluded;
            continue;
        }
        ++score.n_used;
        const double weight = (sample.delta(i) - F) / var;
        for (std::size_t c = 0; c < k; ++c) score.value[c] += point->dF_dbeta[c] * weight;
    }
    finish(score, sample.size());
    return score;
}

}  // namespace cslr
