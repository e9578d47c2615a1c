#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cslr/error.hpp"
#include "cslr/isotonic.hpp"
#include "cslr/model.hpp"
#include "cslr/rng.hpp"

using namespace cslr;

namespace {

Sample from_sorted_deltas(const std::vector<int>& d) {
    std::vector<double> t;
    std::vector<double> x;
    for (std::size_t i = 0; i < d.size(); ++i) {
        t.push_back(static_cast<double>(i));
        x.push_back(0.0);
    }
    return Sample(t, x, d, 1);
}

// Left slopes of the greatest convex minorant of (0,0),(i, c_i) by the
// lower hull of the points.
std::vector<double> gcm_left_slopes(const std::vector<int>& d) {
    const std::size_t n = d.size();
    std::vector<double> cx{0.0};
    std::vector<double> cy{0.0};
    for (std::size_t i = 0; i < n; ++i) {
        cx.push_back(static_cast<double>(i + 1));
        cy.push_back(cy.back() + d[i]);
    }
    std::vector<std::size_t> hull;
    for (std::size_t p = 0; p <= n; ++p) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2];
            const std::size_t b = hull.back();
            // Drop b when it lies on or above the chord a -> p.
            const double cross = (cx[b] - cx[a]) * (cy[p] - cy[a]) - (cy[b] - cy[a]) * (cx[p] - cx[a]);
            if (cross <= 0.0) hull.pop_back();
            else break;
        }
        hull.push_back(p);
    }
    std::vector<double> slopes(n);
    for (std::size_t h = 1; h < hull.size(); ++h) {
        const std::size_t a = hull[h - 1];
        const std::size_t b = hull[h];
        const double s = (cy[b] - cy[a]) / (cx[b] - cx[a]);
        for (std::size_t i = a; i < b; ++i) slopes[i] = s;
    }
    return slopes;
}

const double kZero[] = {0.0};

}  // namespace

TEST_CASE("cusum diagram examples") {
    auto pts = cusum_diagram(residual_order(from_sorted_deltas({1, 0, 1}), kZero));
    REQUIRE(pts.size() == 4);
    CHECK(pts[0].cumulative == 0);
    CHECK(pts[1].cumulative == 1);
    CHECK(pts[2].cumulative == 1);
    CHECK(pts[3].cumulative == 2);
    CHECK(pts[3].index == 3);

    pts = cusum_diagram(residual_order(from_sorted_deltas({0, 0, 0}), kZero));
    for (const auto& p : pts) CHECK(p.cumulative == 0);
    CHECK(pts.size() == 4);

    pts = cusum_diagram(residual_order(from_sorted_deltas({1, 1}), kZero));
    CHECK(pts[1].cumulative == 1);
    CHECK(pts[2].cumulative == 2);
}

TEST_CASE("MLE hand cases") {
    auto F = mle_fixed_beta(from_sorted_deltas({0, 1}), kZero);
    CHECK(F(0.0) == 0.0);
    CHECK(F(1.0) == 1.0);

    F = mle_fixed_beta(from_sorted_deltas({1, 0}), kZero);
    CHECK(F(0.0) == 0.5);
    CHECK(F(1.0) == 0.5);

    F = mle_fixed_beta(from_sorted_deltas({0, 0, 0, 0}), kZero);
    for (double v : F.values()) CHECK(v == 0.0);
}

TEST_CASE("step distribution is right continuous and zero before the first knot") {
    const StepDistribution F({0.0, 1.0, 2.0}, {0.25, 0.25, 1.0});
    CHECK(F(-0.1) == 0.0);
    CHECK(F(0.0) == 0.25);
    CHECK(F(1.999) == 0.25);
    CHECK(F(2.0) == 1.0);
    CHECK(F(10.0) == 1.0);
    const auto jumps = F.jumps();
    REQUIRE(jumps.size() == 2);
    CHECK(jumps[0].first == 0.0);
    CHECK(jumps[0].second == 0.25);
    CHECK(jumps[1].second == 0.75);
    CHECK_THROWS_AS(StepDistribution({1.0, 0.0}, {0.0, 1.0}), Error);
    CHECK_THROWS_AS(StepDistribution({0.0, 1.0}, {0.5, 0.25}), Error);
    CHECK_THROWS_AS(StepDistribution({0.0}, {1.5}), Error);
}

TEST_CASE("PAVA equals the convex minorant slopes for every pattern up to n = 10") {
    for (std::size_t n = 1; n <= 10; ++n) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<int> d(n);
            for (std::size_t i = 0; i < n; ++i) d[i] = (mask >> i) & 1u;
            const auto fit = fit_mle(from_sorted_deltas(d), kZero);
            const auto expect = gcm_left_slopes(d);
            for (std::size_t i = 0; i < n; ++i) {
                // Both sides are ratios of the same small integers.
                if (fit.fitted[i] != expect[i]) {
                    FAIL("mismatch n=" << n << " mask=" << mask << " i=" << i);
                }
            }
        }
    }
}

TEST_CASE("pava on weighted data") {
    const std::vector<double> y{3.0, 1.0, 2.0};
    const std::vector<double> w{1.0, 1.0, 2.0};
    const auto f = pava(y, w);
    CHECK(f[0] == doctest::Approx(2.0));
    CHECK(f[1] == doctest::Approx(2.0));
    CHECK(f[2] == doctest::Approx(2.0));
}

TEST_CASE("tied residuals are pooled") {
    // Two rows share u = 0 with deltas 1 and 0: one knot with value 1/2 even
    // though the sorted deltas (1, 0, 1) alone would not force it.
    const Sample s({0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}, {1, 0, 1}, 1);
    const auto fit = fit_mle(s, kZero);
    CHECK(fit.distribution.knots().size() == 2);
    CHECK(fit.distribution(0.0) == 0.5);
    CHECK(fit.distribution(1.0) == 1.0);
    CHECK(fit.fitted[0] == 0.5);
    CHECK(fit.fitted[1] == 0.5);
}

TEST_CASE("MLE characterisation on simulated data") {
    const ModelSpec m = ModelSpec::simulation_default();
    const double beta[] = {0.5};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Sample s = simulate(m, 300, seed);
        const auto fit = fit_mle(s, beta);
        const auto& e = fit.order.entries;
        const std::size_t n = e.size();
        for (std::size_t i = 1; i < n; ++i) CHECK(fit.fitted[i - 1] <= fit.fitted[i]);
        for (double f : fit.fitted) CHECK((f >= 0.0 && f <= 1.0));
        // Sum of residuals over each upper tail is <= 0, with equality over
        // each constant block.
        double tail = 0.0;
        for (std::size_t i = n; i-- > 0;) {
            tail += e[i].delta - fit.fitted[i];
            const bool block_start = i == 0 || fit.fitted[i - 1] != fit.fitted[i];
            CHECK(tail <= 1e-9);
            if (block_start) CHECK(std::abs(tail) < 1e-9);
        }
    }
}

TEST_CASE("MLE likelihood dominates random monotone step functions") {
    const ModelSpec m = ModelSpec::simulation_default();
    const double beta[] = {0.5};
    const Sample s = simulate(m, 200, 5);
    const auto fit = fit_mle(s, beta);
    std::vector<int> d;
    for (const auto& e : fit.order.entries) d.push_back(e.delta);
    const double best = log_likelihood(d, fit.fitted);
    for (std::uint64_t r = 0; r < 100; ++r) {
        CounterRng rng(77, r);
        std::vector<double> g(d.size());
        for (double& v : g) v = rng.uniform();
        std::sort(g.begin(), g.end());
        CHECK(log_likelihood(d, g) <= best);
    }
}

TEST_CASE("log likelihood conventions") {
    const std::vector<int> d{0, 1};
    CHECK(log_likelihood(d, std::vector<double>{0.0, 1.0}) == 0.0);
    CHECK(log_likelihood(d, std::vector<double>{1.0, 1.0}) == -std::numeric_limits<double>::infinity());
    TruncationSpec t;
    t.eps = 0.1;
    CHECK(truncated_log_likelihood(d, std::vector<double>{0.05, 0.5}, t) == doctest::Approx(std::log(0.5)));
}

TEST_CASE("profile log likelihood is piecewise constant on the plotting grid") {
    const ModelSpec m = ModelSpec::simulation_default();
    const Sample s = simulate(m, 1000, 11);
    TruncationSpec t;
    std::vector<double> values;
    for (int g = 0; g < 100; ++g) {
        const double beta[] = {0.3 + 0.4 * g / 99.0};
        values.push_back(profile_log_likelihood(s, beta, t));
    }
    // A fine grid inside one residual-ranking cell gives a constant value.
    const double b0[] = {0.5};
    const auto ord = residual_order(s, b0);
    double cell = 1.0;
    for (std::size_t i = 1; i < ord.size(); ++i) {
        const auto& a = ord.entries[i - 1];
        const auto& b = ord.entries[i];
        const double dx = s.x(a.index, 0) - s.x(b.index, 0);
        if (dx != 0.0) {
            const double cross = std::abs((b.u - a.u) / dx);
            if (cross > 0.0) cell = std::min(cell, cross);
        }
    }
    const double base = profile_log_likelihood(s, b0, t);
    for (int j = 1; j <= 5; ++j) {
        const double b[] = {0.5 + cell * j / 10.0};
        CHECK(profile_log_likelihood(s, b, t) == base);
    }
    std::sort(values.begin(), values.end());
    CHECK(std::unique(values.begin(), values.end()) - values.begin() > 1);
}
