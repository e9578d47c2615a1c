#include <doctest.h>

#include <cmath>

#include "cslr/kernel.hpp"
#include "cslr/quadrature.hpp"
#include "cslr/rng.hpp"

using namespace cslr;
using doctest::Approx;

TEST_CASE("triweight kernel values") {
    CHECK(triweight(1.0) == 0.0);
    CHECK(triweight(-1.0) == 0.0);
    CHECK(triweight(0.0) == 1.09375);
    CHECK(triweight(0.5) == Approx(0.46142578125).epsilon(1e-15));
    CHECK(triweight(1.5) == 0.0);
    const double mass = integrate_gauss_legendre(triweight, -1.0, 1.0, 64);
    CHECK(std::abs(mass - 1.0) < 1e-10);
}

TEST_CASE("triweight derivative") {
    CHECK(triweight_derivative(0.0) == 0.0);
    for (double u : {0.1, 0.3, 0.7, 0.95}) CHECK(triweight_derivative(u) == -triweight_derivative(-u));
    const double d = 1e-5;
    const double fd = (triweight(0.3 + d) - triweight(0.3 - d)) / (2 * d);
    CHECK(std::abs(fd - triweight_derivative(0.3)) < 1e-6);
    CHECK(triweight_derivative(1.2) == 0.0);
}

TEST_CASE("smoothed density of the MLE") {
    KernelConfig cfg;
    cfg.bandwidth = 1.0;
    const StepDistribution point({0.0}, {1.0});
    CHECK(smoothed_density(point, cfg, 0.0) == 1.09375);
    CHECK(smoothed_density(point, cfg, 1.5) == 0.0);

    cfg.bandwidth = 0.2;
    const StepDistribution F({0.0, 0.3, 0.5, 0.9}, {0.1, 0.4, 0.4, 0.8});
    const double mass = integrate_piecewise([&](double u) { return smoothed_density(F, cfg, u); },
                                            std::vector<double>{-0.2, 0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.1}, 64);
    CHECK(std::abs(mass - 0.8) < 1e-8);
    for (int i = 0; i <= 100; ++i) CHECK(smoothed_density(F, cfg, -0.5 + 2.0 * i / 100.0) >= 0.0);
}

TEST_CASE("bandwidth constants") {
    CHECK(bandwidth_for(0.5, 1000, 0.2) == Approx(0.5 * std::pow(1000.0, -0.2)));
    KernelConfig cfg;
    cfg.bandwidth = 0.0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("plug-in estimate hand cases") {
    KernelConfig cfg;
    cfg.bandwidth = 1.0;
    const double zero[] = {0.0};

    const Sample ones({0.0, 0.3, 0.6}, {0.0, 0.0, 0.0}, {1, 1, 1}, 1);
    CHECK(*plugin_F(ones, zero, cfg, 0.2) == 1.0);

    const Sample single({0.7}, {0.0}, {1}, 1);
    CHECK(*plugin_F(single, zero, cfg, 0.7) == 1.0);

    const Sample two({0.0, 0.5}, {0.0, 0.0}, {1, 0}, 1);
    CHECK(*plugin_F(two, zero, cfg, 0.0) == Approx(1.09375 / (1.09375 + 0.46142578125)).epsilon(1e-14));
    CHECK(*plugin_F(two, zero, cfg, 0.0) == Approx(0.70330).epsilon(1e-5));
    CHECK_FALSE(plugin_F(two, zero, cfg, 5.0).has_value());
}

TEST_CASE("plug-in derivative hand case with two points") {
    // u = (0, 0.5) at beta = 0 with x = (0, 1); evaluate at t = 0, x = 0.
    //   dF = sum_j (x_j - x)(delta_j - F) K'((v - u_j)/h) / (h sum_j K((v - u_j)/h))
    // Only j = 2 has x_j != x: (1)(0 - F) K'(-0.5) / (K(0) + K(0.5)).
    KernelConfig cfg;
    cfg.bandwidth = 1.0;
    const double zero[] = {0.0};
    const Sample two({0.0, 0.5}, {0.0, 1.0}, {1, 0}, 1);
    const double K0 = 1.09375;
    const double K5 = 0.46142578125;
    const double F = K0 / (K0 + K5);
    const double expect = -F * triweight_derivative(-0.5) / (K0 + K5);
    const double x0[] = {0.0};
    const auto d = plugin_dF_dbeta(two, zero, cfg, 0.0, x0);
    REQUIRE(d.has_value());
    CHECK((*d)[0] == Approx(expect).epsilon(1e-14));
}

TEST_CASE("plug-in derivative vanishes for identical covariates") {
    KernelConfig cfg;
    cfg.bandwidth = 0.4;
    const double beta[] = {0.5};
    const Sample s({0.1, 0.4, 0.5, 0.9}, {1.0, 1.0, 1.0, 1.0}, {0, 1, 0, 1}, 1);
    const double x[] = {1.0};
    const auto d = plugin_dF_dbeta(s, beta, cfg, 0.3, x);
    REQUIRE(d.has_value());
    CHECK((*d)[0] == 0.0);
}

TEST_CASE("plug-in derivative matches central differences") {
    const ModelSpec m = ModelSpec::simulation_default();
    const double delta = 1e-5;
    for (std::uint64_t r = 0; r < 20; ++r) {
        const Sample s = simulate(m, 50, 1000 + r);
        CounterRng rng(31, r);
        const double b = rng.uniform(0.4, 0.6);
        KernelConfig cfg;
        cfg.bandwidth = rng.uniform(0.15, 0.5);
        const std::size_t i = static_cast<std::size_t>(rng.uniform() * 50) % 50;
        const double t = s.t(i);
        const double x[] = {s.x(i, 0)};
        const double bp[] = {b + delta};
        const double bm[] = {b - delta};
        const double bb[] = {b};
        const auto Fp = plugin_F(s, bp, cfg, t - bp[0] * x[0]);
        const auto Fm = plugin_F(s, bm, cfg, t - bm[0] * x[0]);
        const auto d = plugin_dF_dbeta(s, bb, cfg, t, x);
        REQUIRE(Fp.has_value());
        REQUIRE(Fm.has_value());
        REQUIRE(d.has_value());
        CHECK(std::abs((*Fp - *Fm) / (2 * delta) - (*d)[0]) < 1e-6);
    }
}

TEST_CASE("leave-one-out drops the own term") {
    KernelConfig cfg;
    cfg.bandwidth = 1.0;
    cfg.leave_one_out = true;
    const double zero[] = {0.0};
    const Sample two({0.0, 0.5}, {0.0, 0.0}, {1, 0}, 1);
    const PluginSmoother sm(two, zero, cfg);
    CHECK(sm.at_observation(0, false)->F == 0.0);
    CHECK(sm.at_observation(1, false)->F == 1.0);
}

TEST_CASE("plug-in values stay in the unit interval") {
    const ModelSpec m = ModelSpec::simulation_default();
    const Sample s = simulate(m, 400, 8);
    KernelConfig cfg;
    cfg.bandwidth = 0.1;
    const double beta[] = {0.45};
    const PluginSmoother sm(s, beta, cfg);
    for (int i = 0; i <= 300; ++i) {
        const auto F = sm.distribution(-1.0 + 3.0 * i / 300.0);
        if (F) CHECK((*F >= 0.0 && *F <= 1.0));
    }
}
