#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cslr/estimators.hpp"
#include "cslr/model.hpp"

namespace cslr {

// Runs body(i) for i in [0, count) on `jobs` threads. Results must be written
// to per-index slots; the first exception thrown is rethrown after all
// workers stop.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

struct MCConfig {
    std::size_t n = 1000;
    std::size_t reps = 1000;
    std::vector<Method> methods{Method::Score1, Method::Score2, Method::Plugin, Method::ProfileMLE};
    TruncationSpec trunc;
    double c_beta = kDefaultBetaBandwidthConstant;
    double c_alpha = kDefaultAlphaBandwidthConstant;
    SearchInterval interval;
    std::uint64_t master_seed = 12345;
    unsigned jobs = 1;
    int grid_points = 100;
    ProgressFn progress;  // called after each replication, possibly from a worker

    void validate() const;
};

// One replication's estimates; nullopt marks a failure for that parameter.
struct Replicate {
    std::optional<double> beta;
    std::optional<double> alpha;
};

// replicates[m][j]: method cfg.methods[m], replication j (sample seeded by
// derive_seed(master_seed, j), shared across methods).
struct MCReplications {
    std::vector<Method> methods;
    std::vector<std::vector<Replicate>> replicates;
};

MCReplications simulate_replications(const ModelSpec& model, const MCConfig& cfg);

struct MCRow {
    std::string parameter;  // "beta" or "alpha"
    Method method = Method::Score1;
    std::size_t n = 0;
    std::size_t N = 0;
    double mean = 0.0;
    double n_times_var = 0.0;  // n times the sample variance (N - 1 denominator; 0 for one success)
    std::size_t failures = 0;
};

struct MCTable {
    std::vector<MCRow> rows;

    const MCRow* find(const std::string& parameter, Method method) const;
};

// Throws AllFailed if every replication of a method fails for beta.
MCTable summarize(const MCReplications& reps, std::size_t n);
MCTable run_montecarlo(const ModelSpec& model, const MCConfig& cfg);

void write_mc_table_csv(std::ostream& os, const MCTable& table);

struct MsePoint {
    double c = 0.0;
    double mse = 0.0;  // NaN when every cell at this c failed
    std::size_t failures = 0;
};

// 0.01, then 0.05 to 0.95 in steps of 0.05.
std::vector<double> default_c_grid();

struct MseCurveConfig {
    std::size_t n = 1000;
    std::size_t reps = 200;
    std::vector<double> c_grid = default_c_grid();
    TruncationSpec trunc;
    SearchInterval interval;
    std::uint64_t master_seed = 12345;
    unsigned jobs = 1;
    int grid_points = 100;
    ProgressFn progress;

    void validate() const;
};

// Monte Carlo MSE of the plug-in estimator, N^-1 sum_j (beta_hat_j - beta0)^2,
// at each c with h = c n^(-1/5). Replication j uses the same sample at every c.
std::vector<MsePoint> mc_mse_curve(const ModelSpec& model, const MseCurveConfig& cfg);

struct BootstrapConfig {
    std::vector<double> c_grid = default_c_grid();
    double c0 = 0.25;
    std::size_t B = 1000;
    std::uint64_t seed = 12345;
    unsigned jobs = 1;
    SearchInterval interval;
    int grid_points = 100;
    ProgressFn progress;

    void validate() const;
};

struct BootstrapResult {
    double c_opt = 0.0;
    double beta_pilot = 0.0;  // plug-in estimate at c0
    std::vector<MsePoint> curve;
};

// Pilot probabilities F_{n,h0}(t_i - beta_pilot x_i) with h0 = c0 n^(-1/5).
std::vector<double> bootstrap_probabilities(const Sample& sample, double beta_pilot, double c0);

// Resample b: delta*_i = 1{U_i < p_i}, U_i drawn from stream i of
// derive_seed(seed, b). (t, x) are untouched.
Sample bootstrap_resample(const Sample& sample, std::span<const double> p, std::uint64_t seed, std::size_t b);

// Bootstrap MSE B^-1 sum_b (beta*_b(c) - beta_pilot)^2 per c; the argmin
// (ties to the smaller c) is c_opt. Failed (b, c) cells are excluded and counted.
BootstrapResult bootstrap_bandwidth(const Sample& sample, const BootstrapConfig& cfg, const TruncationSpec& trunc);

void write_mse_curve_csv(std::ostream& os, const std::vector<MsePoint>& curve, const std::string& kind);

}  // namespace cslr
