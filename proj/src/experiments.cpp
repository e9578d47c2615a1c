#include "cslr/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "cslr/error.hpp"
#include "cslr/io.hpp"
#include "cslr/kernel.hpp"
#include "cslr/rng.hpp"

namespace cslr {

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            if (stop.load(std::memory_order_relaxed)) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                stop = true;
            }
        }
    };
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

// Serialised progress reporting shared by the harnesses.
class ProgressCounter {
public:
    ProgressCounter(const ProgressFn& fn, std::size_t total) : fn_(fn), total_(total) {}

    void tick() {
        if (!fn_) return;
        std::lock_guard lock(mutex_);
        fn_(++done_, total_);
    }

private:
    const ProgressFn& fn_;
    std::size_t total_;
    std::size_t done_ = 0;
    std::mutex mutex_;
};

void validate_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "c grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i]))
            throw Error(ErrorCode::InvalidArgument, "c grid values must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "c grid must be ascending");
    }
}

double plugin_bandwidth(double c, std::size_t n) { return bandwidth_for(c, n, kPluginBandwidthRate); }

}  // namespace

void MCConfig::validate() const {
    if (n < 10) throw Error(ErrorCode::InvalidArgument, "Monte Carlo needs n >= 10");
    if (reps < 1) throw Error(ErrorCode::InvalidArgument, "Monte Carlo needs at least one replication");
    if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods selected");
    if (!(c_beta > 0.0) || !(c_alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "bandwidth constants must be positive");
    if (grid_points < 1) throw Error(ErrorCode::InvalidArgument, "grid_points must be >= 1");
    trunc.validate();
    interval.validate();
}

MCReplications simulate_replications(const ModelSpec& model, const MCConfig& cfg) {
    cfg.validate();
    model.validate();
    const std::size_t m = cfg.methods.size();
    MCReplications out;
    out.methods = cfg.methods;
    out.replicates.assign(m, std::vector<Replicate>(cfg.reps));
    ProgressCounter progress(cfg.progress, cfg.reps);

    parallel_for(cfg.reps, cfg.jobs, [&](std::size_t j) {
        const Sample sample = simulate(model, cfg.n, derive_seed(cfg.master_seed, j));
        for (std::size_t a = 0; a < m; ++a) {
            EstimatorOptions opt;
            opt.method = cfg.methods[a];
            opt.interval = cfg.interval;
            opt.trunc = cfg.trunc;
            opt.c_beta = cfg.c_beta;
            opt.c_alpha = cfg.c_alpha;
            opt.grid_points = cfg.grid_points;
            Replicate& slot = out.replicates[a][j];
            try {
                const EstimateResult r = estimate(sample, opt);
                slot.beta = r.beta_hat[0];
                slot.alpha = r.alpha_hat;
            } catch (const Error&) {
                // Excluded and counted by summarize().
            }
        }
        progress.tick();
    });
    return out;
}

namespace {

// Mean and N - 1 variance, accumulated in replication order.
std::pair<double, double> moments(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, ss / static_cast<double>(v.size() - 1)};
}

}  // namespace

const MCRow* MCTable::find(const std::string& parameter, Method method) const {
    for (const auto& row : rows)
        if (row.parameter == parameter && row.method == method) return &row;
    return nullptr;
}

MCTable summarize(const MCReplications& reps, std::size_t n) {
    MCTable table;
    for (const char* parameter : {"beta", "alpha"}) {
        const bool is_beta = parameter[0] == 'b';
        for (std::size_t a = 0; a < reps.methods.size(); ++a) {
            std::vector<double> values;
            for (const auto& r : reps.replicates[a]) {
                const auto& v = is_beta ? r.beta : r.alpha;
                if (v) values.push_back(*v);
            }
            MCRow row;
            row.parameter = parameter;
            row.method = reps.methods[a];
            row.n = n;
            row.N = reps.replicates[a].size();
            row.failures = row.N - values.size();
            if (values.empty()) {
                if (is_beta)
                    throw Error(ErrorCode::AllFailed,
                                std::string("every replication failed for ") + method_name(reps.methods[a]));
                row.mean = std::numeric_limits<double>::quiet_NaN();
                row.n_times_var = std::numeric_limits<double>::quiet_NaN();
            } else {
                const auto [mean, var] = moments(values);
                row.mean = mean;
                row.n_times_var = static_cast<double>(n) * var;
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

MCTable run_montecarlo(const ModelSpec& model, const MCConfig& cfg) {
    return summarize(simulate_replications(model, cfg), cfg.n);
}

void write_mc_table_csv(std::ostream& os, const MCTable& table) {
    os << "# schema: " << kSchemaVersion << "\nparameter,method,n,N,mean,n_times_var,failures\n";
    for (const auto& r : table.rows)
        os << r.parameter << ',' << method_name(r.method) << ',' << r.n << ',' << r.N << ',' << format_double(r.mean)
           << ',' << format_double(r.n_times_var) << ',' << r.failures << '\n';
}

std::vector<double> default_c_grid() {
    std::vector<double> grid{0.01};
    for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
    return grid;
}

void MseCurveConfig::validate() const {
    if (n < 10) throw Error(ErrorCode::InvalidArgument, "MSE curve needs n >= 10");
    if (reps < 1) throw Error(ErrorCode::InvalidArgument, "MSE curve needs at least one replication");
    if (grid_points < 1) throw Error(ErrorCode::InvalidArgument, "grid_points must be >= 1");
    validate_grid(c_grid);
    trunc.validate();
    interval.validate();
}

namespace {

// Reduces per-(replication, c) squared errors in replication order.
std::vector<MsePoint> reduce_cells(const std::vector<double>& c_grid,
                                   const std::vector<std::vector<std::optional<double>>>& sq) {
    std::vector<MsePoint> curve;
    for (std::size_t g = 0; g < c_grid.size(); ++g) {
        MsePoint p;
        p.c = c_grid[g];
        double sum = 0.0;
        std::size_t ok = 0;
        for (const auto& row : sq) {
            if (row[g]) {
                sum += *row[g];
                ++ok;
            } else {
                ++p.failures;
            }
        }
        p.mse = ok > 0 ? sum / static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
        curve.push_back(p);
    }
    return curve;
}

}  // namespace

std::vector<MsePoint> mc_mse_curve(const ModelSpec& model, const MseCurveConfig& cfg) {
    cfg.validate();
    model.validate();
    const double beta0 = model.beta0.at(0);
    const std::size_t G = cfg.c_grid.size();
    std::vector<std::vector<std::optional<double>>> sq(cfg.reps, std::vector<std::optional<double>>(G));
    ProgressCounter progress(cfg.progress, cfg.reps);

    parallel_for(cfg.reps, cfg.jobs, [&](std::size_t j) {
        const Sample sample = simulate(model, cfg.n, derive_seed(cfg.master_seed, j));
        for (std::size_t g = 0; g < G; ++g) {
            try {
                const auto r = estimate_plugin(sample, cfg.interval, cfg.trunc, cfg.c_grid[g], cfg.grid_points);
                const double d = r.beta_hat[0] - beta0;
                sq[j][g] = d * d;
            } catch (const Error&) {
            }
        }
        progress.tick();
    });
    return reduce_cells(cfg.c_grid, sq);
}

void BootstrapConfig::validate() const {
    if (B < 1) throw Error(ErrorCode::InvalidArgument, "bootstrap needs B >= 1");
    if (!(c0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "c0 must be positive");
    if (grid_points < 1) throw Error(ErrorCode::InvalidArgument, "grid_points must be >= 1");
    validate_grid(c_grid);
    interval.validate();
}

std::vector<double> bootstrap_probabilities(const Sample& sample, double beta_pilot, double c0) {
    KernelConfig kc;
    kc.bandwidth = plugin_bandwidth(c0, sample.size());
    const std::vector<double> beta{beta_pilot};
    const PluginSmoother smoother(sample, beta, kc);
    std::vector<double> p(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        // The own observation is in its window, so the ratio is defined.
        const auto v = smoother.at_observation(i, false);
        p[i] = v ? v->F : static_cast<double>(sample.delta(i));
    }
    return p;
}

Sample bootstrap_resample(const Sample& sample, std::span<const double> p, std::uint64_t seed, std::size_t b) {
    if (p.size() != sample.size()) throw Error(ErrorCode::DimensionMismatch, "one probability per observation needed");
    const std::uint64_t key = derive_seed(seed, b);
    std::vector<int> deltas(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        CounterRng rng(key, i);
        deltas[i] = rng.uniform() < p[i] ? 1 : 0;
    }
    return sample.with_deltas(std::move(deltas));
}

BootstrapResult bootstrap_bandwidth(const Sample& sample, const BootstrapConfig& cfg, const TruncationSpec& trunc) {
    cfg.validate();
    trunc.validate();
    if (sample.dim() != 1) throw Error(ErrorCode::UnsupportedModel, "bootstrap bandwidth selection needs k = 1");

    BootstrapResult result;
    result.beta_pilot = estimate_plugin(sample, cfg.interval, trunc, cfg.c0, cfg.grid_points).beta_hat[0];
    const std::vector<double> p = bootstrap_probabilities(sample, result.beta_pilot, cfg.c0);

    const std::size_t G = cfg.c_grid.size();
    std::vector<std::vector<std::optional<double>>> sq(cfg.B, std::vector<std::optional<double>>(G));
    ProgressCounter progress(cfg.progress, cfg.B);
    parallel_for(cfg.B, cfg.jobs, [&](std::size_t b) {
        const Sample star = bootstrap_resample(sample, p, cfg.seed, b);
        for (std::size_t g = 0; g < G; ++g) {
            try {
                const auto r = estimate_plugin(star, cfg.interval, trunc, cfg.c_grid[g], cfg.grid_points);
                const double d = r.beta_hat[0] - result.beta_pilot;
                sq[b][g] = d * d;
            } catch (const Error&) {
            }
        }
        progress.tick();
    });
    result.curve = reduce_cells(cfg.c_grid, sq);

    const MsePoint* best = nullptr;
    for (const auto& pt : result.curve)
        if (!std::isnan(pt.mse) && (!best || pt.mse < best->mse)) best = &pt;
    if (!best) throw Error(ErrorCode::AllFailed, "every bootstrap cell failed");
    result.c_opt = best->c;
    return result;
}

void write_mse_curve_csv(std::ostream& os, const std::vector<MsePoint>& curve, const std::string& kind) {
    os << "# schema: " << kSchemaVersion << "\nc,mse,kind\n";
    for (const auto& p : curve) os << format_double(p.c) << ',' << format_double(p.mse) << ',' << kind << '\n';
}

}  // namespace cslr
