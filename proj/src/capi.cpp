#include "cslr/cslr.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <string>

#include "cslr/error.hpp"
#include "cslr/estimators.hpp"
#include "cslr/experiments.hpp"
#include "cslr/io.hpp"
#include "cslr/isotonic.hpp"
#include "cslr/oracles.hpp"
#include "cslr/scores.hpp"

struct cslr_sample {
    cslr::Sample sample;
};

struct cslr_step {
    cslr::StepDistribution F;
};

namespace {

thread_local std::string g_last_error;

int fail(int status, const char* message) {
    g_last_error = message;
    return status;
}

// Runs body and converts exceptions into status codes.
template <class Body>
int guarded(Body&& body) noexcept {
    try {
        body();
        g_last_error.clear();
        return CSLR_OK;
    } catch (const cslr::Error& e) {
        return fail(static_cast<int>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(CSLR_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(CSLR_E_INTERNAL, e.what());
    } catch (...) {
        return fail(CSLR_E_INTERNAL, "unknown error");
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw cslr::Error(cslr::ErrorCode::InvalidArgument, what);
}

cslr::Method to_method(int m) {
    require(m >= CSLR_METHOD_SCORE1 && m <= CSLR_METHOD_PROFILE, "unknown method id");
    return static_cast<cslr::Method>(m);
}

cslr::ModelSpec to_model(const cslr_model* m) {
    cslr::ModelSpec spec = cslr::ModelSpec::simulation_default();
    if (m) {
        spec.beta0 = {m->beta0};
        spec.t_range = {m->t_lo, m->t_hi};
        spec.x_ranges = {{m->x_lo, m->x_hi}};
    }
    spec.validate();
    return spec;
}

cslr::TruncationSpec to_trunc(double eps) {
    cslr::TruncationSpec t;
    t.eps = eps;
    t.validate();
    return t;
}

cslr::SearchInterval to_interval(double lo, double hi) {
    cslr::SearchInterval s{lo, hi};
    s.validate();
    return s;
}

std::vector<double> to_grid(const double* grid, std::size_t count) {
    if (!grid) return cslr::default_c_grid();
    return {grid, grid + count};
}

cslr::ProgressFn to_progress(cslr_progress_fn fn, void* user) {
    if (!fn) return {};
    return [fn, user](std::size_t done, std::size_t total) { fn(done, total, user); };
}

void copy_curve(const std::vector<cslr::MsePoint>& curve, cslr_mse_point* out) {
    for (std::size_t i = 0; i < curve.size(); ++i) out[i] = {curve[i].c, curve[i].mse, curve[i].failures};
}

}  // namespace

extern "C" {

int cslr_abi_version(void) { return 1; }

const char* cslr_last_error(void) { return g_last_error.c_str(); }

const char* cslr_status_name(int status) {
    if (status == CSLR_OK) return "Ok";
    if (status == CSLR_E_INTERNAL) return "Internal";
    if (status >= CSLR_E_INVALID_ARGUMENT && status <= CSLR_E_IO)
        return cslr::error_code_name(static_cast<cslr::ErrorCode>(status));
    return "Unknown";
}

const char* cslr_method_name(int method) {
    if (method < CSLR_METHOD_SCORE1 || method > CSLR_METHOD_PROFILE) return nullptr;
    return cslr::method_name(static_cast<cslr::Method>(method));
}

int cslr_method_from_name(const char* name) {
    if (!name) return -1;
    const auto m = cslr::parse_method(name);
    return m ? static_cast<int>(*m) : -1;
}

void cslr_model_default(cslr_model* model) {
    if (model) *model = {0.5, 0.0, 2.0, 0.0, 2.0};
}

int cslr_sample_create(const double* t, const double* x, const int* delta, size_t n, size_t k, cslr_sample** out) {
    return guarded([&] {
        require(out && t && delta && (x || k == 0), "null pointer argument");
        *out = nullptr;
        std::vector<double> tv(t, t + n);
        std::vector<double> xv(x, x + n * k);
        std::vector<int> dv(delta, delta + n);
        *out = new cslr_sample{cslr::Sample(std::move(tv), std::move(xv), std::move(dv), k)};
    });
}

int cslr_sample_simulate(const cslr_model* model, size_t n, uint64_t seed, cslr_sample** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        *out = nullptr;
        *out = new cslr_sample{cslr::simulate(to_model(model), n, seed)};
    });
}

void cslr_sample_free(cslr_sample* sample) { delete sample; }

size_t cslr_sample_size(const cslr_sample* sample) { return sample ? sample->sample.size() : 0; }

size_t cslr_sample_dim(const cslr_sample* sample) { return sample ? sample->sample.dim() : 0; }

int cslr_sample_copy(const cslr_sample* sample, double* t, double* x, int* delta) {
    return guarded([&] {
        require(sample != nullptr, "null sample");
        const auto& s = sample->sample;
        if (t) std::copy(s.times().begin(), s.times().end(), t);
        if (x) std::copy(s.covariates().begin(), s.covariates().end(), x);
        if (delta) std::copy(s.deltas().begin(), s.deltas().end(), delta);
    });
}

int cslr_sample_equal(const cslr_sample* a, const cslr_sample* b) {
    return a && b && a->sample == b->sample ? 1 : 0;
}

int cslr_sample_read_csv(const char* path, cslr_sample** out) {
    return guarded([&] {
        require(path && out, "null pointer argument");
        *out = nullptr;
        *out = new cslr_sample{cslr::read_sample_csv_file(path)};
    });
}

int cslr_sample_write_csv(const cslr_sample* sample, const char* path) {
    return guarded([&] {
        require(sample && path, "null pointer argument");
        cslr::write_sample_csv_file(path, sample->sample);
    });
}

int cslr_sample_from_json(const char* text, cslr_sample** out) {
    return guarded([&] {
        require(text && out, "null pointer argument");
        *out = nullptr;
        *out = new cslr_sample{cslr::sample_from_json(text)};
    });
}

int cslr_sample_to_json(const cslr_sample* sample, char** out) {
    return guarded([&] {
        require(sample && out, "null pointer argument");
        *out = nullptr;
        const std::string json = cslr::sample_to_json(sample->sample);
        char* buf = static_cast<char*>(std::malloc(json.size() + 1));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, json.c_str(), json.size() + 1);
        *out = buf;
    });
}

void cslr_string_free(char* s) { std::free(s); }

int cslr_mle_fit(const cslr_sample* sample, const double* beta, size_t k, cslr_step** out) {
    return guarded([&] {
        require(sample && beta && out, "null pointer argument");
        *out = nullptr;
        *out = new cslr_step{cslr::mle_fixed_beta(sample->sample, std::span<const double>(beta, k))};
    });
}

void cslr_step_free(cslr_step* step) { delete step; }

size_t cslr_step_size(const cslr_step* step) { return step ? step->F.knots().size() : 0; }

int cslr_step_copy(const cslr_step* step, double* knots, double* values) {
    return guarded([&] {
        require(step != nullptr, "null step handle");
        if (knots) std::copy(step->F.knots().begin(), step->F.knots().end(), knots);
        if (values) std::copy(step->F.values().begin(), step->F.values().end(), values);
    });
}

double cslr_step_eval(const cslr_step* step, double u) { return step ? step->F(u) : 0.0; }

int cslr_step_write_csv(const cslr_step* step, const char* path) {
    return guarded([&] {
        require(step && path, "null pointer argument");
        std::ofstream os(path);
        if (!os) throw cslr::Error(cslr::ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
        cslr::write_step_csv(os, step->F);
    });
}

void cslr_estimate_options_default(cslr_estimate_options* opt) {
    if (!opt) return;
    const cslr::EstimatorOptions d;
    *opt = {CSLR_METHOD_SCORE1, d.trunc.eps, d.c_beta, d.c_alpha, d.interval.lo, d.interval.hi,
            d.grid_points, d.refine_tol, 1};
}

int cslr_estimate(const cslr_sample* sample, const cslr_estimate_options* opt, cslr_estimate_result* out) {
    return guarded([&] {
        require(sample && opt && out, "null pointer argument");
        cslr::EstimatorOptions o;
        o.method = to_method(opt->method);
        o.trunc = to_trunc(opt->eps);
        o.interval = to_interval(opt->lo, opt->hi);
        o.c_beta = opt->c_beta;
        o.c_alpha = opt->c_alpha;
        o.grid_points = opt->grid_points;
        o.refine_tol = opt->refine_tol;
        o.with_intercept = opt->with_intercept != 0;
        const cslr::EstimateResult r = cslr::estimate(sample->sample, o);
        cslr_estimate_result res{};
        res.beta_hat = r.beta_hat.at(0);
        res.has_alpha = r.alpha_hat.has_value() ? 1 : 0;
        res.alpha_hat = r.alpha_hat.value_or(0.0);
        res.alpha_mass_deficit = r.alpha_mass_deficit ? 1 : 0;
        res.method = static_cast<int>(r.method);
        res.eps = r.eps;
        res.h_beta = r.h_beta;
        res.h_alpha = r.h_alpha;
        res.bracket_lo = r.diagnostics.lo;
        res.bracket_hi = r.diagnostics.hi;
        res.evaluations = r.diagnostics.evaluations;
        res.crossings = r.diagnostics.crossings;
        std::strncpy(res.search, r.diagnostics.method.c_str(), sizeof res.search - 1);
        *out = res;
    });
}

int cslr_score(const cslr_sample* sample, int method, double beta, double eps, double c, cslr_score_value* out) {
    return guarded([&] {
        require(sample && out, "null pointer argument");
        const auto& s = sample->sample;
        require(s.dim() == 1, "score curves need k = 1");
        const cslr::TruncationSpec trunc = to_trunc(eps);
        const double b[1] = {beta};
        cslr::KernelConfig kc;
        const cslr::Method m = to_method(method);
        if (m == cslr::Method::ProfileMLE) {
            const auto fit = cslr::fit_mle(s, b);
            std::size_t used = 0;
            for (double f : fit.fitted) used += trunc.contains(f) ? 1 : 0;
            *out = {cslr::profile_log_likelihood(s, b, trunc), used, s.size() - used};
            return;
        }
        cslr::ScoreValue v;
        if (m == cslr::Method::Score1) {
            v = cslr::psi1(s, b, trunc);
        } else if (m == cslr::Method::Score2) {
            kc.bandwidth = cslr::bandwidth_for(c, s.size(), cslr::kScore2BandwidthRate);
            v = cslr::psi2(s, b, trunc, kc);
        } else {
            kc.bandwidth = cslr::bandwidth_for(c, s.size(), cslr::kPluginBandwidthRate);
            v = cslr::psi3(s, b, trunc, kc);
        }
        *out = {v.value.at(0), v.n_used, v.n_excluded};
    });
}

int cslr_oracle(const cslr_model* model, const char* quantity, double eps, double beta, cslr_oracle_result* out) {
    return guarded([&] {
        require(quantity && out, "null pointer argument");
        const cslr::ModelSpec m = to_model(model);
        const std::string q = quantity;
        cslr::PopulationReport r;
        if (q == "ip") r = cslr::fisher_parametric(m, eps);
        else if (q == "i" || q == "ieps") r = cslr::fisher_semiparametric(m, eps);
        else if (q == "score1var") r = cslr::score1_asymptotic_variance(m, eps);
        else if (q == "interceptvar") r = cslr::intercept_variance(m, eps, true);
        else if (q == "interceptvar-simple") r = cslr::intercept_variance(m, eps, false);
        else if (q == "popscore") r = cslr::population_score1(m, beta, eps);
        else if (q == "ident") r = cslr::identifiability_integral(m, beta, eps);
        else throw cslr::Error(cslr::ErrorCode::InvalidArgument, "unknown oracle quantity '" + q + "'");
        *out = {r.value, r.eps, r.tol, r.change, r.converged ? 1 : 0};
    });
}

void cslr_mc_config_default(cslr_mc_config* cfg) {
    if (!cfg) return;
    const cslr::MCConfig d;
    *cfg = {d.n, d.reps, 0xFu, d.trunc.eps, d.c_beta, d.c_alpha, d.interval.lo, d.interval.hi,
            d.master_seed, d.jobs, d.grid_points, nullptr, nullptr};
}

int cslr_mc_table(const cslr_model* model, const cslr_mc_config* cfg, cslr_mc_row* rows, size_t capacity,
                  size_t* count) {
    return guarded([&] {
        require(cfg && rows && count, "null pointer argument");
        cslr::MCConfig c;
        c.n = cfg->n;
        c.reps = cfg->reps;
        c.methods.clear();
        for (int m = CSLR_METHOD_SCORE1; m <= CSLR_METHOD_PROFILE; ++m)
            if (cfg->methods_mask & (1u << m)) c.methods.push_back(static_cast<cslr::Method>(m));
        c.trunc = to_trunc(cfg->eps);
        c.c_beta = cfg->c_beta;
        c.c_alpha = cfg->c_alpha;
        c.interval = to_interval(cfg->lo, cfg->hi);
        c.master_seed = cfg->seed;
        c.jobs = cfg->jobs;
        c.grid_points = cfg->grid_points;
        c.progress = to_progress(cfg->progress, cfg->progress_user);
        require(capacity >= 2 * c.methods.size(), "row buffer too small");
        const cslr::MCTable table = cslr::run_montecarlo(to_model(model), c);
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            const auto& r = table.rows[i];
            rows[i] = {r.parameter == "beta" ? 0 : 1, static_cast<int>(r.method), r.n, r.N, r.mean, r.n_times_var,
                       r.failures};
        }
        *count = table.rows.size();
    });
}

void cslr_mse_config_default(cslr_mse_config* cfg) {
    if (!cfg) return;
    const cslr::MseCurveConfig d;
    *cfg = {d.n, d.reps, nullptr, 0, d.trunc.eps, d.interval.lo, d.interval.hi, d.master_seed, d.jobs,
            d.grid_points, nullptr, nullptr};
}

size_t cslr_default_c_grid(double* out, size_t capacity) {
    const auto grid = cslr::default_c_grid();
    if (out) std::copy_n(grid.begin(), std::min(capacity, grid.size()), out);
    return grid.size();
}

int cslr_mse_curve(const cslr_model* model, const cslr_mse_config* cfg, cslr_mse_point* out) {
    return guarded([&] {
        require(cfg && out, "null pointer argument");
        cslr::MseCurveConfig c;
        c.n = cfg->n;
        c.reps = cfg->reps;
        c.c_grid = to_grid(cfg->c_grid, cfg->c_count);
        c.trunc = to_trunc(cfg->eps);
        c.interval = to_interval(cfg->lo, cfg->hi);
        c.master_seed = cfg->seed;
        c.jobs = cfg->jobs;
        c.grid_points = cfg->grid_points;
        c.progress = to_progress(cfg->progress, cfg->progress_user);
        copy_curve(cslr::mc_mse_curve(to_model(model), c), out);
    });
}

void cslr_bootstrap_config_default(cslr_bootstrap_config* cfg) {
    if (!cfg) return;
    const cslr::BootstrapConfig d;
    const cslr::TruncationSpec t;
    *cfg = {nullptr, 0, d.c0, d.B, t.eps, d.interval.lo, d.interval.hi, d.seed, d.jobs, d.grid_points,
            nullptr, nullptr};
}

int cslr_bootstrap_bw(const cslr_sample* sample, const cslr_bootstrap_config* cfg, cslr_mse_point* curve,
                      double* c_opt, double* beta_pilot) {
    return guarded([&] {
        require(sample && cfg && curve, "null pointer argument");
        cslr::BootstrapConfig c;
        c.c_grid = to_grid(cfg->c_grid, cfg->c_count);
        c.c0 = cfg->c0;
        c.B = cfg->B;
        c.seed = cfg->seed;
        c.jobs = cfg->jobs;
        c.interval = to_interval(cfg->lo, cfg->hi);
        c.grid_points = cfg->grid_points;
        c.progress = to_progress(cfg->progress, cfg->progress_user);
        const auto r = cslr::bootstrap_bandwidth(sample->sample, c, to_trunc(cfg->eps));
        copy_curve(r.curve, curve);
        if (c_opt) *c_opt = r.c_opt;
        if (beta_pilot) *beta_pilot = r.beta_pilot;
    });
}

}  // extern "C"
