// Command line front end. Everything goes through the C interface in
// cslr/cslr.h; scalar results print as JSON, tables and curves as CSV.
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cslr/cslr.h"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitEstimation = 3;
constexpr int kSchema = 1;

struct SampleDeleter {
    void operator()(cslr_sample* s) const { cslr_sample_free(s); }
};
struct StepDeleter {
    void operator()(cslr_step* s) const { cslr_step_free(s); }
};
using SamplePtr = std::unique_ptr<cslr_sample, SampleDeleter>;
using StepPtr = std::unique_ptr<cslr_step, StepDeleter>;

// A failed library call, carrying its status for the exit code.
struct CallFailed {
    int status;
    std::string message;
};

struct UsageError {
    std::string message;
};

void check(int status) {
    if (status != CSLR_OK) throw CallFailed{status, cslr_last_error()};
}

int exit_code_for(int status) {
    switch (status) {
        case CSLR_E_INVALID_ARGUMENT:
        case CSLR_E_DIMENSION_MISMATCH:
        case CSLR_E_UNSUPPORTED_MODEL:
        case CSLR_E_IO:
            return kExitValidation;
        case CSLR_E_INTERNAL:
            return 1;
        default:
            return kExitEstimation;
    }
}

std::string num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

// Writes to the named file, or standard output for "" and "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw UsageError{"cannot open '" + path + "' for writing"};
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

void progress_to_stderr(size_t done, size_t total, void*) {
    std::fprintf(stderr, "\r%zu/%zu", done, total);
    if (done == total) std::fputc('\n', stderr);
    std::fflush(stderr);
}

struct SampleSource {
    std::string input;
    std::size_t n = 1000;
    std::uint64_t seed = 12345;
    double beta0 = 0.5;

    void add_to(CLI::App* app) {
        app->add_option("--input", input, "Sample CSV; simulated from --n and --seed when omitted");
        app->add_option("--n", n, "Sample size when simulating")->check(CLI::PositiveNumber);
        app->add_option("--seed", seed, "Seed when simulating");
    }

    SamplePtr load() const {
        cslr_sample* s = nullptr;
        if (!input.empty()) {
            check(cslr_sample_read_csv(input.c_str(), &s));
        } else {
            cslr_model model;
            cslr_model_default(&model);
            model.beta0 = beta0;
            check(cslr_sample_simulate(&model, n, seed, &s));
        }
        return SamplePtr(s);
    }
};

struct Interval {
    std::vector<double> bounds{0.3, 0.7};

    void add_to(CLI::App* app) {
        app->add_option("--interval", bounds, "Search interval lo,hi")->delimiter(',')->expected(2);
    }
    double lo() const { return bounds[0]; }
    double hi() const { return bounds[1]; }
    void validate() const {
        if (!(bounds[0] < bounds[1])) throw UsageError{"--interval needs lo < hi"};
    }
};

void validate_eps(double eps) {
    if (!(eps >= 0.0 && eps < 0.5)) throw UsageError{"--eps must lie in [0, 0.5)"};
}

int parse_method_or_throw(const std::string& name) {
    const int m = cslr_method_from_name(name.c_str());
    if (m < 0) throw UsageError{"unknown method '" + name + "'"};
    return m;
}

std::vector<double> c_grid_or_default(const std::vector<double>& given) {
    if (!given.empty()) return given;
    std::vector<double> grid(cslr_default_c_grid(nullptr, 0));
    cslr_default_c_grid(grid.data(), grid.size());
    return grid;
}

void write_curve_csv(std::ostream& os, const std::vector<cslr_mse_point>& curve, const char* kind) {
    os << "# schema: " << kSchema << "\nc,mse,kind\n";
    for (const auto& p : curve) os << num(p.c) << ',' << num(p.mse) << ',' << kind << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Current status linear regression: simulation, estimation, oracles and experiments"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a sample from the default model");
    std::size_t sim_n = 1000;
    std::uint64_t sim_seed = 12345;
    double sim_beta0 = 0.5;
    std::string sim_out;
    std::string sim_format = "csv";
    sim->add_option("--n", sim_n, "Sample size")->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "Seed");
    sim->add_option("--beta0", sim_beta0, "True slope");
    sim->add_option("--out", sim_out, "Output file (stdout if omitted)");
    sim->add_option("--format", sim_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    // mle
    auto* mle = app.add_subcommand("mle", "Export the fixed-beta MLE of the error distribution");
    SampleSource mle_src;
    mle_src.add_to(mle);
    double mle_beta = 0.5;
    std::string mle_out;
    mle->add_option("--beta", mle_beta, "Fixed slope");
    mle->add_option("--out", mle_out, "Output CSV (stdout if omitted)");

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate slope and intercept");
    SampleSource est_src;
    est_src.add_to(est);
    std::string est_method = "score1";
    double est_eps = 0.001;
    double est_c = 0.5;
    double est_c_alpha = 0.75;
    int est_grid = 100;
    bool est_no_intercept = false;
    Interval est_interval;
    est->add_option("--method", est_method, "score1, score2, plugin or profile");
    est->add_option("--eps", est_eps, "Truncation level");
    est->add_option("--c", est_c, "Bandwidth constant for beta")->check(CLI::PositiveNumber);
    est->add_option("--c-alpha", est_c_alpha, "Bandwidth constant for the plug-in intercept")
        ->check(CLI::PositiveNumber);
    est->add_option("--grid", est_grid, "Grid points for the search")->check(CLI::PositiveNumber);
    est->add_flag("--no-intercept", est_no_intercept, "Skip the intercept");
    est_interval.add_to(est);

    // score-curve
    auto* sc = app.add_subcommand("score-curve", "Evaluate a score (or the profile likelihood) over a beta grid");
    SampleSource sc_src;
    sc_src.add_to(sc);
    std::string sc_method = "score1";
    double sc_eps = 0.001;
    double sc_c = 0.5;
    int sc_grid = 100;
    std::string sc_out;
    Interval sc_interval;
    sc->add_option("--method", sc_method, "score1, score2, plugin or profile");
    sc->add_option("--eps", sc_eps, "Truncation level");
    sc->add_option("--c", sc_c, "Bandwidth constant")->check(CLI::PositiveNumber);
    sc->add_option("--grid", sc_grid, "Grid points")->check(CLI::Range(2, 100000));
    sc->add_option("--out", sc_out, "Output CSV (stdout if omitted)");
    sc_interval.add_to(sc);

    // oracle
    auto* orc = app.add_subcommand("oracle", "Population quantities by quadrature");
    std::string orc_q = "ip";
    std::optional<double> orc_eps;
    double orc_beta = 0.5;
    std::string orc_variant = "efficient";
    orc->add_option("--quantity", orc_q, "ip, i, ieps, score1var, interceptvar, popscore or ident")
        ->check(CLI::IsMember({"ip", "i", "ieps", "score1var", "interceptvar", "popscore", "ident"}));
    orc->add_option("--eps", orc_eps, "Truncation level (0 for ip and i, 0.001 otherwise)");
    orc->add_option("--beta", orc_beta, "Slope for popscore and ident");
    orc->add_option("--variant", orc_variant, "interceptvar: efficient or simple")
        ->check(CLI::IsMember({"efficient", "simple"}));

    // mc-table
    auto* mc = app.add_subcommand("mc-table", "Monte Carlo mean and n times variance per method");
    std::size_t mc_n = 1000;
    std::size_t mc_N = 1000;
    std::vector<std::string> mc_methods{"score1", "score2", "plugin", "profile"};
    double mc_eps = 0.001;
    double mc_c = 0.5;
    double mc_c_alpha = 0.75;
    std::uint64_t mc_seed = 12345;
    unsigned mc_jobs = 1;
    int mc_grid = 100;
    bool mc_progress = false;
    std::string mc_out;
    Interval mc_interval;
    mc->add_option("--n", mc_n, "Sample size")->check(CLI::Range(std::size_t{10}, std::size_t{10000000}));
    mc->add_option("--N", mc_N, "Replications")->check(CLI::PositiveNumber);
    mc->add_option("--methods", mc_methods, "Comma separated methods")->delimiter(',');
    mc->add_option("--eps", mc_eps, "Truncation level");
    mc->add_option("--c", mc_c, "Bandwidth constant for beta")->check(CLI::PositiveNumber);
    mc->add_option("--c-alpha", mc_c_alpha, "Bandwidth constant for the plug-in intercept")
        ->check(CLI::PositiveNumber);
    mc->add_option("--seed", mc_seed, "Master seed");
    mc->add_option("--jobs", mc_jobs, "Worker threads")->check(CLI::PositiveNumber);
    mc->add_option("--grid", mc_grid, "Grid points for the search")->check(CLI::PositiveNumber);
    mc->add_flag("--progress", mc_progress, "Replication counter on stderr");
    mc->add_option("--out", mc_out, "Output CSV (stdout if omitted)");
    mc_interval.add_to(mc);

    // mse-curve
    auto* mse = app.add_subcommand("mse-curve", "Monte Carlo MSE of the plug-in estimator over bandwidth constants");
    std::size_t mse_n = 1000;
    std::size_t mse_N = 200;
    std::vector<double> mse_grid;
    double mse_eps = 0.001;
    std::uint64_t mse_seed = 12345;
    unsigned mse_jobs = 1;
    int mse_search = 100;
    bool mse_progress = false;
    std::string mse_out;
    Interval mse_interval;
    mse->add_option("--n", mse_n, "Sample size")->check(CLI::Range(std::size_t{10}, std::size_t{10000000}));
    mse->add_option("--N", mse_N, "Replications")->check(CLI::PositiveNumber);
    mse->add_option("--c-grid", mse_grid, "Comma separated c values")->delimiter(',');
    mse->add_option("--eps", mse_eps, "Truncation level");
    mse->add_option("--seed", mse_seed, "Master seed");
    mse->add_option("--jobs", mse_jobs, "Worker threads")->check(CLI::PositiveNumber);
    mse->add_option("--grid", mse_search, "Grid points for the search")->check(CLI::PositiveNumber);
    mse->add_flag("--progress", mse_progress, "Replication counter on stderr");
    mse->add_option("--out", mse_out, "Output CSV (stdout if omitted)");
    mse_interval.add_to(mse);

    // bootstrap-bw
    auto* bw = app.add_subcommand("bootstrap-bw", "Bootstrap choice of the plug-in bandwidth constant");
    SampleSource bw_src;
    bw_src.add_to(bw);
    std::vector<double> bw_grid;
    double bw_c0 = 0.25;
    std::size_t bw_B = 1000;
    double bw_eps = 0.001;
    std::uint64_t bw_boot_seed = 1;
    unsigned bw_jobs = 1;
    int bw_search = 100;
    bool bw_progress = false;
    std::string bw_out;
    Interval bw_interval;
    bw->add_option("--c-grid", bw_grid, "Comma separated c values")->delimiter(',');
    bw->add_option("--c0", bw_c0, "Pilot bandwidth constant")->check(CLI::PositiveNumber);
    bw->add_option("--B", bw_B, "Bootstrap resamples")->check(CLI::PositiveNumber);
    bw->add_option("--eps", bw_eps, "Truncation level");
    bw->add_option("--boot-seed", bw_boot_seed, "Seed for the bootstrap indicators");
    bw->add_option("--jobs", bw_jobs, "Worker threads")->check(CLI::PositiveNumber);
    bw->add_option("--grid", bw_search, "Grid points for the search")->check(CLI::PositiveNumber);
    bw->add_flag("--progress", bw_progress, "Resample counter on stderr");
    bw->add_option("--out", bw_out, "Curve CSV; embedded in the JSON summary when omitted");
    bw_interval.add_to(bw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*sim) {
            cslr_model model;
            cslr_model_default(&model);
            model.beta0 = sim_beta0;
            cslr_sample* raw = nullptr;
            check(cslr_sample_simulate(&model, sim_n, sim_seed, &raw));
            SamplePtr s(raw);
            if (sim_format == "csv") {
                if (sim_out.empty() || sim_out == "-") {
                    // The library writes files; route through a JSON-free copy for stdout.
                    const std::size_t n = cslr_sample_size(s.get());
                    std::vector<double> t(n), x(n);
                    std::vector<int> d(n);
                    check(cslr_sample_copy(s.get(), t.data(), x.data(), d.data()));
                    std::cout << "# schema: " << kSchema << "\nt,x1,delta\n";
                    for (std::size_t i = 0; i < n; ++i) std::cout << num(t[i]) << ',' << num(x[i]) << ',' << d[i] << '\n';
                } else {
                    check(cslr_sample_write_csv(s.get(), sim_out.c_str()));
                }
            } else {
                char* json = nullptr;
                check(cslr_sample_to_json(s.get(), &json));
                Output out(sim_out);
                out.stream() << json << '\n';
                cslr_string_free(json);
            }
        } else if (*mle) {
            SamplePtr s = mle_src.load();
            cslr_step* raw = nullptr;
            check(cslr_mle_fit(s.get(), &mle_beta, 1, &raw));
            StepPtr F(raw);
            const std::size_t m = cslr_step_size(F.get());
            std::vector<double> knots(m), values(m);
            check(cslr_step_copy(F.get(), knots.data(), values.data()));
            Output out(mle_out);
            out.stream() << "# schema: " << kSchema << "\nknot,value\n";
            for (std::size_t i = 0; i < m; ++i) out.stream() << num(knots[i]) << ',' << num(values[i]) << '\n';
        } else if (*est) {
            validate_eps(est_eps);
            est_interval.validate();
            const int method = parse_method_or_throw(est_method);
            SamplePtr s = est_src.load();
            cslr_estimate_options opt;
            cslr_estimate_options_default(&opt);
            opt.method = method;
            opt.eps = est_eps;
            opt.c_beta = est_c;
            opt.c_alpha = est_c_alpha;
            opt.lo = est_interval.lo();
            opt.hi = est_interval.hi();
            opt.grid_points = est_grid;
            opt.with_intercept = est_no_intercept ? 0 : 1;
            cslr_estimate_result r;
            check(cslr_estimate(s.get(), &opt, &r));
            nlohmann::json j{{"schema", kSchema},
                             {"method", cslr_method_name(r.method)},
                             {"n", cslr_sample_size(s.get())},
                             {"beta_hat", {r.beta_hat}},
                             {"alpha_hat", r.has_alpha ? nlohmann::json(r.alpha_hat) : nlohmann::json()},
                             {"alpha_mass_deficit", r.alpha_mass_deficit != 0},
                             {"eps", r.eps},
                             {"h_beta", r.h_beta},
                             {"h_alpha", r.h_alpha},
                             {"diagnostics",
                              {{"bracket", {r.bracket_lo, r.bracket_hi}},
                               {"evaluations", r.evaluations},
                               {"crossings", r.crossings},
                               {"search", r.search}}}};
            if (est_src.input.empty()) j["seed"] = est_src.seed;
            print_json(j);
        } else if (*sc) {
            validate_eps(sc_eps);
            sc_interval.validate();
            const int method = parse_method_or_throw(sc_method);
            SamplePtr s = sc_src.load();
            Output out(sc_out);
            out.stream() << "# schema: " << kSchema << "\nbeta,psi,method,n_used,n_excluded\n";
            for (int g = 0; g < sc_grid; ++g) {
                const double beta = sc_interval.lo() + (sc_interval.hi() - sc_interval.lo()) * g / (sc_grid - 1);
                cslr_score_value v;
                check(cslr_score(s.get(), method, beta, sc_eps, sc_c, &v));
                out.stream() << num(beta) << ',' << num(v.value) << ',' << cslr_method_name(method) << ','
                             << v.n_used << ',' << v.n_excluded << '\n';
            }
        } else if (*orc) {
            const double eps = orc_eps.value_or(orc_q == "ip" || orc_q == "i" ? 0.0 : 0.001);
            validate_eps(eps);
            std::string quantity = orc_q;
            if (quantity == "interceptvar" && orc_variant == "simple") quantity = "interceptvar-simple";
            cslr_oracle_result r;
            check(cslr_oracle(nullptr, quantity.c_str(), eps, orc_beta, &r));
            nlohmann::json j{{"schema", kSchema}, {"quantity", orc_q}, {"value", r.value}, {"eps", r.eps},
                             {"tol", r.tol},      {"change", r.change}, {"converged", r.converged != 0}};
            if (orc_q == "popscore" || orc_q == "ident") j["beta"] = orc_beta;
            if (orc_q == "interceptvar") j["variant"] = orc_variant;
            if (orc_q == "ieps" || orc_q == "i") j["inverse"] = 1.0 / r.value;
            print_json(j);
        } else if (*mc) {
            validate_eps(mc_eps);
            mc_interval.validate();
            cslr_mc_config cfg;
            cslr_mc_config_default(&cfg);
            cfg.n = mc_n;
            cfg.reps = mc_N;
            cfg.methods_mask = 0;
            for (const auto& m : mc_methods) cfg.methods_mask |= 1u << parse_method_or_throw(m);
            cfg.eps = mc_eps;
            cfg.c_beta = mc_c;
            cfg.c_alpha = mc_c_alpha;
            cfg.lo = mc_interval.lo();
            cfg.hi = mc_interval.hi();
            cfg.seed = mc_seed;
            cfg.jobs = mc_jobs;
            cfg.grid_points = mc_grid;
            if (mc_progress) cfg.progress = progress_to_stderr;
            std::vector<cslr_mc_row> rows(8);
            std::size_t count = 0;
            check(cslr_mc_table(nullptr, &cfg, rows.data(), rows.size(), &count));
            Output out(mc_out);
            out.stream() << "# schema: " << kSchema << "\nparameter,method,n,N,mean,n_times_var,failures\n";
            for (std::size_t i = 0; i < count; ++i) {
                const auto& r = rows[i];
                out.stream() << (r.parameter == 0 ? "beta" : "alpha") << ',' << cslr_method_name(r.method) << ','
                             << r.n << ',' << r.N << ',' << num(r.mean) << ',' << num(r.n_times_var) << ','
                             << r.failures << '\n';
            }
        } else if (*mse) {
            validate_eps(mse_eps);
            mse_interval.validate();
            const auto grid = c_grid_or_default(mse_grid);
            cslr_mse_config cfg;
            cslr_mse_config_default(&cfg);
            cfg.n = mse_n;
            cfg.reps = mse_N;
            cfg.c_grid = grid.data();
            cfg.c_count = grid.size();
            cfg.eps = mse_eps;
            cfg.lo = mse_interval.lo();
            cfg.hi = mse_interval.hi();
            cfg.seed = mse_seed;
            cfg.jobs = mse_jobs;
            cfg.grid_points = mse_search;
            if (mse_progress) cfg.progress = progress_to_stderr;
            std::vector<cslr_mse_point> curve(grid.size());
            check(cslr_mse_curve(nullptr, &cfg, curve.data()));
            Output out(mse_out);
            write_curve_csv(out.stream(), curve, "montecarlo");
        } else if (*bw) {
            validate_eps(bw_eps);
            bw_interval.validate();
            const auto grid = c_grid_or_default(bw_grid);
            SamplePtr s = bw_src.load();
            cslr_bootstrap_config cfg;
            cslr_bootstrap_config_default(&cfg);
            cfg.c_grid = grid.data();
            cfg.c_count = grid.size();
            cfg.c0 = bw_c0;
            cfg.B = bw_B;
            cfg.eps = bw_eps;
            cfg.lo = bw_interval.lo();
            cfg.hi = bw_interval.hi();
            cfg.seed = bw_boot_seed;
            cfg.jobs = bw_jobs;
            cfg.grid_points = bw_search;
            if (bw_progress) cfg.progress = progress_to_stderr;
            std::vector<cslr_mse_point> curve(grid.size());
            double c_opt = 0.0;
            double beta_pilot = 0.0;
            check(cslr_bootstrap_bw(s.get(), &cfg, curve.data(), &c_opt, &beta_pilot));
            const double n = static_cast<double>(cslr_sample_size(s.get()));
            nlohmann::json j{{"schema", kSchema},
                             {"c_opt", c_opt},
                             {"h_opt", c_opt * std::pow(n, -0.2)},
                             {"beta_pilot", beta_pilot},
                             {"c0", bw_c0},
                             {"B", bw_B}};
            if (bw_out.empty()) {
                nlohmann::json pts = nlohmann::json::array();
                for (const auto& p : curve) pts.push_back({{"c", p.c}, {"mse", p.mse}, {"failures", p.failures}});
                j["curve"] = std::move(pts);
            } else {
                Output out(bw_out);
                write_curve_csv(out.stream(), curve, "bootstrap");
            }
            print_json(j);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.message << "\n\n" << app.get_subcommands().front()->help();
        return kExitValidation;
    } catch (const CallFailed& e) {
        std::cerr << "error (" << cslr_status_name(e.status) << "): " << e.message << '\n';
        return exit_code_for(e.status);
    }
    return 0;
}
