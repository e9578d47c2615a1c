#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cslr/io.hpp"

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(CSLR_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST_CASE("simulate then estimate") {
    REQUIRE(run("simulate --n 100 --seed 7 --out cli_s.csv").code == 0);
    const auto r = run("estimate --method score1 --input cli_s.csv --interval 0.3,0.7");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema"] == 1);
    const double beta = j["beta_hat"][0];
    CHECK(beta > 0.3);
    CHECK(beta < 0.7);
    CHECK(j.contains("alpha_hat"));
    CHECK(j.contains("h_beta"));
    CHECK(j.contains("diagnostics"));
}

TEST_CASE("simulated CSV parses back to the same sample") {
    REQUIRE(run("simulate --n 50 --seed 3 --out cli_a.csv").code == 0);
    const auto stdout_copy = run("simulate --n 50 --seed 3");
    REQUIRE(stdout_copy.code == 0);
    std::istringstream is(stdout_copy.out);
    const cslr::Sample from_stdout = cslr::read_sample_csv(is);
    CHECK(cslr::read_sample_csv_file("cli_a.csv") == from_stdout);
    CHECK(from_stdout == cslr::simulate(cslr::ModelSpec::simulation_default(), 50, 3));
}

TEST_CASE("oracle output") {
    const auto r = run("oracle --quantity ip");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["value"].get<double>() - 26.3667) < 0.01);
    CHECK(j["quantity"] == "ip");
    CHECK(j.contains("eps"));
    CHECK(j.contains("tol"));
    const auto s = run("oracle --quantity interceptvar --variant simple --eps 0.001");
    REQUIRE(s.code == 0);
    CHECK(std::abs(nlohmann::json::parse(s.out)["value"].get<double>() - 0.257898) < 5e-4);
}

TEST_CASE("validation errors exit with 2") {
    REQUIRE(run("simulate --n 30 --seed 1 --out cli_v.csv").code == 0);
    CHECK(run("estimate --eps 0.7 --input cli_v.csv").code == 2);
    CHECK(run("estimate --interval 0.7,0.3 --input cli_v.csv").code == 2);
    CHECK(run("estimate --method bogus --input cli_v.csv").code == 2);
    CHECK(run("estimate --input missing.csv").code == 2);
    CHECK(run("oracle --quantity nope").code == 2);
    CHECK(run("").code == 2);
    CHECK(run("mc-table --n 5").code == 2);
}

TEST_CASE("estimation failures exit with 3") {
    CHECK(run("estimate --n 200 --seed 1 --interval 0.9,0.95").code == 3);
}

TEST_CASE("tabular outputs") {
    const auto mle = run("mle --n 20 --seed 2 --beta 0.5");
    REQUIRE(mle.code == 0);
    CHECK(mle.out.find("knot,value\n") != std::string::npos);

    const auto sc = run("score-curve --n 200 --seed 2 --method plugin --grid 5");
    REQUIRE(sc.code == 0);
    CHECK(sc.out.find("beta,psi,method,n_used,n_excluded\n") != std::string::npos);
    CHECK(sc.out.find(",plugin,") != std::string::npos);

    const auto mc = run("mc-table --n 100 --N 3 --methods score1,profile --jobs 2");
    REQUIRE(mc.code == 0);
    CHECK(mc.out.find("parameter,method,n,N,mean,n_times_var,failures\n") != std::string::npos);
    CHECK(mc.out.find("beta,profile,100,3,") != std::string::npos);
    const auto mc1 = run("mc-table --n 100 --N 3 --methods score1,profile --jobs 1");
    CHECK(mc1.out == mc.out);

    const auto mse = run("mse-curve --n 100 --N 2 --c-grid 0.3,0.5");
    REQUIRE(mse.code == 0);
    CHECK(mse.out.find("c,mse,kind\n0.3,") != std::string::npos);
    CHECK(mse.out.find(",montecarlo\n") != std::string::npos);

    const auto bw = run("bootstrap-bw --n 200 --seed 4 --B 2 --c-grid 0.3,0.5");
    REQUIRE(bw.code == 0);
    const auto j = nlohmann::json::parse(bw.out);
    CHECK(j["schema"] == 1);
    CHECK(j["curve"].size() == 2);
    REQUIRE(run("bootstrap-bw --n 200 --seed 4 --B 2 --c-grid 0.3,0.5 --out cli_bw.csv").code == 0);
    std::ifstream f("cli_bw.csv");
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str().find(",bootstrap\n") != std::string::npos);
}
