#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nlspinn/errors.hpp"
#include "nlspinn/harness.hpp"

using namespace nlspinn;
namespace fs = std::filesystem;

namespace {
RunConfig tiny(const std::string& out) {
    auto cfg = parse_config(R"(
solution = soliton
R = 8
T = 1
N1 = 12
N2 = 12
N3 = 12
N4 = 12
N5 = 12
M2 = 10
M3 = 10
M4 = 10
M5 = 10
N_test = 20
M_test = 20
K = 32
hidden_layers = 2
hidden_width = 8
max_iters = 3
q_count = 9
q_max = 6
slice_times = -1, 0.5
error_checkpoints = 2
oracle_K = 256
oracle_dt = 0.01
oracle_M = 3
)");
    cfg.out = out;
    return cfg;
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("nlspinn_test_" + name);
    fs::remove_all(dir);
    return dir;
}
}  // namespace

TEST_CASE("config parsing") {
    auto cfg = parse_config("# comment\nsolution = kuznetsov_ma\na = 3/4\nR = 5\nslice_times = -1, 0.3, 0.8\n");
    CHECK(cfg.solution == SolutionKind::KuznetsovMa);
    CHECK(cfg.a == 0.75);
    CHECK(cfg.slice_times == std::vector<double>{-1.0, 0.3, 0.8});
    CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("R = eight\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("max_iters = 0\n").validate(), ConfigError);
    auto again = parse_config(format_config(cfg));
    CHECK(format_config(again) == format_config(cfg));
}

TEST_CASE("zero network monitors are (J_H1[u0], 0, 0)") {
    auto cfg = tiny("unused");
    NetworkParams zero(cfg.architecture);
    auto m = monitor_constants(zero, cfg);
    CHECK(m.A == 0.0);
    CHECK(m.B == 0.0);
    auto ref = cfg.reference();
    auto x = linspace(-cfg.R, cfg.R, cfg.N1);
    std::vector<cplx> u, ux;
    for (double xi : x) {
        auto s = ref(0.0, xi);
        u.push_back(s.u);
        ux.push_back(s.u_x);
    }
    std::vector<double> w(x.size(), 1.0);
    CHECK(m.A_tilde == doctest::Approx(j_h1(u, ux, w)).epsilon(1e-12));
}

TEST_CASE("zero network errors reduce to norms of the reference") {
    auto cfg = tiny("unused");
    cfg.solution = SolutionKind::Peregrine;
    cfg.R = 10;
    NetworkParams zero(cfg.architecture);
    auto e = error_metrics(zero, cfg);
    auto grid = cfg.test_grid();
    auto ref = cfg.reference();
    std::vector<cplx> g, gx;
    for (double t : grid.times)
        for (double x : grid.points) {
            auto s = ref(t, x);
            g.push_back(s.u);
            gx.push_back(s.u_x);
        }
    CHECK(e.LinfH1 == doctest::Approx(j_inf_h1(grid, g, gx)).epsilon(1e-12));
    CHECK(e.S_prime >= e.LpW1q);
    CHECK(e.S_prime >= e.LinfH1);
}

TEST_CASE("max_iters = 1 yields a single series row") {
    auto cfg = tiny("unused");
    cfg.max_iters = 1;
    auto run = train_in_memory(cfg);
    CHECK(run.report.series.size() == 1);
    CHECK(run.report.series[0].iteration == 1);
    CHECK(run.report.final_errors.S_prime >= run.report.final_errors.LpW1q);
}

TEST_CASE("observer can stop training") {
    auto cfg = tiny("unused");
    cfg.max_iters = 10;
    auto run = train_in_memory(cfg, [](const SeriesRow& r) { return r.iteration < 2; });
    CHECK(run.report.series.size() == 2);
    CHECK(run.report.stop_reason == to_string(StopReason::Cancelled));
}

TEST_CASE("train writes every output and reproduces bit-exactly") {
    auto dir = scratch("train");
    auto cfg = tiny(dir.string());
    auto report = train(cfg);
    for (const char* f : {"report.json", "iterations.csv", "optimizer.csv", "errors.csv", "checkpoint.bin",
                          "checkpoint.json", "qsweep.csv", "plot.py", "slices_t-1.csv", "slices_t0.5.csv"})
        CHECK_MESSAGE(fs::exists(dir / f), f);

    auto q = read_all(dir / "qsweep.csv");
    CHECK(q.rfind("q,p,error\n", 0) == 0);
    CHECK(std::count(q.begin(), q.end(), '\n') == 1 + 9);
    CHECK(read_all(dir / "slices_t0.5.csv").rfind("x,re_exact,im_exact,re_dnn,im_dnn\n", 0) == 0);
    CHECK(read_all(dir / "iterations.csv").rfind("iteration,wall_seconds,loss,A_tilde,A,B\n", 0) == 0);

    auto run = train_in_memory(cfg);
    CHECK(run.report.final_loss.total() == report.final_loss.total());
    CHECK(run.report.final_errors.S_prime == report.final_errors.S_prime);
    auto net = load_checkpoint(dir / "checkpoint.bin", dir / "checkpoint.json");
    CHECK(net == run.net);

    auto j = nlohmann::json::parse(read_all(dir / "report.json"));
    auto echoed = parse_config(j["config_text"].get<std::string>());
    CHECK(format_config(echoed) == format_config(cfg));
    REQUIRE(report.errors_at(2).has_value());
    fs::remove_all(dir);
}

TEST_CASE("sweep records failures and continues") {
    auto dir = scratch("sweep");
    auto cfg = tiny(dir.string());
    cfg.max_iters = 1;
    auto entries = sweep(cfg, "nu", {"1", "oops", "3"});
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].report.has_value());
    CHECK_FALSE(entries[1].report.has_value());
    CHECK_FALSE(entries[1].error.empty());
    CHECK(entries[2].report.has_value());
    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(fs::exists(dir / "nu_3" / "report.json"));
    fs::remove_all(dir);
}

TEST_CASE("oracle comparison of the closed form") {
    auto cfg = tiny("unused");
    auto cmp = oracle_comparison(cfg, nullptr);
    CHECK(cmp.oracle_to_exact < 1e-2);
    CHECK(cmp.mass_drift < 1e-8);
}
