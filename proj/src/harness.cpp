#include "nlspinn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "nlspinn/errors.hpp"
#include "nlspinn/gradient.hpp"
#include "nlspinn/kernels.hpp"
#include "nlspinn/oracle.hpp"
#include "nlspinn/propagator.hpp"

namespace nlspinn {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        // Allow simple fractions like 3/4.
        return d;
    } catch (const std::exception&) {
        const auto slash = v.find('/');
        if (slash != std::string::npos) {
            const double num = parse_real(key, trim(v.substr(0, slash)));
            const double den = parse_real(key, trim(v.substr(slash + 1)));
            if (den != 0.0) return num / den;
        }
        throw ConfigError("bad real value for " + key + ": '" + v + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError("bad integer value for " + key + ": '" + v + "'");
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ConfigError("integer out of range for " + key + ": '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("bad boolean value for " + key + ": '" + v + "'");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Short form for file names: -2, 0.5, 1.5.
std::string short_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

template <class T>
std::string join(const std::vector<T>& v, const char* sep = ",") {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
    return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

// Every loss evaluation allocates and frees the same large tapes. glibc hands
// blocks of that size to mmap, and the resulting page faults cost about as
// much as the arithmetic, so keep them on the heap instead.
void keep_tapes_on_heap() {
#if defined(__GLIBC__)
    static const bool done = [] {
        mallopt(M_MMAP_THRESHOLD, 256 << 20);
        mallopt(M_TRIM_THRESHOLD, 512 << 20);
        return true;
    }();
    (void)done;
#endif
}

json errors_json(const ErrorMetrics& e) {
    return {{"error_Sprime", e.S_prime}, {"error_LpW1q", e.LpW1q}, {"error_LinfH1", e.LinfH1}};
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void RunConfig::validate() const {
    const std::size_t sizes[] = {N1, N2, N3, N4, N5, M2, M3, M4, M5, N_test, M_test, K};
    for (std::size_t s : sizes)
        if (s < 1) throw ConfigError("grid sizes must be at least 1");
    if (K < 2) throw ConfigError("K must be at least 2");
    if (!(R > 0.0) || !(T > 0.0)) throw ConfigError("R and T must be positive");
    if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
    if (architecture.hidden_width == 0) throw ConfigError("hidden_width must be positive");
    if (!(alpha >= 2.0 && alpha < 5.0)) throw ConfigError("alpha must lie in [2, 5)");
    if (q_grid.count < 1 || !(q_grid.q_min >= 2.0) || !(q_grid.q_max >= q_grid.q_min))
        throw ConfigError("q grid must satisfy 2 <= q_min <= q_max and count >= 1");
    if (optimizer.history < 1) throw ConfigError("history must be at least 1");
    if (!(optimizer.c1 > 0.0 && optimizer.c1 < optimizer.c2 && optimizer.c2 < 1.0))
        throw ConfigError("line search needs 0 < c1 < c2 < 1");
    try {
        const ReferenceSolution ref = reference();
        if (ref.alpha() != alpha)
            throw ConfigError(std::string(to_string(solution)) + " solves the cubic equation; set alpha = " +
                              fmt(ref.alpha()));
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

ReferenceSolution RunConfig::reference() const {
    switch (solution) {
        case SolutionKind::Soliton: return ReferenceSolution::make_soliton(c, nu);
        case SolutionKind::Peregrine: return ReferenceSolution::make_peregrine();
        case SolutionKind::KuznetsovMa: return ReferenceSolution::make_kuznetsov_ma(a);
        case SolutionKind::StandingWave: return ReferenceSolution::make_standing_wave(omega, alpha);
    }
    throw ConfigError("unknown solution kind");
}

LossConfig RunConfig::loss_config() const {
    LossConfig lc;
    lc.alpha = alpha;
    lc.residual_grid = SpaceTimeGrid::uniform(R, T, N4, M4, cell_scaling);
    lc.data_grid = SpaceTimeGrid::uniform(R, T, N5, M5, cell_scaling);
    lc.R = R;
    lc.K = K;
    return lc;
}

SpaceTimeGrid RunConfig::test_grid() const { return SpaceTimeGrid::uniform(R, T, N_test, M_test, cell_scaling); }

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    const std::string& v = value;
    auto size = [&](std::size_t& field) { field = static_cast<std::size_t>(parse_uint(key, v)); };
    if (key == "solution") {
        try {
            cfg.solution = solution_kind_from_string(v);
        } catch (const std::exception&) {
            throw ConfigError("unknown solution '" + v + "'");
        }
    } else if (key == "c") cfg.c = parse_real(key, v);
    else if (key == "nu") cfg.nu = parse_real(key, v);
    else if (key == "a") cfg.a = parse_real(key, v);
    else if (key == "omega") cfg.omega = parse_real(key, v);
    else if (key == "alpha") cfg.alpha = parse_real(key, v);
    else if (key == "R") cfg.R = parse_real(key, v);
    else if (key == "T") cfg.T = parse_real(key, v);
    else if (key == "N1") size(cfg.N1);
    else if (key == "N2") size(cfg.N2);
    else if (key == "N3") size(cfg.N3);
    else if (key == "N4") size(cfg.N4);
    else if (key == "N5") size(cfg.N5);
    else if (key == "M2") size(cfg.M2);
    else if (key == "M3") size(cfg.M3);
    else if (key == "M4") size(cfg.M4);
    else if (key == "M5") size(cfg.M5);
    else if (key == "N_test") size(cfg.N_test);
    else if (key == "M_test") size(cfg.M_test);
    else if (key == "K") size(cfg.K);
    else if (key == "cell_scaling") cfg.cell_scaling = parse_bool(key, v);
    else if (key == "hidden_layers") size(cfg.architecture.hidden_layers);
    else if (key == "hidden_width") size(cfg.architecture.hidden_width);
    else if (key == "t_scale") cfg.input_scaling.t_scale = parse_real(key, v);
    else if (key == "x_scale") cfg.input_scaling.x_scale = parse_real(key, v);
    else if (key == "seed") cfg.seed = parse_uint(key, v);
    else if (key == "max_iters") size(cfg.max_iters);
    else if (key == "history") size(cfg.optimizer.history);
    else if (key == "c1") cfg.optimizer.c1 = parse_real(key, v);
    else if (key == "c2") cfg.optimizer.c2 = parse_real(key, v);
    else if (key == "max_linesearch") size(cfg.optimizer.max_linesearch);
    else if (key == "grad_tolerance") cfg.optimizer.grad_tolerance = parse_real(key, v);
    else if (key == "q_min") cfg.q_grid.q_min = parse_real(key, v);
    else if (key == "q_max") cfg.q_grid.q_max = parse_real(key, v);
    else if (key == "q_count") size(cfg.q_grid.count);
    else if (key == "slice_times") {
        cfg.slice_times.clear();
        for (const auto& s : split_list(v)) cfg.slice_times.push_back(parse_real(key, s));
    } else if (key == "error_checkpoints") {
        cfg.error_checkpoints.clear();
        for (const auto& s : split_list(v)) cfg.error_checkpoints.push_back(parse_uint(key, s));
    } else if (key == "oracle_R") cfg.oracle_R = parse_real(key, v);
    else if (key == "oracle_K") size(cfg.oracle_K);
    else if (key == "oracle_dt") cfg.oracle_dt = parse_real(key, v);
    else if (key == "oracle_M") size(cfg.oracle_M);
    else if (key == "out") cfg.out = v;
    else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const RunConfig& c) {
    std::ostringstream os;
    os << "solution = " << to_string(c.solution) << '\n'
       << "c = " << fmt(c.c) << '\n'
       << "nu = " << fmt(c.nu) << '\n'
       << "a = " << fmt(c.a) << '\n'
       << "omega = " << fmt(c.omega) << '\n'
       << "alpha = " << fmt(c.alpha) << '\n'
       << "R = " << fmt(c.R) << '\n'
       << "T = " << fmt(c.T) << '\n'
       << "N1 = " << c.N1 << "\nN2 = " << c.N2 << "\nN3 = " << c.N3 << "\nN4 = " << c.N4 << "\nN5 = " << c.N5
       << "\nM2 = " << c.M2 << "\nM3 = " << c.M3 << "\nM4 = " << c.M4 << "\nM5 = " << c.M5 << '\n'
       << "N_test = " << c.N_test << "\nM_test = " << c.M_test << '\n'
       << "K = " << c.K << '\n'
       << "cell_scaling = " << (c.cell_scaling ? "true" : "false") << '\n'
       << "hidden_layers = " << c.architecture.hidden_layers << '\n'
       << "hidden_width = " << c.architecture.hidden_width << '\n'
       << "t_scale = " << fmt(c.input_scaling.t_scale) << '\n'
       << "x_scale = " << fmt(c.input_scaling.x_scale) << '\n'
       << "seed = " << c.seed << '\n'
       << "max_iters = " << c.max_iters << '\n'
       << "history = " << c.optimizer.history << '\n'
       << "c1 = " << fmt(c.optimizer.c1) << '\n'
       << "c2 = " << fmt(c.optimizer.c2) << '\n'
       << "max_linesearch = " << c.optimizer.max_linesearch << '\n'
       << "grad_tolerance = " << fmt(c.optimizer.grad_tolerance) << '\n'
       << "q_min = " << fmt(c.q_grid.q_min) << '\n'
       << "q_max = " << fmt(c.q_grid.q_max) << '\n'
       << "q_count = " << c.q_grid.count << '\n'
       << "slice_times = " << join(c.slice_times) << '\n'
       << "error_checkpoints = " << join(c.error_checkpoints) << '\n'
       << "oracle_R = " << fmt(c.oracle_R) << '\n'
       << "oracle_K = " << c.oracle_K << '\n'
       << "oracle_dt = " << fmt(c.oracle_dt) << '\n'
       << "oracle_M = " << c.oracle_M << '\n'
       << "out = " << c.out << '\n';
    return os.str();
}

json config_to_json(const RunConfig& cfg) {
    json j = json::object();
    std::istringstream is(format_config(cfg));
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        j[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return j;
}

// ---------------------------------------------------------------------------

Evaluator::Evaluator(const RunConfig& cfg)
    : cfg_(cfg),
      ref_(cfg.reference()),
      x1_(linspace(-cfg.R, cfg.R, cfg.N1)),
      grid2_(SpaceTimeGrid::uniform(cfg.R, cfg.T, cfg.N2, cfg.M2, cfg.cell_scaling)),
      grid3_(SpaceTimeGrid::uniform(cfg.R, cfg.T, cfg.N3, cfg.M3, cfg.cell_scaling)),
      test_(cfg.test_grid()) {
    u0_.resize(x1_.size());
    u0x_.resize(x1_.size());
    for (std::size_t j = 0; j < x1_.size(); ++j) {
        const SolutionSample s = ref_(0.0, x1_[j]);
        u0_[j] = s.u;
        u0x_[j] = s.u_x;
    }
    const auto t = test_.flat_t();
    const auto x = test_.flat_x();
    exact_test_.resize(t.size());
    exact_test_x_.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const SolutionSample s = ref_(t[i], x[i]);
        exact_test_[i] = s.u;
        exact_test_x_[i] = s.u_x;
    }
}

Monitors Evaluator::monitors(const NetworkParams& net) const {
    Monitors m;
    {
        const std::vector<double> t0(x1_.size(), 0.0);
        const FieldBatch f = evaluate(net, t0, x1_, JetMode::ValueX);
        std::vector<cplx> d(x1_.size()), dx(x1_.size());
        for (std::size_t j = 0; j < x1_.size(); ++j) {
            d[j] = u0_[j] - f.u(j);
            dx[j] = u0x_[j] - f.at(f.x_channel(), j);
        }
        const std::vector<double> w(x1_.size(), 1.0);
        m.A_tilde = j_h1(d, dx, w, cfg_.cell_scaling ? 2.0 * cfg_.R / static_cast<double>(x1_.size()) : 0.0);
    }
    {
        const FieldBatch f = evaluate(net, grid2_.flat_t(), grid2_.flat_x(), JetMode::ValueX);
        std::vector<cplx> g(f.points), gx(f.points);
        for (std::size_t i = 0; i < f.points; ++i) {
            g[i] = f.u(i);
            gx[i] = f.at(f.x_channel(), i);
        }
        m.A = j_inf_h1(grid2_, g, gx);
    }
    {
        const AdmissiblePair pq = pair_for_alpha(cfg_.alpha);
        const FieldBatch f = evaluate(net, grid3_.flat_t(), grid3_.flat_x(), JetMode::Value);
        std::vector<cplx> g(f.points);
        for (std::size_t i = 0; i < f.points; ++i) g[i] = f.u(i);
        m.B = j_pq(grid3_, g, {}, pq.p, pq.q, NormMode::ValueOnly);
    }
    return m;
}

Evaluator::Difference Evaluator::test_difference(const NetworkParams& net) const {
    const FieldBatch f = evaluate(net, test_.flat_t(), test_.flat_x(), JetMode::ValueX);
    Difference d;
    d.g.resize(f.points);
    d.gx.resize(f.points);
    for (std::size_t i = 0; i < f.points; ++i) {
        d.g[i] = f.u(i) - exact_test_[i];
        d.gx[i] = f.at(f.x_channel(), i) - exact_test_x_[i];
    }
    return d;
}

ErrorMetrics Evaluator::errors(const NetworkParams& net) const {
    const Difference d = test_difference(net);
    const AdmissiblePair pq = pair_for_alpha(cfg_.alpha);
    ErrorMetrics e;
    e.LpW1q = j_pq(test_, d.g, d.gx, pq.p, pq.q, NormMode::Sobolev);
    e.LinfH1 = j_inf_h1(test_, d.g, d.gx);
    e.S_prime = e.LinfH1;
    for (double q : admissible_q_grid(cfg_.q_grid)) {
        if (q <= 2.0) continue;  // the q = 2 endpoint is LinfH1
        const AdmissiblePair pair = pair_from_q(q);
        e.S_prime = std::max(e.S_prime, j_pq(test_, d.g, d.gx, pair.p, pair.q, NormMode::Sobolev));
    }
    return e;
}

std::vector<QSweepRow> Evaluator::q_sweep(const NetworkParams& net) const {
    const Difference d = test_difference(net);
    std::vector<QSweepRow> rows;
    for (double q : admissible_q_grid(cfg_.q_grid)) {
        if (q <= 2.0) {
            rows.push_back({q, std::numeric_limits<double>::infinity(), j_inf_h1(test_, d.g, d.gx)});
        } else {
            const AdmissiblePair pair = pair_from_q(q);
            rows.push_back({q, pair.p, j_pq(test_, d.g, d.gx, pair.p, pair.q, NormMode::Sobolev)});
        }
    }
    return rows;
}

Monitors monitor_constants(const NetworkParams& net, const RunConfig& cfg) { return Evaluator(cfg).monitors(net); }

ErrorMetrics error_metrics(const NetworkParams& net, const RunConfig& cfg) { return Evaluator(cfg).errors(net); }

// ---------------------------------------------------------------------------

std::optional<ErrorMetrics> RunReport::errors_at(std::size_t iteration) const {
    for (const auto& c : checkpoints)
        if (c.iteration == iteration) return c.errors;
    return std::nullopt;
}

json RunReport::to_json() const {
    json j;
    j["seed"] = config.seed;
    j["config"] = config_to_json(config);
    j["config_text"] = format_config(config);
    j["stop_reason"] = stop_reason;
    j["message"] = message;
    j["isa"] = isa;
    j["elapsed_seconds"] = elapsed_seconds;
    j["evaluations"] = evaluations;
    j["iterations"] = series.size();
    j["final_loss"] = {{"total", final_loss.total()}, {"residual", final_loss.residual}, {"data", final_loss.data}};
    j["final_monitors"] = {{"A_tilde", final_monitors.A_tilde}, {"A", final_monitors.A}, {"B", final_monitors.B}};
    j["final_errors"] = errors_json(final_errors);
    j["mismatch_high_frequency_fraction"] = mismatch_high_frequency;
    json cps = json::array();
    for (const auto& c : checkpoints) {
        json e = errors_json(c.errors);
        e["iteration"] = c.iteration;
        e["wall_seconds"] = c.wall_seconds;
        cps.push_back(e);
    }
    j["error_checkpoints"] = cps;
    json s;
    for (const char* k : {"iteration", "wall_seconds", "loss", "A_tilde", "A", "B"}) s[k] = json::array();
    for (const auto& r : series) {
        s["iteration"].push_back(r.iteration);
        s["wall_seconds"].push_back(r.wall_seconds);
        s["loss"].push_back(r.loss);
        s["A_tilde"].push_back(r.A_tilde);
        s["A"].push_back(r.A);
        s["B"].push_back(r.B);
    }
    j["series"] = s;
    return j;
}

TrainOutput train_in_memory(const RunConfig& cfg, const TrainObserver& observer) {
    cfg.validate();
    keep_tapes_on_heap();
    const NlsLoss loss_fn(cfg.loss_config(), cfg.reference());
    const Evaluator eval(cfg);
    NetworkParams net = init_glorot(cfg.architecture, cfg.seed, cfg.input_scaling);
    const Architecture arch = net.architecture();
    const InputScaling scaling = net.scaling();

    TrainOutput out;
    RunReport& rep = out.report;
    rep.config = cfg;
    rep.isa = std::string(kernels::name(kernels::active().isa));

    Objective objective = [&](std::span<const double> x, std::span<double> grad) {
        const NetworkParams p(arch, std::vector<double>(x.begin(), x.end()), scaling);
        ValueAndGradient vg = value_and_gradient(p, loss_fn);
        std::copy(vg.gradient.values.begin(), vg.gradient.values.end(), grad.begin());
        return vg.value;
    };

    // Time spent in monitors and checkpoint errors is excluded from the
    // reported wall clock.
    double overhead = 0.0;
    std::vector<std::size_t> wanted = cfg.error_checkpoints;
    std::sort(wanted.begin(), wanted.end());

    IterationCallback callback = [&](const IterationRecord& rec, std::span<const double> x) {
        const auto t0 = std::chrono::steady_clock::now();
        const NetworkParams p(arch, std::vector<double>(x.begin(), x.end()), scaling);
        const Monitors m = eval.monitors(p);
        SeriesRow row{rec.iteration, rec.wall_seconds - overhead, rec.loss, m.A_tilde, m.A, m.B};
        rep.series.push_back(row);
        if (std::binary_search(wanted.begin(), wanted.end(), rec.iteration))
            rep.checkpoints.push_back({rec.iteration, row.wall_seconds, eval.errors(p)});
        rep.evaluations = rec.evaluations;
        rep.optimizer_log.push_back(rec);
        overhead += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return !observer || observer(row);
    };

    OptimizationResult res = lbfgs_run(std::vector<double>(net.flat().begin(), net.flat().end()), objective,
                                       cfg.max_iters, cfg.optimizer, callback);
    rep.stop_reason = to_string(res.reason);
    rep.message = res.message;
    rep.elapsed_seconds = rep.series.empty() ? 0.0 : rep.series.back().wall_seconds;
    out.net = NetworkParams(arch, std::move(res.x), scaling);
    rep.final_loss = loss_fn.terms(out.net);
    rep.final_monitors = eval.monitors(out.net);
    rep.final_errors = eval.errors(out.net);
    rep.mismatch_high_frequency = high_frequency_fraction(
        analyze(periodic_grid(cfg.R, cfg.K), initial_mismatch(eval.reference(), out.net, cfg.R, cfg.K)));
    return out;
}

namespace {

void write_iterations_csv(const RunReport& rep, const fs::path& path) {
    std::ostringstream os;
    os.precision(17);
    os << "iteration,wall_seconds,loss,A_tilde,A,B\n";
    for (const auto& r : rep.series)
        os << r.iteration << ',' << r.wall_seconds << ',' << r.loss << ',' << r.A_tilde << ',' << r.A << ','
           << r.B << '\n';
    write_text(path, os.str());
}

void write_optimizer_csv(const RunReport& rep, const fs::path& path) {
    std::ostringstream os;
    os.precision(17);
    os << "iteration,wall_seconds,loss,grad_norm,step_length,evaluations,accepted\n";
    for (const auto& r : rep.optimizer_log)
        os << r.iteration << ',' << r.wall_seconds << ',' << r.loss << ',' << r.grad_norm << ',' << r.step_length
           << ',' << r.evaluations << ',' << (r.accepted ? 1 : 0) << '\n';
    write_text(path, os.str());
}

void write_errors_csv(const RunReport& rep, const fs::path& path) {
    std::ostringstream os;
    os.precision(17);
    os << "iteration,wall_seconds,error_Sprime,error_LpW1q,error_LinfH1\n";
    for (const auto& c : rep.checkpoints)
        os << c.iteration << ',' << c.wall_seconds << ',' << c.errors.S_prime << ',' << c.errors.LpW1q << ','
           << c.errors.LinfH1 << '\n';
    os << "final," << rep.elapsed_seconds << ',' << rep.final_errors.S_prime << ',' << rep.final_errors.LpW1q
       << ',' << rep.final_errors.LinfH1 << '\n';
    write_text(path, os.str());
}

constexpr const char* kPlotScript = R"(# Renders the CSV outputs of a run. Usage: python3 plot.py [run_dir]
import csv
import glob
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

root = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))


def read(name):
    with open(os.path.join(root, name)) as f:
        rows = list(csv.DictReader(f))
    return {k: [r[k] for r in rows] for k in rows[0]} if rows else {}


def num(col):
    return [float(v) for v in col]


slices = sorted(glob.glob(os.path.join(root, "slices_t*.csv")))
for part in ("re", "im"):
    fig, axes = plt.subplots(1, len(slices), figsize=(4 * len(slices), 3), squeeze=False)
    for ax, path in zip(axes[0], slices):
        s = read(os.path.basename(path))
        x = num(s["x"])
        ax.plot(x, num(s[part + "_exact"]), "-", label="exact")
        ax.plot(x, num(s[part + "_dnn"]), "--", label="network")
        ax.set_title(os.path.basename(path)[len("slices_t"):-len(".csv")].join(["t = ", ""]))
        ax.set_xlabel("x")
    axes[0][0].legend()
    fig.tight_layout()
    fig.savefig(os.path.join(root, "slices_" + part + ".png"), dpi=120)

it = read("iterations.csv")
fig, axes = plt.subplots(1, 4, figsize=(16, 3))
for ax, key in zip(axes, ("loss", "A_tilde", "A", "B")):
    ax.plot(num(it["iteration"]), num(it[key]))
    if key in ("loss", "A_tilde"):
        ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_title(key)
fig.tight_layout()
fig.savefig(os.path.join(root, "monitors.png"), dpi=120)

qs = read("qsweep.csv")
fig, ax = plt.subplots(figsize=(5, 3))
ax.plot(num(qs["q"]), num(qs["error"]))
ax.set_xlabel("q")
ax.set_ylabel("error")
fig.tight_layout()
fig.savefig(os.path.join(root, "qsweep.png"), dpi=120)
)";

}  // namespace

void emit_plots(const RunReport& report, const NetworkParams& net, const fs::path& dir) {
    fs::create_directories(dir);
    const RunConfig& cfg = report.config;
    const Evaluator eval(cfg);
    const ReferenceSolution& ref = eval.reference();
    const std::vector<double> x = linspace(-cfg.R, cfg.R, cfg.N_test);
    for (double t : cfg.slice_times) {
        const std::vector<double> tt(x.size(), t);
        const FieldBatch f = evaluate(net, tt, x, JetMode::Value);
        std::ostringstream os;
        os.precision(17);
        os << "x,re_exact,im_exact,re_dnn,im_dnn\n";
        for (std::size_t j = 0; j < x.size(); ++j) {
            const cplx u = ref.value(t, x[j]);
            os << x[j] << ',' << u.real() << ',' << u.imag() << ',' << f.re[j] << ',' << f.im[j] << '\n';
        }
        write_text(dir / ("slices_t" + short_number(t) + ".csv"), os.str());
    }
    std::ostringstream qs;
    qs.precision(17);
    qs << "q,p,error\n";
    for (const QSweepRow& r : eval.q_sweep(net)) {
        qs << r.q << ',';
        if (std::isinf(r.p)) qs << "inf"; else qs << r.p;
        qs << ',' << r.error << '\n';
    }
    write_text(dir / "qsweep.csv", qs.str());
    write_text(dir / "plot.py", kPlotScript);
}

void write_outputs(const TrainOutput& run, const fs::path& dir) {
    fs::create_directories(dir);
    const RunReport& rep = run.report;
    write_text(dir / "report.json", rep.to_json().dump(2) + "\n");
    write_iterations_csv(rep, dir / "iterations.csv");
    write_optimizer_csv(rep, dir / "optimizer.csv");
    write_errors_csv(rep, dir / "errors.csv");
    save_checkpoint(run.net, rep.config.seed, dir / "checkpoint.bin", dir / "checkpoint.json");
    emit_plots(rep, run.net, dir);
}

RunReport train(const RunConfig& cfg) {
    TrainOutput run = train_in_memory(cfg);
    write_outputs(run, cfg.out);
    return std::move(run.report);
}

void emit_plots_from_report(const fs::path& report_json) {
    std::ifstream in(report_json);
    if (!in) throw Error("cannot read " + report_json.string());
    const json j = json::parse(in);
    RunReport rep;
    rep.config = parse_config(j.at("config_text").get<std::string>());
    const fs::path dir = report_json.parent_path().empty() ? fs::path(".") : report_json.parent_path();
    const NetworkParams net = load_checkpoint(dir / "checkpoint.bin", dir / "checkpoint.json");
    emit_plots(rep, net, dir);
}

std::vector<SweepEntry> sweep(const RunConfig& base, const std::string& key, const std::vector<std::string>& values) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    {
        RunConfig probe = base;
        apply_setting(probe, key, values.front());  // rejects unknown keys up front
    }
    const fs::path root = base.out;
    fs::create_directories(root);
    std::vector<SweepEntry> entries;
    std::ostringstream csv;
    csv.precision(10);
    csv << key << ",status,iterations,elapsed_seconds,loss,A_tilde,A,B,error_Sprime,error_LpW1q,error_LinfH1\n";
    for (const std::string& v : values) {
        SweepEntry e;
        e.value = v;
        try {
            RunConfig cfg = base;
            apply_setting(cfg, key, v);
            cfg.out = (root / (key + "_" + v)).string();
            e.report = train(cfg);
        } catch (const std::exception& ex) {
            e.error = ex.what();
        }
        if (e.report) {
            const RunReport& r = *e.report;
            csv << v << ',' << r.stop_reason << ',' << r.series.size() << ',' << r.elapsed_seconds << ','
                << r.final_loss.total() << ',' << r.final_monitors.A_tilde << ',' << r.final_monitors.A << ','
                << r.final_monitors.B << ',' << r.final_errors.S_prime << ',' << r.final_errors.LpW1q << ','
                << r.final_errors.LinfH1 << '\n';
        } else {
            csv << v << ",failed: " << e.error << ",,,,,,,,,\n";
        }
        entries.push_back(std::move(e));
    }
    write_text(root / "sweep.csv", csv.str());
    return entries;
}

OracleComparison oracle_comparison(const RunConfig& cfg, const NetworkParams* net) {
    cfg.validate();
    const ReferenceSolution ref = cfg.reference();
    SplitStepConfig sc;
    sc.R = cfg.oracle_R;
    sc.K = cfg.oracle_K;
    sc.dt = cfg.oracle_dt;
    sc.alpha = cfg.alpha;
    if (sc.R < cfg.R) throw ConfigError("oracle_R must cover the training box");
    const std::vector<double> xs = splitstep_grid(sc);
    std::vector<cplx> u0(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) u0[k] = ref.value(0.0, xs[k]);
    // Slice times on the dt lattice.
    std::vector<double> times = linspace(-cfg.T, cfg.T, cfg.oracle_M);
    for (double& t : times) t = std::round(t / sc.dt) * sc.dt;
    const auto snaps = splitstep_snapshots(u0, sc, times);

    std::vector<std::size_t> inside;
    for (std::size_t k = 0; k < xs.size(); ++k)
        if (std::abs(xs[k]) <= cfg.R) inside.push_back(k);

    OracleComparison r;
    const double mass0 = discrete_mass(u0, sc.R);
    double s_no = 0.0, s_ne = 0.0, s_oe = 0.0;
    for (std::size_t l = 0; l < times.size(); ++l) {
        r.mass_drift = std::max(r.mass_drift, std::abs(discrete_mass(snaps[l], sc.R) - mass0) / mass0);
        std::vector<double> tt(inside.size(), times[l]), xx(inside.size());
        for (std::size_t i = 0; i < inside.size(); ++i) xx[i] = xs[inside[i]];
        FieldBatch f;
        if (net) f = evaluate(*net, tt, xx, JetMode::Value);
        for (std::size_t i = 0; i < inside.size(); ++i) {
            const cplx o = snaps[l][inside[i]];
            const cplx e = ref.value(times[l], xx[i]);
            s_oe += std::norm(o - e);
            if (net) {
                s_no += std::norm(f.u(i) - o);
                s_ne += std::norm(f.u(i) - e);
            }
        }
    }
    const double cell = (2.0 * sc.R / static_cast<double>(sc.K)) * (2.0 * cfg.T / static_cast<double>(times.size()));
    r.oracle_to_exact = std::sqrt(s_oe * cell);
    r.net_to_oracle = std::sqrt(s_no * cell);
    r.net_to_exact = std::sqrt(s_ne * cell);
    return r;
}

}  // namespace nlspinn
