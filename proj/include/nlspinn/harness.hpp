#pragma once

// Run configuration, training driver, monitors, error metrics and output
// files.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlspinn/network.hpp"
#include "nlspinn/norms.hpp"
#include "nlspinn/optimizer.hpp"
#include "nlspinn/residual.hpp"
#include "nlspinn/solutions.hpp"

namespace nlspinn {

struct RunConfig {
    SolutionKind solution = SolutionKind::Soliton;
    double c = 1.0;
    double nu = 1.0;
    double a = 0.75;
    double omega = 1.0;
    double alpha = 3.0;

    double R = 8.0;  // space box [-R, R]
    double T = 2.0;  // time box [-T, T]

    // Monitor grids (1..3), residual grid (4), data grid (5).
    std::size_t N1 = 32, N2 = 32, N3 = 32, N4 = 32, N5 = 32;
    std::size_t M2 = 32, M3 = 32, M4 = 32, M5 = 32;
    std::size_t N_test = 100, M_test = 100;
    std::size_t K = 100;  // samples of the initial mismatch
    bool cell_scaling = false;

    Architecture architecture{};
    InputScaling input_scaling{};
    std::uint64_t seed = 1;

    std::size_t max_iters = 3000;
    LbfgsOptions optimizer{};

    QGridSpec q_grid{};
    std::vector<double> slice_times{-2.0, 0.5, 1.5};
    std::vector<std::size_t> error_checkpoints{100, 500, 1000, 3000};

    // Split-step reference used by the oracle comparison.
    double oracle_R = 20.0;
    std::size_t oracle_K = 1024;
    double oracle_dt = 1e-3;
    std::size_t oracle_M = 21;

    std::string out = "runs/default";

    void validate() const;  // throws ConfigError
    ReferenceSolution reference() const;
    LossConfig loss_config() const;
    SpaceTimeGrid test_grid() const;
};

// Flat "key = value" text; '#' starts a comment; lists are comma separated.
// Unknown keys and malformed values throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
std::string format_config(const RunConfig& cfg);
nlohmann::json config_to_json(const RunConfig& cfg);

struct Monitors {
    double A_tilde = 0.0;
    double A = 0.0;
    double B = 0.0;
};

struct ErrorMetrics {
    double S_prime = 0.0;
    double LpW1q = 0.0;
    double LinfH1 = 0.0;
};

struct QSweepRow {
    double q;
    double p;  // +inf at q = 2
    double error;
};

// Precomputed grids and samples of the reference, reused across iterations.
class Evaluator {
public:
    explicit Evaluator(const RunConfig& cfg);

    Monitors monitors(const NetworkParams& net) const;
    ErrorMetrics errors(const NetworkParams& net) const;
    std::vector<QSweepRow> q_sweep(const NetworkParams& net) const;

    const RunConfig& config() const { return cfg_; }
    const ReferenceSolution& reference() const { return ref_; }

private:
    struct Difference {
        std::vector<cplx> g, gx;
    };
    Difference test_difference(const NetworkParams& net) const;

    RunConfig cfg_;
    ReferenceSolution ref_;
    std::vector<double> x1_;
    std::vector<cplx> u0_, u0x_;
    SpaceTimeGrid grid2_, grid3_, test_;
    std::vector<cplx> exact_test_, exact_test_x_;
};

Monitors monitor_constants(const NetworkParams& net, const RunConfig& cfg);
ErrorMetrics error_metrics(const NetworkParams& net, const RunConfig& cfg);

struct SeriesRow {
    std::size_t iteration;
    double wall_seconds;
    double loss;
    double A_tilde, A, B;
};

struct CheckpointErrors {
    std::size_t iteration;
    double wall_seconds;
    ErrorMetrics errors;
};

struct RunReport {
    RunConfig config;
    std::vector<SeriesRow> series;
    std::vector<CheckpointErrors> checkpoints;
    ErrorMetrics final_errors;
    Monitors final_monitors;
    LossTerms final_loss;
    std::vector<IterationRecord> optimizer_log;
    // Share of the final initial-mismatch spectrum in the outer quarter of the
    // band; large values mean K undersamples the mismatch.
    double mismatch_high_frequency = 0.0;
    double elapsed_seconds = 0.0;
    std::size_t evaluations = 0;
    std::string stop_reason;
    std::string message;
    std::string isa;

    std::optional<ErrorMetrics> errors_at(std::size_t iteration) const;
    nlohmann::json to_json() const;
};

struct TrainOutput {
    RunReport report;
    NetworkParams net;
};

// Called after each iteration; returning false stops training early.
using TrainObserver = std::function<bool(const SeriesRow&)>;

// Trains without touching the filesystem.
TrainOutput train_in_memory(const RunConfig& cfg, const TrainObserver& observer = {});

// Trains and writes report.json, iterations.csv, optimizer.csv, errors.csv, the slice and
// q-sweep CSVs, the checkpoint and the plot script into cfg.out.
RunReport train(const RunConfig& cfg);

void write_outputs(const TrainOutput& run, const std::filesystem::path& dir);

// Slice CSVs, q-sweep CSV and plot.py for a finished run.
void emit_plots(const RunReport& report, const NetworkParams& net, const std::filesystem::path& dir);

// Rebuilds plots from a report.json with its checkpoint alongside.
void emit_plots_from_report(const std::filesystem::path& report_json);

struct SweepEntry {
    std::string value;
    std::optional<RunReport> report;
    std::string error;
};

// One run per value of `key`; failures are recorded and the sweep goes on.
// Writes <out>/<key>_<value>/ per run and <out>/sweep.csv.
std::vector<SweepEntry> sweep(const RunConfig& base, const std::string& key, const std::vector<std::string>& values);

struct OracleComparison {
    double net_to_oracle = 0.0;      // discrete L2 over the training box
    double net_to_exact = 0.0;
    double oracle_to_exact = 0.0;
    double mass_drift = 0.0;         // max relative change of discrete mass
};

// Split-step evolution of the reference's initial data compared against the
// closed form and (optionally) a network on the training box.
OracleComparison oracle_comparison(const RunConfig& cfg, const NetworkParams* net);

std::vector<std::string> split_list(const std::string& text);

}  // namespace nlspinn
