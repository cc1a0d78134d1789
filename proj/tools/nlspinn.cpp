// Command-line driver: train, verify, sweep, plot, oracle.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "nlspinn/errors.hpp"
#include "nlspinn/harness.hpp"
#include "nlspinn/kernels.hpp"
#include "nlspinn/verify.hpp"

namespace fs = std::filesystem;
using namespace nlspinn;

namespace {

RunConfig config_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
    RunConfig cfg = path.empty() ? RunConfig{} : load_config(path);
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    return cfg;
}

void print_summary(const RunReport& r) {
    std::printf("iterations     %zu (%s)\n", r.series.size(), r.stop_reason.c_str());
    std::printf("elapsed        %.3f s  [%s]\n", r.elapsed_seconds, r.isa.c_str());
    std::printf("loss           %.4e\n", r.final_loss.total());
    std::printf("A_tilde A B    %.4e %.4f %.4f\n", r.final_monitors.A_tilde, r.final_monitors.A, r.final_monitors.B);
    std::printf("error_LpW1q    %.4e\n", r.final_errors.LpW1q);
    std::printf("error_LinfH1   %.4e\n", r.final_errors.LinfH1);
    std::printf("error_Sprime   %.4e\n", r.final_errors.S_prime);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PINN training and verification for the focusing NLS equation"};
    app.require_subcommand(1);

    std::string config_path, out_dir, report_path, vary, checkpoint;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;

    auto* train_cmd = app.add_subcommand("train", "train a network and write the run directory");
    train_cmd->add_option("--config", config_path, "config file")->check(CLI::ExistingFile);
    train_cmd->add_option("--seed", seed, "override the seed");
    train_cmd->add_option("--out", out_dir, "override the output directory");
    train_cmd->add_option("--set", sets, "extra key=value overrides");

    auto* verify = app.add_subcommand("verify", "run the deterministic property suites");

    auto* sweep_cmd = app.add_subcommand("sweep", "one training run per value of a parameter");
    sweep_cmd->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--vary", vary, "param=v1,v2,...")->required();
    sweep_cmd->add_option("--out", out_dir, "override the output directory");
    sweep_cmd->add_option("--set", sets, "extra key=value overrides");

    auto* plot = app.add_subcommand("plot", "regenerate slice/q-sweep CSVs and plot.py");
    plot->add_option("--report", report_path, "report.json of a finished run")->required()->check(CLI::ExistingFile);

    auto* oracle = app.add_subcommand("oracle", "compare against the split-step reference");
    oracle->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    oracle->add_option("--checkpoint", checkpoint, "run directory holding checkpoint.bin/.json");
    oracle->add_option("--set", sets, "extra key=value overrides");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            RunConfig cfg = config_with_overrides(config_path, sets);
            if (train_cmd->count("--seed")) cfg.seed = seed;
            if (!out_dir.empty()) cfg.out = out_dir;
            const RunReport r = nlspinn::train(cfg);
            print_summary(r);
            std::printf("outputs in     %s\n", cfg.out.c_str());
            return 0;
        }
        if (*verify) {
            std::printf("kernels: %s\n", std::string(kernels::name(kernels::active().isa)).c_str());
            bool ok = true;
            for (const CheckResult& c : run_property_suite()) {
                std::printf("%s  %-50s %s (%.1fs)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str(),
                            c.seconds);
                ok = ok && c.passed;
            }
            return ok ? 0 : 1;
        }
        if (*sweep_cmd) {
            RunConfig cfg = config_with_overrides(config_path, sets);
            if (!out_dir.empty()) cfg.out = out_dir;
            const auto eq = vary.find('=');
            if (eq == std::string::npos) throw ConfigError("--vary expects param=v1,v2,...");
            const std::string key = vary.substr(0, eq);
            const auto entries = sweep(cfg, key, split_list(vary.substr(eq + 1)));
            for (const auto& e : entries) {
                if (e.report)
                    std::printf("%s=%-8s error_Sprime %.4e  loss %.4e  %.1fs\n", key.c_str(), e.value.c_str(),
                                e.report->final_errors.S_prime, e.report->final_loss.total(),
                                e.report->elapsed_seconds);
                else
                    std::printf("%s=%-8s FAILED: %s\n", key.c_str(), e.value.c_str(), e.error.c_str());
            }
            std::printf("table in %s\n", (fs::path(cfg.out) / "sweep.csv").c_str());
            return 0;
        }
        if (*plot) {
            emit_plots_from_report(report_path);
            std::printf("wrote CSVs and plot.py next to %s\n", report_path.c_str());
            return 0;
        }
        if (*oracle) {
            const RunConfig cfg = config_with_overrides(config_path, sets);
            std::optional<NetworkParams> net;
            if (!checkpoint.empty())
                net = load_checkpoint(fs::path(checkpoint) / "checkpoint.bin", fs::path(checkpoint) / "checkpoint.json");
            const OracleComparison c = oracle_comparison(cfg, net ? &*net : nullptr);
            std::printf("split-step vs closed form  %.4e\n", c.oracle_to_exact);
            std::printf("relative mass drift        %.3e\n", c.mass_drift);
            if (net) {
                std::printf("network vs split-step      %.4e\n", c.net_to_oracle);
                std::printf("network vs closed form     %.4e\n", c.net_to_exact);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
