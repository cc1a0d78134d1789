#pragma once

// Limited-memory BFGS with a strong Wolfe line search (bracketing phase plus
// cubic-interpolation zoom).

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nlspinn {

struct LbfgsOptions {
    std::size_t history = 100;
    double c1 = 1e-4;
    double c2 = 0.9;
    double initial_step = 1.0;
    std::size_t max_linesearch = 25;
    double grad_tolerance = 1e-10;  // max-norm
};

// Returns f(x) and writes grad f(x). May throw; a throwing trial point is
// treated as +inf by the line search.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct CorrectionPair {
    std::vector<double> s;
    std::vector<double> y;
    double rho;  // 1 / (s . y)
};

struct LbfgsState {
    std::vector<double> x;
    std::vector<double> grad;
    double loss = 0.0;
    std::deque<CorrectionPair> history;
    std::size_t iteration = 0;
    std::size_t evaluations = 0;
    std::size_t consecutive_failures = 0;
};

struct StepOutcome {
    bool accepted = false;
    double step_length = 0.0;
};

LbfgsState lbfgs_init(std::vector<double> x0, const Objective& objective);

// Search direction from the two-loop recursion. With empty history this is
// -grad.
std::vector<double> lbfgs_direction(const LbfgsState& state);

// One outer iteration. On line-search failure the state keeps its point,
// drops its history and the outcome is not accepted.
StepOutcome lbfgs_step(LbfgsState& state, const Objective& objective, const LbfgsOptions& options);

struct IterationRecord {
    std::size_t iteration = 0;
    double wall_seconds = 0.0;
    double loss = 0.0;
    double grad_norm = 0.0;
    double step_length = 0.0;
    std::size_t evaluations = 0;
    bool accepted = true;
};

enum class StopReason { MaxIterations, Converged, Stalled, NonFinite, Cancelled };
std::string to_string(StopReason reason);

struct OptimizationResult {
    std::vector<double> x;
    double loss = 0.0;
    std::vector<IterationRecord> log;
    StopReason reason = StopReason::MaxIterations;
    std::string message;
};

// Returning false ends the run after the current iteration.
using IterationCallback = std::function<bool(const IterationRecord&, std::span<const double> x)>;

// Throws DomainError when max_iters == 0. Errors raised while evaluating the
// objective end the run with StopReason::NonFinite rather than propagating.
OptimizationResult lbfgs_run(std::vector<double> x0, const Objective& objective, std::size_t max_iters,
                             const LbfgsOptions& options = {}, const IterationCallback& callback = {});

}  // namespace nlspinn
