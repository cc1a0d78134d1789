#include "nlspinn/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "nlspinn/errors.hpp"

namespace nlspinn {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_norm(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

struct Trial {
    double alpha = 0.0;
    double f = 0.0;
    double slope = 0.0;
    std::vector<double> grad;
};

// Evaluates phi(alpha) = f(x + alpha d). Failures and non-finite results
// come back as f = +inf.
class LineFunction {
public:
    LineFunction(const LbfgsState& s, const std::vector<double>& d, const Objective& obj)
        : state_(s), dir_(d), obj_(obj), point_(s.x.size()) {}

    Trial operator()(double alpha) {
        ++evaluations;
        Trial t;
        t.alpha = alpha;
        t.grad.assign(point_.size(), 0.0);
        for (std::size_t i = 0; i < point_.size(); ++i) point_[i] = state_.x[i] + alpha * dir_[i];
        try {
            t.f = obj_(point_, t.grad);
        } catch (const std::exception&) {
            t.f = std::numeric_limits<double>::infinity();
        }
        if (!std::isfinite(t.f) || !all_finite(t.grad)) {
            t.f = std::numeric_limits<double>::infinity();
            t.slope = 0.0;
        } else {
            t.slope = dot(t.grad, dir_);
        }
        return t;
    }

    std::size_t evaluations = 0;

private:
    const LbfgsState& state_;
    const std::vector<double>& dir_;
    const Objective& obj_;
    std::vector<double> point_;
};

// Minimiser of the cubic through (a, fa, da), (b, fb, db), kept inside the
// middle 80% of the bracket; bisection when the cubic is unusable.
double cubic_step(const Trial& a, const Trial& b) {
    const double lo = std::min(a.alpha, b.alpha), hi = std::max(a.alpha, b.alpha);
    const double mid = 0.5 * (lo + hi);
    if (!std::isfinite(a.f) || !std::isfinite(b.f)) return mid;
    const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
    const double disc = d1 * d1 - a.slope * b.slope;
    if (!(disc >= 0.0)) return mid;
    const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
    const double denom = b.slope - a.slope + 2.0 * d2;
    if (denom == 0.0) return mid;
    const double alpha = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
    const double margin = 0.1 * (hi - lo);
    if (!std::isfinite(alpha) || alpha < lo + margin || alpha > hi - margin) return mid;
    return alpha;
}

struct SearchResult {
    bool ok = false;
    Trial point;
};

SearchResult strong_wolfe(LineFunction& phi, double f0, double slope0, double alpha1,
                          const LbfgsOptions& opt) {
    const auto armijo = [&](const Trial& t) { return t.f <= f0 + opt.c1 * t.alpha * slope0; };
    const auto curvature = [&](const Trial& t) { return std::abs(t.slope) <= -opt.c2 * slope0; };

    auto zoom = [&](Trial lo, Trial hi) -> SearchResult {
        while (phi.evaluations < opt.max_linesearch) {
            const Trial t = phi(cubic_step(lo, hi));
            if (!armijo(t) || t.f >= lo.f) {
                hi = t;
            } else {
                if (curvature(t)) return {true, t};
                if (t.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                lo = t;
            }
            if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, lo.alpha)) break;
        }
        return {false, lo};
    };

    Trial prev;
    prev.alpha = 0.0;
    prev.f = f0;
    prev.slope = slope0;
    double alpha = alpha1;
    for (std::size_t i = 1; phi.evaluations < opt.max_linesearch; ++i) {
        Trial t = phi(alpha);
        if (!armijo(t) || (i > 1 && t.f >= prev.f)) return zoom(prev, t);
        if (curvature(t)) return {true, t};
        if (t.slope >= 0.0) return zoom(t, prev);
        prev = std::move(t);
        alpha *= 2.0;
    }
    return {false, prev};
}

}  // namespace

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::MaxIterations: return "max_iterations";
        case StopReason::Converged: return "converged";
        case StopReason::Stalled: return "stalled";
        case StopReason::NonFinite: return "non_finite";
        case StopReason::Cancelled: return "cancelled";
    }
    return "unknown";
}

LbfgsState lbfgs_init(std::vector<double> x0, const Objective& objective) {
    LbfgsState s;
    s.x = std::move(x0);
    s.grad.assign(s.x.size(), 0.0);
    s.loss = objective(s.x, s.grad);
    s.evaluations = 1;
    if (!std::isfinite(s.loss)) throw NonFinite("objective is not finite at the initial point");
    if (!all_finite(s.grad)) throw NonFiniteGradient("gradient is not finite at the initial point");
    return s;
}

std::vector<double> lbfgs_direction(const LbfgsState& state) {
    std::vector<double> q = state.grad;
    const std::size_t m = state.history.size();
    std::vector<double> a(m);
    for (std::size_t i = m; i-- > 0;) {
        const CorrectionPair& p = state.history[i];
        a[i] = p.rho * dot(p.s, q);
        for (std::size_t k = 0; k < q.size(); ++k) q[k] -= a[i] * p.y[k];
    }
    if (m > 0) {
        const CorrectionPair& last = state.history.back();
        const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
        for (double& v : q) v *= gamma;
    }
    for (std::size_t i = 0; i < m; ++i) {
        const CorrectionPair& p = state.history[i];
        const double b = p.rho * dot(p.y, q);
        for (std::size_t k = 0; k < q.size(); ++k) q[k] += p.s[k] * (a[i] - b);
    }
    for (double& v : q) v = -v;
    return q;
}

StepOutcome lbfgs_step(LbfgsState& state, const Objective& objective, const LbfgsOptions& options) {
    if (!std::isfinite(state.loss) || !all_finite(state.grad))
        throw NonFiniteGradient("L-BFGS state is not finite");
    std::vector<double> dir = lbfgs_direction(state);
    double slope = dot(dir, state.grad);
    if (!(slope < 0.0)) {
        state.history.clear();
        dir = state.grad;
        for (double& v : dir) v = -v;
        slope = dot(dir, state.grad);
    }
    double alpha1 = options.initial_step;
    if (state.history.empty()) {
        // Unscaled steepest descent: cap the first trial by the gradient size.
        const double g1 = std::accumulate(state.grad.begin(), state.grad.end(), 0.0,
                                          [](double s, double v) { return s + std::abs(v); });
        if (g1 > 0.0) alpha1 = std::min(alpha1, 1.0 / g1);
    }

    LineFunction phi(state, dir, objective);
    SearchResult r = strong_wolfe(phi, state.loss, slope, alpha1, options);
    state.evaluations += phi.evaluations;
    ++state.iteration;
    if (!r.ok) {
        state.history.clear();
        ++state.consecutive_failures;
        return {false, 0.0};
    }
    state.consecutive_failures = 0;

    CorrectionPair pair;
    pair.s.resize(state.x.size());
    pair.y.resize(state.x.size());
    for (std::size_t i = 0; i < state.x.size(); ++i) {
        pair.s[i] = r.point.alpha * dir[i];
        pair.y[i] = r.point.grad[i] - state.grad[i];
        state.x[i] += pair.s[i];
    }
    const double sy = dot(pair.s, pair.y);
    state.grad = std::move(r.point.grad);
    state.loss = r.point.f;
    if (sy > 0.0 && std::isfinite(sy)) {
        pair.rho = 1.0 / sy;
        state.history.push_back(std::move(pair));
        while (state.history.size() > options.history) state.history.pop_front();
    }
    return {true, r.point.alpha};
}

OptimizationResult lbfgs_run(std::vector<double> x0, const Objective& objective, std::size_t max_iters,
                             const LbfgsOptions& options, const IterationCallback& callback) {
    if (max_iters == 0) throw DomainError("max_iters must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    OptimizationResult result;
    LbfgsState state;
    try {
        state = lbfgs_init(std::move(x0), objective);
    } catch (const std::exception& e) {
        result.x = std::move(state.x);
        result.reason = StopReason::NonFinite;
        result.message = e.what();
        return result;
    }
    result.reason = StopReason::MaxIterations;
    while (result.log.size() < max_iters) {
        if (max_norm(state.grad) < options.grad_tolerance) {
            result.reason = StopReason::Converged;
            break;
        }
        StepOutcome out;
        try {
            out = lbfgs_step(state, objective, options);
        } catch (const std::exception& e) {
            result.reason = StopReason::NonFinite;
            result.message = e.what();
            break;
        }
        IterationRecord rec;
        rec.iteration = state.iteration;
        rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rec.loss = state.loss;
        rec.grad_norm = std::sqrt(dot(state.grad, state.grad));
        rec.step_length = out.step_length;
        rec.evaluations = state.evaluations;
        rec.accepted = out.accepted;
        result.log.push_back(rec);
        if (callback && !callback(rec, state.x)) {
            result.reason = StopReason::Cancelled;
            break;
        }
        if (state.consecutive_failures >= 2) {
            result.reason = StopReason::Stalled;
            result.message = "line search failed twice in a row";
            break;
        }
    }
    result.x = std::move(state.x);
    result.loss = state.loss;
    return result;
}

}  // namespace nlspinn
