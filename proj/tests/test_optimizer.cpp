#include <cmath>

#include "doctest.h"
#include "nlspinn/errors.hpp"
#include "nlspinn/optimizer.hpp"

using namespace nlspinn;

namespace {
double quadratic(std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        f += x[i] * x[i];
        g[i] = 2 * x[i];
    }
    return f;
}

double rosenbrock(std::span<const double> x, std::span<double> g) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
}
}  // namespace

TEST_CASE("empty history gives steepest descent") {
    auto s = lbfgs_init({1.0, -2.0}, quadratic);
    auto d = lbfgs_direction(s);
    CHECK(d[0] == doctest::Approx(-2.0));
    CHECK(d[1] == doctest::Approx(4.0));
}

TEST_CASE("quadratic converges within 10 steps") {
    auto r = lbfgs_run({1.0, 1.0}, quadratic, 10);
    CHECK(std::hypot(r.x[0], r.x[1]) <= 1e-8);
}

TEST_CASE("Rosenbrock converges within 200 steps") {
    auto r = lbfgs_run({-1.2, 1.0}, rosenbrock, 200);
    CHECK(std::abs(r.x[0] - 1) <= 1e-6);
    CHECK(std::abs(r.x[1] - 1) <= 1e-6);
    CHECK(r.log.size() <= 200);
}

TEST_CASE("accepted steps do not increase the loss") {
    auto r = lbfgs_run({-1.2, 1.0}, rosenbrock, 50);
    double prev = INFINITY;
    for (const auto& rec : r.log) {
        if (rec.accepted) CHECK(rec.loss <= prev);
        prev = rec.loss;
    }
}

TEST_CASE("one callback per completed iteration") {
    std::size_t calls = 0;
    auto r = lbfgs_run({-1.2, 1.0}, rosenbrock, 7, {}, [&](const IterationRecord& rec, std::span<const double>) {
        ++calls;
        CHECK(rec.iteration == calls);
        return true;
    });
    CHECK(calls == r.log.size());
    CHECK(calls == 7);
}

TEST_CASE("callback can cancel") {
    auto r = lbfgs_run({-1.2, 1.0}, rosenbrock, 50, {},
                       [](const IterationRecord& rec, std::span<const double>) { return rec.iteration < 3; });
    CHECK(r.reason == StopReason::Cancelled);
    CHECK(r.log.size() == 3);
}

TEST_CASE("max_iters = 0 is rejected") {
    CHECK_THROWS_AS(lbfgs_run({1.0}, quadratic, 0), DomainError);
}

TEST_CASE("history length is bounded") {
    LbfgsOptions opt;
    opt.history = 3;
    auto s = lbfgs_init({-1.2, 1.0}, rosenbrock);
    for (int i = 0; i < 10; ++i) {
        lbfgs_step(s, rosenbrock, opt);
        CHECK(s.history.size() <= 3);
    }
}

TEST_CASE("objective failure ends the run as non-finite") {
    Objective bad = [](std::span<const double> x, std::span<double> g) -> double {
        g[0] = 1.0;
        if (x[0] < 0.5) throw NonFiniteGradient("boom");
        return x[0];
    };
    auto r = lbfgs_run({1.0}, bad, 20);
    CHECK((r.reason == StopReason::NonFinite || r.reason == StopReason::Stalled));
    CHECK(std::isfinite(r.loss));
}
