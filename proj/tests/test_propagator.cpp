#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlspinn/errors.hpp"
#include "nlspinn/network.hpp"
#include "nlspinn/propagator.hpp"
#include "nlspinn/solutions.hpp"

using namespace nlspinn;

TEST_CASE("periodic grid excludes the right endpoint") {
    auto x = periodic_grid(8.0, 100);
    REQUIRE(x.size() == 100);
    CHECK(x.front() == -8.0);
    CHECK(x.back() == doctest::Approx(8.0 - 0.16));
    std::vector<double> bad{0.0, 0.1, 0.3};
    std::vector<cplx> s(3);
    CHECK_THROWS_AS(analyze(bad, s), NonUniformGrid);
}

TEST_CASE("pure grid mode has a single coefficient of modulus K") {
    const double R = 8.0;
    const std::size_t K = 64;
    auto x = periodic_grid(R, K);
    const double xi = std::numbers::pi / R;
    std::vector<cplx> f(K);
    for (std::size_t k = 0; k < K; ++k) f[k] = std::polar(1.0, xi * x[k]);
    auto field = analyze(x, f);
    std::size_t nonzero = 0;
    for (std::size_t m = 0; m < K; ++m) {
        if (std::abs(field.coefficients[m]) > 1e-9) {
            ++nonzero;
            CHECK(std::abs(field.coefficients[m]) == doctest::Approx(double(K)));
            CHECK(field.frequencies[m] == doctest::Approx(xi));
        }
    }
    CHECK(nonzero == 1);
    for (double t : {0.0, 0.7})
        for (double y : {-3.3, 0.0, 5.1}) {
            auto v = evolve_at(field, t, y);
            CHECK(std::abs(v - std::polar(1.0, -t * xi * xi + xi * y)) < 1e-12);
        }

    std::vector<cplx> zero(K);
    for (auto c : analyze(x, zero).coefficients) CHECK(c == cplx{});
}

TEST_CASE("soliton round trip and Parseval") {
    auto x = periodic_grid(8.0, 100);
    std::vector<cplx> f(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) f[k] = soliton(1.0, 1.0, 0.0, x[k]).u;
    auto field = analyze(x, f);
    auto back = synthesize(field);
    double e2 = 0.0, c2 = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        CHECK(std::abs(back[k] - f[k]) < 1e-12);
        CHECK(std::abs(evolve_at(field, 0.0, x[k]) - f[k]) < 1e-12);
        e2 += std::norm(f[k]);
        c2 += std::norm(field.coefficients[k]);
    }
    CHECK(c2 / x.size() == doctest::Approx(e2).epsilon(1e-12));
}

TEST_CASE("evolution is linear") {
    auto x = periodic_grid(5.0, 32);
    std::vector<cplx> f(32), g(32), h(32);
    const cplx a(0.3, -1.2), b(2.0, 0.5);
    for (std::size_t k = 0; k < 32; ++k) {
        f[k] = std::exp(-x[k] * x[k]);
        g[k] = cplx(std::cos(x[k]), x[k] / 5.0);
        h[k] = a * f[k] + b * g[k];
    }
    auto F = analyze(x, f), G = analyze(x, g), H = analyze(x, h);
    for (double y : {-4.0, 0.33, 2.5}) {
        auto lhs = evolve_at(H, 0.4, y);
        auto rhs = a * evolve_at(F, 0.4, y) + b * evolve_at(G, 0.4, y);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("zero network mismatch keeps its mass under evolution") {
    auto ref = ReferenceSolution::make_soliton(1.0, 1.0);
    NetworkParams zero(Architecture{});
    auto mismatch = initial_mismatch(ref, zero, 8.0, 100);
    auto x = periodic_grid(8.0, 100);
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(std::abs(mismatch[k] - ref.value(0.0, x[k])) < 1e-15);

    SpaceTimeGrid grid;
    grid.times = {-1.0, 0.0, 0.5, 2.0};
    grid.points = x;
    grid.weights.assign(grid.times.size() * x.size(), 1.0);
    auto table = propagated_mismatch_table(ref, zero, grid, 8.0, 100);
    double m0 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) m0 += std::norm(mismatch[k]);
    for (std::size_t l = 0; l < grid.m(); ++l) {
        double m = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) m += std::norm(table[l * x.size() + j]);
        CHECK(m == doctest::Approx(m0).epsilon(1e-10));
    }
}

TEST_CASE("precomputed operator agrees with analyze and evolve") {
    auto grid = SpaceTimeGrid::uniform(8.0, 2.0, 9, 5);
    PropagationOperator op(grid, 8.0, 100);
    auto x = op.sample_points();
    std::vector<cplx> f(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) f[k] = soliton(1.0, 1.0, 0.0, x[k]).u * 0.3;
    std::vector<cplx> out(op.outputs());
    op.apply(f, out);
    auto field = analyze(x, f);
    for (std::size_t l = 0; l < grid.m(); ++l)
        for (std::size_t j = 0; j < grid.n(); ++j)
            CHECK(std::abs(out[l * grid.n() + j] - evolve_at(field, grid.times[l], grid.points[j])) < 1e-12);

    std::vector<cplx> a(op.outputs()), back(op.inputs());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = {std::sin(1.0 * i), std::cos(0.5 * i)};
    op.apply_adjoint(a, back);
    cplx lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) lhs += std::conj(a[i]) * out[i];
    for (std::size_t k = 0; k < f.size(); ++k) rhs += std::conj(back[k]) * f[k];
    CHECK(std::abs(lhs - rhs) < 1e-10);
}
