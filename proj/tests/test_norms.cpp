#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "nlspinn/errors.hpp"
#include "nlspinn/norms.hpp"

using namespace nlspinn;

TEST_CASE("admissible pairs") {
    auto p = pair_from_q(4.0);
    CHECK(p.p == doctest::Approx(8.0));
    CHECK(p.p_conj == doctest::Approx(8.0 / 7.0));
    CHECK(p.q_conj == doctest::Approx(4.0 / 3.0));
    CHECK(pair_from_q(std::numeric_limits<double>::infinity()).p == doctest::Approx(4.0));
    CHECK(std::isinf(pair_from_q(2.0).p));
    auto a = pair_for_alpha(3.0);
    CHECK(a.p == 8.0);
    CHECK(a.q == 4.0);
    CHECK(a.p_conj == 8.0 / 7.0);
    CHECK(a.q_conj == 4.0 / 3.0);
}

TEST_CASE("q grid") {
    auto q = admissible_q_grid();
    REQUIRE(q.size() == 197);
    CHECK(q.front() == 2.0);
    CHECK(q.back() == 100.0);
    CHECK(q[4] == 4.0);
    for (double v : q) {
        auto pr = pair_from_q(v);
        if (std::isfinite(pr.p)) CHECK(2 / pr.p + 1 / pr.q == doctest::Approx(0.5));
    }
    auto custom = admissible_q_grid({2.0, 4.0, 2});
    REQUIRE(custom.size() == 2);
    CHECK(std::isinf(pair_from_q(custom[0]).p));
    CHECK(pair_from_q(custom[1]).p == doctest::Approx(8.0));
}

TEST_CASE("j_h1") {
    std::vector<cplx> zero(3), w1;
    std::vector<double> unit(3, 1.0);
    CHECK(j_h1(zero, zero, unit) == 0.0);
    std::vector<cplx> f{0.0, 1.0}, fx{1.0, 1.0};
    std::vector<double> w{1.0, 1.0};
    CHECK(j_h1(f, fx, w) == doctest::Approx(std::sqrt(1.5)));
    CHECK_THROWS_AS(j_h1(w1, w1, {}), EmptyGrid);
}

TEST_CASE("j_inf_h1") {
    auto grid = SpaceTimeGrid::uniform(1.0, 1.0, 4, 2);
    std::vector<cplx> zero(grid.size()), one(grid.size(), 1.0);
    CHECK(j_inf_h1(grid, zero, zero) == 0.0);
    CHECK(j_inf_h1(grid, one, zero) == doctest::Approx(1.0));
    grid.times = {0.0, 1.0};
    std::vector<cplx> g(grid.size());
    for (std::size_t l = 0; l < 2; ++l)
        for (std::size_t j = 0; j < 4; ++j) g[l * 4 + j] = grid.times[l];
    CHECK(j_inf_h1(grid, g, zero) == doctest::Approx(1.0));
}

TEST_CASE("j_pq closed-form cases") {
    auto grid = SpaceTimeGrid::uniform(2.0, 1.0, 5, 3);
    std::vector<cplx> one(grid.size(), 1.0);
    for (auto [p, q] : {std::pair{8.0, 4.0}, {1.0, 1.0}, {3.5, 1.25}})
        CHECK(j_pq(grid, one, {}, p, q) == doctest::Approx(1.0));

    auto single = SpaceTimeGrid::uniform(1.0, 1.0, 1, 1);
    std::vector<cplx> v{cplx(3.0, -4.0)};
    CHECK(j_pq(single, v, {}, 8.0, 4.0) == doctest::Approx(5.0));

    auto two = SpaceTimeGrid::uniform(1.0, 1.0, 2, 2);
    std::vector<cplx> diag{1.0, 0.0, 0.0, 1.0};
    CHECK(j_pq(two, diag, {}, 8.0, 4.0) == doctest::Approx(std::pow(0.25, 0.125)).epsilon(1e-14));
}

TEST_CASE("j_pq matches nested means and is homogeneous") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto grid = SpaceTimeGrid::uniform(3.0, 1.0, 7, 5);
    std::vector<cplx> g(grid.size()), gx(grid.size());
    for (auto& z : g) z = {U(rng), U(rng)};
    for (auto& z : gx) z = {U(rng), U(rng)};
    const double p = 6.0, q = 2.5;
    double outer = 0.0;
    for (std::size_t l = 0; l < grid.m(); ++l) {
        double inner = 0.0;
        for (std::size_t j = 0; j < grid.n(); ++j) {
            const auto k = l * grid.n() + j;
            inner += std::pow(std::abs(g[k]), q) + std::pow(std::abs(gx[k]), q);
        }
        outer += std::pow(inner / grid.n(), p / q);
    }
    const double brute = std::pow(outer / grid.m(), 1.0 / p);
    CHECK(j_pq(grid, g, gx, p, q, NormMode::Sobolev) == doctest::Approx(brute).epsilon(1e-12));

    auto scaled = g;
    for (auto& z : scaled) z *= -2.5;
    CHECK(j_pq(grid, scaled, {}, p, q) == doctest::Approx(2.5 * j_pq(grid, g, {}, p, q)).epsilon(1e-12));
}

TEST_CASE("j_pq adjoint matches finite differences") {
    auto grid = SpaceTimeGrid::uniform(1.0, 1.0, 4, 3);
    std::vector<cplx> g(grid.size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = {std::sin(1.0 + k), std::cos(2.0 * k)};
    std::vector<cplx> adj(g.size());
    const double v = j_pq_with_adjoint(grid, g, 8.0 / 7.0, 4.0 / 3.0, adj);
    CHECK(v == doctest::Approx(j_pq(grid, g, {}, 8.0 / 7.0, 4.0 / 3.0)));
    const double h = 1e-7;
    for (std::size_t k = 0; k < g.size(); ++k) {
        auto gp = g, gm = g;
        gp[k] += h;
        gm[k] -= h;
        const double fd = (j_pq(grid, gp, {}, 8.0 / 7.0, 4.0 / 3.0) - j_pq(grid, gm, {}, 8.0 / 7.0, 4.0 / 3.0)) / (2 * h);
        CHECK(adj[k].real() == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("j_pq rejects non-finite samples") {
    auto grid = SpaceTimeGrid::uniform(1.0, 1.0, 2, 1);
    std::vector<cplx> g{1.0, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(j_pq(grid, g, {}, 8.0, 4.0), NonFinite);
}
