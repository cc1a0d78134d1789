#include <cmath>

#include "doctest.h"
#include "nlspinn/errors.hpp"
#include "nlspinn/oracle.hpp"
#include "nlspinn/solutions.hpp"

using namespace nlspinn;

TEST_CASE("t = 0 leaves the input unchanged") {
    SplitStepConfig cfg{10.0, 64, 1e-2, 3.0};
    auto x = splitstep_grid(cfg);
    std::vector<cplx> u(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) u[k] = soliton(1.0, 1.0, 0.0, x[k]).u;
    auto v = splitstep_evolve(u, cfg, 0.0);
    for (std::size_t k = 0; k < u.size(); ++k) CHECK(v[k] == u[k]);
}

TEST_CASE("plane wave picks up the phase e^{it}") {
    SplitStepConfig cfg{10.0, 64, 1e-3, 3.0};
    std::vector<cplx> u(cfg.K, 1.0);
    auto v = splitstep_evolve(u, cfg, 1.0);
    for (auto z : v) CHECK(std::abs(z - std::polar(1.0, 1.0)) <= 1e-8);
}

TEST_CASE("soliton error and mass conservation") {
    SplitStepConfig cfg;
    auto x = splitstep_grid(cfg);
    std::vector<cplx> u(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) u[k] = soliton(1.0, 1.0, 0.0, x[k]).u;
    auto snaps = splitstep_snapshots(u, cfg, std::vector<double>{0.5, -0.5});
    for (double t : {0.5, -0.5}) {
        const auto& v = snaps[t > 0 ? 0 : 1];
        double err = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) err += std::norm(v[k] - soliton(1.0, 1.0, t, x[k]).u);
        CHECK(std::sqrt(err * 2 * cfg.R / cfg.K) <= 1e-4);
        CHECK(discrete_mass(v, cfg.R) == doctest::Approx(discrete_mass(u, cfg.R)).epsilon(1e-8));
    }
}

TEST_CASE("invalid configurations are rejected") {
    SplitStepConfig cfg{10.0, 100, 1e-3, 3.0};
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    SplitStepConfig ok{10.0, 64, 1e-3, 3.0};
    std::vector<cplx> u(64, 1.0);
    CHECK_THROWS_AS(splitstep_evolve(u, ok, 0.00015), DomainError);
}

TEST_CASE("spectral interpolation reproduces samples and smooth data") {
    const double R = 10.0;
    const std::size_t K = 128;
    SplitStepConfig cfg{R, K, 1e-3, 3.0};
    auto x = splitstep_grid(cfg);
    std::vector<cplx> u(K);
    for (std::size_t k = 0; k < K; ++k) u[k] = std::exp(-x[k] * x[k]);
    CHECK(std::abs(spectral_interpolate(u, R, x[17]) - u[17]) < 1e-12);
    CHECK(std::abs(spectral_interpolate(u, R, 0.123) - std::exp(-0.123 * 0.123)) < 1e-10);
}
