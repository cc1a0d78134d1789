#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlspinn/errors.hpp"
#include "nlspinn/residual.hpp"
#include "nlspinn/solutions.hpp"

using namespace nlspinn;

TEST_CASE("soliton values") {
    auto s = soliton(1.0, 1.0, 0.0, 0.0);
    CHECK(s.u.real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(std::abs(s.u.imag()) < 1e-15);
    for (double t : {-2.0, 0.0, 1.5})
        for (double x : {-3.0, 0.4, 2.0})
            CHECK(std::abs(soliton(1.0, 0.0, t, x).u) == doctest::Approx(std::sqrt(2.0) / std::cosh(x)));
    CHECK_THROWS_AS(soliton(0.0, 1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("soliton mass is 4 sqrt(c)") {
    for (double c : {1.0, 3.0}) {
        const double L = 40.0;
        const int n = 8000;
        const double h = 2 * L / n;
        double mass = 0.0;
        for (int k = 0; k < n; ++k) mass += std::norm(soliton(c, 2.0, 0.3, -L + k * h).u) * h;
        CHECK(mass == doctest::Approx(4 * std::sqrt(c)).epsilon(1e-10));
    }
}

TEST_CASE("Peregrine values") {
    CHECK(peregrine(0.0, 0.0).u.real() == doctest::Approx(-3.0));
    for (double t : {-1.0, 0.0, 2.0}) {
        CHECK(std::abs(std::abs(peregrine(t, 1e3).u) - 1.0) < 1e-5);
        CHECK(std::abs(std::abs(peregrine(t, -1e3).u) - 1.0) < 1e-5);
    }
}

TEST_CASE("Kuznetsov-Ma frequencies and time periodicity") {
    auto f = km_frequencies(0.75);
    CHECK(f.alpha_tilde == doctest::Approx(std::sqrt(3.0)));
    CHECK(f.beta_tilde == doctest::Approx(1.0));
    const double period = 2 * std::numbers::pi / f.alpha_tilde;
    for (double x : {-2.0, 0.0, 1.3}) {
        const double t = 0.2;
        CHECK(std::abs(kuznetsov_ma(0.75, t, x).u) ==
              doctest::Approx(std::abs(kuznetsov_ma(0.75, t + period, x).u)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(km_frequencies(0.5), DomainError);
}

TEST_CASE("standing wave values") {
    CHECK(standing_wave(1.0, 3.0, 0.0, 0.0).u.real() == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(standing_wave(1.0, 5.0, 0.0, 0.0), DomainError);
}

TEST_CASE("closed forms annihilate the NLS operator") {
    const ReferenceSolution refs[] = {
        ReferenceSolution::make_soliton(1.0, 1.0), ReferenceSolution::make_peregrine(),
        ReferenceSolution::make_kuznetsov_ma(0.75), ReferenceSolution::make_standing_wave(1.0, 2.0)};
    for (const auto& ref : refs) {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j) {
                const double t = -1.0 + 0.1 * i, x = -5.0 + 0.5 * j + 0.01;
                worst = std::max(worst, std::abs(residual_from_jet(ref.jet(t, x), ref.alpha())));
            }
        INFO(ref.describe());
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("solution kind names round trip") {
    for (auto k : {SolutionKind::Soliton, SolutionKind::Peregrine, SolutionKind::KuznetsovMa,
                   SolutionKind::StandingWave})
        CHECK(solution_kind_from_string(to_string(k)) == k);
}
