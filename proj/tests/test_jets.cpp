#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlspinn/jets.hpp"

using namespace nlspinn;

namespace {
void check_jet(const RealJet& j, double v, double t, double x, double xx) {
    CHECK(j.v == doctest::Approx(v).epsilon(1e-15));
    CHECK(j.t == doctest::Approx(t).epsilon(1e-15));
    CHECK(j.x == doctest::Approx(x).epsilon(1e-15));
    CHECK(j.xx == doctest::Approx(xx).epsilon(1e-15));
}
}  // namespace

TEST_CASE("seed_input gives identity jets") {
    auto a = seed_input(0.0, 0.0);
    check_jet(a.t, 0, 1, 0, 0);
    check_jet(a.x, 0, 0, 1, 0);
    auto b = seed_input(2.0, -8.0);
    check_jet(b.t, 2, 1, 0, 0);
    check_jet(b.x, -8, 0, 1, 0);
}

TEST_CASE("sin propagates first and second derivatives") {
    check_jet(sin(seed_input(0.0, 0.0).x), 0, 0, 1, 0);
    auto s = sin(RealJet{std::numbers::pi / 2, 0, 1, 0});
    CHECK(s.v == doctest::Approx(1.0));
    CHECK(std::abs(s.t) < 1e-15);
    CHECK(std::abs(s.x) < 1e-15);
    CHECK(s.xx == doctest::Approx(-1.0));
    check_jet(sin(RealJet{0, 1, 0, 0}), 0, 1, 0, 0);
}

TEST_CASE("product and quotient rules") {
    auto in = seed_input(0.3, 1.7);
    auto p = in.x * in.x * in.x;  // x^3
    check_jet(p, std::pow(1.7, 3), 0, 3 * 1.7 * 1.7, 6 * 1.7);
    auto q = 1.0 / in.x;
    check_jet(q, 1 / 1.7, 0, -1 / (1.7 * 1.7), 2 / std::pow(1.7, 3));
    auto tx = in.t * in.x;
    check_jet(tx, 0.51, 1.7, 0.3, 0.0);
}

TEST_CASE("sech and pow match closed-form derivatives") {
    const double x = 0.8;
    auto in = seed_input(0.0, x);
    auto s = sech(in.x);
    const double sv = 1 / std::cosh(x), th = std::tanh(x);
    check_jet(s, sv, 0, -sv * th, sv * (th * th - sv * sv));
    auto r = pow(in.x, 2.5);
    check_jet(r, std::pow(x, 2.5), 0, 2.5 * std::pow(x, 1.5), 3.75 * std::pow(x, 0.5));
}

TEST_CASE("complex exponential has unit modulus and i xi derivative") {
    auto in = seed_input(0.0, 0.4);
    Jet2 w = expi(3.0 * in.x);
    CHECK(std::abs(w.u()) == doctest::Approx(1.0));
    auto d = w.u_x() - std::complex<double>(0, 3) * w.u();
    CHECK(std::abs(d) < 1e-15);
    auto dd = w.u_xx() + 9.0 * w.u();
    CHECK(std::abs(dd) < 1e-14);
}

TEST_CASE("modulus_power is zero at the origin") {
    Jet2 z;
    auto m = modulus_power(z, 3.0);
    CHECK(m.u() == std::complex<double>{});
    CHECK(m.u_xx() == std::complex<double>{});
    Jet2 one{RealJet{2.0}, RealJet{0.0}};
    CHECK(modulus_power(one, 3.0).u().real() == doctest::Approx(8.0));
}
