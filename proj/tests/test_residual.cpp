#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlspinn/residual.hpp"

using namespace nlspinn;

namespace {
// Two sine units producing u = cos t + i sin t = e^{it}.
NetworkParams plane_wave_net() {
    NetworkParams net(Architecture{2, 1, 2, 2});
    auto w0 = net.weights(0);
    w0[0] = 1.0;  // unit 0: sin(t + pi/2)
    w0[2] = 1.0;  // unit 1: sin(t)
    net.bias(0)[0] = std::numbers::pi / 2;
    auto w1 = net.weights(1);
    w1[0] = 1.0;
    w1[3] = 1.0;
    return net;
}

LossConfig small_config() {
    LossConfig cfg;
    cfg.residual_grid = SpaceTimeGrid::uniform(8.0, 2.0, 12, 10);
    cfg.data_grid = SpaceTimeGrid::uniform(8.0, 2.0, 12, 10);
    cfg.R = 8.0;
    cfg.K = 32;
    return cfg;
}
}  // namespace

TEST_CASE("zero network has zero residual") {
    NetworkParams zero(Architecture{});
    for (double t : {-1.0, 0.5})
        for (double x : {-2.0, 3.0}) CHECK(nls_residual(zero, 3.0, t, x).value == cplx{});
}

TEST_CASE("plane wave background solves the equation") {
    auto net = plane_wave_net();
    for (double t : {-1.0, 0.0, 0.8}) {
        CHECK(std::abs(value(net, t, 0.3) - std::polar(1.0, t)) < 1e-14);
        CHECK(std::abs(nls_residual(net, 3.0, t, 0.3).value) < 1e-14);
    }
    auto grid = SpaceTimeGrid::uniform(4.0, 1.0, 6, 5);
    for (auto r : residual_table(net, 3.0, grid)) CHECK(std::abs(r) < 1e-13);
}

TEST_CASE("exact soliton jet has negligible residual") {
    auto ref = ReferenceSolution::make_soliton(1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j)
            worst = std::max(worst, std::abs(residual_from_jet(ref.jet(-2.0 + i * 4.0 / 31, -8.0 + j * 16.0 / 31), 3.0)));
    CHECK(worst < 1e-6);
}

TEST_CASE("zero network loss is the propagated data term") {
    auto cfg = small_config();
    auto ref = ReferenceSolution::make_soliton(1.0, 1.0);
    NlsLoss L(cfg, ref);
    NetworkParams zero(Architecture{});
    auto terms = L.terms(zero);
    CHECK(terms.residual == 0.0);
    auto table = propagated_mismatch_table(ref, zero, cfg.data_grid, cfg.R, cfg.K);
    CHECK(terms.data == doctest::Approx(j_pq(cfg.data_grid, table, {}, 8.0, 4.0)).epsilon(1e-12));
    CHECK(terms.data > 0.0);
    CHECK(loss(zero, L) == doctest::Approx(terms.total()));
}

TEST_CASE("loss gradient matches central differences") {
    auto cfg = small_config();
    NlsLoss L(cfg, ReferenceSolution::make_soliton(1.0, 1.0));
    auto net = init_glorot(Architecture{2, 2, 8, 2}, 9);
    auto vg = value_and_gradient(net, L);
    CHECK(vg.value == doctest::Approx(loss(net, L)));
    const double h = 1e-6;
    for (std::size_t k = 0; k < net.size(); k += 7) {
        auto p = net, m = net;
        p.flat()[k] += h;
        m.flat()[k] -= h;
        const double fd = (loss(p, L) - loss(m, L)) / (2 * h);
        CHECK(vg.gradient.values[k] == doctest::Approx(fd).epsilon(1e-5).scale(1e-3));
    }
}
