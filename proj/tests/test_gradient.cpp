#include <cmath>
#include <vector>

#include "doctest.h"
#include "nlspinn/errors.hpp"
#include "nlspinn/gradient.hpp"

using namespace nlspinn;

namespace {
// Sum of squared real outputs over a fixed point set.
class SquaredOutputs : public FieldFunctional {
public:
    SquaredOutputs(std::vector<double> t, std::vector<double> x) { queries_.push_back({t, x, JetMode::Value}); }
    std::span<const FieldQuery> queries() const override { return queries_; }
    double evaluate(std::span<const FieldBatch> fields, std::span<FieldBatch> adjoints) const override {
        double s = 0.0;
        const auto& f = fields[0];
        for (std::size_t i = 0; i < f.points; ++i) {
            s += f.re[i] * f.re[i] + f.im[i] * f.im[i];
            if (!adjoints.empty()) {
                adjoints[0].re[i] = 2 * f.re[i];
                adjoints[0].im[i] = 2 * f.im[i];
            }
        }
        return s;
    }

private:
    std::vector<FieldQuery> queries_;
};

class SqrtOfSquares : public SquaredOutputs {
public:
    using SquaredOutputs::SquaredOutputs;
    double evaluate(std::span<const FieldBatch> fields, std::span<FieldBatch> adjoints) const override {
        double s = SquaredOutputs::evaluate(fields, adjoints);
        const double r = std::sqrt(s);
        for (auto& a : adjoints)
            for (auto& v : a.re) v *= 0.5 / r;
        for (auto& a : adjoints)
            for (auto& v : a.im) v *= 0.5 / r;
        return r;
    }
};
}  // namespace

TEST_CASE("toy u = theta x with loss u(1)^2 has gradient 2 theta") {
    Architecture arch{2, 0, 1, 2};
    REQUIRE(arch.parameter_count() == 6);
    NetworkParams net(arch);
    const double theta = 1.75;
    net.weights(0)[1] = theta;  // Re u = theta * x
    SquaredOutputs f({0.0}, {1.0});
    auto vg = value_and_gradient(net, f);
    CHECK(vg.value == doctest::Approx(theta * theta));
    CHECK(vg.gradient.values[1] == doctest::Approx(2 * theta));
    CHECK(vg.gradient.values[0] == doctest::Approx(0.0));
}

TEST_CASE("zero network: last-layer weights get zero gradient") {
    NetworkParams zero(Architecture{});
    SquaredOutputs f({0.1, 0.5}, {0.2, -1.0});
    auto g = value_and_gradient(zero, f).gradient.values;
    const auto last = zero.architecture().hidden_layers;
    auto w = zero.weights(last);
    const std::size_t off = static_cast<std::size_t>(w.data() - zero.flat().data());
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(g[off + i] == 0.0);
}

TEST_CASE("non-finite gradient is reported") {
    NetworkParams zero(Architecture{});
    SqrtOfSquares f({0.0}, {0.0});
    CHECK_THROWS_AS(value_and_gradient(zero, f), NonFiniteGradient);
}

TEST_CASE("gradient matches central differences on a random net") {
    auto net = init_glorot(Architecture{2, 2, 6, 2}, 5);
    SquaredOutputs f({0.1, -0.7, 1.2}, {0.3, 2.0, -1.1});
    auto g = value_and_gradient(net, f).gradient.values;
    const double h = 1e-6;
    for (std::size_t k = 0; k < net.size(); k += 3) {
        auto p = net, m = net;
        p.flat()[k] += h;
        m.flat()[k] -= h;
        const double fd = (functional_value(p, f) - functional_value(m, f)) / (2 * h);
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
}
