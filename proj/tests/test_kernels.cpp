#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "nlspinn/kernels.hpp"

using namespace nlspinn::kernels;

namespace {
std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> U(-scale, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = U(rng);
    return v;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
}  // namespace

TEST_CASE("scalar table is always available") {
    CHECK(supported(Isa::Scalar));
    CHECK(table(Isa::Scalar).isa == Isa::Scalar);
    {
        ScopedIsa guard(Isa::Scalar);
        CHECK(active().isa == Isa::Scalar);
    }
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
    if (!supported(Isa::Avx2)) {
        MESSAGE("AVX2 not supported on this CPU; skipping");
        return;
    }
    const auto& s = table(Isa::Scalar);
    const auto& v = table(Isa::Avx2);
    std::mt19937_64 rng(2);
    // Odd sizes exercise the remainder paths.
    for (std::size_t n : {1u, 3u, 7u, 37u, 256u}) {
        const std::size_t out = 20, in = 13;
        auto w = random_vector(out * in, rng), x = random_vector(in * n, rng), y = random_vector(out * n, rng);
        std::vector<double> a(out * n), b(out * n);
        s.matmul(w.data(), x.data(), a.data(), out, in, n);
        v.matmul(w.data(), x.data(), b.data(), out, in, n);
        CHECK(max_diff(a, b) < 1e-13);

        std::vector<double> xa(in * n), xb(in * n);
        s.matmul_t(w.data(), y.data(), xa.data(), out, in, n);
        v.matmul_t(w.data(), y.data(), xb.data(), out, in, n);
        CHECK(max_diff(xa, xb) < 1e-13);

        auto ga = random_vector(out * in, rng), gb = ga;
        s.outer_acc(y.data(), x.data(), ga.data(), out, in, n);
        v.outer_acc(y.data(), x.data(), gb.data(), out, in, n);
        CHECK(max_diff(ga, gb) < 1e-12);

        for (int channels : {1, 2, 4}) {
            const std::size_t rows = 5;
            auto z = random_vector(rows * channels * n, rng, 30.0);
            auto dh = random_vector(rows * channels * n, rng);
            std::vector<double> ha(z.size()), hb(z.size()), sa(rows * n), sb(rows * n), ca(rows * n), cb(rows * n);
            s.sine_forward(z.data(), ha.data(), sa.data(), ca.data(), rows, n, channels);
            v.sine_forward(z.data(), hb.data(), sb.data(), cb.data(), rows, n, channels);
            CHECK(max_diff(sa, sb) < 1e-14);
            CHECK(max_diff(ca, cb) < 1e-14);
            CHECK(max_diff(ha, hb) < 1e-11);
            std::vector<double> dza(z.size()), dzb(z.size());
            s.sine_backward(z.data(), sa.data(), ca.data(), dh.data(), dza.data(), rows, n, channels);
            v.sine_backward(z.data(), sa.data(), ca.data(), dh.data(), dzb.data(), rows, n, channels);
            CHECK(max_diff(dza, dzb) < 1e-11);
        }
    }
}

TEST_CASE("active table can be switched") {
    const auto before = active().isa;
    set_active(Isa::Scalar);
    CHECK(active().isa == Isa::Scalar);
    set_active(before);
    CHECK(name(Isa::Scalar) == "scalar");
}
