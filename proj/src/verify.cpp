#include "nlspinn/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "nlspinn/gradient.hpp"
#include "nlspinn/harness.hpp"
#include "nlspinn/kernels.hpp"
#include "nlspinn/network.hpp"
#include "nlspinn/norms.hpp"
#include "nlspinn/optimizer.hpp"
#include "nlspinn/oracle.hpp"
#include "nlspinn/propagator.hpp"
#include "nlspinn/residual.hpp"
#include "nlspinn/solutions.hpp"

namespace nlspinn {
namespace {

// Relative difference with an absolute floor for values near zero.
double rel_diff(double a, double b, double floor = 1e-6) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

double rel_diff(cplx a, cplx b, double floor = 1e-6) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

template <class F>
CheckResult timed(const char* name, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    r.name = name;
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

NetworkParams random_network(std::mt19937_64& rng, std::uint64_t seed) {
    NetworkParams net = init_glorot(Architecture{}, seed);
    std::normal_distribution<double> n(0.0, 0.2);
    for (std::size_t l = 0; l < net.architecture().layer_count(); ++l)
        for (double& b : net.bias(l)) b = n(rng);
    return net;
}

LossConfig small_loss(double R, double T) {
    LossConfig c;
    c.residual_grid = SpaceTimeGrid::uniform(R, T, 16, 12);
    c.data_grid = SpaceTimeGrid::uniform(R, T, 12, 10);
    c.R = R;
    c.K = 32;
    return c;
}

}  // namespace

CheckResult check_jets_and_gradient(int draws) {
    return timed("jets and loss gradient vs central differences", [&](CheckResult& r) {
        std::mt19937_64 rng(20240601);
        std::uniform_real_distribution<double> ut(-2.0, 2.0), ux(-8.0, 8.0);
        const NlsLoss losses[] = {
            NlsLoss(small_loss(8.0, 2.0), ReferenceSolution::make_soliton(1.0, 1.0)),
            NlsLoss(small_loss(5.0, 1.0), ReferenceSolution::make_kuznetsov_ma(0.75)),
            NlsLoss(small_loss(10.0, 2.0), ReferenceSolution::make_peregrine()),
        };
        double worst_jet = 0.0, worst_grad = 0.0;
        for (int d = 0; d < draws; ++d) {
            const NetworkParams net = random_network(rng, 1000 + static_cast<std::uint64_t>(d));
            const double t = ut(rng), x = ux(rng);

            // Field jets: first derivatives from values, u_xx from u_x.
            const double h = 1e-5;
            const Jet2 j = forward(net, t, x);
            const cplx ft = (value(net, t + h, x) - value(net, t - h, x)) / (2 * h);
            const cplx fx = (value(net, t, x + h) - value(net, t, x - h)) / (2 * h);
            const cplx fxx = (forward(net, t, x + h).u_x() - forward(net, t, x - h).u_x()) / (2 * h);
            const double floor = 1e-3;
            worst_jet = std::max({worst_jet, rel_diff(j.u_t(), ft, floor), rel_diff(j.u_x(), fx, floor),
                                  rel_diff(j.u_xx(), fxx, floor)});
            // Batched path must agree with the single-point jets.
            const FieldBatch fb = evaluate(net, std::vector<double>{t}, std::vector<double>{x}, JetMode::Full);
            worst_jet = std::max({worst_jet, rel_diff(fb.u(0), j.u(), floor), rel_diff(fb.at(1, 0), j.u_t(), floor),
                                  rel_diff(fb.at(2, 0), j.u_x(), floor), rel_diff(fb.at(3, 0), j.u_xx(), floor)});

            // Loss gradient: one random direction plus two random coordinates.
            const NlsLoss& L = losses[d % 3];
            const ValueAndGradient vg = value_and_gradient(net, L);
            std::normal_distribution<double> n(0.0, 1.0);
            std::vector<double> dir(net.size());
            double norm = 0.0;
            for (double& v : dir) {
                v = n(rng);
                norm += v * v;
            }
            for (double& v : dir) v /= std::sqrt(norm);
            auto shifted = [&](double eps, const std::vector<double>& v) {
                NetworkParams p = net;
                for (std::size_t i = 0; i < p.size(); ++i) p.flat()[i] += eps * v[i];
                return loss(p, L);
            };
            const double eps = 1e-5;
            double analytic = 0.0;
            for (std::size_t i = 0; i < dir.size(); ++i) analytic += vg.gradient.values[i] * dir[i];
            const double fd = (shifted(eps, dir) - shifted(-eps, dir)) / (2 * eps);
            worst_grad = std::max(worst_grad, rel_diff(analytic, fd, 1e-3));
            std::uniform_int_distribution<std::size_t> pick(0, net.size() - 1);
            for (int k = 0; k < 2; ++k) {
                std::vector<double> e(net.size(), 0.0);
                const std::size_t i = pick(rng);
                e[i] = 1.0;
                const double fdi = (shifted(eps, e) - shifted(-eps, e)) / (2 * eps);
                worst_grad = std::max(worst_grad, rel_diff(vg.gradient.values[i], fdi, 1e-3));
            }
        }
        r.passed = worst_jet <= 1e-6 && worst_grad <= 1e-4;
        r.detail = "worst jet rel " + sci(worst_jet) + " (<= 1e-6), worst gradient rel " + sci(worst_grad) +
                   " (<= 1e-4)";
    });
}

CheckResult check_exact_residuals() {
    return timed("closed-form solutions solve the equation", [](CheckResult& r) {
        struct Case {
            const char* name;
            ReferenceSolution ref;
            double R, T;
        };
        const Case cases[] = {
            {"soliton", ReferenceSolution::make_soliton(1.0, 1.0), 8.0, 2.0},
            {"peregrine", ReferenceSolution::make_peregrine(), 10.0, 2.0},
            {"kuznetsov_ma", ReferenceSolution::make_kuznetsov_ma(0.75), 5.0, 1.0},
            {"standing_wave", ReferenceSolution::make_standing_wave(1.0, 2.0), 8.0, 2.0},
        };
        double worst = 0.0;
        std::ostringstream os;
        for (const Case& c : cases) {
            double m = 0.0;
            for (double t : linspace(-c.T, c.T, 50))
                for (double x : linspace(-c.R, c.R, 50))
                    m = std::max(m, std::abs(residual_from_jet(c.ref.jet(t, x), c.ref.alpha())));
            os << c.name << ' ' << sci(m) << "; ";
            worst = std::max(worst, m);
        }
        r.passed = worst <= 1e-5;
        r.detail = os.str() + "max <= 1e-5";
    });
}

CheckResult check_propagator() {
    return timed("free propagator identities", [](CheckResult& r) {
        const double R = 20.0;
        const std::size_t K = 256;
        const std::vector<double> x = periodic_grid(R, K);
        std::vector<cplx> f(K);
        for (std::size_t k = 0; k < K; ++k) f[k] = std::exp(-x[k] * x[k]);
        const SpectralField s = analyze(x, f);

        double id = 0.0, gauss = 0.0, semi = 0.0;
        double m0 = 0.0, m1 = 0.0;
        std::vector<cplx> half(K);
        for (std::size_t k = 0; k < K; ++k) {
            id = std::max(id, std::abs(evolve_at(s, 0.0, x[k]) - f[k]));
            const cplx v = evolve_at(s, 0.5, x[k]);
            const cplx a = std::sqrt(cplx(1.0, 2.0));  // 1 + 4it at t = 0.5
            const cplx exact = std::exp(-x[k] * x[k] / cplx(1.0, 2.0)) / a;
            gauss = std::max(gauss, std::abs(v - exact));
            m0 += std::norm(f[k]);
            m1 += std::norm(v);
            half[k] = evolve_at(s, 0.2, x[k]);
        }
        const SpectralField s2 = analyze(x, half);
        for (std::size_t k = 0; k < K; ++k)
            semi = std::max(semi, std::abs(evolve_at(s2, 0.3, x[k]) - evolve_at(s, 0.5, x[k])));
        const double mass = std::abs(m1 - m0) / m0;
        r.passed = id <= 1e-12 && mass <= 1e-12 && gauss <= 1e-6 && semi <= 1e-12;
        r.detail = "identity " + sci(id) + ", mass " + sci(mass) + ", gaussian " + sci(gauss) + ", semigroup " +
                   sci(semi);
    });
}

CheckResult check_functionals() {
    return timed("discrete space-time functionals", [](CheckResult& r) {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> u(-1.0, 1.0), wdist(0.0, 1.0), qd(1.0, 10.0);
        double brute = 0.0;
        bool homog = true, mono = true;
        for (int c = 0; c < 100; ++c) {
            SpaceTimeGrid g = SpaceTimeGrid::uniform(1.0, 1.0, 7, 5);
            std::vector<cplx> v(g.size());
            for (cplx& z : v) z = {u(rng), u(rng)};
            const double p = qd(rng), q = qd(rng);

            double outer = 0.0;
            for (std::size_t l = 0; l < g.m(); ++l) {
                double inner = 0.0;
                for (std::size_t j = 0; j < g.n(); ++j) inner += std::pow(std::abs(v[l * g.n() + j]), q);
                outer += std::pow(inner / static_cast<double>(g.n()), p / q);
            }
            const double oracle = std::pow(outer / static_cast<double>(g.m()), 1.0 / p);
            const double J = j_pq(g, v, {}, p, q);
            brute = std::max(brute, rel_diff(J, oracle, 1e-300));

            const double lambda = 3.0 * u(rng);
            std::vector<cplx> scaled(v);
            for (cplx& z : scaled) z *= lambda;
            homog = homog && rel_diff(j_pq(g, scaled, {}, p, q), std::abs(lambda) * J, 1e-300) <= 1e-12;

            SpaceTimeGrid lo = g, hi = g;
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double a = wdist(rng), b = wdist(rng);
                lo.weights[i] = std::min(a, b);
                hi.weights[i] = std::max(a, b);
            }
            mono = mono && j_pq(lo, v, {}, p, q) <= j_pq(hi, v, {}, p, q) * (1 + 1e-14);
        }
        const AdmissiblePair pq = pair_for_alpha(3.0);
        const bool pair = pq.p == 8.0 && pq.q == 4.0 && pq.p_conj == 8.0 / 7.0 && pq.q_conj == 4.0 / 3.0;
        r.passed = brute <= 1e-12 && homog && mono && pair;
        r.detail = "brute-force rel " + sci(brute) + ", homogeneity " + (homog ? "ok" : "FAILED") +
                   ", weight monotonicity " + (mono ? "ok" : "FAILED") + ", (8,4,8/7,4/3) " + (pair ? "ok" : "FAILED");
    });
}

CheckResult check_optimizer() {
    return timed("L-BFGS on closed-form problems", [](CheckResult& r) {
        const Objective quad = [](std::span<const double> x, std::span<double> g) {
            double f = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double s = 1.0 + static_cast<double>(i);
                f += s * x[i] * x[i];
                g[i] = 2.0 * s * x[i];
            }
            return f;
        };
        const OptimizationResult q = lbfgs_run({1.0, -2.0, 0.5, 3.0}, quad, 10);
        double qerr = 0.0;
        for (double v : q.x) qerr = std::max(qerr, std::abs(v));

        const Objective rosen = [](std::span<const double> x, std::span<double> g) {
            const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
            g[0] = -2.0 * a - 400.0 * x[0] * b;
            g[1] = 200.0 * b;
            return a * a + 100.0 * b * b;
        };
        const OptimizationResult ro = lbfgs_run({-1.2, 1.0}, rosen, 200);
        const double rerr = std::max(std::abs(ro.x[0] - 1.0), std::abs(ro.x[1] - 1.0));

        RunConfig cfg;
        cfg.max_iters = 15;
        cfg.seed = 11;
        cfg.N4 = cfg.M4 = cfg.N5 = cfg.M5 = 16;
        cfg.error_checkpoints.clear();
        const TrainOutput a = train_in_memory(cfg), b = train_in_memory(cfg);
        bool same = a.net.size() == b.net.size() &&
                    std::memcmp(a.net.flat().data(), b.net.flat().data(), a.net.size() * sizeof(double)) == 0;
        for (std::size_t i = 0; same && i < a.report.series.size(); ++i)
            same = a.report.series[i].loss == b.report.series[i].loss;

        r.passed = qerr <= 1e-8 && rerr <= 1e-6 && same;
        r.detail = "quadratic " + sci(qerr) + " in " + std::to_string(q.log.size()) + " steps, rosenbrock " +
                   sci(rerr) + " in " + std::to_string(ro.log.size()) + " steps, repeat runs " +
                   (same ? "bit-identical" : "DIFFER");
    });
}

CheckResult check_oracle() {
    return timed("split-step reference integrator", [](CheckResult& r) {
        SplitStepConfig cfg;
        cfg.R = 20.0;
        cfg.K = 1024;
        const std::vector<double> x = splitstep_grid(cfg);
        std::vector<cplx> u0(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) u0[k] = soliton(1.0, 1.0, 0.0, x[k]).u;
        auto l2_error = [&](double dt) {
            SplitStepConfig c = cfg;
            c.dt = dt;
            const auto u = splitstep_evolve(u0, c, 0.5);
            double s = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) s += std::norm(u[k] - soliton(1.0, 1.0, 0.5, x[k]).u);
            return std::sqrt(s * 2.0 * cfg.R / static_cast<double>(cfg.K));
        };
        const double e1 = l2_error(1e-3), e2 = l2_error(5e-4);
        const double ratio = e1 / e2;
        r.passed = e1 <= 1e-4 && std::abs(ratio - 4.0) <= 1.0;
        r.detail = "L2 error " + sci(e1) + " (<= 1e-4), halving dt ratio " + sci(ratio) + " (4 +- 25%)";
    });
}

CheckResult check_isa_equivalence() {
    return timed("scalar and AVX2 kernels agree", [](CheckResult& r) {
        if (!kernels::supported(kernels::Isa::Avx2)) {
            r.passed = true;
            r.detail = "AVX2 not available on this CPU; scalar only";
            return;
        }
        const NlsLoss L(small_loss(8.0, 2.0), ReferenceSolution::make_soliton(1.0, 1.0));
        std::mt19937_64 rng(5);
        double worst = 0.0;
        for (int d = 0; d < 5; ++d) {
            const NetworkParams net = random_network(rng, 50 + static_cast<std::uint64_t>(d));
            ValueAndGradient s, v;
            {
                kernels::ScopedIsa iso(kernels::Isa::Scalar);
                s = value_and_gradient(net, L);
            }
            {
                kernels::ScopedIsa iso(kernels::Isa::Avx2);
                v = value_and_gradient(net, L);
            }
            worst = std::max(worst, rel_diff(s.value, v.value, 1e-300));
            for (std::size_t i = 0; i < s.gradient.values.size(); ++i)
                worst = std::max(worst, rel_diff(s.gradient.values[i], v.gradient.values[i], 1e-8));
        }
        r.passed = worst <= 1e-10;
        r.detail = "worst relative difference " + sci(worst) + " (<= 1e-10)";
    });
}

std::vector<CheckResult> run_property_suite() {
    return {check_jets_and_gradient(), check_exact_residuals(), check_propagator(),   check_functionals(),
            check_optimizer(),         check_oracle(),          check_isa_equivalence()};
}

}  // namespace nlspinn
