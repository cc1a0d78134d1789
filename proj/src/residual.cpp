#include "nlspinn/residual.hpp"

#include <cmath>

#include "nlspinn/errors.hpp"

namespace nlspinn {
namespace {

constexpr cplx kI{0.0, 1.0};

// |u|^{alpha-1} and its derivative factor (alpha-1)|u|^{alpha-3}, both 0 at u = 0.
struct ModulusPower {
    double m;
    double dm;
};

ModulusPower modulus_power_factors(double re, double im, double alpha) {
    const double r2 = re * re + im * im;
    if (r2 == 0.0) return {0.0, 0.0};
    const double beta = 0.5 * (alpha - 1.0);
    const double m = alpha == 3.0 ? r2 : std::pow(r2, beta);
    return {m, (alpha - 1.0) * m / r2};
}

}  // namespace

cplx residual_from_jet(const Jet2& u, double alpha) {
    const Jet2 nl = modulus_power(u, alpha);
    return kI * u.u_t() + u.u_xx() + nl.u();
}

ResidualSample nls_residual(const NetworkParams& net, double alpha, double t, double x) {
    if (!(alpha >= 2.0 && alpha < 5.0)) throw DomainError("residual requires alpha in [2, 5)");
    const Jet2 u = forward(net, t, x);
    return {t, x, residual_from_jet(u, alpha), std::nullopt};
}

std::vector<cplx> residual_table(const NetworkParams& net, double alpha, const SpaceTimeGrid& grid) {
    const auto t = grid.flat_t();
    const auto x = grid.flat_x();
    const FieldBatch f = evaluate(net, t, x, JetMode::Full);
    std::vector<cplx> out(f.points);
    for (std::size_t i = 0; i < f.points; ++i) {
        const auto [m, dm] = modulus_power_factors(f.re[i], f.im[i], alpha);
        (void)dm;
        out[i] = kI * f.at(1, i) + f.at(3, i) + m * f.u(i);
    }
    return out;
}

NlsLoss::NlsLoss(LossConfig cfg, ReferenceSolution u0)
    : cfg_(std::move(cfg)),
      u0_(u0),
      pair_(pair_for_alpha(cfg_.alpha)),
      propagation_(cfg_.data_grid, cfg_.R, cfg_.K) {
    if (!(cfg_.alpha >= 2.0 && cfg_.alpha < 5.0)) throw DomainError("loss requires alpha in [2, 5)");
    cfg_.residual_grid.validate();
    cfg_.data_grid.validate();
    FieldQuery residual{cfg_.residual_grid.flat_t(), cfg_.residual_grid.flat_x(), JetMode::Full};
    FieldQuery initial{std::vector<double>(cfg_.K, 0.0), propagation_.sample_points(), JetMode::Value};
    queries_ = {std::move(residual), std::move(initial)};
    u0_samples_.resize(cfg_.K);
    for (std::size_t k = 0; k < cfg_.K; ++k) u0_samples_[k] = u0_.value(0.0, propagation_.sample_points()[k]);
}

LossTerms NlsLoss::evaluate_terms(std::span<const FieldBatch> fields, std::span<FieldBatch> adjoints) const {
    const bool want_adjoint = !adjoints.empty();
    const FieldBatch& f = fields[0];
    const std::size_t n = f.points;
    const double alpha = cfg_.alpha;

    std::vector<cplx> res(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [m, dm] = modulus_power_factors(f.re[i], f.im[i], alpha);
        (void)dm;
        res[i] = kI * f.at(1, i) + f.at(3, i) + m * f.u(i);
    }

    LossTerms terms;
    std::vector<cplx> adj_res(n);
    if (want_adjoint) {
        terms.residual = j_pq_with_adjoint(cfg_.residual_grid, res, pair_.p_conj, pair_.q_conj, adj_res);
        FieldBatch& a = adjoints[0];
        for (std::size_t i = 0; i < n; ++i) {
            const double ar = adj_res[i].real(), ai = adj_res[i].imag();
            const double re = f.re[i], im = f.im[i];
            const auto [m, dm] = modulus_power_factors(re, im, alpha);
            const double common = (ar * re + ai * im) * dm;
            a.re[i] += ar * m + common * re;
            a.im[i] += ai * m + common * im;
            a.re[n + i] += ai;        // d/d(Re u_t)
            a.im[n + i] += -ar;       // d/d(Im u_t)
            a.re[3 * n + i] += ar;    // d/d(Re u_xx)
            a.im[3 * n + i] += ai;    // d/d(Im u_xx)
        }
    } else {
        terms.residual = j_pq(cfg_.residual_grid, res, {}, pair_.p_conj, pair_.q_conj);
    }

    const FieldBatch& g = fields[1];
    std::vector<cplx> mismatch(cfg_.K);
    for (std::size_t k = 0; k < cfg_.K; ++k) mismatch[k] = u0_samples_[k] - g.u(k);
    std::vector<cplx> evolved(propagation_.outputs());
    propagation_.apply(mismatch, evolved);
    if (want_adjoint) {
        std::vector<cplx> adj_evolved(evolved.size()), adj_mismatch(cfg_.K);
        terms.data = j_pq_with_adjoint(cfg_.data_grid, evolved, pair_.p, pair_.q, adj_evolved);
        propagation_.apply_adjoint(adj_evolved, adj_mismatch);
        FieldBatch& a = adjoints[1];
        for (std::size_t k = 0; k < cfg_.K; ++k) {
            a.re[k] -= adj_mismatch[k].real();
            a.im[k] -= adj_mismatch[k].imag();
        }
    } else {
        terms.data = j_pq(cfg_.data_grid, evolved, {}, pair_.p, pair_.q);
    }
    return terms;
}

double NlsLoss::evaluate(std::span<const FieldBatch> fields, std::span<FieldBatch> adjoints) const {
    return evaluate_terms(fields, adjoints).total();
}

LossTerms NlsLoss::terms(const NetworkParams& net) const {
    std::vector<FieldBatch> fields;
    for (const FieldQuery& q : queries_) fields.push_back(nlspinn::evaluate(net, q.t, q.x, q.mode));
    return evaluate_terms(fields, {});
}

double loss(const NetworkParams& net, const NlsLoss& functional) { return functional.terms(net).total(); }

}  // namespace nlspinn
