#pragma once

// NLS residual E[u] = i u_t + u_xx + |u|^{alpha-1} u and the training loss
//   J_{p',q'}[E[u_net]] + J_{p,q}[e^{it d_xx}(u0 - u_net(0))]
// on the residual grid and the data grid respectively.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nlspinn/gradient.hpp"
#include "nlspinn/norms.hpp"
#include "nlspinn/propagator.hpp"
#include "nlspinn/solutions.hpp"

namespace nlspinn {

struct ResidualSample {
    double t = 0.0;
    double x = 0.0;
    cplx value;
    std::optional<cplx> x_derivative;
};

cplx residual_from_jet(const Jet2& u, double alpha);

ResidualSample nls_residual(const NetworkParams& net, double alpha, double t, double x);

// Batched residual over every node of a grid (row-major).
std::vector<cplx> residual_table(const NetworkParams& net, double alpha, const SpaceTimeGrid& grid);

struct LossConfig {
    double alpha = 3.0;
    SpaceTimeGrid residual_grid;  // N4 x M4
    SpaceTimeGrid data_grid;      // N5 x M5
    double R = 8.0;               // half-width of the periodic propagation box
    std::size_t K = 100;          // propagation samples
};

struct LossTerms {
    double residual = 0.0;
    double data = 0.0;
    double total() const { return residual + data; }
};

class NlsLoss : public FieldFunctional {
public:
    NlsLoss(LossConfig cfg, ReferenceSolution u0);

    std::span<const FieldQuery> queries() const override { return queries_; }
    double evaluate(std::span<const FieldBatch> fields, std::span<FieldBatch> adjoints) const override;

    // Both terms for given fields; adjoints may be empty when only the value
    // is wanted.
    LossTerms evaluate_terms(std::span<const FieldBatch> fields, std::span<FieldBatch> adjoints) const;
    LossTerms terms(const NetworkParams& net) const;

    const LossConfig& config() const { return cfg_; }
    const ReferenceSolution& initial_data() const { return u0_; }
    const AdmissiblePair& pair() const { return pair_; }

private:
    LossConfig cfg_;
    ReferenceSolution u0_;
    AdmissiblePair pair_;
    std::vector<FieldQuery> queries_;
    std::vector<cplx> u0_samples_;
    PropagationOperator propagation_;
};

double loss(const NetworkParams& net, const NlsLoss& functional);

}  // namespace nlspinn
