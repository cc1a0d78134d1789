#pragma once

// Free Schroedinger evolution e^{it d_xx} of band-limited data on [-R, R).
//
// Samples live on the periodic grid x_k = -R + k (2R/K). The forward
// transform is unnormalised and uses the physical positions,
//   c_m = sum_k f(x_k) e^{-i xi_m x_k},
// and synthesis carries the 1/K factor,
//   v(t, x) = (1/K) sum_m e^{-i t xi_m^2} c_m e^{i xi_m x},
// which is the trigonometric interpolant evolved exactly in time.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "nlspinn/norms.hpp"

namespace nlspinn {

class NetworkParams;
class ReferenceSolution;

struct SpectralField {
    std::vector<double> grid_points;  // K
    std::vector<cplx> coefficients;   // K
    std::vector<double> frequencies;  // K, xi_m = pi m / R, m in [-K/2, K/2)

    std::size_t size() const { return coefficients.size(); }
};

std::vector<double> periodic_grid(double R, std::size_t K);
// Frequencies in transform order: m = 0, 1, ..., K/2-1, -K/2, ..., -1.
std::vector<double> grid_frequencies(double R, std::size_t K);

// Throws NonUniformGrid unless points form a periodic grid on [-R, R).
SpectralField analyze(std::span<const double> points, std::span<const cplx> samples);
std::vector<cplx> synthesize(const SpectralField& field);

cplx evolve_at(const SpectralField& field, double t, double x);
cplx evolve_dx_at(const SpectralField& field, double t, double x);

// Share of spectral mass in the outer quarter of the frequency band; a large
// value means the K-point grid under-resolves the data.
double high_frequency_fraction(const SpectralField& field);

// u0 - u_net(0, .) sampled on K periodic points of [-R, R).
std::vector<cplx> initial_mismatch(const ReferenceSolution& u0, const NetworkParams& net, double R,
                                   std::size_t K);

// Evolved mismatch on every grid node (row-major M x N).
std::vector<cplx> propagated_mismatch_table(const ReferenceSolution& u0, const NetworkParams& net,
                                            const SpaceTimeGrid& grid, double R, std::size_t K);

// Dense linear map from K periodic samples to the evolved values on a grid,
// i.e. analyze followed by evolve_at at every node, precomputed once.
class PropagationOperator {
public:
    PropagationOperator(const SpaceTimeGrid& grid, double R, std::size_t K);

    std::size_t inputs() const { return K_; }
    std::size_t outputs() const { return rows_; }
    const std::vector<double>& sample_points() const { return points_; }

    void apply(std::span<const cplx> samples, std::span<cplx> out) const;
    // out = G^H in; the adjoint with respect to the real inner product
    // Re <a, b> used by the gradient sweep.
    void apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const;

private:
    std::size_t K_;
    std::size_t rows_;
    std::vector<double> points_;
    std::vector<cplx> matrix_;  // rows_ x K_
};

}  // namespace nlspinn
