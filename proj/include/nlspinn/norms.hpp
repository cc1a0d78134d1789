#pragma once

// Admissible exponent pairs and the discrete space-time functionals built on
// Riemann-type sums over collocation grids.
//
// Samples on a grid are row-major: row l is time slice t_l, column j is the
// point x_j. By default the sums are normalised by 1/N (space) and 1/M (time);
// a grid built with cell scaling uses 2R/N and 2T/M instead.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nlspinn {

using cplx = std::complex<double>;

struct AdmissiblePair {
    double p;
    double q;
    double p_conj;
    double q_conj;
};

// 2/p + 1/q = 1/2. q = 2 gives p = inf, q = inf gives p = 4.
AdmissiblePair pair_from_q(double q);
// The pair (4(alpha+1)/(alpha-1), alpha+1) attached to the nonlinearity.
AdmissiblePair pair_for_alpha(double alpha);
double holder_conjugate(double r);

std::vector<double> linspace(double lo, double hi, std::size_t n);

struct SpaceTimeGrid {
    std::vector<double> times;    // M
    std::vector<double> points;   // N
    std::vector<double> weights;  // M x N, entries in [0, 1]
    double time_cell = 1.0;       // multiplies the sum over slices
    double space_cell = 1.0;      // multiplies each sum over points

    std::size_t m() const { return times.size(); }
    std::size_t n() const { return points.size(); }
    std::size_t size() const { return m() * n(); }
    double weight(std::size_t l, std::size_t j) const { return weights[l * n() + j]; }

    // Uniform partitions (endpoints included) of [-T, T] and [-R, R], unit
    // weights.
    static SpaceTimeGrid uniform(double R, double T, std::size_t N, std::size_t M,
                                 bool cell_scaling = false);

    // Flattened (t, x) coordinates in sample order.
    std::vector<double> flat_t() const;
    std::vector<double> flat_x() const;

    void validate() const;
};

enum class NormMode { ValueOnly, Sobolev };

// sqrt(cell * sum_j w_j (|f_j|^2 + |f'_j|^2)); cell defaults to 1/N.
double j_h1(std::span<const cplx> f, std::span<const cplx> fx, std::span<const double> weights,
            double cell = 0.0);

// max over slices of the per-slice H1 sum.
double j_inf_h1(const SpaceTimeGrid& grid, std::span<const cplx> g, std::span<const cplx> gx);

// Nested L^p_t L^q_x (value_only) or L^p_t W^{1,q}_x (sobolev) mean. gx is
// required in sobolev mode and ignored otherwise. p, q must be finite and
// >= 1.
double j_pq(const SpaceTimeGrid& grid, std::span<const cplx> g, std::span<const cplx> gx, double p,
            double q, NormMode mode = NormMode::ValueOnly);

// Value-only j_pq together with d(j_pq)/d(Re g) + i d(j_pq)/d(Im g) written
// into adjoint. At a zero functional the adjoint is NaN (the functional is
// not differentiable there).
double j_pq_with_adjoint(const SpaceTimeGrid& grid, std::span<const cplx> g, double p, double q,
                         std::span<cplx> adjoint);

struct QGridSpec {
    double q_min = 2.0;
    double q_max = 100.0;
    std::size_t count = 197;
};

std::vector<double> admissible_q_grid(const QGridSpec& spec = {});

}  // namespace nlspinn
