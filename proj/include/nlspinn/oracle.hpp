#pragma once

// Split-step Fourier (Strang) integrator for i u_t + u_xx + |u|^{alpha-1} u = 0
// on the periodic box [-R, R). Used only as an independent reference.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nlspinn {

using cplx = std::complex<double>;

struct SplitStepConfig {
    double R = 20.0;
    std::size_t K = 1024;  // power of two
    double dt = 1e-3;
    double alpha = 3.0;

    void validate() const;  // throws DomainError
};

// Sample grid x_k = -R + k 2R/K, matching periodic_grid().
std::vector<double> splitstep_grid(const SplitStepConfig& cfg);

// Evolves samples of u(0) to t_final (either sign). |t_final|/dt must be an
// integer up to 1e-9 relative rounding. Throws NonFinite on blow-up.
std::vector<cplx> splitstep_evolve(std::span<const cplx> u0, const SplitStepConfig& cfg, double t_final);

// Evolves and records the state at each requested time (in any order).
std::vector<std::vector<cplx>> splitstep_snapshots(std::span<const cplx> u0, const SplitStepConfig& cfg,
                                                   std::span<const double> times);

// Discrete mass (2R/K) sum |u_k|^2.
double discrete_mass(std::span<const cplx> u, double R);

// Trigonometric interpolation of periodic samples at arbitrary x.
cplx spectral_interpolate(std::span<const cplx> samples, double R, double x);

}  // namespace nlspinn
