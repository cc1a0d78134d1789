#include "nlspinn/oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "nlspinn/errors.hpp"

namespace nlspinn {
namespace {

class FftPair {
public:
    explicit FftPair(std::size_t K) : n_(K) {
        buf_ = fftw_alloc_complex(K);
        const int n = static_cast<int>(K);
        fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        inv_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPair() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(inv_);
        fftw_free(buf_);
    }
    FftPair(const FftPair&) = delete;
    FftPair& operator=(const FftPair&) = delete;

    cplx* data() { return reinterpret_cast<cplx*>(buf_); }
    void forward() { fftw_execute(fwd_); }
    void inverse() { fftw_execute(inv_); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    fftw_complex* buf_;
    fftw_plan fwd_, inv_;
};

class Stepper {
public:
    Stepper(const SplitStepConfig& cfg, double dt) : cfg_(cfg), dt_(dt), fft_(cfg.K), linear_(cfg.K) {
        const long K = static_cast<long>(cfg.K);
        const double inv_k = 1.0 / static_cast<double>(cfg.K);
        for (long k = 0; k < K; ++k) {
            const long m = k < K / 2 ? k : k - K;
            const double xi = std::numbers::pi * static_cast<double>(m) / cfg.R;
            // Fold the 1/K of the inverse transform into the multiplier.
            linear_[k] = std::polar(inv_k, -dt * xi * xi);
        }
    }

    // Index-based transforms: the shift by -R is a pure phase on each mode and
    // cancels between forward and inverse, so it is omitted.
    void step(std::vector<cplx>& u) {
        nonlinear(u, 0.5 * dt_);
        cplx* b = fft_.data();
        std::copy(u.begin(), u.end(), b);
        fft_.forward();
        for (std::size_t k = 0; k < u.size(); ++k) b[k] *= linear_[k];
        fft_.inverse();
        std::copy(b, b + u.size(), u.begin());
        nonlinear(u, 0.5 * dt_);
    }

private:
    void nonlinear(std::vector<cplx>& u, double h) const {
        const double beta = 0.5 * (cfg_.alpha - 1.0);
        for (cplx& v : u) {
            const double r2 = std::norm(v);
            const double m = cfg_.alpha == 3.0 ? r2 : std::pow(r2, beta);
            v *= std::polar(1.0, h * m);
        }
    }

    const SplitStepConfig& cfg_;
    double dt_;
    FftPair fft_;
    std::vector<cplx> linear_;
};

std::size_t step_count(double span, double dt) {
    const double n = std::abs(span) / dt;
    const double r = std::round(n);
    if (std::abs(n - r) > 1e-9 * std::max(1.0, n)) throw DomainError("time span is not a multiple of dt");
    return static_cast<std::size_t>(r);
}

void check_finite(const std::vector<cplx>& u) {
    for (const cplx& v : u)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NonFinite("split-step solution blew up");
}

}  // namespace

void SplitStepConfig::validate() const {
    if (!(R > 0.0)) throw DomainError("R must be positive");
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    if (K < 2 || (K & (K - 1)) != 0) throw DomainError("K must be a power of two");
    if (!(alpha > 1.0)) throw DomainError("alpha must exceed 1");
}

std::vector<double> splitstep_grid(const SplitStepConfig& cfg) {
    std::vector<double> x(cfg.K);
    const double dx = 2.0 * cfg.R / static_cast<double>(cfg.K);
    for (std::size_t k = 0; k < cfg.K; ++k) x[k] = -cfg.R + dx * static_cast<double>(k);
    return x;
}

std::vector<cplx> splitstep_evolve(std::span<const cplx> u0, const SplitStepConfig& cfg, double t_final) {
    const double t = t_final;
    return splitstep_snapshots(u0, cfg, std::span<const double>(&t, 1)).front();
}

std::vector<std::vector<cplx>> splitstep_snapshots(std::span<const cplx> u0, const SplitStepConfig& cfg,
                                                   std::span<const double> times) {
    cfg.validate();
    if (u0.size() != cfg.K) throw DomainError("initial samples do not match K");
    std::vector<std::vector<cplx>> out(times.size());
    // Forward and backward sweeps each visit their targets in order of |t|.
    for (const double sign : {1.0, -1.0}) {
        std::multimap<std::size_t, std::size_t> targets;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const bool mine = sign > 0 ? times[i] >= 0.0 : times[i] < 0.0;
            if (mine) targets.emplace(step_count(times[i], cfg.dt), i);
        }
        if (targets.empty()) continue;
        Stepper stepper(cfg, sign * cfg.dt);
        std::vector<cplx> u(u0.begin(), u0.end());
        std::size_t done = 0;
        for (const auto& [steps, idx] : targets) {
            for (; done < steps; ++done) stepper.step(u);
            check_finite(u);
            out[idx] = u;
        }
    }
    return out;
}

double discrete_mass(std::span<const cplx> u, double R) {
    double s = 0.0;
    for (const cplx& v : u) s += std::norm(v);
    return s * 2.0 * R / static_cast<double>(u.size());
}

cplx spectral_interpolate(std::span<const cplx> samples, double R, double x) {
    const long K = static_cast<long>(samples.size());
    const double dx = 2.0 * R / static_cast<double>(K);
    cplx acc(0.0);
    for (long m = -K / 2; m < K / 2; ++m) {
        const double xi = std::numbers::pi * static_cast<double>(m) / R;
        cplx c(0.0);
        for (long k = 0; k < K; ++k) c += samples[k] * std::polar(1.0, -xi * (-R + dx * static_cast<double>(k)));
        // Split the Nyquist mode symmetrically so real data interpolate to real values.
        const double w = (m == -K / 2) ? 0.5 : 1.0;
        acc += w * c * std::polar(1.0, xi * x);
        if (m == -K / 2) acc += w * c * std::polar(1.0, -xi * x);
    }
    return acc / static_cast<double>(K);
}

}  // namespace nlspinn
