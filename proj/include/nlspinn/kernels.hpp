#pragma once

// Dense inner-loop kernels for batched network evaluation.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2+FMA
// variant. The active table is picked once from CPUID and can be overridden
// with set_active() or the NLSPINN_ISA environment variable ("scalar",
// "avx2"). All matrices are row-major with leading dimension equal to the
// column count.
//
// Sine-jet rows hold `channels` consecutive blocks of `batch` values:
//   channels == 1: value
//   channels == 2: value, d/dx
//   channels == 4: value, d/dt, d/dx, d2/dx2

#include <cstddef>
#include <string_view>

namespace nlspinn::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    Isa isa;
    // y[out x n] = w[out x in] * x[in x n]
    void (*matmul)(const double* w, const double* x, double* y, std::size_t out, std::size_t in,
                   std::size_t n);
    // x[in x n] = w[out x in]^T * y[out x n]
    void (*matmul_t)(const double* w, const double* y, double* x, std::size_t out, std::size_t in,
                     std::size_t n);
    // g[out x in] += y[out x n] * x[in x n]^T
    void (*outer_acc)(const double* y, const double* x, double* g, std::size_t out, std::size_t in,
                      std::size_t n);
    // h = sin(z) propagated through the jet channels; caches sin/cos of the
    // value channel in s and c (rows x batch).
    void (*sine_forward)(const double* z, double* h, double* s, double* c, std::size_t rows,
                         std::size_t batch, int channels);
    // dz = adjoint of sine_forward applied to dh.
    void (*sine_backward)(const double* z, const double* s, const double* c, const double* dh,
                          double* dz, std::size_t rows, std::size_t batch, int channels);
};

const KernelTable& scalar_table();
bool supported(Isa isa);
const KernelTable& table(Isa isa);

const KernelTable& active();
void set_active(Isa isa);
std::string_view name(Isa isa);

// RAII override of the active table, restoring the previous one on exit.
class ScopedIsa {
public:
    explicit ScopedIsa(Isa isa) : previous_(active().isa) { set_active(isa); }
    ~ScopedIsa() { set_active(previous_); }
    ScopedIsa(const ScopedIsa&) = delete;
    ScopedIsa& operator=(const ScopedIsa&) = delete;

private:
    Isa previous_;
};

namespace detail {
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace nlspinn::kernels
