// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma
// and must only be entered after a CPUID check.

#include "nlspinn/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace nlspinn::kernels::detail {
namespace {

// Cody-Waite split of pi/2 and minimax coefficients on [-pi/4, pi/4]
// (Cephes sin.c).
constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kPio2A = 1.57079625129699707031e+00;
constexpr double kPio2B = 7.54978941586159635336e-08;
constexpr double kPio2C = 5.39030285815811905290e-15;
constexpr double kSinCoef[6] = {1.58962301576546568060e-10, -2.50507477628578072866e-08,
                                2.75573136213857245213e-06, -1.98412698295895385996e-04,
                                8.33333333332211858878e-03, -1.66666666666666307295e-01};
constexpr double kCosCoef[6] = {-1.13585365213876817300e-11, 2.08757008419747316778e-09,
                                -2.75573141792967388112e-07, 2.48015872888517045348e-05,
                                -1.38888888888730564116e-03, 4.16666666666665929218e-02};
// Beyond this magnitude the three-term reduction loses accuracy.
constexpr double kReductionLimit = 1.0e5;

inline __m256d poly6(__m256d z, const double (&c)[6]) {
    __m256d p = _mm256_set1_pd(c[0]);
    for (int i = 1; i < 6; ++i) p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(c[i]));
    return p;
}

inline void sincos_pd(__m256d x, __m256d& s, __m256d& c) {
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d ax = _mm256_and_pd(x, abs_mask);
    if (_mm256_movemask_pd(_mm256_cmp_pd(ax, _mm256_set1_pd(kReductionLimit), _CMP_NLT_UQ))) {
        alignas(32) double in[4], so[4], co[4];
        _mm256_store_pd(in, x);
        for (int i = 0; i < 4; ++i) {
            so[i] = std::sin(in[i]);
            co[i] = std::cos(in[i]);
        }
        s = _mm256_load_pd(so);
        c = _mm256_load_pd(co);
        return;
    }
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2A), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2B), r);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2C), r);
    const __m256d z = _mm256_mul_pd(r, r);

    const __m256d ps = _mm256_fmadd_pd(_mm256_mul_pd(r, z), poly6(z, kSinCoef), r);
    const __m256d pc = _mm256_fmadd_pd(_mm256_mul_pd(z, z), poly6(z, kCosCoef),
                                       _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

    // quadrant = n mod 4 in {0, 1, 2, 3}
    const __m256d quarter = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.25)));
    const __m256d q = _mm256_fnmadd_pd(quarter, _mm256_set1_pd(4.0), n);
    const __m256d is1 = _mm256_cmp_pd(q, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
    const __m256d is2 = _mm256_cmp_pd(q, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
    const __m256d is3 = _mm256_cmp_pd(q, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
    const __m256d swap = _mm256_or_pd(is1, is3);
    const __m256d sign_bit = _mm256_set1_pd(-0.0);

    __m256d sv = _mm256_blendv_pd(ps, pc, swap);
    __m256d cv = _mm256_blendv_pd(pc, ps, swap);
    sv = _mm256_xor_pd(sv, _mm256_and_pd(_mm256_or_pd(is2, is3), sign_bit));
    cv = _mm256_xor_pd(cv, _mm256_and_pd(_mm256_or_pd(is1, is2), sign_bit));
    s = sv;
    c = cv;
}

void matmul(const double* w, const double* x, double* y, std::size_t out, std::size_t in,
            std::size_t n) {
    for (std::size_t i = 0; i < out; ++i) {
        double* yi = y + i * n;
        const double* wi = w + i * in;
        std::size_t j = 0;
        for (; j + 16 <= n; j += 16) {
            __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
            __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
            for (std::size_t k = 0; k < in; ++k) {
                const __m256d wk = _mm256_broadcast_sd(wi + k);
                const double* xk = x + k * n + j;
                a0 = _mm256_fmadd_pd(wk, _mm256_loadu_pd(xk), a0);
                a1 = _mm256_fmadd_pd(wk, _mm256_loadu_pd(xk + 4), a1);
                a2 = _mm256_fmadd_pd(wk, _mm256_loadu_pd(xk + 8), a2);
                a3 = _mm256_fmadd_pd(wk, _mm256_loadu_pd(xk + 12), a3);
            }
            _mm256_storeu_pd(yi + j, a0);
            _mm256_storeu_pd(yi + j + 4, a1);
            _mm256_storeu_pd(yi + j + 8, a2);
            _mm256_storeu_pd(yi + j + 12, a3);
        }
        for (; j + 4 <= n; j += 4) {
            __m256d a = _mm256_setzero_pd();
            for (std::size_t k = 0; k < in; ++k)
                a = _mm256_fmadd_pd(_mm256_broadcast_sd(wi + k), _mm256_loadu_pd(x + k * n + j), a);
            _mm256_storeu_pd(yi + j, a);
        }
        for (; j < n; ++j) {
            double a = 0.0;
            for (std::size_t k = 0; k < in; ++k) a = std::fma(wi[k], x[k * n + j], a);
            yi[j] = a;
        }
    }
}

void matmul_t(const double* w, const double* y, double* x, std::size_t out, std::size_t in,
              std::size_t n) {
    for (std::size_t k = 0; k < in; ++k) {
        double* xk = x + k * n;
        std::size_t j = 0;
        for (; j + 16 <= n; j += 16) {
            __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
            __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
            for (std::size_t i = 0; i < out; ++i) {
                const __m256d wk = _mm256_broadcast_sd(w + i * in + k);
                const double* yi = y + i * n + j;
                a0 = _mm256_fmadd_pd(wk, _mm256_loadu_pd(yi), a0);
                a1 = _mm256_fmadd_pd(wk, _mm256_loadu_pd(yi + 4), a1);
                a2 = _mm256_fmadd_pd(wk, _mm256_loadu_pd(yi + 8), a2);
                a3 = _mm256_fmadd_pd(wk, _mm256_loadu_pd(yi + 12), a3);
            }
            _mm256_storeu_pd(xk + j, a0);
            _mm256_storeu_pd(xk + j + 4, a1);
            _mm256_storeu_pd(xk + j + 8, a2);
            _mm256_storeu_pd(xk + j + 12, a3);
        }
        for (; j + 4 <= n; j += 4) {
            __m256d a = _mm256_setzero_pd();
            for (std::size_t i = 0; i < out; ++i)
                a = _mm256_fmadd_pd(_mm256_broadcast_sd(w + i * in + k),
                                    _mm256_loadu_pd(y + i * n + j), a);
            _mm256_storeu_pd(xk + j, a);
        }
        for (; j < n; ++j) {
            double a = 0.0;
            for (std::size_t i = 0; i < out; ++i) a = std::fma(w[i * in + k], y[i * n + j], a);
            xk[j] = a;
        }
    }
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void outer_acc(const double* y, const double* x, double* g, std::size_t out, std::size_t in,
               std::size_t n) {
    for (std::size_t i = 0; i < out; ++i) {
        const double* yi = y + i * n;
        for (std::size_t k = 0; k < in; ++k) {
            const double* xk = x + k * n;
            __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
            std::size_t j = 0;
            for (; j + 8 <= n; j += 8) {
                a0 = _mm256_fmadd_pd(_mm256_loadu_pd(yi + j), _mm256_loadu_pd(xk + j), a0);
                a1 = _mm256_fmadd_pd(_mm256_loadu_pd(yi + j + 4), _mm256_loadu_pd(xk + j + 4), a1);
            }
            double acc = hsum(_mm256_add_pd(a0, a1));
            for (; j < n; ++j) acc = std::fma(yi[j], xk[j], acc);
            g[i * in + k] += acc;
        }
    }
}

void sine_forward(const double* z, double* h, double* s, double* c, std::size_t rows,
                  std::size_t batch, int channels) {
    const std::size_t stride = batch * static_cast<std::size_t>(channels);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* zr = z + r * stride;
        double* hr = h + r * stride;
        double* sr = s + r * batch;
        double* cr = c + r * batch;
        std::size_t j = 0;
        for (; j + 4 <= batch; j += 4) {
            __m256d sv, cv;
            sincos_pd(_mm256_loadu_pd(zr + j), sv, cv);
            _mm256_storeu_pd(sr + j, sv);
            _mm256_storeu_pd(cr + j, cv);
            _mm256_storeu_pd(hr + j, sv);
            if (channels == 2) {
                _mm256_storeu_pd(hr + batch + j, _mm256_mul_pd(cv, _mm256_loadu_pd(zr + batch + j)));
            } else if (channels == 4) {
                const __m256d zt = _mm256_loadu_pd(zr + batch + j);
                const __m256d zx = _mm256_loadu_pd(zr + 2 * batch + j);
                const __m256d zxx = _mm256_loadu_pd(zr + 3 * batch + j);
                _mm256_storeu_pd(hr + batch + j, _mm256_mul_pd(cv, zt));
                _mm256_storeu_pd(hr + 2 * batch + j, _mm256_mul_pd(cv, zx));
                _mm256_storeu_pd(hr + 3 * batch + j,
                                 _mm256_fnmadd_pd(_mm256_mul_pd(sv, zx), zx, _mm256_mul_pd(cv, zxx)));
            }
        }
        for (; j < batch; ++j) {
            const double sv = std::sin(zr[j]);
            const double cv = std::cos(zr[j]);
            sr[j] = sv;
            cr[j] = cv;
            hr[j] = sv;
            if (channels == 2) {
                hr[batch + j] = cv * zr[batch + j];
            } else if (channels == 4) {
                const double zt = zr[batch + j], zx = zr[2 * batch + j], zxx = zr[3 * batch + j];
                hr[batch + j] = cv * zt;
                hr[2 * batch + j] = cv * zx;
                hr[3 * batch + j] = cv * zxx - sv * zx * zx;
            }
        }
    }
}

void sine_backward(const double* z, const double* s, const double* c, const double* dh, double* dz,
                   std::size_t rows, std::size_t batch, int channels) {
    const std::size_t stride = batch * static_cast<std::size_t>(channels);
    const __m256d two = _mm256_set1_pd(2.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* zr = z + r * stride;
        const double* dhr = dh + r * stride;
        double* dzr = dz + r * stride;
        const double* sr = s + r * batch;
        const double* cr = c + r * batch;
        std::size_t j = 0;
        for (; j + 4 <= batch; j += 4) {
            const __m256d sv = _mm256_loadu_pd(sr + j), cv = _mm256_loadu_pd(cr + j);
            const __m256d hv = _mm256_loadu_pd(dhr + j);
            if (channels == 1) {
                _mm256_storeu_pd(dzr + j, _mm256_mul_pd(hv, cv));
            } else if (channels == 2) {
                const __m256d zx = _mm256_loadu_pd(zr + batch + j);
                const __m256d hx = _mm256_loadu_pd(dhr + batch + j);
                _mm256_storeu_pd(dzr + j,
                                 _mm256_fnmadd_pd(_mm256_mul_pd(sv, hx), zx, _mm256_mul_pd(hv, cv)));
                _mm256_storeu_pd(dzr + batch + j, _mm256_mul_pd(hx, cv));
            } else {
                const __m256d zt = _mm256_loadu_pd(zr + batch + j);
                const __m256d zx = _mm256_loadu_pd(zr + 2 * batch + j);
                const __m256d zxx = _mm256_loadu_pd(zr + 3 * batch + j);
                const __m256d ht = _mm256_loadu_pd(dhr + batch + j);
                const __m256d hx = _mm256_loadu_pd(dhr + 2 * batch + j);
                const __m256d hxx = _mm256_loadu_pd(dhr + 3 * batch + j);
                const __m256d first = _mm256_fmadd_pd(ht, zt, _mm256_mul_pd(hx, zx));
                const __m256d second =
                    _mm256_fmadd_pd(_mm256_mul_pd(cv, zx), zx, _mm256_mul_pd(sv, zxx));
                __m256d dv = _mm256_fnmadd_pd(sv, first, _mm256_mul_pd(hv, cv));
                dv = _mm256_fnmadd_pd(hxx, second, dv);
                _mm256_storeu_pd(dzr + j, dv);
                _mm256_storeu_pd(dzr + batch + j, _mm256_mul_pd(ht, cv));
                _mm256_storeu_pd(dzr + 2 * batch + j,
                                 _mm256_fnmadd_pd(_mm256_mul_pd(two, hxx), _mm256_mul_pd(sv, zx),
                                                  _mm256_mul_pd(hx, cv)));
                _mm256_storeu_pd(dzr + 3 * batch + j, _mm256_mul_pd(hxx, cv));
            }
        }
        for (; j < batch; ++j) {
            const double sv = sr[j], cv = cr[j];
            if (channels == 1) {
                dzr[j] = dhr[j] * cv;
            } else if (channels == 2) {
                const double zx = zr[batch + j], hx = dhr[batch + j];
                dzr[j] = dhr[j] * cv - sv * hx * zx;
                dzr[batch + j] = hx * cv;
            } else {
                const double zt = zr[batch + j], zx = zr[2 * batch + j], zxx = zr[3 * batch + j];
                const double ht = dhr[batch + j], hx = dhr[2 * batch + j], hxx = dhr[3 * batch + j];
                dzr[j] = dhr[j] * cv - sv * (ht * zt + hx * zx) - hxx * (cv * zx * zx + sv * zxx);
                dzr[batch + j] = ht * cv;
                dzr[2 * batch + j] = hx * cv - 2.0 * hxx * sv * zx;
                dzr[3 * batch + j] = hxx * cv;
            }
        }
    }
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable t{Isa::Avx2, matmul, matmul_t, outer_acc, sine_forward, sine_backward};
    return t;
}

}  // namespace nlspinn::kernels::detail
