#include "nlspinn/kernels.hpp"

#include <cmath>

namespace nlspinn::kernels {
namespace {

void matmul(const double* w, const double* x, double* y, std::size_t out, std::size_t in,
            std::size_t n) {
    for (std::size_t i = 0; i < out; ++i) {
        double* yi = y + i * n;
        for (std::size_t j = 0; j < n; ++j) yi[j] = 0.0;
        for (std::size_t k = 0; k < in; ++k) {
            const double wik = w[i * in + k];
            const double* xk = x + k * n;
            for (std::size_t j = 0; j < n; ++j) yi[j] = std::fma(wik, xk[j], yi[j]);
        }
    }
}

void matmul_t(const double* w, const double* y, double* x, std::size_t out, std::size_t in,
              std::size_t n) {
    for (std::size_t k = 0; k < in; ++k) {
        double* xk = x + k * n;
        for (std::size_t j = 0; j < n; ++j) xk[j] = 0.0;
        for (std::size_t i = 0; i < out; ++i) {
            const double wik = w[i * in + k];
            const double* yi = y + i * n;
            for (std::size_t j = 0; j < n; ++j) xk[j] = std::fma(wik, yi[j], xk[j]);
        }
    }
}

void outer_acc(const double* y, const double* x, double* g, std::size_t out, std::size_t in,
               std::size_t n) {
    for (std::size_t i = 0; i < out; ++i) {
        const double* yi = y + i * n;
        for (std::size_t k = 0; k < in; ++k) {
            const double* xk = x + k * n;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc = std::fma(yi[j], xk[j], acc);
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
        for (std::size_t j = 0; j < batch; ++j) {
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
    for (std::size_t r = 0; r < rows; ++r) {
        const double* zr = z + r * stride;
        const double* dhr = dh + r * stride;
        double* dzr = dz + r * stride;
        const double* sr = s + r * batch;
        const double* cr = c + r * batch;
        for (std::size_t j = 0; j < batch; ++j) {
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

const KernelTable& scalar_table() {
    static const KernelTable t{Isa::Scalar, matmul, matmul_t, outer_acc, sine_forward,
                               sine_backward};
    return t;
}

}  // namespace nlspinn::kernels
