#include "nlspinn/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlspinn/errors.hpp"

namespace nlspinn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(std::span<const cplx> g) {
    for (const cplx& v : g)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NonFinite("non-finite sample");
}

void check_exponents(double p, double q) {
    if (!(p >= 1.0) || !(q >= 1.0) || !std::isfinite(p) || !std::isfinite(q))
        throw DomainError("j_pq requires finite exponents p, q >= 1");
}

void check_shape(const SpaceTimeGrid& grid, std::size_t samples) {
    if (grid.m() == 0 || grid.n() == 0) throw EmptyGrid("grid has no samples");
    if (samples != grid.size()) throw DomainError("sample count does not match grid");
}

}  // namespace

double holder_conjugate(double r) {
    if (std::isinf(r)) return 1.0;
    if (r == 1.0) return kInf;
    return r / (r - 1.0);
}

AdmissiblePair pair_from_q(double q) {
    if (!(q >= 2.0)) throw DomainError("admissible pairs need q >= 2");
    double p;
    if (std::isinf(q))
        p = 4.0;
    else if (q == 2.0)
        p = kInf;
    else
        p = 4.0 * q / (q - 2.0);
    return {p, q, holder_conjugate(p), holder_conjugate(q)};
}

AdmissiblePair pair_for_alpha(double alpha) { return pair_from_q(alpha + 1.0); }

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
    if (n > 1) v[n - 1] = hi;
    return v;
}

SpaceTimeGrid SpaceTimeGrid::uniform(double R, double T, std::size_t N, std::size_t M,
                                     bool cell_scaling) {
    if (N == 0 || M == 0) throw EmptyGrid("grid sizes must be >= 1");
    if (!(R > 0.0) || !(T >= 0.0)) throw DomainError("grid box must have R > 0, T >= 0");
    SpaceTimeGrid g;
    g.times = linspace(-T, T, M);
    g.points = linspace(-R, R, N);
    g.weights.assign(M * N, 1.0);
    g.space_cell = cell_scaling ? 2.0 * R / static_cast<double>(N) : 1.0 / static_cast<double>(N);
    g.time_cell = cell_scaling && T > 0.0 ? 2.0 * T / static_cast<double>(M) : 1.0 / static_cast<double>(M);
    return g;
}

std::vector<double> SpaceTimeGrid::flat_t() const {
    std::vector<double> out(size());
    for (std::size_t l = 0; l < m(); ++l)
        for (std::size_t j = 0; j < n(); ++j) out[l * n() + j] = times[l];
    return out;
}

std::vector<double> SpaceTimeGrid::flat_x() const {
    std::vector<double> out(size());
    for (std::size_t l = 0; l < m(); ++l)
        for (std::size_t j = 0; j < n(); ++j) out[l * n() + j] = points[j];
    return out;
}

void SpaceTimeGrid::validate() const {
    if (m() == 0 || n() == 0) throw EmptyGrid("grid has no samples");
    if (weights.size() != size()) throw DomainError("weight matrix shape does not match grid");
    for (double w : weights)
        if (!(w >= 0.0 && w <= 1.0)) throw DomainError("grid weights must lie in [0, 1]");
}

double j_h1(std::span<const cplx> f, std::span<const cplx> fx, std::span<const double> weights,
            double cell) {
    if (f.empty()) throw EmptyGrid("j_h1 needs at least one point");
    if (fx.size() != f.size() || weights.size() != f.size())
        throw DomainError("j_h1 inputs differ in length");
    check_finite(f);
    check_finite(fx);
    if (cell <= 0.0) cell = 1.0 / static_cast<double>(f.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) sum += weights[j] * (std::norm(f[j]) + std::norm(fx[j]));
    return std::sqrt(cell * sum);
}

double j_inf_h1(const SpaceTimeGrid& grid, std::span<const cplx> g, std::span<const cplx> gx) {
    check_shape(grid, g.size());
    if (gx.size() != g.size()) throw DomainError("derivative samples do not match grid");
    check_finite(g);
    check_finite(gx);
    double best = 0.0;
    const std::size_t n = grid.n();
    for (std::size_t l = 0; l < grid.m(); ++l) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            sum += grid.weight(l, j) * (std::norm(g[l * n + j]) + std::norm(gx[l * n + j]));
        best = std::max(best, std::sqrt(grid.space_cell * sum));
    }
    return best;
}

double j_pq(const SpaceTimeGrid& grid, std::span<const cplx> g, std::span<const cplx> gx, double p,
            double q, NormMode mode) {
    check_exponents(p, q);
    check_shape(grid, g.size());
    check_finite(g);
    const bool sobolev = mode == NormMode::Sobolev;
    if (sobolev) {
        if (gx.size() != g.size()) throw DomainError("sobolev mode needs derivative samples");
        check_finite(gx);
    }
    const std::size_t n = grid.n();
    double outer = 0.0;
    for (std::size_t l = 0; l < grid.m(); ++l) {
        double inner = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double s = std::pow(std::abs(g[l * n + j]), q);
            if (sobolev) s += std::pow(std::abs(gx[l * n + j]), q);
            inner += grid.weight(l, j) * s;
        }
        outer += std::pow(grid.space_cell * inner, p / q);
    }
    return std::pow(grid.time_cell * outer, 1.0 / p);
}

double j_pq_with_adjoint(const SpaceTimeGrid& grid, std::span<const cplx> g, double p, double q,
                         std::span<cplx> adjoint) {
    check_exponents(p, q);
    check_shape(grid, g.size());
    check_finite(g);
    if (adjoint.size() != g.size()) throw DomainError("adjoint size does not match grid");
    const std::size_t n = grid.n(), m = grid.m();
    std::vector<double> inner(m, 0.0);
    double outer = 0.0;
    for (std::size_t l = 0; l < m; ++l) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += grid.weight(l, j) * std::pow(std::abs(g[l * n + j]), q);
        inner[l] = grid.space_cell * sum;
        outer += std::pow(inner[l], p / q);
    }
    const double value = std::pow(grid.time_cell * outer, 1.0 / p);
    if (value == 0.0) {
        std::fill(adjoint.begin(), adjoint.end(), cplx(std::nan(""), std::nan("")));
        return value;
    }
    // dJ/dg_lj = J^{1-p} tc S_l^{p/q-1} sc w |g|^{q-2} g
    const double lead = std::pow(value, 1.0 - p) * grid.time_cell * grid.space_cell;
    for (std::size_t l = 0; l < m; ++l) {
        if (inner[l] == 0.0) {
            for (std::size_t j = 0; j < n; ++j) adjoint[l * n + j] = 0.0;
            continue;
        }
        const double slice = lead * std::pow(inner[l], p / q - 1.0);
        for (std::size_t j = 0; j < n; ++j) {
            const cplx v = g[l * n + j];
            const double r = std::abs(v);
            adjoint[l * n + j] = r == 0.0 ? cplx(0.0) : slice * grid.weight(l, j) * std::pow(r, q - 2.0) * v;
        }
    }
    return value;
}

std::vector<double> admissible_q_grid(const QGridSpec& spec) {
    if (spec.count == 0) return {};
    if (!(spec.q_min >= 2.0) || spec.q_max < spec.q_min) throw DomainError("q grid must lie in [2, inf)");
    return linspace(spec.q_min, spec.q_max, spec.count);
}

}  // namespace nlspinn
