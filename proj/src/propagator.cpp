#include "nlspinn/propagator.hpp"

#include <cmath>
#include <numbers>

#include "nlspinn/errors.hpp"
#include "nlspinn/network.hpp"
#include "nlspinn/solutions.hpp"

namespace nlspinn {
namespace {

long mode_index(std::size_t k, std::size_t K) {
    const long kk = static_cast<long>(k), n = static_cast<long>(K);
    return kk < (n + 1) / 2 ? kk : kk - n;
}

}  // namespace

std::vector<double> periodic_grid(double R, std::size_t K) {
    std::vector<double> x(K);
    const double dx = 2.0 * R / static_cast<double>(K);
    for (std::size_t k = 0; k < K; ++k) x[k] = -R + dx * static_cast<double>(k);
    return x;
}

std::vector<double> grid_frequencies(double R, std::size_t K) {
    std::vector<double> xi(K);
    for (std::size_t k = 0; k < K; ++k)
        xi[k] = std::numbers::pi * static_cast<double>(mode_index(k, K)) / R;
    return xi;
}

SpectralField analyze(std::span<const double> points, std::span<const cplx> samples) {
    const std::size_t K = points.size();
    if (K < 2) throw NonUniformGrid("need at least two samples");
    if (samples.size() != K) throw DomainError("sample count does not match grid");
    const double R = -points[0];
    if (!(R > 0.0)) throw NonUniformGrid("grid must start at -R < 0");
    const double dx = 2.0 * R / static_cast<double>(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double expect = -R + dx * static_cast<double>(k);
        if (std::abs(points[k] - expect) > 1e-9 * R) throw NonUniformGrid("points are not a periodic grid on [-R, R)");
    }
    SpectralField f;
    f.grid_points.assign(points.begin(), points.end());
    f.frequencies = grid_frequencies(R, K);
    f.coefficients.assign(K, cplx(0.0));
    for (std::size_t m = 0; m < K; ++m) {
        cplx acc(0.0);
        for (std::size_t k = 0; k < K; ++k) acc += samples[k] * std::polar(1.0, -f.frequencies[m] * points[k]);
        f.coefficients[m] = acc;
    }
    return f;
}

std::vector<cplx> synthesize(const SpectralField& field) {
    std::vector<cplx> out(field.size());
    for (std::size_t k = 0; k < field.size(); ++k) out[k] = evolve_at(field, 0.0, field.grid_points[k]);
    return out;
}

cplx evolve_at(const SpectralField& field, double t, double x) {
    cplx acc(0.0);
    for (std::size_t m = 0; m < field.size(); ++m) {
        const double xi = field.frequencies[m];
        acc += field.coefficients[m] * std::polar(1.0, xi * x - t * xi * xi);
    }
    return acc / static_cast<double>(field.size());
}

cplx evolve_dx_at(const SpectralField& field, double t, double x) {
    cplx acc(0.0);
    for (std::size_t m = 0; m < field.size(); ++m) {
        const double xi = field.frequencies[m];
        acc += cplx(0.0, xi) * field.coefficients[m] * std::polar(1.0, xi * x - t * xi * xi);
    }
    return acc / static_cast<double>(field.size());
}

double high_frequency_fraction(const SpectralField& field) {
    const std::size_t K = field.size();
    double total = 0.0, high = 0.0;
    for (std::size_t m = 0; m < K; ++m) {
        const double e = std::norm(field.coefficients[m]);
        total += e;
        if (4 * static_cast<std::size_t>(std::abs(mode_index(m, K))) >= K) high += e;
    }
    return total > 0.0 ? high / total : 0.0;
}

std::vector<cplx> initial_mismatch(const ReferenceSolution& u0, const NetworkParams& net, double R,
                                   std::size_t K) {
    const std::vector<double> x = periodic_grid(R, K);
    const std::vector<double> t(K, 0.0);
    const FieldBatch field = evaluate(net, t, x, JetMode::Value);
    std::vector<cplx> out(K);
    for (std::size_t k = 0; k < K; ++k) out[k] = u0.value(0.0, x[k]) - field.u(k);
    return out;
}

std::vector<cplx> propagated_mismatch_table(const ReferenceSolution& u0, const NetworkParams& net,
                                            const SpaceTimeGrid& grid, double R, std::size_t K) {
    const SpectralField f = analyze(periodic_grid(R, K), initial_mismatch(u0, net, R, K));
    std::vector<cplx> table(grid.size());
    for (std::size_t l = 0; l < grid.m(); ++l)
        for (std::size_t j = 0; j < grid.n(); ++j)
            table[l * grid.n() + j] = evolve_at(f, grid.times[l], grid.points[j]);
    return table;
}

PropagationOperator::PropagationOperator(const SpaceTimeGrid& grid, double R, std::size_t K)
    : K_(K), rows_(grid.size()), points_(periodic_grid(R, K)), matrix_(grid.size() * K) {
    if (K < 2) throw NonUniformGrid("need at least two samples");
    const std::vector<double> xi = grid_frequencies(R, K);
    // analysis[m][k] = e^{-i xi_m x_k}
    std::vector<cplx> analysis(K * K);
    for (std::size_t m = 0; m < K; ++m)
        for (std::size_t k = 0; k < K; ++k) analysis[m * K + k] = std::polar(1.0, -xi[m] * points_[k]);
    std::vector<cplx> synth(K);
    const double inv_k = 1.0 / static_cast<double>(K);
    for (std::size_t l = 0; l < grid.m(); ++l) {
        const double t = grid.times[l];
        for (std::size_t j = 0; j < grid.n(); ++j) {
            for (std::size_t m = 0; m < K; ++m)
                synth[m] = inv_k * std::polar(1.0, xi[m] * grid.points[j] - t * xi[m] * xi[m]);
            cplx* row = matrix_.data() + (l * grid.n() + j) * K;
            for (std::size_t k = 0; k < K; ++k) row[k] = 0.0;
            for (std::size_t m = 0; m < K; ++m) {
                const cplx s = synth[m];
                const cplx* a = analysis.data() + m * K;
                for (std::size_t k = 0; k < K; ++k) row[k] += s * a[k];
            }
        }
    }
}

void PropagationOperator::apply(std::span<const cplx> samples, std::span<cplx> out) const {
    if (samples.size() != K_ || out.size() != rows_) throw DomainError("propagation operator shape mismatch");
    for (std::size_t r = 0; r < rows_; ++r) {
        const cplx* row = matrix_.data() + r * K_;
        cplx acc(0.0);
        for (std::size_t k = 0; k < K_; ++k) acc += row[k] * samples[k];
        out[r] = acc;
    }
}

void PropagationOperator::apply_adjoint(std::span<const cplx> in, std::span<cplx> out) const {
    if (in.size() != rows_ || out.size() != K_) throw DomainError("propagation operator shape mismatch");
    for (std::size_t k = 0; k < K_; ++k) out[k] = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
        const cplx* row = matrix_.data() + r * K_;
        const cplx v = in[r];
        for (std::size_t k = 0; k < K_; ++k) out[k] += std::conj(row[k]) * v;
    }
}

}  // namespace nlspinn
