#include "nlspinn/network.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

#include "nlspinn/errors.hpp"
#include "nlspinn/kernels.hpp"

namespace nlspinn {

std::size_t Architecture::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < layer_count(); ++l) n += fan_out(l) * fan_in(l) + fan_out(l);
    return n;
}

NetworkParams::NetworkParams(Architecture arch, InputScaling scaling)
    : arch_(arch), scaling_(scaling), flat_(arch.parameter_count(), 0.0) {}

NetworkParams::NetworkParams(Architecture arch, std::vector<double> flat, InputScaling scaling)
    : arch_(arch), scaling_(scaling), flat_(std::move(flat)) {
    if (flat_.size() != arch_.parameter_count())
        throw DomainError("parameter vector length does not match architecture");
}

std::size_t NetworkParams::weight_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l) off += arch_.fan_out(l) * arch_.fan_in(l) + arch_.fan_out(l);
    return off;
}

std::span<const double> NetworkParams::weights(std::size_t layer) const {
    return std::span<const double>(flat_).subspan(weight_offset(layer),
                                                  arch_.fan_out(layer) * arch_.fan_in(layer));
}
std::span<double> NetworkParams::weights(std::size_t layer) {
    return std::span<double>(flat_).subspan(weight_offset(layer),
                                            arch_.fan_out(layer) * arch_.fan_in(layer));
}
std::span<const double> NetworkParams::bias(std::size_t layer) const {
    return std::span<const double>(flat_).subspan(
        weight_offset(layer) + arch_.fan_out(layer) * arch_.fan_in(layer), arch_.fan_out(layer));
}
std::span<double> NetworkParams::bias(std::size_t layer) {
    return std::span<double>(flat_).subspan(
        weight_offset(layer) + arch_.fan_out(layer) * arch_.fan_in(layer), arch_.fan_out(layer));
}

NetworkParams init_glorot(const Architecture& arch, std::uint64_t seed, InputScaling scaling) {
    if (arch.hidden_width == 0 || arch.input_dim != 2 || arch.output_dim != 2)
        throw DomainError("network must map 2 inputs to 2 outputs through non-empty layers");
    NetworkParams params(arch, scaling);
    std::mt19937_64 gen(seed);
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(arch.fan_in(l) + arch.fan_out(l)));
        for (double& w : params.weights(l)) {
            // 53 random bits -> [0, 1); portable across standard libraries.
            const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
            w = limit * (2.0 * u - 1.0);
        }
    }
    return params;
}

Jet2 forward(const NetworkParams& params, double t, double x) {
    const Architecture& arch = params.architecture();
    const InputJets in = seed_input(t, x);
    std::vector<RealJet> a{params.scaling().t_scale * in.t, params.scaling().x_scale * in.x};
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        const auto w = params.weights(l);
        const auto b = params.bias(l);
        const std::size_t nin = arch.fan_in(l), nout = arch.fan_out(l);
        std::vector<RealJet> z(nout);
        for (std::size_t i = 0; i < nout; ++i) {
            RealJet acc(b[i]);
            for (std::size_t k = 0; k < nin; ++k) acc += w[i * nin + k] * a[k];
            z[i] = l + 1 < arch.layer_count() ? sin(acc) : acc;
        }
        a = std::move(z);
    }
    return {a[0], a[1]};
}

std::complex<double> value(const NetworkParams& params, double t, double x) {
    const Architecture& arch = params.architecture();
    std::vector<double> a{params.scaling().t_scale * t, params.scaling().x_scale * x};
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        const auto w = params.weights(l);
        const auto b = params.bias(l);
        const std::size_t nin = arch.fan_in(l), nout = arch.fan_out(l);
        std::vector<double> z(nout);
        for (std::size_t i = 0; i < nout; ++i) {
            double acc = b[i];
            for (std::size_t k = 0; k < nin; ++k) acc += w[i * nin + k] * a[k];
            z[i] = l + 1 < arch.layer_count() ? std::sin(acc) : acc;
        }
        a = std::move(z);
    }
    return {a[0], a[1]};
}

FieldBatch::FieldBatch(JetMode m, std::size_t n)
    : mode(m),
      points(n),
      re(n * static_cast<std::size_t>(channel_count(m)), 0.0),
      im(n * static_cast<std::size_t>(channel_count(m)), 0.0) {}

BatchEvaluator::BatchEvaluator(const NetworkParams& params, std::span<const double> t,
                               std::span<const double> x, JetMode mode)
    : params_(&params), mode_(mode), field_(mode, t.size()) {
    if (t.size() != x.size()) throw DomainError("t and x batches differ in length");
    const auto& k = kernels::active();
    const Architecture& arch = params.architecture();
    const std::size_t layers = arch.layer_count();
    const std::size_t channels = static_cast<std::size_t>(channel_count(mode));
    const double st = params.scaling().t_scale, sx = params.scaling().x_scale;

    for (std::size_t begin = 0; begin < t.size(); begin += kChunk) {
        Chunk ch;
        ch.begin = begin;
        ch.size = std::min(kChunk, t.size() - begin);
        const std::size_t nb = ch.size;
        const std::size_t row = channels * nb;

        ch.input.assign(2 * row, 0.0);
        double* rt = ch.input.data();
        double* rx = ch.input.data() + row;
        for (std::size_t j = 0; j < nb; ++j) {
            rt[j] = st * t[begin + j];
            rx[j] = sx * x[begin + j];
        }
        if (mode == JetMode::Full) {
            for (std::size_t j = 0; j < nb; ++j) {
                rt[nb + j] = st;      // d/dt of t
                rx[2 * nb + j] = sx;  // d/dx of x
            }
        } else if (mode == JetMode::ValueX) {
            for (std::size_t j = 0; j < nb; ++j) rx[nb + j] = sx;
        }

        ch.pre.resize(layers);
        ch.post.resize(layers - 1);
        ch.sin_cache.resize(layers - 1);
        ch.cos_cache.resize(layers - 1);
        const double* a = ch.input.data();
        for (std::size_t l = 0; l < layers; ++l) {
            const std::size_t nin = arch.fan_in(l), nout = arch.fan_out(l);
            auto& z = ch.pre[l];
            z.resize(nout * row);
            k.matmul(params.weights(l).data(), a, z.data(), nout, nin, row);
            const auto b = params.bias(l);
            for (std::size_t i = 0; i < nout; ++i) {
                double* zi = z.data() + i * row;
                for (std::size_t j = 0; j < nb; ++j) zi[j] += b[i];
            }
            if (l + 1 < layers) {
                ch.post[l].resize(nout * row);
                ch.sin_cache[l].resize(nout * nb);
                ch.cos_cache[l].resize(nout * nb);
                k.sine_forward(z.data(), ch.post[l].data(), ch.sin_cache[l].data(),
                               ch.cos_cache[l].data(), nout, nb, static_cast<int>(channels));
                a = ch.post[l].data();
            }
        }
        const auto& out = ch.pre[layers - 1];
        for (std::size_t c = 0; c < channels; ++c) {
            for (std::size_t j = 0; j < nb; ++j) {
                field_.re[c * field_.points + begin + j] = out[c * nb + j];
                field_.im[c * field_.points + begin + j] = out[row + c * nb + j];
            }
        }
        chunks_.push_back(std::move(ch));
    }
}

void BatchEvaluator::backward(const FieldBatch& adjoint, std::span<double> grad) const {
    if (adjoint.mode != mode_ || adjoint.points != field_.points)
        throw DomainError("adjoint batch does not match the forward batch");
    const NetworkParams& params = *params_;
    if (grad.size() != params.size()) throw DomainError("gradient length mismatch");
    const auto& k = kernels::active();
    const Architecture& arch = params.architecture();
    const std::size_t layers = arch.layer_count();
    const std::size_t channels = static_cast<std::size_t>(channel_count(mode_));

    // Offsets of each layer's weights and bias inside grad.
    std::vector<std::size_t> woff(layers), boff(layers);
    {
        std::size_t off = 0;
        for (std::size_t l = 0; l < layers; ++l) {
            woff[l] = off;
            off += arch.fan_out(l) * arch.fan_in(l);
            boff[l] = off;
            off += arch.fan_out(l);
        }
    }

    std::vector<double> dz, dh;
    for (const Chunk& ch : chunks_) {
        const std::size_t nb = ch.size;
        const std::size_t row = channels * nb;
        dz.assign(arch.output_dim * row, 0.0);
        for (std::size_t c = 0; c < channels; ++c) {
            for (std::size_t j = 0; j < nb; ++j) {
                dz[c * nb + j] = adjoint.re[c * adjoint.points + ch.begin + j];
                dz[row + c * nb + j] = adjoint.im[c * adjoint.points + ch.begin + j];
            }
        }
        for (std::size_t l = layers; l-- > 0;) {
            const std::size_t nin = arch.fan_in(l), nout = arch.fan_out(l);
            const double* a = l == 0 ? ch.input.data() : ch.post[l - 1].data();
            k.outer_acc(dz.data(), a, grad.data() + woff[l], nout, nin, row);
            for (std::size_t i = 0; i < nout; ++i) {
                const double* dzi = dz.data() + i * row;
                double s = 0.0;
                for (std::size_t j = 0; j < nb; ++j) s += dzi[j];
                grad[boff[l] + i] += s;
            }
            if (l == 0) break;
            dh.resize(nin * row);
            k.matmul_t(params.weights(l).data(), dz.data(), dh.data(), nout, nin, row);
            dz.resize(nin * row);
            k.sine_backward(ch.pre[l - 1].data(), ch.sin_cache[l - 1].data(),
                            ch.cos_cache[l - 1].data(), dh.data(), dz.data(), nin, nb,
                            static_cast<int>(channels));
        }
    }
}

FieldBatch evaluate(const NetworkParams& params, std::span<const double> t, std::span<const double> x,
                    JetMode mode) {
    return BatchEvaluator(params, t, x, mode).field();
}

void save_checkpoint(const NetworkParams& params, std::uint64_t seed, const std::filesystem::path& bin,
                     const std::filesystem::path& sidecar) {
    static_assert(std::endian::native == std::endian::little, "checkpoint writer assumes little-endian");
    {
        std::ofstream out(bin, std::ios::binary);
        if (!out) throw Error("cannot write " + bin.string());
        out.write(reinterpret_cast<const char*>(params.flat().data()),
                  static_cast<std::streamsize>(params.size() * sizeof(double)));
    }
    const Architecture& a = params.architecture();
    nlohmann::json j;
    j["architecture"] = {{"input_dim", a.input_dim},
                         {"hidden_layers", a.hidden_layers},
                         {"hidden_width", a.hidden_width},
                         {"output_dim", a.output_dim}};
    j["input_scaling"] = {{"t_scale", params.scaling().t_scale}, {"x_scale", params.scaling().x_scale}};
    j["seed"] = seed;
    j["parameter_count"] = params.size();
    j["dtype"] = "float64-le";
    j["order"] = "per layer from input: weights row-major (out x in), then bias (out)";
    std::ofstream out(sidecar);
    if (!out) throw Error("cannot write " + sidecar.string());
    out << j.dump(2) << '\n';
}

NetworkParams load_checkpoint(const std::filesystem::path& bin, const std::filesystem::path& sidecar) {
    std::ifstream js(sidecar);
    if (!js) throw Error("cannot read " + sidecar.string());
    const nlohmann::json j = nlohmann::json::parse(js);
    Architecture a;
    a.input_dim = j.at("architecture").at("input_dim");
    a.hidden_layers = j.at("architecture").at("hidden_layers");
    a.hidden_width = j.at("architecture").at("hidden_width");
    a.output_dim = j.at("architecture").at("output_dim");
    InputScaling s;
    if (j.contains("input_scaling")) {
        s.t_scale = j["input_scaling"].at("t_scale");
        s.x_scale = j["input_scaling"].at("x_scale");
    }
    std::vector<double> flat(a.parameter_count());
    std::ifstream in(bin, std::ios::binary);
    if (!in) throw Error("cannot read " + bin.string());
    in.read(reinterpret_cast<char*>(flat.data()), static_cast<std::streamsize>(flat.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(flat.size() * sizeof(double)))
        throw Error("checkpoint " + bin.string() + " is truncated");
    return NetworkParams(a, std::move(flat), s);
}

}  // namespace nlspinn
