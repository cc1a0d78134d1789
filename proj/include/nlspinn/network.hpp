#pragma once

// Fully connected sine network (t, x) -> (Re u, Im u).
//
// Flat parameter order, layer by layer from the input: the weight matrix in
// row-major order (out x in) followed by the bias vector (out). Hidden layers
// apply sin component-wise; the output layer is affine.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nlspinn/jets.hpp"

namespace nlspinn {

struct Architecture {
    std::size_t input_dim = 2;
    std::size_t hidden_layers = 4;
    std::size_t hidden_width = 20;
    std::size_t output_dim = 2;

    std::size_t layer_count() const { return hidden_layers + 1; }
    std::size_t fan_in(std::size_t layer) const { return layer == 0 ? input_dim : hidden_width; }
    std::size_t fan_out(std::size_t layer) const {
        return layer == hidden_layers ? output_dim : hidden_width;
    }
    std::size_t parameter_count() const;

    bool operator==(const Architecture&) const = default;
};

// Optional affine pre-scaling of the inputs: the first layer sees
// (t * t_scale, x * x_scale).
struct InputScaling {
    double t_scale = 1.0;
    double x_scale = 1.0;

    bool operator==(const InputScaling&) const = default;
};

class NetworkParams {
public:
    NetworkParams() = default;
    explicit NetworkParams(Architecture arch, InputScaling scaling = {});
    NetworkParams(Architecture arch, std::vector<double> flat, InputScaling scaling = {});

    const Architecture& architecture() const { return arch_; }
    const InputScaling& scaling() const { return scaling_; }
    std::size_t size() const { return flat_.size(); }

    std::span<const double> flat() const { return flat_; }
    std::span<double> flat() { return flat_; }

    std::span<const double> weights(std::size_t layer) const;
    std::span<double> weights(std::size_t layer);
    std::span<const double> bias(std::size_t layer) const;
    std::span<double> bias(std::size_t layer);

    bool operator==(const NetworkParams&) const = default;

private:
    std::size_t weight_offset(std::size_t layer) const;

    Architecture arch_{};
    InputScaling scaling_{};
    std::vector<double> flat_;
};

// Glorot-uniform weights, zero biases. Deterministic in the seed.
NetworkParams init_glorot(const Architecture& arch, std::uint64_t seed, InputScaling scaling = {});

// Single-point reference evaluation with full second-order jets.
Jet2 forward(const NetworkParams& params, double t, double x);
std::complex<double> value(const NetworkParams& params, double t, double x);

enum class JetMode : int { Value = 1, ValueX = 2, Full = 4 };

inline int channel_count(JetMode mode) { return static_cast<int>(mode); }

// Network outputs over a batch of points. re/im hold channel_count(mode)
// consecutive blocks of `points` values: value, then (for Full) d/dt, then
// d/dx, then (for Full) d2/dx2.
struct FieldBatch {
    JetMode mode = JetMode::Value;
    std::size_t points = 0;
    std::vector<double> re;
    std::vector<double> im;

    FieldBatch() = default;
    FieldBatch(JetMode m, std::size_t n);

    std::size_t channel_offset(int channel) const { return static_cast<std::size_t>(channel) * points; }
    // Channel indices for the current mode; -1 when absent.
    int t_channel() const { return mode == JetMode::Full ? 1 : -1; }
    int x_channel() const { return mode == JetMode::Full ? 2 : (mode == JetMode::ValueX ? 1 : -1); }
    int xx_channel() const { return mode == JetMode::Full ? 3 : -1; }

    std::complex<double> u(std::size_t i) const { return {re[i], im[i]}; }
    std::complex<double> at(int channel, std::size_t i) const {
        return {re[channel_offset(channel) + i], im[channel_offset(channel) + i]};
    }
};

// Batched forward pass that keeps its activations for a reverse sweep over
// the parameters.
class BatchEvaluator {
public:
    BatchEvaluator(const NetworkParams& params, std::span<const double> t, std::span<const double> x,
                   JetMode mode);

    const FieldBatch& field() const { return field_; }

    // grad += d(sum_i <adjoint_i, field_i>) / d(params), where the pairing
    // runs over every channel of re and im.
    void backward(const FieldBatch& adjoint, std::span<double> grad) const;

    static constexpr std::size_t kChunk = 256;

private:
    struct Chunk {
        std::size_t begin = 0;
        std::size_t size = 0;
        std::vector<double> input;                    // input_dim x C x size
        std::vector<std::vector<double>> pre;         // per layer: out x C x size
        std::vector<std::vector<double>> post;        // per hidden layer: out x C x size
        std::vector<std::vector<double>> sin_cache;   // per hidden layer: out x size
        std::vector<std::vector<double>> cos_cache;
    };

    const NetworkParams* params_;
    JetMode mode_;
    FieldBatch field_;
    std::vector<Chunk> chunks_;
};

// Forward-only batched evaluation.
FieldBatch evaluate(const NetworkParams& params, std::span<const double> t, std::span<const double> x,
                    JetMode mode);

// Checkpoint: <stem>.bin (little-endian float64 in flat order) and
// <stem>.json (architecture, scaling, seed, parameter count).
void save_checkpoint(const NetworkParams& params, std::uint64_t seed, const std::filesystem::path& bin,
                     const std::filesystem::path& sidecar);
NetworkParams load_checkpoint(const std::filesystem::path& bin, const std::filesystem::path& sidecar);

}  // namespace nlspinn
