#pragma once

#include <cstdint>
#include <functional>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "scrollbin/image.hpp"
#include "scrollbin/layers.hpp"
#include "scrollbin/tiling.hpp"

namespace scrollbin::binet {

using nn::Mode;
using nn::Tensor;

/// Channel ladder of the encoder-decoder. Each encoder stage halves the
/// resolution, each decoder stage doubles it; decoder stage j < depth-1 is
/// concatenated with encoder output depth-2-j before the next stage.
struct Architecture {
    int in_channels = 1;
    std::vector<int> encoder_widths{64, 128, 256, 512, 512, 512, 512, 512};
    std::vector<int> decoder_widths{512, 512, 512, 512, 256, 128, 64, 1};
    int dropout_stages = 3;
    // Batch norm on the 1x1 bottleneck is only defined for batches > 1.
    bool bottleneck_norm = false;

    /// The full 256x256 network.
    static Architecture standard(int in_channels);

    int depth() const { return static_cast<int>(encoder_widths.size()); }
    int input_size() const { return 1 << depth(); }
    void validate() const;
};

template <typename T>
struct EncoderStage {
    nn::ConvParams<T> conv;
    std::optional<nn::BatchNormParams<T>> norm;
    bool operator==(const EncoderStage&) const = default;
};

template <typename T>
struct DecoderStage {
    nn::DeconvParams<T> conv;
    std::optional<nn::BatchNormParams<T>> norm;
    bool dropout = false;
    bool operator==(const DecoderStage&) const = default;
};

template <typename T>
struct NetParams {
    int in_channels = 1;
    std::vector<EncoderStage<T>> encoder;
    std::vector<DecoderStage<T>> decoder;
    std::uint64_t step = 0;

    int depth() const { return static_cast<int>(encoder.size()); }
    int input_size() const { return 1 << depth(); }

    /// Learnable tensors in a fixed order (the order of the weights file).
    std::vector<nn::Param<T>*> parameters();
    std::size_t parameter_count() const;
    void zero_grad();

    bool operator==(const NetParams&) const = default;
};

inline constexpr double kInitStddev = 0.02;

/// Conv weights ~ N(0, 0.02), biases 0, batch-norm gamma ~ N(1, 0.02), beta 0,
/// running statistics (0, 1).
template <typename T = float>
NetParams<T> build_model(const Architecture& arch, std::uint64_t seed);

inline NetParams<float> build_model(int in_channels, std::uint64_t seed) {
    return build_model<float>(Architecture::standard(in_channels), seed);
}

template <typename To, typename From>
NetParams<To> convert(const NetParams<From>& p);

/// Activations kept by a training-mode forward pass for backward().
template <typename T>
struct ForwardTrace {
    struct Encoder {
        Tensor<T> pre_activation;
        Tensor<T> output;
        nn::BatchNormCache<T> norm;
    };
    struct Decoder {
        Tensor<T> input;
        Tensor<T> pre_activation;
        Tensor<T> output;
        nn::BatchNormCache<T> norm;
        std::vector<T> keep;
    };
    Tensor<T> input;
    std::vector<Encoder> encoder;
    std::vector<Decoder> decoder;
};

/// Training-mode pass: batch statistics (running stats updated) and, when
/// `dropout` is set, dropout masks drawn from `rng`.
template <typename T>
Tensor<T> forward_train(NetParams<T>& params, const Tensor<T>& x, Rng& rng, ForwardTrace<T>& trace,
                        bool dropout = true);

/// Eval-mode pass: running statistics, no dropout. Pure in (params, x).
template <typename T>
Tensor<T> forward_eval(const NetParams<T>& params, const Tensor<T>& x);

/// Accumulates parameter gradients for d loss / d output = grad_out.
template <typename T>
void backward(NetParams<T>& params, const ForwardTrace<T>& trace, const Tensor<T>& grad_out);

// Pixel <-> network value mappings: v -> v/127.5 - 1, ink -> -1, background -> +1.

Tensor<float> normalize_input(const GrayImage& patch);
Tensor<float> normalize_input(const RgbImage& patch);
Tensor<float> mask_to_target(const BinaryMask& mask);
/// Pixel is ink iff the network value is below `threshold`.
BinaryMask denormalize_output(const Tensor<float>& out, float threshold = 0.0f);

struct Sample {
    Tensor<float> input;   // (1, C, S, S)
    Tensor<float> target;  // (1, 1, S, S)
};

struct TrainConfig {
    int epochs = 200;
    double lr = 0.0002;
    double beta1 = 0.5;
    double beta2 = 0.999;
    std::uint64_t seed = 42;
    int batch_size = 1;
    bool dropout = true;
    // Fresh models use the standard ladder for the data's channel count
    // unless an architecture is given here.
    std::optional<Architecture> architecture;
};

struct TrainResult {
    NetParams<float> params;
    std::vector<double> loss_history;  // mean training L1 per epoch
};

struct EpochReport {
    int epoch;
    double loss;
    std::uint64_t step;
};

using ProgressFn = std::function<void(const EpochReport&)>;

/// Minimizes mean L1 with Adam. `init` warm-starts from existing weights and
/// continues their step counter; otherwise a fresh model is built from the seed.
TrainResult train(std::span<const Sample> data, const TrainConfig& cfg, std::optional<NetParams<float>> init = {},
                  const ProgressFn& progress = {});

/// Mean eval-mode L1 over a sample set.
double evaluate_loss(const NetParams<float>& params, std::span<const Sample> data);

/// Binarizes a single network-sized patch.
BinaryMask binarize_patch(const NetParams<float>& params, const GrayImage& patch);
BinaryMask binarize_patch(const NetParams<float>& params, const RgbImage& patch);

/// Tiles, runs eval-mode inference per patch (on `threads` workers) and
/// reassembles a mask of the input's dimensions.
BinaryMask binarize_image(const NetParams<float>& params, const GrayImage& img, int threads = 1,
                          PadMode pad = PadMode::Replicate);
BinaryMask binarize_image(const NetParams<float>& params, const RgbImage& img, int threads = 1,
                          PadMode pad = PadMode::Replicate);

// Weights file: "BNET", u32 version, u32 in_channels, u64 step, u32 tensor count,
// then per tensor u16 name length, name, u8 rank, u32 dims[rank], f32 data.
// All integers and floats little-endian.
inline constexpr std::uint32_t kWeightsVersion = 1;

std::vector<std::uint8_t> encode_weights(const NetParams<float>& params);
NetParams<float> decode_weights(std::span<const std::uint8_t> bytes);
void save_weights(const NetParams<float>& params, const std::filesystem::path& path);
NetParams<float> load_weights(const std::filesystem::path& path);

}  // namespace scrollbin::binet
