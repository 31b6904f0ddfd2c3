#pragma once

#include <utility>
#include <vector>

#include "scrollbin/rng.hpp"
#include "scrollbin/tensor.hpp"

namespace scrollbin::nn {

// Every convolution in the network is a 4x4 kernel with stride 2 and padding 1,
// which halves (conv) or doubles (transposed conv) the spatial extent.
inline constexpr int kKernel = 4;
inline constexpr int kStride = 2;
inline constexpr int kPad = 1;

enum class Mode { Train, Eval };

/// weight (out_ch, in_ch, 4, 4), bias (out_ch).
template <typename T>
struct ConvParams {
    Param<T> weight;
    Param<T> bias;

    ConvParams() = default;
    ConvParams(int in_ch, int out_ch) : weight(Shape{out_ch, in_ch, kKernel, kKernel}), bias(Shape{1, out_ch, 1, 1}) {}

    int in_channels() const { return weight.value.shape.c; }
    int out_channels() const { return weight.value.shape.n; }
    bool operator==(const ConvParams&) const = default;
};

/// Transposed convolution. weight (in_ch, out_ch, 4, 4) so that the same
/// tensor read as ConvParams(out_ch -> in_ch) is the adjoint convolution.
template <typename T>
struct DeconvParams {
    Param<T> weight;
    Param<T> bias;

    DeconvParams() = default;
    DeconvParams(int in_ch, int out_ch) : weight(Shape{in_ch, out_ch, kKernel, kKernel}), bias(Shape{1, out_ch, 1, 1}) {}

    int in_channels() const { return weight.value.shape.n; }
    int out_channels() const { return weight.value.shape.c; }
    bool operator==(const DeconvParams&) const = default;
};

template <typename T>
struct BatchNormParams {
    Param<T> gamma;
    Param<T> beta;
    Tensor<T> running_mean;
    Tensor<T> running_var;
    T momentum = T(0.1);
    T eps = T(1e-5);

    BatchNormParams() = default;
    explicit BatchNormParams(int channels)
        : gamma(Shape{1, channels, 1, 1}),
          beta(Shape{1, channels, 1, 1}),
          running_mean(Shape{1, channels, 1, 1}, T(0)),
          running_var(Shape{1, channels, 1, 1}, T(1)) {
        std::fill(gamma.value.data.begin(), gamma.value.data.end(), T(1));
    }

    int channels() const { return gamma.value.shape.c; }
    bool operator==(const BatchNormParams& o) const {
        return gamma == o.gamma && beta == o.beta && running_mean == o.running_mean && running_var == o.running_var;
    }
};

template <typename T>
struct BatchNormCache {
    Tensor<T> xhat;
    std::vector<T> inv_std;
};

// Convolution. grad functions accumulate into the parameters' grad buffers and
// return the gradient with respect to the input (empty when not requested).
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const ConvParams<T>& p);
template <typename T>
Tensor<T> conv2d_backward(const Tensor<T>& x, ConvParams<T>& p, const Tensor<T>& grad_out, bool need_input_grad = true);

template <typename T>
Tensor<T> deconv2d_forward(const Tensor<T>& x, const DeconvParams<T>& p);
template <typename T>
Tensor<T> deconv2d_backward(const Tensor<T>& x, DeconvParams<T>& p, const Tensor<T>& grad_out,
                            bool need_input_grad = true);

/// Train mode normalizes by per-channel batch statistics and updates the
/// running estimates; eval mode uses the running estimates.
template <typename T>
Tensor<T> batchnorm_forward(const Tensor<T>& x, BatchNormParams<T>& p, Mode mode, BatchNormCache<T>* cache = nullptr);
/// Eval-mode normalization that leaves the parameters untouched.
template <typename T>
Tensor<T> batchnorm_eval(const Tensor<T>& x, const BatchNormParams<T>& p);
template <typename T>
Tensor<T> batchnorm_backward(const BatchNormCache<T>& cache, BatchNormParams<T>& p, const Tensor<T>& grad_out,
                             Mode mode);

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope = T(0.2));
template <typename T>
Tensor<T> leaky_relu_backward(const Tensor<T>& x, const Tensor<T>& grad_out, T slope = T(0.2));

template <typename T>
Tensor<T> tanh_forward(const Tensor<T>& x);
/// Takes the forward output y; d tanh = 1 - y^2.
template <typename T>
Tensor<T> tanh_backward(const Tensor<T>& y, const Tensor<T>& grad_out);

/// Inverted dropout. `keep_scale` receives 0 or 1/(1-rate) per element for
/// the backward pass; in eval mode or with rate 0 the input passes through.
template <typename T>
Tensor<T> dropout_forward(const Tensor<T>& x, double rate, Mode mode, Rng& rng, std::vector<T>& keep_scale);
template <typename T>
Tensor<T> dropout_backward(const std::vector<T>& keep_scale, const Tensor<T>& grad_out);

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);
/// Splits along channels at `first_channels`; the backward of concat.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> split_channels(const Tensor<T>& t, int first_channels);

template <typename T>
struct LossResult {
    T loss;
    Tensor<T> grad;
};

/// Mean absolute error and its subgradient (sign(0) = 0).
template <typename T>
LossResult<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& target);

}  // namespace scrollbin::nn
