#include "scrollbin/layers.hpp"

#include <Eigen/Core>
#include <cmath>

namespace scrollbin::nn {

namespace {

template <typename T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<Matrix<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const Matrix<T>>;

// Unfolds one image (C, H, W) into (C*16, H/2 * W/2) columns for the 4x4 /
// stride 2 / pad 1 geometry.
template <typename T>
void im2col(const T* img, int channels, int h, int w, T* cols) {
    const int oh = h / kStride, ow = w / kStride;
    for (int c = 0; c < channels; ++c) {
        const T* plane = img + static_cast<std::size_t>(c) * h * w;
        for (int ky = 0; ky < kKernel; ++ky) {
            for (int kx = 0; kx < kKernel; ++kx) {
                T* row = cols + ((static_cast<std::size_t>(c) * kKernel + ky) * kKernel + kx) * oh * ow;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * kStride - kPad + ky;
                    T* dst = row + static_cast<std::size_t>(oy) * ow;
                    if (iy < 0 || iy >= h) {
                        std::fill(dst, dst + ow, T(0));
                        continue;
                    }
                    const T* src = plane + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * kStride - kPad + kx;
                        dst[ox] = (ix >= 0 && ix < w) ? src[ix] : T(0);
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatters columns back, accumulating into img.
template <typename T>
void col2im(const T* cols, int channels, int h, int w, T* img) {
    const int oh = h / kStride, ow = w / kStride;
    for (int c = 0; c < channels; ++c) {
        T* plane = img + static_cast<std::size_t>(c) * h * w;
        for (int ky = 0; ky < kKernel; ++ky) {
            for (int kx = 0; kx < kKernel; ++kx) {
                const T* row = cols + ((static_cast<std::size_t>(c) * kKernel + ky) * kKernel + kx) * oh * ow;
                for (int oy = 0; oy < oh; ++oy) {
                    const int iy = oy * kStride - kPad + ky;
                    if (iy < 0 || iy >= h) continue;
                    const T* src = row + static_cast<std::size_t>(oy) * ow;
                    T* dst = plane + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < ow; ++ox) {
                        const int ix = ox * kStride - kPad + kx;
                        if (ix >= 0 && ix < w) dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

void check_even(const Shape& s, const char* what) {
    if (s.h < 2 || s.w < 2 || s.h % 2 != 0 || s.w % 2 != 0) {
        throw ShapeError(std::string(what) + ": spatial dims must be even and >= 2, got " + s.str());
    }
}

template <typename T>
void add_bias(Tensor<T>& out, const Tensor<T>& bias) {
    const std::size_t plane = out.shape.plane();
    for (int n = 0; n < out.shape.n; ++n)
        for (int c = 0; c < out.shape.c; ++c) {
            T* p = out.ptr() + (static_cast<std::size_t>(n) * out.shape.c + c) * plane;
            const T b = bias.data[c];
            for (std::size_t i = 0; i < plane; ++i) p[i] += b;
        }
}

template <typename T>
void accumulate_bias_grad(const Tensor<T>& grad_out, Tensor<T>& bias_grad) {
    const std::size_t plane = grad_out.shape.plane();
    for (int c = 0; c < grad_out.shape.c; ++c) {
        double s = 0.0;
        for (int n = 0; n < grad_out.shape.n; ++n) {
            const T* p = grad_out.ptr() + (static_cast<std::size_t>(n) * grad_out.shape.c + c) * plane;
            for (std::size_t i = 0; i < plane; ++i) s += p[i];
        }
        bias_grad.data[c] += static_cast<T>(s);
    }
}

}  // namespace

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const ConvParams<T>& p) {
    if (x.shape.c != p.in_channels()) {
        throw ShapeError("conv2d: input has " + std::to_string(x.shape.c) + " channels, weights expect " +
                         std::to_string(p.in_channels()));
    }
    check_even(x.shape, "conv2d");
    const int oc = p.out_channels();
    const int oh = x.shape.h / kStride, ow = x.shape.w / kStride;
    const int k = x.shape.c * kKernel * kKernel;
    const int positions = oh * ow;
    Tensor<T> out(x.shape.n, oc, oh, ow);
    std::vector<T> cols(static_cast<std::size_t>(k) * positions);
    ConstMatMap<T> weight(p.weight.value.ptr(), oc, k);
    for (int n = 0; n < x.shape.n; ++n) {
        im2col(x.ptr() + x.index(n, 0, 0, 0), x.shape.c, x.shape.h, x.shape.w, cols.data());
        MatMap<T> o(out.ptr() + out.index(n, 0, 0, 0), oc, positions);
        o.noalias() = weight * ConstMatMap<T>(cols.data(), k, positions);
    }
    add_bias(out, p.bias.value);
    return out;
}

template <typename T>
Tensor<T> conv2d_backward(const Tensor<T>& x, ConvParams<T>& p, const Tensor<T>& grad_out, bool need_input_grad) {
    const int oc = p.out_channels();
    const int oh = x.shape.h / kStride, ow = x.shape.w / kStride;
    require_shape(grad_out.shape, Shape{x.shape.n, oc, oh, ow}, "conv2d_backward");
    const int k = x.shape.c * kKernel * kKernel;
    const int positions = oh * ow;
    std::vector<T> cols(static_cast<std::size_t>(k) * positions);
    ConstMatMap<T> weight(p.weight.value.ptr(), oc, k);
    MatMap<T> weight_grad(p.weight.grad.ptr(), oc, k);
    Tensor<T> grad_x;
    if (need_input_grad) grad_x = Tensor<T>(x.shape);
    for (int n = 0; n < x.shape.n; ++n) {
        ConstMatMap<T> g(grad_out.ptr() + grad_out.index(n, 0, 0, 0), oc, positions);
        im2col(x.ptr() + x.index(n, 0, 0, 0), x.shape.c, x.shape.h, x.shape.w, cols.data());
        weight_grad.noalias() += g * ConstMatMap<T>(cols.data(), k, positions).transpose();
        if (need_input_grad) {
            MatMap<T>(cols.data(), k, positions).noalias() = weight.transpose() * g;
            col2im(cols.data(), x.shape.c, x.shape.h, x.shape.w, grad_x.ptr() + grad_x.index(n, 0, 0, 0));
        }
    }
    accumulate_bias_grad(grad_out, p.bias.grad);
    return grad_x;
}

template <typename T>
Tensor<T> deconv2d_forward(const Tensor<T>& x, const DeconvParams<T>& p) {
    if (x.shape.c != p.in_channels()) {
        throw ShapeError("deconv2d: input has " + std::to_string(x.shape.c) + " channels, weights expect " +
                         std::to_string(p.in_channels()));
    }
    const int ic = p.in_channels(), oc = p.out_channels();
    const int oh = x.shape.h * kStride, ow = x.shape.w * kStride;
    const int k = oc * kKernel * kKernel;
    const int positions = x.shape.h * x.shape.w;
    Tensor<T> out(x.shape.n, oc, oh, ow);
    std::vector<T> cols(static_cast<std::size_t>(k) * positions);
    ConstMatMap<T> weight(p.weight.value.ptr(), ic, k);
    for (int n = 0; n < x.shape.n; ++n) {
        MatMap<T>(cols.data(), k, positions).noalias() =
            weight.transpose() * ConstMatMap<T>(x.ptr() + x.index(n, 0, 0, 0), ic, positions);
        col2im(cols.data(), oc, oh, ow, out.ptr() + out.index(n, 0, 0, 0));
    }
    add_bias(out, p.bias.value);
    return out;
}

template <typename T>
Tensor<T> deconv2d_backward(const Tensor<T>& x, DeconvParams<T>& p, const Tensor<T>& grad_out, bool need_input_grad) {
    const int ic = p.in_channels(), oc = p.out_channels();
    require_shape(grad_out.shape, Shape{x.shape.n, oc, x.shape.h * kStride, x.shape.w * kStride},
                  "deconv2d_backward");
    const int k = oc * kKernel * kKernel;
    const int positions = x.shape.h * x.shape.w;
    std::vector<T> cols(static_cast<std::size_t>(k) * positions);
    ConstMatMap<T> weight(p.weight.value.ptr(), ic, k);
    MatMap<T> weight_grad(p.weight.grad.ptr(), ic, k);
    Tensor<T> grad_x;
    if (need_input_grad) grad_x = Tensor<T>(x.shape);
    for (int n = 0; n < x.shape.n; ++n) {
        im2col(grad_out.ptr() + grad_out.index(n, 0, 0, 0), oc, grad_out.shape.h, grad_out.shape.w, cols.data());
        ConstMatMap<T> gcols(cols.data(), k, positions);
        ConstMatMap<T> xm(x.ptr() + x.index(n, 0, 0, 0), ic, positions);
        weight_grad.noalias() += xm * gcols.transpose();
        if (need_input_grad) {
            MatMap<T>(grad_x.ptr() + grad_x.index(n, 0, 0, 0), ic, positions).noalias() = weight * gcols;
        }
    }
    accumulate_bias_grad(grad_out, p.bias.grad);
    return grad_x;
}

template <typename T>
Tensor<T> batchnorm_forward(const Tensor<T>& x, BatchNormParams<T>& p, Mode mode, BatchNormCache<T>* cache) {
    const int channels = x.shape.c;
    if (channels != p.channels()) throw ShapeError("batchnorm: channel count mismatch");
    const std::size_t plane = x.shape.plane();
    const std::size_t count = plane * x.shape.n;
    if (mode == Mode::Train && count < 2) {
        throw PreconditionError("batchnorm: train mode needs more than one element per channel");
    }
    Tensor<T> out(x.shape);
    if (cache) {
        cache->xhat = Tensor<T>(x.shape);
        cache->inv_std.assign(channels, T(0));
    }
    for (int c = 0; c < channels; ++c) {
        double mean, var;
        if (mode == Mode::Train) {
            double s = 0.0;
            for (int n = 0; n < x.shape.n; ++n) {
                const T* px = x.ptr() + x.index(n, c, 0, 0);
                for (std::size_t i = 0; i < plane; ++i) s += px[i];
            }
            mean = s / count;
            double sq = 0.0;
            for (int n = 0; n < x.shape.n; ++n) {
                const T* px = x.ptr() + x.index(n, c, 0, 0);
                for (std::size_t i = 0; i < plane; ++i) sq += (px[i] - mean) * (px[i] - mean);
            }
            var = sq / count;
            const double unbiased = sq / (count - 1);
            p.running_mean.data[c] = static_cast<T>((1.0 - p.momentum) * p.running_mean.data[c] + p.momentum * mean);
            p.running_var.data[c] = static_cast<T>((1.0 - p.momentum) * p.running_var.data[c] + p.momentum * unbiased);
        } else {
            mean = p.running_mean.data[c];
            var = p.running_var.data[c];
        }
        const T inv_std = static_cast<T>(1.0 / std::sqrt(var + p.eps));
        const T gamma = p.gamma.value.data[c], beta = p.beta.value.data[c];
        const T m = static_cast<T>(mean);
        for (int n = 0; n < x.shape.n; ++n) {
            const std::size_t base = x.index(n, c, 0, 0);
            for (std::size_t i = 0; i < plane; ++i) {
                const T xhat = (x.data[base + i] - m) * inv_std;
                out.data[base + i] = gamma * xhat + beta;
                if (cache) cache->xhat.data[base + i] = xhat;
            }
        }
        if (cache) cache->inv_std[c] = inv_std;
    }
    return out;
}

template <typename T>
Tensor<T> batchnorm_eval(const Tensor<T>& x, const BatchNormParams<T>& p) {
    if (x.shape.c != p.channels()) throw ShapeError("batchnorm: channel count mismatch");
    const std::size_t plane = x.shape.plane();
    Tensor<T> out(x.shape);
    for (int c = 0; c < x.shape.c; ++c) {
        const T inv_std = static_cast<T>(1.0 / std::sqrt(static_cast<double>(p.running_var.data[c]) + p.eps));
        const T scale = p.gamma.value.data[c] * inv_std;
        const T shift = p.beta.value.data[c] - p.running_mean.data[c] * scale;
        for (int n = 0; n < x.shape.n; ++n) {
            const std::size_t base = x.index(n, c, 0, 0);
            for (std::size_t i = 0; i < plane; ++i) out.data[base + i] = x.data[base + i] * scale + shift;
        }
    }
    return out;
}

template <typename T>
Tensor<T> batchnorm_backward(const BatchNormCache<T>& cache, BatchNormParams<T>& p, const Tensor<T>& grad_out,
                             Mode mode) {
    require_shape(grad_out.shape, cache.xhat.shape, "batchnorm_backward");
    const auto& s = grad_out.shape;
    const std::size_t plane = s.plane();
    const double count = static_cast<double>(plane * s.n);
    Tensor<T> grad_x(s);
    for (int c = 0; c < s.c; ++c) {
        double sum_g = 0.0, sum_gx = 0.0;
        for (int n = 0; n < s.n; ++n) {
            const std::size_t base = grad_out.index(n, c, 0, 0);
            for (std::size_t i = 0; i < plane; ++i) {
                sum_g += grad_out.data[base + i];
                sum_gx += grad_out.data[base + i] * cache.xhat.data[base + i];
            }
        }
        p.beta.grad.data[c] += static_cast<T>(sum_g);
        p.gamma.grad.data[c] += static_cast<T>(sum_gx);
        const T scale = p.gamma.value.data[c] * cache.inv_std[c];
        const T mean_g = static_cast<T>(sum_g / count), mean_gx = static_cast<T>(sum_gx / count);
        for (int n = 0; n < s.n; ++n) {
            const std::size_t base = grad_out.index(n, c, 0, 0);
            for (std::size_t i = 0; i < plane; ++i) {
                const T g = grad_out.data[base + i];
                grad_x.data[base + i] = mode == Mode::Train
                                            ? scale * (g - mean_g - cache.xhat.data[base + i] * mean_gx)
                                            : scale * g;
            }
        }
    }
    return grad_x;
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope) {
    Tensor<T> out(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) out.data[i] = x.data[i] > 0 ? x.data[i] : slope * x.data[i];
    return out;
}

template <typename T>
Tensor<T> leaky_relu_backward(const Tensor<T>& x, const Tensor<T>& grad_out, T slope) {
    require_shape(x.shape, grad_out.shape, "leaky_relu_backward");
    Tensor<T> g(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) g.data[i] = x.data[i] > 0 ? grad_out.data[i] : slope * grad_out.data[i];
    return g;
}

template <typename T>
Tensor<T> tanh_forward(const Tensor<T>& x) {
    Tensor<T> out(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) out.data[i] = std::tanh(x.data[i]);
    return out;
}

template <typename T>
Tensor<T> tanh_backward(const Tensor<T>& y, const Tensor<T>& grad_out) {
    require_shape(y.shape, grad_out.shape, "tanh_backward");
    Tensor<T> g(y.shape);
    for (std::size_t i = 0; i < y.size(); ++i) g.data[i] = grad_out.data[i] * (T(1) - y.data[i] * y.data[i]);
    return g;
}

template <typename T>
Tensor<T> dropout_forward(const Tensor<T>& x, double rate, Mode mode, Rng& rng, std::vector<T>& keep_scale) {
    if (!(rate >= 0.0 && rate < 1.0)) throw PreconditionError("dropout rate must be in [0, 1)");
    if (mode == Mode::Eval || rate == 0.0) {
        keep_scale.assign(x.size(), T(1));
        return x;
    }
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    keep_scale.resize(x.size());
    Tensor<T> out(x.shape);
    for (std::size_t i = 0; i < x.size(); ++i) {
        keep_scale[i] = rng.uniform() < rate ? T(0) : scale;
        out.data[i] = x.data[i] * keep_scale[i];
    }
    return out;
}

template <typename T>
Tensor<T> dropout_backward(const std::vector<T>& keep_scale, const Tensor<T>& grad_out) {
    if (keep_scale.size() != grad_out.size()) throw ShapeError("dropout_backward: mask size mismatch");
    Tensor<T> g(grad_out.shape);
    for (std::size_t i = 0; i < g.size(); ++i) g.data[i] = grad_out.data[i] * keep_scale[i];
    return g;
}

template <typename T>
Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.shape.n != b.shape.n || a.shape.h != b.shape.h || a.shape.w != b.shape.w) {
        throw ShapeError("concat_channels: " + a.shape.str() + " vs " + b.shape.str());
    }
    Tensor<T> out(a.shape.n, a.shape.c + b.shape.c, a.shape.h, a.shape.w);
    const std::size_t sa = a.shape.c * a.shape.plane(), sb = b.shape.c * b.shape.plane();
    for (int n = 0; n < a.shape.n; ++n) {
        T* dst = out.ptr() + out.index(n, 0, 0, 0);
        std::copy(a.ptr() + n * sa, a.ptr() + (n + 1) * sa, dst);
        std::copy(b.ptr() + n * sb, b.ptr() + (n + 1) * sb, dst + sa);
    }
    return out;
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> split_channels(const Tensor<T>& t, int first_channels) {
    if (first_channels < 0 || first_channels > t.shape.c) throw ShapeError("split_channels: bad split point");
    Tensor<T> a(t.shape.n, first_channels, t.shape.h, t.shape.w);
    Tensor<T> b(t.shape.n, t.shape.c - first_channels, t.shape.h, t.shape.w);
    const std::size_t sa = a.shape.c * a.shape.plane(), sb = b.shape.c * b.shape.plane();
    for (int n = 0; n < t.shape.n; ++n) {
        const T* src = t.ptr() + t.index(n, 0, 0, 0);
        std::copy(src, src + sa, a.ptr() + n * sa);
        std::copy(src + sa, src + sa + sb, b.ptr() + n * sb);
    }
    return {std::move(a), std::move(b)};
}

template <typename T>
LossResult<T> l1_loss(const Tensor<T>& pred, const Tensor<T>& target) {
    require_shape(pred.shape, target.shape, "l1_loss");
    const std::size_t n = pred.size();
    if (n == 0) throw ShapeError("l1_loss: empty tensors");
    LossResult<T> r{T(0), Tensor<T>(pred.shape)};
    double sum = 0.0;
    const T inv = static_cast<T>(1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const T d = pred.data[i] - target.data[i];
        sum += std::abs(static_cast<double>(d));
        r.grad.data[i] = d > 0 ? inv : (d < 0 ? -inv : T(0));
    }
    r.loss = static_cast<T>(sum / static_cast<double>(n));
    return r;
}

#define SCROLLBIN_INSTANTIATE(T)                                                                                   \
    template Tensor<T> conv2d_forward(const Tensor<T>&, const ConvParams<T>&);                                   \
    template Tensor<T> conv2d_backward(const Tensor<T>&, ConvParams<T>&, const Tensor<T>&, bool);                \
    template Tensor<T> deconv2d_forward(const Tensor<T>&, const DeconvParams<T>&);                               \
    template Tensor<T> deconv2d_backward(const Tensor<T>&, DeconvParams<T>&, const Tensor<T>&, bool);            \
    template Tensor<T> batchnorm_forward(const Tensor<T>&, BatchNormParams<T>&, Mode, BatchNormCache<T>*);       \
    template Tensor<T> batchnorm_eval(const Tensor<T>&, const BatchNormParams<T>&);                              \
    template Tensor<T> batchnorm_backward(const BatchNormCache<T>&, BatchNormParams<T>&, const Tensor<T>&, Mode); \
    template Tensor<T> leaky_relu(const Tensor<T>&, T);                                                          \
    template Tensor<T> leaky_relu_backward(const Tensor<T>&, const Tensor<T>&, T);                               \
    template Tensor<T> tanh_forward(const Tensor<T>&);                                                           \
    template Tensor<T> tanh_backward(const Tensor<T>&, const Tensor<T>&);                                        \
    template Tensor<T> dropout_forward(const Tensor<T>&, double, Mode, Rng&, std::vector<T>&);                   \
    template Tensor<T> dropout_backward(const std::vector<T>&, const Tensor<T>&);                                \
    template Tensor<T> concat_channels(const Tensor<T>&, const Tensor<T>&);                                      \
    template std::pair<Tensor<T>, Tensor<T>> split_channels(const Tensor<T>&, int);                              \
    template LossResult<T> l1_loss(const Tensor<T>&, const Tensor<T>&);

SCROLLBIN_INSTANTIATE(float)
SCROLLBIN_INSTANTIATE(double)

#undef SCROLLBIN_INSTANTIATE

}  // namespace scrollbin::nn
