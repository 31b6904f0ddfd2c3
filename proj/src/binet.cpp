#include "scrollbin/binet.hpp"

namespace scrollbin::binet {

Architecture Architecture::standard(int in_channels) {
    Architecture a;
    a.in_channels = in_channels;
    return a;
}

void Architecture::validate() const {
    if (in_channels != 1 && in_channels != 3) {
        throw PreconditionError("unsupported input channel count " + std::to_string(in_channels) + " (1 or 3)");
    }
    if (encoder_widths.empty() || encoder_widths.size() > 12) throw PreconditionError("encoder depth must be 1..12");
    if (decoder_widths.size() != encoder_widths.size()) {
        throw PreconditionError("decoder and encoder must have the same number of stages");
    }
    if (decoder_widths.back() != 1) throw PreconditionError("final decoder stage must emit one channel");
    for (int w : encoder_widths)
        if (w < 1) throw PreconditionError("encoder widths must be positive");
    for (int w : decoder_widths)
        if (w < 1) throw PreconditionError("decoder widths must be positive");
    if (dropout_stages < 0) throw PreconditionError("dropout stage count must be non-negative");
}

template <typename T>
std::vector<nn::Param<T>*> NetParams<T>::parameters() {
    std::vector<nn::Param<T>*> out;
    const auto add_norm = [&](std::optional<nn::BatchNormParams<T>>& n) {
        if (!n) return;
        out.push_back(&n->gamma);
        out.push_back(&n->beta);
    };
    for (auto& e : encoder) {
        out.push_back(&e.conv.weight);
        out.push_back(&e.conv.bias);
        add_norm(e.norm);
    }
    for (auto& d : decoder) {
        out.push_back(&d.conv.weight);
        out.push_back(&d.conv.bias);
        add_norm(d.norm);
    }
    return out;
}

template <typename T>
std::size_t NetParams<T>::parameter_count() const {
    std::size_t n = 0;
    for (auto* p : const_cast<NetParams*>(this)->parameters()) n += p->value.size();
    return n;
}

template <typename T>
void NetParams<T>::zero_grad() {
    for (auto* p : parameters()) p->grad.zero();
}

template <typename T>
NetParams<T> build_model(const Architecture& arch, std::uint64_t seed) {
    arch.validate();
    Rng rng(seed);
    const auto normal_fill = [&](nn::Tensor<T>& t, double mean) {
        for (auto& v : t.data) v = static_cast<T>(rng.normal(mean, kInitStddev));
    };
    const auto make_norm = [&](int channels) {
        nn::BatchNormParams<T> bn(channels);
        normal_fill(bn.gamma.value, 1.0);
        return bn;
    };

    NetParams<T> p;
    p.in_channels = arch.in_channels;
    const int depth = arch.depth();
    int prev = arch.in_channels;
    for (int i = 0; i < depth; ++i) {
        const int w = arch.encoder_widths[i];
        EncoderStage<T> s{nn::ConvParams<T>(prev, w), std::nullopt};
        normal_fill(s.conv.weight.value, 0.0);
        const bool innermost = i == depth - 1;
        if (i > 0 && (!innermost || arch.bottleneck_norm)) s.norm = make_norm(w);
        p.encoder.push_back(std::move(s));
        prev = w;
    }
    int in = arch.encoder_widths.back();
    for (int j = 0; j < depth; ++j) {
        const int w = arch.decoder_widths[j];
        const bool final_stage = j == depth - 1;
        DecoderStage<T> s{nn::DeconvParams<T>(in, w), std::nullopt, !final_stage && j < arch.dropout_stages};
        normal_fill(s.conv.weight.value, 0.0);
        if (!final_stage) {
            s.norm = make_norm(w);
            in = w + arch.encoder_widths[depth - 2 - j];
        }
        p.decoder.push_back(std::move(s));
    }
    return p;
}

namespace {

template <typename To, typename From>
nn::Param<To> convert_param(const nn::Param<From>& p) {
    nn::Param<To> out;
    out.value = nn::tensor_cast<To>(p.value);
    out.grad = nn::Tensor<To>(p.value.shape);
    return out;
}

template <typename To, typename From>
std::optional<nn::BatchNormParams<To>> convert_norm(const std::optional<nn::BatchNormParams<From>>& n) {
    if (!n) return std::nullopt;
    nn::BatchNormParams<To> out;
    out.gamma = convert_param<To>(n->gamma);
    out.beta = convert_param<To>(n->beta);
    out.running_mean = nn::tensor_cast<To>(n->running_mean);
    out.running_var = nn::tensor_cast<To>(n->running_var);
    out.momentum = static_cast<To>(n->momentum);
    out.eps = static_cast<To>(n->eps);
    return out;
}

void check_input(const nn::Shape& s, int channels, int size) {
    if (s.c != channels || s.h != size || s.w != size || s.n < 1) {
        throw ShapeError("network expects (N," + std::to_string(channels) + "," + std::to_string(size) + "," +
                         std::to_string(size) + ") input, got " + s.str());
    }
}

constexpr double kDropoutRate = 0.5;

}  // namespace

template <typename To, typename From>
NetParams<To> convert(const NetParams<From>& p) {
    NetParams<To> out;
    out.in_channels = p.in_channels;
    out.step = p.step;
    for (const auto& e : p.encoder) {
        EncoderStage<To> s;
        s.conv.weight = convert_param<To>(e.conv.weight);
        s.conv.bias = convert_param<To>(e.conv.bias);
        s.norm = convert_norm<To>(e.norm);
        out.encoder.push_back(std::move(s));
    }
    for (const auto& d : p.decoder) {
        DecoderStage<To> s;
        s.conv.weight = convert_param<To>(d.conv.weight);
        s.conv.bias = convert_param<To>(d.conv.bias);
        s.norm = convert_norm<To>(d.norm);
        s.dropout = d.dropout;
        out.decoder.push_back(std::move(s));
    }
    return out;
}

template <typename T>
Tensor<T> forward_train(NetParams<T>& params, const Tensor<T>& x, Rng& rng, ForwardTrace<T>& trace, bool dropout) {
    const int depth = params.depth();
    check_input(x.shape, params.in_channels, params.input_size());
    trace.input = x;
    trace.encoder.assign(depth, {});
    trace.decoder.assign(depth, {});

    const T slope = T(0.2);
    const Tensor<T>* in = &trace.input;
    for (int i = 0; i < depth; ++i) {
        auto& st = params.encoder[i];
        auto& tr = trace.encoder[i];
        tr.pre_activation = nn::conv2d_forward(*in, st.conv);
        if (st.norm) tr.pre_activation = nn::batchnorm_forward(tr.pre_activation, *st.norm, Mode::Train, &tr.norm);
        tr.output = nn::leaky_relu(tr.pre_activation, slope);
        in = &tr.output;
    }

    Tensor<T> u = trace.encoder[depth - 1].output;
    for (int j = 0; j < depth; ++j) {
        auto& st = params.decoder[j];
        auto& tr = trace.decoder[j];
        tr.input = std::move(u);
        Tensor<T> z = nn::deconv2d_forward(tr.input, st.conv);
        if (j == depth - 1) {
            tr.output = nn::tanh_forward(z);
            break;
        }
        if (st.norm) z = nn::batchnorm_forward(z, *st.norm, Mode::Train, &tr.norm);
        const Mode drop_mode = (st.dropout && dropout) ? Mode::Train : Mode::Eval;
        tr.pre_activation = nn::dropout_forward(z, kDropoutRate, drop_mode, rng, tr.keep);
        tr.output = nn::leaky_relu(tr.pre_activation, slope);
        u = nn::concat_channels(tr.output, trace.encoder[depth - 2 - j].output);
    }
    return trace.decoder[depth - 1].output;
}

template <typename T>
Tensor<T> forward_eval(const NetParams<T>& params, const Tensor<T>& x) {
    const int depth = params.depth();
    check_input(x.shape, params.in_channels, params.input_size());
    const T slope = T(0.2);
    std::vector<Tensor<T>> skips(depth);
    const Tensor<T>* in = &x;
    for (int i = 0; i < depth; ++i) {
        const auto& st = params.encoder[i];
        Tensor<T> z = nn::conv2d_forward(*in, st.conv);
        if (st.norm) z = nn::batchnorm_eval(z, *st.norm);
        skips[i] = nn::leaky_relu(z, slope);
        in = &skips[i];
    }
    Tensor<T> u = skips[depth - 1];
    for (int j = 0; j < depth; ++j) {
        const auto& st = params.decoder[j];
        Tensor<T> z = nn::deconv2d_forward(u, st.conv);
        if (j == depth - 1) return nn::tanh_forward(z);
        if (st.norm) z = nn::batchnorm_eval(z, *st.norm);
        u = nn::concat_channels(nn::leaky_relu(z, slope), skips[depth - 2 - j]);
    }
    return u;  // unreachable: depth >= 1
}

template <typename T>
void backward(NetParams<T>& params, const ForwardTrace<T>& trace, const Tensor<T>& grad_out) {
    const int depth = params.depth();
    if (static_cast<int>(trace.decoder.size()) != depth) throw PreconditionError("backward: trace does not match model");
    const T slope = T(0.2);
    std::vector<Tensor<T>> enc_grad(depth);
    const auto accumulate = [](Tensor<T>& acc, const Tensor<T>& g) {
        if (acc.size() == 0) {
            acc = g;
            return;
        }
        for (std::size_t k = 0; k < acc.size(); ++k) acc.data[k] += g.data[k];
    };

    Tensor<T> grad_h;  // gradient with respect to decoder stage j's output
    for (int j = depth - 1; j >= 0; --j) {
        auto& st = params.decoder[j];
        const auto& tr = trace.decoder[j];
        Tensor<T> gz;
        if (j == depth - 1) {
            gz = nn::tanh_backward(tr.output, grad_out);
        } else {
            gz = nn::dropout_backward(tr.keep, nn::leaky_relu_backward(tr.pre_activation, grad_h, slope));
            if (st.norm) gz = nn::batchnorm_backward(tr.norm, *st.norm, gz, Mode::Train);
        }
        Tensor<T> grad_in = nn::deconv2d_backward(tr.input, st.conv, gz);
        if (j == 0) {
            accumulate(enc_grad[depth - 1], grad_in);
        } else {
            const int h_channels = params.decoder[j - 1].conv.out_channels();
            auto [gh, gskip] = nn::split_channels(grad_in, h_channels);
            grad_h = std::move(gh);
            accumulate(enc_grad[depth - 1 - j], gskip);
        }
    }

    for (int i = depth - 1; i >= 0; --i) {
        auto& st = params.encoder[i];
        const auto& tr = trace.encoder[i];
        Tensor<T> gz = nn::leaky_relu_backward(tr.pre_activation, enc_grad[i], slope);
        if (st.norm) gz = nn::batchnorm_backward(tr.norm, *st.norm, gz, Mode::Train);
        const Tensor<T>& input = i == 0 ? trace.input : trace.encoder[i - 1].output;
        Tensor<T> grad_in = nn::conv2d_backward(input, st.conv, gz, i > 0);
        if (i > 0) accumulate(enc_grad[i - 1], grad_in);
    }
}

namespace {

template <typename Img>
Tensor<float> normalize_impl(const Img& patch) {
    constexpr int C = Img::channels;
    Tensor<float> t(1, C, patch.height, patch.width);
    const std::size_t plane = t.shape.plane();
    for (std::size_t i = 0; i < plane; ++i)
        for (int c = 0; c < C; ++c) t.data[c * plane + i] = static_cast<float>(patch.data[i * C + c] / 127.5 - 1.0);
    return t;
}

}  // namespace

Tensor<float> normalize_input(const GrayImage& patch) { return normalize_impl(patch); }
Tensor<float> normalize_input(const RgbImage& patch) { return normalize_impl(patch); }

Tensor<float> mask_to_target(const BinaryMask& mask) {
    Tensor<float> t(1, 1, mask.height, mask.width);
    for (std::size_t i = 0; i < mask.ink.size(); ++i) t.data[i] = mask.ink[i] ? -1.0f : 1.0f;
    return t;
}

BinaryMask denormalize_output(const Tensor<float>& out, float threshold) {
    if (out.shape.n != 1 || out.shape.c != 1) throw ShapeError("denormalize_output expects (1,1,H,W), got " + out.shape.str());
    BinaryMask m(out.shape.w, out.shape.h);
    for (std::size_t i = 0; i < out.size(); ++i) m.ink[i] = out.data[i] < threshold;
    return m;
}

#define SCROLLBIN_INSTANTIATE(T)                                                                              \
    template struct NetParams<T>;                                                                             \
    template NetParams<T> build_model<T>(const Architecture&, std::uint64_t);                                 \
    template Tensor<T> forward_train(NetParams<T>&, const Tensor<T>&, Rng&, ForwardTrace<T>&, bool);           \
    template Tensor<T> forward_eval(const NetParams<T>&, const Tensor<T>&);                                   \
    template void backward(NetParams<T>&, const ForwardTrace<T>&, const Tensor<T>&);

SCROLLBIN_INSTANTIATE(float)
SCROLLBIN_INSTANTIATE(double)
#undef SCROLLBIN_INSTANTIATE

template NetParams<double> convert(const NetParams<float>&);
template NetParams<float> convert(const NetParams<double>&);
template NetParams<float> convert(const NetParams<float>&);

}  // namespace scrollbin::binet
