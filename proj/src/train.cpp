#include <algorithm>
#include <numeric>

#include "scrollbin/adam.hpp"
#include "scrollbin/binet.hpp"

namespace scrollbin::binet {

namespace {

Tensor<float> stack(std::span<const Sample> data, std::span<const std::size_t> idx, bool targets) {
    const auto& first = targets ? data[idx[0]].target : data[idx[0]].input;
    Tensor<float> out(static_cast<int>(idx.size()), first.shape.c, first.shape.h, first.shape.w);
    const std::size_t per = first.size();
    for (std::size_t b = 0; b < idx.size(); ++b) {
        const auto& t = targets ? data[idx[b]].target : data[idx[b]].input;
        std::copy(t.data.begin(), t.data.end(), out.data.begin() + b * per);
    }
    return out;
}

void check_dataset(std::span<const Sample> data, int channels, int size) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& s = data[i];
        if (s.input.shape != nn::Shape{1, channels, size, size}) {
            throw ShapeError("sample " + std::to_string(i) + " input " + s.input.shape.str() + " does not match model (1," +
                             std::to_string(channels) + "," + std::to_string(size) + "," + std::to_string(size) + ")");
        }
        if (s.target.shape != nn::Shape{1, 1, size, size}) {
            throw ShapeError("sample " + std::to_string(i) + " target has shape " + s.target.shape.str());
        }
    }
}

}  // namespace

TrainResult train(std::span<const Sample> data, const TrainConfig& cfg, std::optional<NetParams<float>> init,
                  const ProgressFn& progress) {
    if (data.empty()) throw PreconditionError("training set is empty");
    if (cfg.epochs < 1) throw PreconditionError("epochs must be >= 1");
    if (!(cfg.lr > 0.0)) throw PreconditionError("learning rate must be positive");
    if (cfg.batch_size < 1) throw PreconditionError("batch size must be >= 1");

    const int channels = data.front().input.shape.c;
    TrainResult result;
    if (init) {
        if (init->in_channels != channels) {
            throw ShapeError("initial weights expect " + std::to_string(init->in_channels) +
                             " input channels, dataset has " + std::to_string(channels));
        }
        result.params = std::move(*init);
    } else {
        Architecture arch = cfg.architecture.value_or(Architecture::standard(channels));
        arch.in_channels = channels;
        if (!cfg.architecture) arch.bottleneck_norm = cfg.batch_size > 1;
        result.params = build_model<float>(arch, cfg.seed);
    }
    auto& params = result.params;
    check_dataset(data, channels, params.input_size());

    nn::Adam<float> adam(params.parameters(), nn::AdamConfig{cfg.lr, cfg.beta1, cfg.beta2, 1e-8});
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    ForwardTrace<float> trace;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng.engine());
        double loss_sum = 0.0;
        int batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const std::span<const std::size_t> idx(order.data() + start, end - start);
            const auto x = stack(data, idx, false);
            const auto y = stack(data, idx, true);
            adam.zero_grad();
            const auto out = forward_train(params, x, rng, trace, cfg.dropout);
            const auto loss = nn::l1_loss(out, y);
            backward(params, trace, loss.grad);
            adam.step();
            ++params.step;
            loss_sum += loss.loss;
            ++batches;
        }
        result.loss_history.push_back(loss_sum / batches);
        if (progress) progress({epoch + 1, result.loss_history.back(), params.step});
    }
    params.zero_grad();
    return result;
}

double evaluate_loss(const NetParams<float>& params, std::span<const Sample> data) {
    if (data.empty()) throw PreconditionError("evaluation set is empty");
    check_dataset(data, params.in_channels, params.input_size());
    double sum = 0.0;
    for (const auto& s : data) sum += nn::l1_loss(forward_eval(params, s.input), s.target).loss;
    return sum / static_cast<double>(data.size());
}

}  // namespace scrollbin::binet
