#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "scrollbin/tensor.hpp"

namespace scrollbin::nn {

struct AdamConfig {
    double lr = 0.0002;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First and second moment estimates for one parameter tensor.
template <typename T>
struct AdamMoments {
    std::vector<T> m;
    std::vector<T> v;
};

/// One bias-corrected Adam update of `value` in place. `t` is the 1-based
/// number of updates applied to these moments, including this one.
template <typename T>
void adam_update(std::span<T> value, std::span<const T> grad, AdamMoments<T>& state, const AdamConfig& cfg,
                 std::int64_t t) {
    if (t < 1) throw PreconditionError("adam step index must be >= 1");
    if (grad.size() != value.size()) throw ShapeError("adam: gradient size mismatch");
    if (state.m.size() != value.size()) {
        state.m.assign(value.size(), T(0));
        state.v.assign(value.size(), T(0));
    }
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
    const T step = static_cast<T>(cfg.lr / c1);
    const T inv_c2 = static_cast<T>(1.0 / c2);
    const T eps = static_cast<T>(cfg.eps);
    for (std::size_t i = 0; i < value.size(); ++i) {
        const T g = grad[i];
        state.m[i] = b1 * state.m[i] + (T(1) - b1) * g;
        state.v[i] = b2 * state.v[i] + (T(1) - b2) * g * g;
        value[i] -= step * state.m[i] / (std::sqrt(state.v[i] * inv_c2) + eps);
    }
}

/// Adam over a fixed list of parameters. The step counter counts updates made
/// by this optimizer, so bias correction restarts with fresh moments.
template <typename T>
class Adam {
public:
    Adam(std::vector<Param<T>*> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg), moments_(params_.size()) {}

    void zero_grad() {
        for (auto* p : params_) p->grad.zero();
    }

    void step() {
        ++t_;
        for (std::size_t i = 0; i < params_.size(); ++i) {
            auto* p = params_[i];
            adam_update<T>(p->value.data, p->grad.data, moments_[i], cfg_, t_);
        }
    }

    std::int64_t steps() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

private:
    std::vector<Param<T>*> params_;
    AdamConfig cfg_;
    std::vector<AdamMoments<T>> moments_;
    std::int64_t t_ = 0;
};

}  // namespace scrollbin::nn
