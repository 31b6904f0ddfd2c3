#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "scrollbin/error.hpp"

namespace scrollbin::nn {

/// NCHW extent.
struct Shape {
    int n = 0, c = 0, h = 0, w = 0;

    std::size_t numel() const { return static_cast<std::size_t>(n) * c * h * w; }
    std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
    bool operator==(const Shape&) const = default;
    std::string str() const;
};

/// Dense NCHW tensor. T is float for training and inference; double is used
/// by the finite-difference checks.
template <typename T>
struct Tensor {
    Shape shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(Shape s, T fill = T(0)) : shape(s), data(s.numel(), fill) {}
    Tensor(int n, int c, int h, int w, T fill = T(0)) : Tensor(Shape{n, c, h, w}, fill) {}

    std::size_t size() const { return data.size(); }
    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }

    T& at(int n, int c, int y, int x) { return data[index(n, c, y, x)]; }
    T at(int n, int c, int y, int x) const { return data[index(n, c, y, x)]; }

    std::size_t index(int n, int c, int y, int x) const {
        return ((static_cast<std::size_t>(n) * shape.c + c) * shape.h + y) * shape.w + x;
    }

    void zero() { std::fill(data.begin(), data.end(), T(0)); }

    bool operator==(const Tensor&) const = default;
};

template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& t) {
    Tensor<To> out(t.shape);
    for (std::size_t i = 0; i < t.size(); ++i) out.data[i] = static_cast<To>(t.data[i]);
    return out;
}

inline void require_shape(const Shape& a, const Shape& b, const char* what) {
    if (!(a == b)) throw ShapeError(std::string(what) + ": shape mismatch " + a.str() + " vs " + b.str());
}

/// A learnable tensor with its gradient accumulator.
template <typename T>
struct Param {
    Tensor<T> value;
    Tensor<T> grad;

    Param() = default;
    explicit Param(Shape s) : value(s), grad(s) {}

    bool operator==(const Param& o) const { return value == o.value; }
};

}  // namespace scrollbin::nn
