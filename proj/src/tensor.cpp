#include "scrollbin/tensor.hpp"

namespace scrollbin::nn {

std::string Shape::str() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + ")";
}

}  // namespace scrollbin::nn
