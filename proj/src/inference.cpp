#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "scrollbin/binet.hpp"

namespace scrollbin::binet {

namespace {

template <typename Img>
BinaryMask patch_impl(const NetParams<float>& params, const Img& patch) {
    if (params.in_channels != Img::channels) {
        throw ShapeError("model expects " + std::to_string(params.in_channels) + "-channel input, image has " +
                         std::to_string(Img::channels));
    }
    return denormalize_output(forward_eval(params, normalize_input(patch)));
}

template <typename Img>
BinaryMask image_impl(const NetParams<float>& params, const Img& img, int threads, PadMode pad) {
    if (params.in_channels != Img::channels) {
        throw ShapeError("model expects " + std::to_string(params.in_channels) + "-channel input, image has " +
                         std::to_string(Img::channels));
    }
    const auto grid = split(img, params.input_size(), pad);
    PatchGrid<BinaryMask> out;
    out.patch_size = grid.patch_size;
    out.rows = grid.rows;
    out.cols = grid.cols;
    out.orig_width = grid.orig_width;
    out.orig_height = grid.orig_height;
    out.patches.resize(grid.patches.size());

    // Each worker owns disjoint output slots; params are shared read-only.
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto work = [&] {
        for (std::size_t i = next++; i < grid.patches.size(); i = next++) {
            try {
                out.patches[i] = patch_impl(params, grid.patches[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int workers = std::clamp(threads, 1, static_cast<int>(grid.patches.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return reassemble(out);
}

}  // namespace

BinaryMask binarize_patch(const NetParams<float>& params, const GrayImage& patch) { return patch_impl(params, patch); }
BinaryMask binarize_patch(const NetParams<float>& params, const RgbImage& patch) { return patch_impl(params, patch); }

BinaryMask binarize_image(const NetParams<float>& params, const GrayImage& img, int threads, PadMode pad) {
    return image_impl(params, img, threads, pad);
}
BinaryMask binarize_image(const NetParams<float>& params, const RgbImage& img, int threads, PadMode pad) {
    return image_impl(params, img, threads, pad);
}

}  // namespace scrollbin::binet
