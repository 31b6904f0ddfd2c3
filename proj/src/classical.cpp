#include "scrollbin/classical.hpp"

#include <algorithm>
#include <cmath>

namespace scrollbin::classical {

int snap_window(int window) {
    if (window < 3) throw PreconditionError("window must be at least 3, got " + std::to_string(window));
    return window % 2 == 0 ? window + 1 : window;
}

Histogram histogram(const GrayImage& img) {
    Histogram h{};
    for (auto v : img.data) ++h[v];
    return h;
}

int otsu_threshold(const Histogram& hist) {
    double total = 0.0, sum = 0.0;
    for (int i = 0; i < 256; ++i) {
        total += static_cast<double>(hist[i]);
        sum += static_cast<double>(i) * static_cast<double>(hist[i]);
    }
    if (total == 0.0) return -1;

    double n0 = 0.0, s0 = 0.0;
    double best = 0.0;
    int best_t = -1;
    for (int t = 0; t < 256; ++t) {
        n0 += static_cast<double>(hist[t]);
        s0 += static_cast<double>(t) * static_cast<double>(hist[t]);
        const double n1 = total - n0;
        if (n0 == 0.0 || n1 == 0.0) continue;
        const double w0 = n0 / total, w1 = n1 / total;
        const double mu0 = s0 / n0, mu1 = (sum - s0) / n1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best) {
            best = var;
            best_t = t;
        }
    }
    return best_t;
}

OtsuResult otsu_global(const GrayImage& img) {
    const int t = otsu_threshold(histogram(img));
    OtsuResult r{std::max(t, 0), BinaryMask(img.width, img.height)};
    if (t < 0) return r;
    for (std::size_t i = 0; i < img.data.size(); ++i) r.mask.ink[i] = img.data[i] <= t;
    return r;
}

BinaryMask otsu_local(const GrayImage& img, int window) {
    const int half = snap_window(window) / 2;
    BinaryMask out(img.width, img.height);
    Histogram hist{};
    for (int y = 0; y < img.height; ++y) {
        const int y0 = std::max(0, y - half), y1 = std::min(img.height - 1, y + half);
        // Histogram of the window at x = 0, then slide right column by column.
        hist.fill(0);
        for (int yy = y0; yy <= y1; ++yy)
            for (int xx = 0; xx <= std::min(img.width - 1, half); ++xx) ++hist[img.at(xx, yy)];
        for (int x = 0; x < img.width; ++x) {
            if (x > 0) {
                const int add = x + half, drop = x - half - 1;
                if (add < img.width)
                    for (int yy = y0; yy <= y1; ++yy) ++hist[img.at(add, yy)];
                if (drop >= 0)
                    for (int yy = y0; yy <= y1; ++yy) --hist[img.at(drop, yy)];
            }
            const int t = otsu_threshold(hist);
            out.set(x, y, t >= 0 && img.at(x, y) <= t);
        }
    }
    return out;
}

LocalStats local_stats(const GrayImage& img, int window) {
    const int half = snap_window(window) / 2;
    const int w = img.width, h = img.height;
    const std::size_t stride = static_cast<std::size_t>(w) + 1;
    // Integer integrals keep the window sums exact.
    std::vector<std::int64_t> sum(stride * (h + 1), 0), sq(stride * (h + 1), 0);
    for (int y = 0; y < h; ++y) {
        std::int64_t row_sum = 0, row_sq = 0;
        for (int x = 0; x < w; ++x) {
            const std::int64_t v = img.at(x, y);
            row_sum += v;
            row_sq += v * v;
            sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + row_sum;
            sq[(y + 1) * stride + x + 1] = sq[y * stride + x + 1] + row_sq;
        }
    }
    LocalStats st{w, h, std::vector<double>(img.data.size()), std::vector<double>(img.data.size())};
    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - half), y1 = std::min(h - 1, y + half) + 1;
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - half), x1 = std::min(w - 1, x + half) + 1;
            const auto box = [&](const std::vector<std::int64_t>& ii) {
                return ii[y1 * stride + x1] - ii[y0 * stride + x1] - ii[y1 * stride + x0] + ii[y0 * stride + x0];
            };
            const double n = static_cast<double>((y1 - y0) * (x1 - x0));
            const double m = static_cast<double>(box(sum)) / n;
            const double var = std::max(0.0, static_cast<double>(box(sq)) / n - m * m);
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            st.mean[i] = m;
            st.stddev[i] = std::sqrt(var);
        }
    }
    return st;
}

BinaryMask niblack(const GrayImage& img, int window, double k) {
    const auto st = local_stats(img, window);
    BinaryMask out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double t = st.mean[i] + k * st.stddev[i];
        out.ink[i] = img.data[i] <= t;
    }
    return out;
}

BinaryMask sauvola(const GrayImage& img, int window, double k, double dynamic_range) {
    if (!(dynamic_range > 0.0)) throw PreconditionError("Sauvola dynamic range R must be positive");
    const auto st = local_stats(img, window);
    BinaryMask out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double t = st.mean[i] * (1.0 + k * (st.stddev[i] / dynamic_range - 1.0));
        out.ink[i] = img.data[i] <= t;
    }
    return out;
}

}  // namespace scrollbin::classical
