#include "scrollbin/distance.hpp"

#include <limits>

namespace scrollbin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher) over one line,
// carrying the site index of the minimizing parabola.
void transform_1d(const std::vector<double>& f, const std::vector<std::int64_t>& fi, std::vector<double>& d,
                  std::vector<std::int64_t>& di, std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == kInf) continue;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -kInf;
            z[1] = kInf;
            continue;
        }
        double s;
        for (;;) {
            const int p = v[k];
            s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
            if (s > z[k]) break;
            --k;  // z[0] = -inf stops this at k = 0
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    if (k < 0) {
        std::fill(d.begin(), d.end(), kInf);
        std::fill(di.begin(), di.end(), -1);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const int p = v[j];
        d[q] = double(q - p) * (q - p) + f[p];
        di[q] = fi[p];
    }
}

}  // namespace

FeatureTransform feature_transform(int width, int height, std::span<const std::uint8_t> sites) {
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (sites.size() != n) throw ShapeError("feature_transform: site map size mismatch");
    FeatureTransform out{width, height, std::vector<double>(n), std::vector<std::int64_t>(n)};
    const int longest = std::max(width, height);
    std::vector<double> f(longest), d(longest), z(longest + 1);
    std::vector<std::int64_t> fi(longest), di(longest);
    std::vector<int> v(longest);

    // Columns.
    f.resize(height);
    fi.resize(height);
    d.resize(height);
    di.resize(height);
    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            f[y] = sites[i] ? 0.0 : kInf;
            fi[y] = static_cast<std::int64_t>(i);
        }
        transform_1d(f, fi, d, di, v, z);
        for (int y = 0; y < height; ++y) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            out.sq_dist[i] = d[y];
            out.nearest[i] = di[y];
        }
    }
    // Rows.
    f.resize(width);
    fi.resize(width);
    d.resize(width);
    di.resize(width);
    for (int y = 0; y < height; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            f[x] = out.sq_dist[row + x];
            fi[x] = out.nearest[row + x];
        }
        transform_1d(f, fi, d, di, v, z);
        for (int x = 0; x < width; ++x) {
            out.sq_dist[row + x] = d[x];
            out.nearest[row + x] = di[x];
        }
    }
    return out;
}

Components label_components(const BinaryMask& mask) {
    Components c{0, std::vector<int>(mask.size(), -1)};
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask.ink[start] || c.label[start] >= 0) continue;
        const int id = c.count++;
        c.label[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(i % mask.width), y = static_cast<int>(i / mask.width);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
                    const std::size_t j = static_cast<std::size_t>(ny) * mask.width + nx;
                    if (mask.ink[j] && c.label[j] < 0) {
                        c.label[j] = id;
                        stack.push_back(j);
                    }
                }
            }
        }
    }
    return c;
}

}  // namespace scrollbin
