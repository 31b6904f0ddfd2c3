#include "scrollbin/pnm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

namespace scrollbin::pnm {

namespace {

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }
    bool at_end() const { return pos_ >= bytes_.size(); }

    [[noreturn]] void fail(const std::string& what) const { throw DecodeError(what, pos_); }

    // Whitespace and '#' comments running to end of line.
    void skip_separators() {
        while (!at_end()) {
            const auto c = bytes_[pos_];
            if (c == '#') {
                while (!at_end() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long read_uint(const char* field) {
        skip_separators();
        if (at_end()) fail(std::string("unexpected end of data reading ") + field);
        if (!std::isdigit(bytes_[pos_])) fail(std::string("expected decimal integer for ") + field);
        long value = 0;
        while (!at_end() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > (1L << 30)) fail(std::string("integer too large for ") + field);
            ++pos_;
        }
        return value;
    }

    // P1 allows pixels without separators, so digits are taken one at a time.
    int read_bit() {
        skip_separators();
        if (at_end()) fail("truncated PBM payload");
        const auto c = bytes_[pos_];
        if (c != '0' && c != '1') fail("PBM pixel must be 0 or 1");
        ++pos_;
        return c - '0';
    }

    // The single whitespace byte that ends a binary header.
    void end_header() {
        if (at_end() || !std::isspace(bytes_[pos_])) fail("expected whitespace after header");
        ++pos_;
    }

    std::span<const std::uint8_t> take(std::size_t n) {
        if (bytes_.size() - pos_ < n) fail("truncated payload: need " + std::to_string(n) + " bytes");
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void check_maxval(Reader& r) {
    const auto at = r.offset();
    const long maxval = r.read_uint("maxval");
    if (maxval != 255) throw DecodeError("unsupported maxval " + std::to_string(maxval) + " (only 255)", at);
}

std::vector<std::uint8_t> ascii_samples(Reader& r, std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (auto& v : out) {
        const long s = r.read_uint("sample");
        if (s > 255) r.fail("sample exceeds maxval");
        v = static_cast<std::uint8_t>(s);
    }
    return out;
}

std::string header(const char* magic, int w, int h, bool maxval) {
    std::string s = std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n";
    if (maxval) s += "255\n";
    return s;
}

void append(std::vector<std::uint8_t>& out, const std::string& s) { out.insert(out.end(), s.begin(), s.end()); }

void append_ascii(std::vector<std::uint8_t>& out, const std::vector<std::uint8_t>& samples, int per_row) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        append(out, std::to_string(samples[i]));
        out.push_back(((i + 1) % per_row == 0) ? '\n' : ' ');
    }
}

}  // namespace

AnyImage decode(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] < '1' || bytes[1] > '6') r.fail("missing P1..P6 magic");
    const int kind = bytes[1] - '0';
    r.take(2);
    const long w = r.read_uint("width");
    const long h = r.read_uint("height");
    if (w < 1 || h < 1) r.fail("zero image dimension");
    if (w * h > (1L << 30)) r.fail("image too large");
    const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    const int iw = static_cast<int>(w), ih = static_cast<int>(h);

    switch (kind) {
        case 1: {
            std::vector<std::uint8_t> ink(n);
            for (auto& v : ink) v = static_cast<std::uint8_t>(r.read_bit());
            return BinaryMask(iw, ih, std::move(ink));
        }
        case 4: {
            r.end_header();
            const std::size_t stride = (static_cast<std::size_t>(w) + 7) / 8;
            const auto payload = r.take(stride * ih);
            std::vector<std::uint8_t> ink(n);
            for (int y = 0; y < ih; ++y) {
                for (int x = 0; x < iw; ++x) {
                    const auto byte = payload[y * stride + x / 8];
                    ink[static_cast<std::size_t>(y) * iw + x] = (byte >> (7 - x % 8)) & 1;
                }
            }
            return BinaryMask(iw, ih, std::move(ink));
        }
        case 2: {
            check_maxval(r);
            return GrayImage(iw, ih, ascii_samples(r, n));
        }
        case 3: {
            check_maxval(r);
            return RgbImage(iw, ih, ascii_samples(r, n * 3));
        }
        case 5: {
            check_maxval(r);
            r.end_header();
            const auto payload = r.take(n);
            return GrayImage(iw, ih, std::vector<std::uint8_t>(payload.begin(), payload.end()));
        }
        default: {
            check_maxval(r);
            r.end_header();
            const auto payload = r.take(n * 3);
            return RgbImage(iw, ih, std::vector<std::uint8_t>(payload.begin(), payload.end()));
        }
    }
}

AnyImage read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode(bytes);
    } catch (const DecodeError& e) {
        throw DecodeError(path.string() + ": " + e.what(), e.offset());
    }
}

std::vector<std::uint8_t> encode(const AnyImage& image, Encoding encoding) {
    const bool ascii = encoding == Encoding::Ascii;
    std::vector<std::uint8_t> out;
    if (const auto* g = std::get_if<GrayImage>(&image)) {
        append(out, header(ascii ? "P2" : "P5", g->width, g->height, true));
        if (ascii) append_ascii(out, g->data, g->width);
        else out.insert(out.end(), g->data.begin(), g->data.end());
    } else if (const auto* c = std::get_if<RgbImage>(&image)) {
        append(out, header(ascii ? "P3" : "P6", c->width, c->height, true));
        if (ascii) append_ascii(out, c->data, c->width * 3);
        else out.insert(out.end(), c->data.begin(), c->data.end());
    } else {
        const auto& m = std::get<BinaryMask>(image);
        append(out, header(ascii ? "P1" : "P4", m.width, m.height, false));
        if (ascii) {
            append_ascii(out, m.ink, m.width);
        } else {
            const std::size_t stride = (static_cast<std::size_t>(m.width) + 7) / 8;
            const std::size_t base = out.size();
            out.resize(base + stride * m.height, 0);
            for (int y = 0; y < m.height; ++y) {
                for (int x = 0; x < m.width; ++x) {
                    if (m.at(x, y)) out[base + y * stride + x / 8] |= static_cast<std::uint8_t>(0x80u >> (x % 8));
                }
            }
        }
    }
    return out;
}

void write(const AnyImage& image, const std::filesystem::path& path, Encoding encoding) {
    const auto bytes = encode(image, encoding);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {
template <typename T>
T read_as(const std::filesystem::path& path, const char* kind) {
    auto img = read(path);
    if (auto* v = std::get_if<T>(&img)) return std::move(*v);
    throw DataError(path.string() + ": expected a " + kind + " file");
}
}  // namespace

GrayImage read_gray(const std::filesystem::path& path) { return read_as<GrayImage>(path, "PGM"); }
RgbImage read_rgb(const std::filesystem::path& path) { return read_as<RgbImage>(path, "PPM"); }
BinaryMask read_mask(const std::filesystem::path& path) { return read_as<BinaryMask>(path, "PBM"); }

}  // namespace scrollbin::pnm
