#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "scrollbin/binet.hpp"

namespace scrollbin::binet {

namespace {

constexpr std::uint8_t kMagic[4] = {'B', 'N', 'E', 'T'};

class Writer {
public:
    template <typename U>
    void put(U v) {
        for (std::size_t i = 0; i < sizeof(U); ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void put_f32(float f) { put(std::bit_cast<std::uint32_t>(f)); }
    void put_bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        bytes.insert(bytes.end(), b, b + n);
    }
    std::vector<std::uint8_t> bytes;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

    template <typename U>
    U get(const char* what) {
        need(sizeof(U), what);
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(bytes_[pos_ + i]) << (8 * i));
        pos_ += sizeof(U);
        return v;
    }
    std::span<const std::uint8_t> take(std::size_t n, const char* what) {
        need(n, what);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n, const char* what) const {
        if (remaining() < n) {
            throw TruncatedError(std::string("weights file truncated while reading ") + what + " at byte " +
                                 std::to_string(pos_));
        }
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

struct Record {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;
};

void put_tensor(Writer& w, const std::string& name, const nn::Tensor<float>& t, std::vector<std::uint32_t> dims) {
    w.put(static_cast<std::uint16_t>(name.size()));
    w.put_bytes(name.data(), name.size());
    w.put(static_cast<std::uint8_t>(dims.size()));
    for (auto d : dims) w.put(d);
    for (float f : t.data) w.put_f32(f);
}

std::vector<std::uint32_t> dims4(const nn::Tensor<float>& t) {
    return {static_cast<std::uint32_t>(t.shape.n), static_cast<std::uint32_t>(t.shape.c),
            static_cast<std::uint32_t>(t.shape.h), static_cast<std::uint32_t>(t.shape.w)};
}

std::vector<std::uint32_t> dims1(const nn::Tensor<float>& t) { return {static_cast<std::uint32_t>(t.size())}; }

void put_norm(Writer& w, const std::string& prefix, const nn::BatchNormParams<float>& bn) {
    put_tensor(w, prefix + ".gamma", bn.gamma.value, dims1(bn.gamma.value));
    put_tensor(w, prefix + ".beta", bn.beta.value, dims1(bn.beta.value));
    put_tensor(w, prefix + ".running_mean", bn.running_mean, dims1(bn.running_mean));
    put_tensor(w, prefix + ".running_var", bn.running_var, dims1(bn.running_var));
}

std::uint32_t tensor_count(const NetParams<float>& p) {
    std::uint32_t n = 0;
    for (const auto& e : p.encoder) n += 2 + (e.norm ? 4 : 0);
    for (const auto& d : p.decoder) n += 2 + (d.norm ? 4 : 0);
    return n;
}

class Records {
public:
    explicit Records(std::map<std::string, Record> r) : records_(std::move(r)) {}

    bool has(const std::string& name) const { return records_.count(name) != 0; }

    nn::Tensor<float> take(const std::string& name, nn::Shape shape) {
        auto it = records_.find(name);
        if (it == records_.end()) throw FormatError("weights file lacks tensor '" + name + "'");
        const auto& d = it->second.dims;
        const bool as4 = d.size() == 4 && static_cast<int>(d[0]) == shape.n && static_cast<int>(d[1]) == shape.c &&
                         static_cast<int>(d[2]) == shape.h && static_cast<int>(d[3]) == shape.w;
        const bool as1 = d.size() == 1 && shape.n == 1 && shape.h == 1 && shape.w == 1 && static_cast<int>(d[0]) == shape.c;
        if (!as4 && !as1) throw FormatError("tensor '" + name + "' has unexpected dimensions");
        nn::Tensor<float> t(shape);
        t.data = std::move(it->second.data);
        records_.erase(it);
        return t;
    }

    const Record& peek(const std::string& name) const {
        auto it = records_.find(name);
        if (it == records_.end()) throw FormatError("weights file lacks tensor '" + name + "'");
        return it->second;
    }

    bool empty() const { return records_.empty(); }
    std::string first_name() const { return records_.begin()->first; }

private:
    std::map<std::string, Record> records_;
};

nn::Param<float> as_param(nn::Tensor<float> t) {
    nn::Param<float> p;
    p.grad = nn::Tensor<float>(t.shape);
    p.value = std::move(t);
    return p;
}

std::optional<nn::BatchNormParams<float>> take_norm(Records& r, const std::string& prefix, int channels) {
    if (!r.has(prefix + ".gamma")) return std::nullopt;
    const nn::Shape s{1, channels, 1, 1};
    nn::BatchNormParams<float> bn(channels);
    bn.gamma = as_param(r.take(prefix + ".gamma", s));
    bn.beta = as_param(r.take(prefix + ".beta", s));
    bn.running_mean = r.take(prefix + ".running_mean", s);
    bn.running_var = r.take(prefix + ".running_var", s);
    return bn;
}

std::array<int, 4> weight_dims(const Records& r, const std::string& name) {
    const auto& d = r.peek(name).dims;
    if (d.size() != 4 || d[2] != nn::kKernel || d[3] != nn::kKernel) {
        throw FormatError("tensor '" + name + "' is not a 4x4 convolution kernel");
    }
    return {static_cast<int>(d[0]), static_cast<int>(d[1]), static_cast<int>(d[2]), static_cast<int>(d[3])};
}

}  // namespace

std::vector<std::uint8_t> encode_weights(const NetParams<float>& p) {
    Writer w;
    w.put_bytes(kMagic, 4);
    w.put(kWeightsVersion);
    w.put(static_cast<std::uint32_t>(p.in_channels));
    w.put(static_cast<std::uint64_t>(p.step));
    w.put(tensor_count(p));
    for (std::size_t i = 0; i < p.encoder.size(); ++i) {
        const auto& e = p.encoder[i];
        const std::string prefix = "enc" + std::to_string(i);
        put_tensor(w, prefix + ".conv.weight", e.conv.weight.value, dims4(e.conv.weight.value));
        put_tensor(w, prefix + ".conv.bias", e.conv.bias.value, dims1(e.conv.bias.value));
        if (e.norm) put_norm(w, prefix + ".bn", *e.norm);
    }
    for (std::size_t j = 0; j < p.decoder.size(); ++j) {
        const auto& d = p.decoder[j];
        const std::string prefix = "dec" + std::to_string(j);
        put_tensor(w, prefix + ".deconv.weight", d.conv.weight.value, dims4(d.conv.weight.value));
        put_tensor(w, prefix + ".deconv.bias", d.conv.bias.value, dims1(d.conv.bias.value));
        if (d.norm) put_norm(w, prefix + ".bn", *d.norm);
    }
    return std::move(w.bytes);
}

NetParams<float> decode_weights(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const auto magic = r.take(4, "magic");
    if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError("not a weights file: bad magic");
    const auto version = r.get<std::uint32_t>("version");
    if (version != kWeightsVersion) {
        throw VersionError("unsupported weights version " + std::to_string(version) + " (expected " +
                           std::to_string(kWeightsVersion) + ")");
    }
    NetParams<float> p;
    p.in_channels = static_cast<int>(r.get<std::uint32_t>("in_channels"));
    p.step = r.get<std::uint64_t>("step counter");
    const auto count = r.get<std::uint32_t>("tensor count");

    std::map<std::string, Record> records;
    for (std::uint32_t t = 0; t < count; ++t) {
        const auto name_len = r.get<std::uint16_t>("name length");
        const auto name_bytes = r.take(name_len, "tensor name");
        std::string name(name_bytes.begin(), name_bytes.end());
        const auto rank = r.get<std::uint8_t>("rank");
        Record rec;
        std::uint64_t elems = 1;
        for (int d = 0; d < rank; ++d) {
            const auto dim = r.get<std::uint32_t>("dims");
            rec.dims.push_back(dim);
            if (dim != 0 && elems > (std::uint64_t{1} << 40) / dim) {
                throw DimensionOverflowError("tensor '" + name + "' dimensions overflow");
            }
            elems *= dim;
        }
        if (elems * 4 > r.remaining()) {
            throw TruncatedError("weights file truncated in data of tensor '" + name + "'");
        }
        const auto payload = r.take(static_cast<std::size_t>(elems) * 4, "tensor data");
        rec.data.resize(static_cast<std::size_t>(elems));
        for (std::size_t k = 0; k < rec.data.size(); ++k) {
            std::uint32_t u = 0;
            for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(payload[4 * k + b]) << (8 * b);
            rec.data[k] = std::bit_cast<float>(u);
        }
        if (!records.emplace(std::move(name), std::move(rec)).second) throw FormatError("duplicate tensor name");
    }
    if (!r.done()) throw FormatError("trailing bytes after last tensor");

    Records recs(std::move(records));
    for (int i = 0; recs.has("enc" + std::to_string(i) + ".conv.weight"); ++i) {
        const std::string prefix = "enc" + std::to_string(i);
        const auto d = weight_dims(recs, prefix + ".conv.weight");
        EncoderStage<float> s;
        s.conv.weight = as_param(recs.take(prefix + ".conv.weight", {d[0], d[1], d[2], d[3]}));
        s.conv.bias = as_param(recs.take(prefix + ".conv.bias", {1, d[0], 1, 1}));
        s.norm = take_norm(recs, prefix + ".bn", d[0]);
        p.encoder.push_back(std::move(s));
    }
    const int depth = p.depth();
    for (int j = 0; j < depth; ++j) {
        const std::string prefix = "dec" + std::to_string(j);
        const auto d = weight_dims(recs, prefix + ".deconv.weight");
        DecoderStage<float> s;
        s.conv.weight = as_param(recs.take(prefix + ".deconv.weight", {d[0], d[1], d[2], d[3]}));
        s.conv.bias = as_param(recs.take(prefix + ".deconv.bias", {1, d[1], 1, 1}));
        s.norm = take_norm(recs, prefix + ".bn", d[1]);
        s.dropout = j != depth - 1 && j < Architecture{}.dropout_stages;
        p.decoder.push_back(std::move(s));
    }
    if (!recs.empty()) throw FormatError("unexpected tensor '" + recs.first_name() + "' in weights file");
    if (depth == 0) throw FormatError("weights file holds no encoder stages");

    // Wiring check: every stage must consume what the previous one produces.
    if (p.in_channels != 1 && p.in_channels != 3) throw FormatError("unsupported in_channels in weights file");
    int prev = p.in_channels;
    for (const auto& e : p.encoder) {
        if (e.conv.in_channels() != prev) throw FormatError("encoder channel ladder is inconsistent");
        prev = e.conv.out_channels();
    }
    for (int j = 0; j < depth; ++j) {
        if (p.decoder[j].conv.in_channels() != prev) throw FormatError("decoder channel ladder is inconsistent");
        prev = p.decoder[j].conv.out_channels();
        if (j < depth - 1) prev += p.encoder[depth - 2 - j].conv.out_channels();
    }
    if (prev != 1) throw FormatError("final decoder stage must emit one channel");
    return p;
}

void save_weights(const NetParams<float>& params, const std::filesystem::path& path) {
    const auto bytes = encode_weights(params);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

NetParams<float> load_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(in.tellg()));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!in) throw IoError("read failed: " + path.string());
    return decode_weights(bytes);
}

}  // namespace scrollbin::binet
