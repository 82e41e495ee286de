#pragma once

// Network checkpoint files.
//
// Binary layout (all integers and floats little-endian):
//   bytes 0..7   magic "SRLNET01"
//   u32          format version (1)
//   u32          number of entries in layer_dims
//   u32[n]       layer_dims
//   u8           activation (0 = tanh, 1 = relu)
//   u8           head (0 = linear, 1 = gaussian, 2 = sigmoid)
//   u16          reserved, zero
//   f64[...]     parameters, per layer: W row-major (out x in), then b
//
// A JSON sidecar <file>.json mirrors the architecture metadata for tooling
// that does not want to parse the binary.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "satrl/net.hpp"

namespace satrl {

namespace detail {

template <typename T>
void write_le(std::ofstream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

inline const char kNetMagic[8] = {'S', 'R', 'L', 'N', 'E', 'T', '0', '1'};

}  // namespace detail

inline const char* to_string(Activation a) { return a == Activation::tanh ? "tanh" : "relu"; }
inline const char* to_string(Head h) {
    switch (h) {
        case Head::linear: return "linear";
        case Head::gaussian: return "gaussian";
        case Head::sigmoid: return "sigmoid";
    }
    return "?";
}

inline void save_net(const MlpNet& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_net: cannot open " + path.string());
    out.write(detail::kNetMagic, 8);
    detail::write_le<uint32_t>(out, 1);
    detail::write_le<uint32_t>(out, static_cast<uint32_t>(net.layer_dims.size()));
    for (int d : net.layer_dims) detail::write_le<uint32_t>(out, static_cast<uint32_t>(d));
    detail::write_le<uint8_t>(out, net.activation == Activation::tanh ? 0 : 1);
    detail::write_le<uint8_t>(out, net.head == Head::linear ? 0 : (net.head == Head::gaussian ? 1 : 2));
    detail::write_le<uint16_t>(out, 0);
    for (const auto& layer : net.layers) {
        for (double v : layer.w) detail::write_le<double>(out, v);
        for (double v : layer.b) detail::write_le<double>(out, v);
    }
    if (!out) throw std::runtime_error("save_net: write failed for " + path.string());
    out.close();

    nlohmann::json meta;
    meta["format"] = "srlnet";
    meta["version"] = 1;
    meta["layer_dims"] = net.layer_dims;
    meta["activation"] = to_string(net.activation);
    meta["head"] = to_string(net.head);
    meta["param_count"] = net.param_count();
    std::ofstream side(path.string() + ".json");
    side << meta.dump(2) << "\n";
}

inline MlpNet load_net(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_net: cannot open " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, detail::kNetMagic, 8) != 0)
        throw std::runtime_error("load_net: bad magic in " + path.string());
    const auto version = detail::read_le<uint32_t>(in);
    if (version != 1) throw std::runtime_error("load_net: unsupported version in " + path.string());
    const auto ndims = detail::read_le<uint32_t>(in);
    if (ndims < 2 || ndims > 64) throw std::runtime_error("load_net: implausible layer count");

    MlpNet net;
    for (uint32_t i = 0; i < ndims; ++i) net.layer_dims.push_back(static_cast<int>(detail::read_le<uint32_t>(in)));
    net.activation = detail::read_le<uint8_t>(in) == 0 ? Activation::tanh : Activation::relu;
    const auto head = detail::read_le<uint8_t>(in);
    net.head = head == 0 ? Head::linear : (head == 1 ? Head::gaussian : Head::sigmoid);
    detail::read_le<uint16_t>(in);

    for (size_t l = 0; l + 1 < net.layer_dims.size(); ++l) {
        Layer layer;
        layer.in = net.layer_dims[l];
        layer.out = net.layer_dims[l + 1];
        layer.w.resize(static_cast<size_t>(layer.in) * layer.out);
        layer.b.resize(layer.out);
        for (auto& v : layer.w) v = detail::read_le<double>(in);
        for (auto& v : layer.b) v = detail::read_le<double>(in);
        net.layers.push_back(std::move(layer));
    }
    if (!in) throw std::runtime_error("load_net: truncated file " + path.string());
    return net;
}

// FNV-1a over a file's bytes; used to fingerprint checkpoints in manifests.
inline std::string file_fingerprint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file_fingerprint: cannot open " + path.string());
    uint64_t h = 14695981039346656037ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace satrl
