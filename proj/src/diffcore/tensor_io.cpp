#include "hipmark/diffcore/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "hipmark/error.hpp"

namespace hipmark {

namespace {
constexpr std::size_t kMaxTensorElements = std::size_t{1} << 28;
}  // namespace

namespace io {

namespace {
template <typename U>
void put_le(std::ostream& out, U v) {
    char buf[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, sizeof(U));
}

template <typename U>
U get_le(std::istream& in) {
    unsigned char buf[sizeof(U)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(U))) {
        throw FormatError("unexpected end of file");
    }
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
    return v;
}
}  // namespace

void put_u8(std::ostream& out, std::uint8_t v) { put_le(out, v); }
void put_u16(std::ostream& out, std::uint16_t v) { put_le(out, v); }
void put_u32(std::ostream& out, std::uint32_t v) { put_le(out, v); }
void put_u64(std::ostream& out, std::uint64_t v) { put_le(out, v); }
std::uint8_t get_u8(std::istream& in) { return get_le<std::uint8_t>(in); }
std::uint16_t get_u16(std::istream& in) { return get_le<std::uint16_t>(in); }
std::uint32_t get_u32(std::istream& in) { return get_le<std::uint32_t>(in); }
std::uint64_t get_u64(std::istream& in) { return get_le<std::uint64_t>(in); }

std::string get_bytes(std::istream& in, std::size_t n) {
    std::string s(n, '\0');
    if (n && !in.read(s.data(), static_cast<std::streamsize>(n))) {
        throw FormatError("unexpected end of file");
    }
    return s;
}

}  // namespace io

void write_tensors(std::ostream& out, std::span<const NamedTensor> tensors) {
    out.write(kTensorMagic, 4);
    io::put_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& [name, tensor] : tensors) {
        if (name.size() > UINT16_MAX) throw ContractError("tensor name too long: " + name);
        io::put_u16(out, static_cast<std::uint16_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        io::put_u8(out, static_cast<std::uint8_t>(tensor.ndim()));
        for (auto d : tensor.shape()) io::put_u32(out, static_cast<std::uint32_t>(d));
        io::put_u8(out, kDtypeF32);
        for (float v : tensor.data()) io::put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
}

std::vector<NamedTensor> read_tensors(std::istream& in) {
    const std::string magic = io::get_bytes(in, 4);
    if (std::memcmp(magic.data(), kTensorMagic, 4) != 0) {
        throw FormatError("bad tensor container magic");
    }
    const std::uint32_t count = io::get_u32(in);
    std::vector<NamedTensor> result;
    for (std::uint32_t t = 0; t < count; ++t) {
        NamedTensor nt;
        nt.name = io::get_bytes(in, io::get_u16(in));
        const std::uint8_t ndim = io::get_u8(in);
        if (ndim == 0) throw FormatError("tensor '" + nt.name + "' has zero dimensions");
        Shape shape;
        for (std::uint8_t i = 0; i < ndim; ++i) {
            const auto d = io::get_u32(in);
            if (d == 0) throw FormatError("tensor '" + nt.name + "' has a zero dimension");
            shape.push_back(d);
        }
        const std::uint8_t dtype = io::get_u8(in);
        if (dtype != kDtypeF32) {
            throw FormatError("tensor '" + nt.name + "' has unsupported dtype tag " +
                              std::to_string(dtype));
        }
        const std::size_t n = shape_numel(shape);
        if (n > kMaxTensorElements) throw FormatError("tensor '" + nt.name + "' is implausibly large");
        const std::string payload = io::get_bytes(in, n * 4);
        std::vector<float> values(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t bits = 0;
            for (std::size_t b = 0; b < 4; ++b)
                bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(payload[4 * i + b]))
                        << (8 * b);
            values[i] = std::bit_cast<float>(bits);
        }
        nt.tensor = Tensor(std::move(shape), std::move(values));
        result.push_back(std::move(nt));
    }
    return result;
}

void save_tensors(const std::filesystem::path& path, std::span<const NamedTensor> tensors) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_tensors(out, tensors);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<NamedTensor> load_tensors(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_tensors(in);
}

}  // namespace hipmark
