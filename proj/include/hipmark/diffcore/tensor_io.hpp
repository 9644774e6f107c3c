#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hipmark/diffcore/tensor.hpp"

namespace hipmark {

template <typename T>
struct BasicNamedTensor {
    std::string name;
    BasicTensor<T> tensor;
};
using NamedTensor = BasicNamedTensor<float>;

// Tensor dump container, little-endian:
//   "TGT1" | u32 count | count x { u16 name_len | name (UTF-8) | u8 ndim |
//   ndim x u32 dim | u8 dtype (0 = f32) | payload, row-major }
inline constexpr char kTensorMagic[4] = {'T', 'G', 'T', '1'};
inline constexpr std::uint8_t kDtypeF32 = 0;

void write_tensors(std::ostream& out, std::span<const NamedTensor> tensors);
/// Throws FormatError on bad magic, unknown dtype or truncation.
std::vector<NamedTensor> read_tensors(std::istream& in);

void save_tensors(const std::filesystem::path& path, std::span<const NamedTensor> tensors);
std::vector<NamedTensor> load_tensors(const std::filesystem::path& path);

namespace io {
// Little-endian primitives shared by the other binary formats of the project.
void put_u8(std::ostream& out, std::uint8_t v);
void put_u16(std::ostream& out, std::uint16_t v);
void put_u32(std::ostream& out, std::uint32_t v);
void put_u64(std::ostream& out, std::uint64_t v);
std::uint8_t get_u8(std::istream& in);
std::uint16_t get_u16(std::istream& in);
std::uint32_t get_u32(std::istream& in);
std::uint64_t get_u64(std::istream& in);
std::string get_bytes(std::istream& in, std::size_t n);
}  // namespace io

}  // namespace hipmark
