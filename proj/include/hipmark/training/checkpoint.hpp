#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "hipmark/model/network.hpp"
#include "hipmark/training/adam.hpp"

namespace hipmark::training {

// Checkpoint file, little-endian:
//   "TGCK" | u32 version | u64 epoch | u64 optimizer steps | u32 config_len | config text |
//   TGT1 container holding every parameter under its own name plus
//   "adam.m/<name>" and "adam.v/<name>" moment tensors.
inline constexpr char kCheckpointMagic[4] = {'T', 'G', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointInfo {
    std::uint32_t version = kCheckpointVersion;
    std::uint64_t epoch = 0;
    std::uint64_t optimizer_steps = 0;
    std::string config_text;  // flat key = value snapshot of the producing run
};

void write_checkpoint(std::ostream& out, const TgcnIcfNetwork& model, const Adam* optimizer,
                      const CheckpointInfo& info);
void save_checkpoint(const std::filesystem::path& path, const TgcnIcfNetwork& model, const Adam* optimizer,
                     const CheckpointInfo& info);

/// Parses the whole stream before touching `model` or `optimizer`, so a
/// failure leaves both unchanged. Bad magic, version or truncation raise
/// FormatError; missing or mis-shaped tensors raise IncompleteCheckpointError
/// listing them. Moment tensors are only required when `optimizer` is given.
CheckpointInfo read_checkpoint(std::istream& in, TgcnIcfNetwork& model, Adam* optimizer);
CheckpointInfo load_checkpoint(const std::filesystem::path& path, TgcnIcfNetwork& model, Adam* optimizer);

/// Header only; used to rebuild the model configuration before loading.
CheckpointInfo peek_checkpoint(const std::filesystem::path& path);

}  // namespace hipmark::training
