#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hipmark/eval/graf.hpp"
#include "hipmark/sample.hpp"
#include "hipmark/synthgen/render.hpp"

namespace hipmark::synth {

struct SynthConfig {
    std::size_t count = 64;
    double balance = 0.5;          // fraction of abnormal samples
    double spacing_mm = 0.1;
    std::size_t image_size = 128;
    std::uint64_t seed = 1;
    double speckle = 0.3;
    std::size_t subjects = 0;      // > 0 adds a group column, sample i -> subject i % subjects

    void validate() const;
};

struct PhantomSample {
    ImageSample sample;
    std::uint64_t seed = 0;        // per-sample stream seed
    eval::GrafAngles angles;       // construction angles
};

/// Number of abnormal samples: round(count * balance).
std::size_t abnormal_count(const SynthConfig& config);

/// Sample i draws geometry and speckle from Rng(mix_seed(seed, i + 1)); which
/// indices are abnormal comes from a permutation seeded by mix_seed(seed, 0).
std::vector<PhantomSample> generate_samples(const SynthConfig& config);

struct ManifestRow {
    std::string file;              // relative to the manifest directory
    std::vector<Point> landmarks;
    int label = 0;
    double alpha_deg = 0.0;
    double beta_deg = 0.0;
    double spacing_mm = 0.1;
    int group = -1;
};

inline constexpr const char* kManifestName = "manifest.csv";

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows, bool with_group);
/// Throws DataError on malformed rows, naming the line.
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

/// Writes images/<id>.pgm and images/<id>.tgt plus manifest.csv under out_dir;
/// returns the manifest path.
std::filesystem::path generate_dataset(const SynthConfig& config, const std::filesystem::path& out_dir);

/// Loads every manifest row; the lossless .tgt twin of an image is preferred
/// over the 8-bit PGM when present.
std::vector<ImageSample> load_dataset(const std::filesystem::path& manifest);

}  // namespace hipmark::synth
