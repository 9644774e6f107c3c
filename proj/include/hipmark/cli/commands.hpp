#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hipmark/cli/run_config.hpp"
#include "hipmark/sample.hpp"

namespace hipmark::cli {

namespace fs = std::filesystem;

/// Writes the synthetic dataset; returns the manifest path.
fs::path cmd_generate(const RunConfig& config, const fs::path& out_dir);

struct TrainOutputs {
    fs::path checkpoint;
    fs::path loss_log;
};

/// Trains on every manifest row. Writes <out>/model.ckpt and <out>/loss_log.csv.
TrainOutputs cmd_train(const RunConfig& config, const fs::path& manifest, const fs::path& out_dir,
                       std::ostream* progress = nullptr);

/// Evaluates a checkpoint (model rebuilt from its stored configuration) on a
/// dataset; writes the metrics CSV and returns its path.
fs::path cmd_eval(const fs::path& checkpoint, const fs::path& manifest, const fs::path& out_csv);

struct InferResult {
    std::vector<Point> landmarks;
    bool has_probability = false;
    double probability = 0.0;  // abnormal
    /// x1,y1,...,x6,y6,probability (probability empty without a class head)
    std::string csv_line() const;
};

/// Predicts one image (.pgm or .tgt); optionally writes an overlay PGM with
/// the predictions and, when given, the ground truth burned in.
InferResult cmd_infer(const fs::path& checkpoint, const fs::path& image, const fs::path& overlay = {},
                      const std::vector<Point>& ground_truth = {});

/// Landmarks of the manifest row whose image has the same file stem as `image`.
std::vector<Point> manifest_landmarks(const fs::path& manifest, const fs::path& image);

/// Cross-validates the configured model; writes the metrics CSV.
fs::path cmd_crossval(const RunConfig& config, const fs::path& manifest, const fs::path& out_csv,
                      std::ostream* progress = nullptr);

struct AblateOutputs {
    fs::path table;    // 4-variant comparison
    fs::path metrics;  // per-fold metrics of every variant
};

AblateOutputs cmd_ablate(const RunConfig& config, const fs::path& manifest, const fs::path& out_dir,
                         std::ostream* progress = nullptr);

}  // namespace hipmark::cli
