#include "hipmark/cli/commands.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "hipmark/diffcore/tensor_io.hpp"
#include "hipmark/error.hpp"
#include "hipmark/eval/experiment.hpp"
#include "hipmark/eval/overlay.hpp"
#include "hipmark/synthgen/dataset.hpp"
#include "hipmark/synthgen/pgm.hpp"
#include "hipmark/training/checkpoint.hpp"

namespace hipmark::cli {

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

Tensor read_image(const fs::path& path) {
    if (path.extension() == ".tgt") {
        auto tensors = load_tensors(path);
        if (tensors.size() != 1) throw DataError(path.string() + ": expected a single image tensor");
        return tensors[0].tensor;
    }
    return synth::read_pgm(path);
}

struct LoadedModel {
    RunConfig config;
    std::unique_ptr<TgcnIcfNetwork> model;
};

LoadedModel load_model(const fs::path& checkpoint) {
    const auto info = training::peek_checkpoint(checkpoint);
    LoadedModel out{RunConfig::from_text(info.config_text, checkpoint.string() + " (stored config)"), nullptr};
    out.model = std::make_unique<TgcnIcfNetwork>(out.config.model_config(), out.config.get_u64("seed"));
    training::load_checkpoint(checkpoint, *out.model, nullptr);
    return out;
}

std::string variant_label(const ModelConfig& m) {
    const bool mmf_on = m.fusion.mode == mmf::FusionMode::mmf;
    if (mmf_on) return m.use_tgcn ? "full" : "wo_tgcn";
    return m.use_tgcn ? "wo_mmf" : "concat_baseline";
}

}  // namespace

fs::path cmd_generate(const RunConfig& config, const fs::path& out_dir) {
    return synth::generate_dataset(config.synth_config(), out_dir);
}

TrainOutputs cmd_train(const RunConfig& config, const fs::path& manifest, const fs::path& out_dir,
                       std::ostream* progress) {
    config.validate();
    const auto dataset = synth::load_dataset(manifest);
    ensure_dir(out_dir);
    TrainOutputs out{out_dir / "model.ckpt", out_dir / "loss_log.csv"};
    std::ofstream log(out.loss_log, std::ios::binary);
    if (!log) throw IoError("cannot open " + out.loss_log.string() + " for writing");
    log << training::kLossLogHeader << '\n';

    const auto train_config = config.train_config();
    TgcnIcfNetwork model(config.model_config(), train_config.seed);
    training::Trainer trainer(model, train_config);
    trainer.fit(dataset, [&](const training::LossRecord& r) {
        training::write_loss_record(log, r);
        if (progress && r.step % 50 == 0) {
            *progress << fmt::format("step {} epoch {} l_landmark {:.6f} l_classify {:.4f}\n", r.step, r.epoch,
                                     r.l_landmark, r.l_classify);
        }
    });
    if (!log) throw IoError("write failed: " + out.loss_log.string());
    training::CheckpointInfo info;
    info.epoch = trainer.epoch();
    info.config_text = config.to_text();
    training::save_checkpoint(out.checkpoint, model, &trainer.optimizer(), info);
    return out;
}

fs::path cmd_eval(const fs::path& checkpoint, const fs::path& manifest, const fs::path& out_csv) {
    auto loaded = load_model(checkpoint);
    const auto dataset = synth::load_dataset(manifest);
    std::vector<eval::SamplePrediction> preds;
    for (const auto& s : dataset) preds.push_back(eval::predict(*loaded.model, s));
    const auto report = eval::make_report(variant_label(loaded.model->config()), {eval::summarize_fold(preds, 0)});
    eval::write_metrics_csv(out_csv.string(), std::span(&report, 1));
    return out_csv;
}

std::string InferResult::csv_line() const {
    std::string line;
    for (const auto& p : landmarks) line += fmt::format("{:.3f},{:.3f},", p.x, p.y);
    line += has_probability ? fmt::format("{:.6f}", probability) : std::string();
    return line;
}

InferResult cmd_infer(const fs::path& checkpoint, const fs::path& image, const fs::path& overlay,
                      const std::vector<Point>& ground_truth) {
    auto loaded = load_model(checkpoint);
    ImageSample sample;
    sample.id = image.stem().string();
    sample.image = read_image(image);
    const auto& b = loaded.model->config().backbone;
    if (sample.image.ndim() != 3 || sample.image.dim(0) != 1 || sample.image.dim(1) != b.input_size ||
        sample.image.dim(2) != b.input_size) {
        throw DataError(fmt::format("{}: image {} does not match the model input [1, {}, {}]", image.string(),
                                    shape_str(sample.image.shape()), b.input_size, b.input_size));
    }
    const auto p = eval::predict(*loaded.model, sample);
    InferResult r;
    r.landmarks = p.pred;
    if (p.probability) {
        r.has_probability = true;
        r.probability = *p.probability;
    }
    if (!overlay.empty()) eval::write_overlay(overlay, sample.image, ground_truth, r.landmarks);
    return r;
}

std::vector<Point> manifest_landmarks(const fs::path& manifest, const fs::path& image) {
    for (const auto& row : synth::read_manifest(manifest)) {
        if (fs::path(row.file).stem() == image.stem()) return row.landmarks;
    }
    throw DataError(manifest.string() + ": no row for " + image.filename().string());
}

namespace {

eval::FoldCallback fold_reporter(std::ostream* progress) {
    if (!progress) return {};
    return [progress](const eval::FoldEvent& e) {
        *progress << fmt::format("{} fold {}/{}: mre {:.4f} mm\n", e.variant, e.fold + 1, e.folds,
                                 e.metrics->mre_mm.mean);
    };
}

}  // namespace

fs::path cmd_crossval(const RunConfig& config, const fs::path& manifest, const fs::path& out_csv,
                      std::ostream* progress) {
    config.validate();
    const auto dataset = synth::load_dataset(manifest);
    const auto report = eval::kfold_run(dataset, config.experiment_config(), variant_label(config.model_config()),
                                        fold_reporter(progress));
    eval::write_metrics_csv(out_csv.string(), std::span(&report, 1));
    return out_csv;
}

AblateOutputs cmd_ablate(const RunConfig& config, const fs::path& manifest, const fs::path& out_dir,
                         std::ostream* progress) {
    config.validate();
    const auto dataset = synth::load_dataset(manifest);
    ensure_dir(out_dir);
    const auto reports = eval::ablation_run(dataset, config.experiment_config(), fold_reporter(progress));
    AblateOutputs out{out_dir / "ablation.csv", out_dir / "ablation_metrics.csv"};
    eval::write_ablation_csv(out.table, reports);
    eval::write_metrics_csv(out.metrics.string(), reports);
    return out;
}

}  // namespace hipmark::cli
