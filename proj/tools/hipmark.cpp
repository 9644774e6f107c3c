// hipmark: generate / train / eval / infer / crossval / ablate / defaults
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hipmark/cli/commands.hpp"
#include "hipmark/error.hpp"

namespace {

using hipmark::cli::RunConfig;

struct Common {
    std::string config_file;
};

RunConfig resolve_config(const Common& common, const std::vector<std::string>& extras) {
    RunConfig config = common.config_file.empty() ? RunConfig{} : RunConfig::from_file(common.config_file);
    hipmark::cli::apply_overrides(config, extras);
    return config;
}

void fail_line(const char* category, const std::string& message) {
    std::cerr << "hipmark: error[" << category << "]: " << message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hip landmark detection with graph-refined heatmaps on synthetic phantoms"};
    app.require_subcommand(1);
    Common common;
    std::string out, data, checkpoint, image, overlay, truth;

    auto with_config = [&](CLI::App* sub) {
        sub->add_option("-c,--config", common.config_file, "key = value config file");
        sub->allow_extras();
        return sub;
    };

    auto* generate = with_config(app.add_subcommand("generate", "write a synthetic dataset and its manifest"));
    generate->add_option("-o,--out", out, "output directory")->required();

    auto* train = with_config(app.add_subcommand("train", "train on a manifest; writes model.ckpt and loss_log.csv"));
    train->add_option("-d,--data", data, "manifest.csv")->required();
    train->add_option("-o,--out", out, "output directory")->required();

    auto* evaluate = app.add_subcommand("eval", "evaluate a checkpoint on a manifest; writes a metrics CSV");
    evaluate->add_option("-k,--checkpoint", checkpoint)->required();
    evaluate->add_option("-d,--data", data, "manifest.csv")->required();
    evaluate->add_option("-o,--out", out, "metrics CSV path")->required();

    auto* infer = app.add_subcommand("infer", "predict one image; prints x1,y1,...,x6,y6,probability");
    infer->add_option("-k,--checkpoint", checkpoint)->required();
    infer->add_option("-i,--image", image, ".pgm or .tgt image")->required();
    infer->add_option("--overlay", overlay, "write an overlay PGM here");
    infer->add_option("--truth", truth, "manifest holding the image's ground truth for the overlay");

    auto* crossval = with_config(app.add_subcommand("crossval", "k-fold cross-validation; writes a metrics CSV"));
    crossval->add_option("-d,--data", data, "manifest.csv")->required();
    crossval->add_option("-o,--out", out, "metrics CSV path")->required();

    auto* ablate = with_config(app.add_subcommand("ablate", "4-variant comparison over one shared k-fold split"));
    ablate->add_option("-d,--data", data, "manifest.csv")->required();
    ablate->add_option("-o,--out", out, "output directory")->required();

    auto* defaults = app.add_subcommand("defaults", "print every config key with its default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        fail_line("config", e.what());
        return hipmark::exit_code(hipmark::ErrorCategory::config);
    }

    try {
        if (*defaults) {
            for (const auto& k : hipmark::cli::config_keys()) {
                std::cout << "# " << k.help << '\n' << k.key << " = " << k.default_value << '\n';
            }
        } else if (*generate) {
            const auto config = resolve_config(common, generate->remaining());
            std::cout << hipmark::cli::cmd_generate(config, out).string() << '\n';
        } else if (*train) {
            const auto config = resolve_config(common, train->remaining());
            const auto result = hipmark::cli::cmd_train(config, data, out, &std::cerr);
            std::cout << result.checkpoint.string() << '\n';
        } else if (*evaluate) {
            std::cout << hipmark::cli::cmd_eval(checkpoint, data, out).string() << '\n';
        } else if (*infer) {
            const auto gt = truth.empty() ? std::vector<hipmark::Point>{}
                                          : hipmark::cli::manifest_landmarks(truth, image);
            std::cout << hipmark::cli::cmd_infer(checkpoint, image, overlay, gt).csv_line() << '\n';
        } else if (*crossval) {
            const auto config = resolve_config(common, crossval->remaining());
            std::cout << hipmark::cli::cmd_crossval(config, data, out, &std::cerr).string() << '\n';
        } else if (*ablate) {
            const auto config = resolve_config(common, ablate->remaining());
            const auto result = hipmark::cli::cmd_ablate(config, data, out, &std::cerr);
            std::cout << result.table.string() << '\n';
        }
    } catch (const hipmark::Error& e) {
        fail_line(hipmark::category_name(e.category()), e.what());
        return hipmark::exit_code(e.category());
    } catch (const std::exception& e) {
        fail_line("internal", e.what());
        return 1;
    }
    return 0;
}
