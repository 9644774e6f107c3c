#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include "hipmark/cli/commands.hpp"
#include "hipmark/diffcore/tensor_io.hpp"
#include "hipmark/error.hpp"
#include "hipmark/synthgen/dataset.hpp"
#include "support/scratch_dir.hpp"

using namespace hipmark;
using namespace hipmark::cli;

namespace {

/// Small enough to train in well under a second per epoch.
const char* kTinyConfig = R"(# tiny geometry for command tests
input_size = 64
feature_size = 16
channels = 8
unet_depth = 3
unet_base_channels = 4
patch_size = 8
token_dim = 16
transformer_layers = 1
heads = 2
mlp_dim = 32
class_hidden = 8
epochs = 2
lr = 0.001
folds = 2
synth.count = 6
synth.image_size = 64
)";

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run_tool(const scratch::Dir& dir, const std::string& args) {
    const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string command =
        std::string(HIPMARK_BINARY) + " " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(command.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, scratch::read_bytes(out), scratch::read_bytes(err)};
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string field; std::getline(in, field, sep);) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

TEST_CASE("configuration text") {
    const auto keys = config_keys();
    RunConfig defaults;
    for (const auto& k : keys) {
        CAPTURE(k.key);
        CHECK(defaults.get(k.key) == k.default_value);
        CHECK(std::string(k.help).size() > 0);
    }
    CHECK_NOTHROW(defaults.validate());
    CHECK(defaults.train_config().lambda == 0.01);
    CHECK(defaults.model_config().backbone.input_size == 128);

    const auto round = RunConfig::from_text(defaults.to_text());
    CHECK(round.to_text() == defaults.to_text());

    const auto tiny = RunConfig::from_text(kTinyConfig, "tiny.conf");
    CHECK(tiny.get_size("input_size") == 64);
    CHECK(tiny.synth_config().count == 6);
    CHECK(tiny.kfold_config().k == 2);

    try {
        RunConfig::from_text("lr = 0.1\nlearning_rate = 0.2\n", "typo.conf");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("learning_rate") != std::string::npos);
        CHECK(msg.find("typo.conf:2") != std::string::npos);
    }
    CHECK_THROWS_AS(RunConfig::from_text("lr 0.1"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_text("epochs = ten").train_config(), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_text("use_tgcn = maybe").model_config(), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_text("fusion = add").model_config(), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_text("patch_size = 7").validate(), ConfigError);
}

TEST_CASE("overrides win over the file") {
    auto c = RunConfig::from_text(kTinyConfig);
    apply_overrides(c, {"--epochs", "7", "--lr=0.5", "--synth.seed", "9"});
    CHECK(c.get_size("epochs") == 7);
    CHECK(c.get_double("lr") == 0.5);
    CHECK(c.get_u64("synth.seed") == 9);
    CHECK_THROWS_AS(apply_overrides(c, {"--nope", "1"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(c, {"--epochs"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(c, {"epochs", "3"}), ConfigError);
}

TEST_CASE("command pipeline") {
    scratch::Dir dir("pipeline");
    auto config = RunConfig::from_text(kTinyConfig);
    const auto manifest = cmd_generate(config, dir / "data");
    CHECK(synth::read_manifest(manifest).size() == 6);

    const auto trained = cmd_train(config, manifest, dir / "run");
    CHECK(std::filesystem::exists(trained.checkpoint));
    const auto log = scratch::read_bytes(trained.loss_log);
    CHECK(log.rfind("epoch,step,l_landmark,l_classify,total\n", 0) == 0);
    CHECK(std::count(log.begin(), log.end(), '\n') == 1 + 2 * 3);

    const auto again = cmd_train(config, manifest, dir / "run2");
    CHECK(scratch::read_bytes(again.checkpoint) == scratch::read_bytes(trained.checkpoint));
    CHECK(scratch::read_bytes(again.loss_log) == log);

    const auto metrics = cmd_eval(trained.checkpoint, manifest, dir / "metrics.csv");
    const auto text = scratch::read_bytes(metrics);
    CHECK(text.rfind("variant,fold,mre_mm,mre_sd,sdr05,sdr10,sdr15,acc,n\nfull,0,", 0) == 0);

    const auto image = dir.path() / "data/images/sample_0002.pgm";
    const auto truth = manifest_landmarks(manifest, image);
    CHECK(truth == synth::read_manifest(manifest)[2].landmarks);
    const auto result = cmd_infer(trained.checkpoint, image, dir / "overlay.pgm", truth);
    REQUIRE(result.landmarks.size() == 6);
    CHECK(result.has_probability);
    CHECK(result.probability >= 0.0);
    CHECK(result.probability <= 1.0);
    const auto fields = split(result.csv_line(), ',');
    CHECK(fields.size() == 13);
    CHECK(std::filesystem::exists(dir / "overlay.pgm"));
    const auto twin = cmd_infer(trained.checkpoint, dir.path() / "data/images/sample_0002.tgt");
    CHECK(twin.landmarks.size() == 6);

    config.set("use_tgcn", "false");
    const auto plain = cmd_train(config, manifest, dir / "plain");
    const auto no_head = cmd_infer(plain.checkpoint, image);
    CHECK_FALSE(no_head.has_probability);
    CHECK(no_head.csv_line().back() == ',');

    CHECK_THROWS_AS(cmd_infer(trained.checkpoint, dir.path() / "missing.pgm"), IoError);
    CHECK_THROWS_AS(manifest_landmarks(manifest, dir.path() / "nothing.pgm"), DataError);
}

TEST_CASE("tool exit codes") {
    scratch::Dir dir("tool");
    scratch::write_bytes(dir / "tiny.conf", kTinyConfig);
    const std::string conf = "-c '" + (dir / "tiny.conf").string() + "'";

    auto gen = run_tool(dir, "generate " + conf + " -o '" + (dir / "data").string() + "' --synth.count 10");
    CHECK(gen.code == 0);
    const auto manifest = dir / "data/manifest.csv";
    CHECK(synth::read_manifest(manifest).size() == 10);

    auto typo = run_tool(dir, "generate " + conf + " -o '" + (dir / "x").string() + "' --synth.cout 10");
    CHECK(typo.code == 2);
    CHECK(typo.err.rfind("hipmark: error[config]: ", 0) == 0);
    CHECK(typo.err.find("synth.cout") != std::string::npos);

    scratch::write_bytes(dir / "bad.conf", "epochs = 2\nlearning_rate = 1\n");
    auto bad_file = run_tool(dir, "train -c '" + (dir / "bad.conf").string() + "' -d '" + manifest.string() + "' -o x");
    CHECK(bad_file.code == 2);
    CHECK(bad_file.err.find("learning_rate") != std::string::npos);

    CHECK(run_tool(dir, "").code == 2);
    CHECK(run_tool(dir, "frobnicate").code == 2);

    auto missing = run_tool(dir, "train " + conf + " -d '" + (dir / "none.csv").string() + "' -o '" + (dir / "r").string() + "'");
    CHECK(missing.code == 3);

    scratch::write_bytes(dir / "junk.ckpt", "TGCK\x01");
    auto junk = run_tool(dir, "infer -k '" + (dir / "junk.ckpt").string() + "' -i '" +
                                  (dir / "data/images/sample_0000.pgm").string() + "'");
    CHECK(junk.code == 4);
    CHECK(junk.err.rfind("hipmark: error[format]: ", 0) == 0);

    const auto twin = dir.path() / "data/images/sample_0004.tgt";
    const auto saved = scratch::read_bytes(twin);
    NamedTensor poisoned{"image", load_tensors(twin)[0].tensor};
    poisoned.tensor.data()[0] = std::nanf("");
    save_tensors(twin, std::span(&poisoned, 1));
    auto numeric = run_tool(dir, "train " + conf + " -d '" + manifest.string() + "' -o '" + (dir / "nan").string() + "'");
    CHECK(numeric.code == 5);
    CHECK(numeric.err.find("hipmark: error[numeric]: non-finite loss at step") != std::string::npos);
    scratch::write_bytes(twin, saved);

    auto train = run_tool(dir, "train " + conf + " -d '" + manifest.string() + "' -o '" + (dir / "run").string() + "' --epochs 1");
    REQUIRE(train.code == 0);
    auto infer = run_tool(dir, "infer -k '" + (dir / "run/model.ckpt").string() + "' -i '" +
                                   (dir / "data/images/sample_0001.pgm").string() + "' --truth '" + manifest.string() +
                                   "' --overlay '" + (dir / "o.pgm").string() + "'");
    CHECK(infer.code == 0);
    const auto fields = split(infer.out.substr(0, infer.out.find('\n')), ',');
    REQUIRE(fields.size() == 13);
    const double p = std::stod(fields[12]);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);

    auto defaults = run_tool(dir, "defaults");
    CHECK(defaults.code == 0);
    CHECK(RunConfig::from_text(defaults.out).to_text() == RunConfig{}.to_text());
}
