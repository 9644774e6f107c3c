// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hipmark/cli/commands.hpp"
#include "hipmark/error.hpp"
#include "hipmark/eval/experiment.hpp"
#include "hipmark/eval/graf.hpp"
#include "hipmark/eval/metrics.hpp"
#include "hipmark/mmf/mmf.hpp"
#include "hipmark/synthgen/dataset.hpp"
#include "hipmark/tgcn/tgcn.hpp"
#include "hipmark/training/checkpoint.hpp"
#include "hipmark/training/trainer.hpp"
#include "support/oracles.hpp"
#include "support/scratch_dir.hpp"
#include "support/toy.hpp"

using namespace hipmark;

namespace {

using T64 = Tensor64;
using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        notes.push_back((ok ? "" : "FAILED ") + what);
    }
    void note(const std::string& what) { notes.push_back(what); }
};

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

// -- 1: gradients ---------------------------------------------------------------

T64 probe(const T64& y, std::uint64_t seed = 99) {
    Rng rng(seed);
    auto w = oracle::random_tensor<double>(y.shape(), rng, -1.0, 1.0, false);
    return sum(mul(y, w));
}

template <typename T>
std::vector<BasicTensor<T>> parameter_tensors(BasicTgcnIcfNetwork<T>& model) {
    std::vector<BasicTensor<T>> out;
    for (const auto& e : model.parameters().entries()) out.push_back(e.tensor);
    return out;
}

void gradients(Verdict& v) {
    const auto start = Clock::now();
    Rng rng(4);
    auto a = oracle::random_tensor<double>({3, 4}, rng);
    auto b = oracle::random_tensor<double>({3, 4}, rng);
    auto m = oracle::random_tensor<double>({4, 5}, rng);
    auto vec4 = oracle::random_tensor<double>({4}, rng);
    auto x = oracle::random_tensor<double>({2, 5, 5}, rng);
    auto w = oracle::random_tensor<double>({3, 2, 3, 3}, rng);
    auto wt = oracle::random_tensor<double>({2, 3, 2, 2}, rng);
    auto bias = oracle::random_tensor<double>({3}, rng);
    auto kinked = oracle::random_tensor<double>({3, 4}, rng, 0.1, 1.0);
    for (auto& e : kinked.data()) e = rng.bernoulli(0.5) ? e : -e;
    T64 labels({3, 4});
    for (std::size_t i = 0; i < labels.numel(); ++i) labels.data()[i] = static_cast<double>(i % 2);
    auto logit = oracle::random_tensor<double>({1}, rng, -3, 3);

    auto fl = oracle::random_tensor<double>({2, 4, 4}, rng);
    auto fg = oracle::random_tensor<double>({2, 4, 4}, rng);
    auto nodes = oracle::random_tensor<double>({6, 8}, rng);
    auto gw = oracle::random_tensor<double>({8, 8}, rng);
    auto w0 = oracle::random_tensor<double>({3, 8}, rng);
    auto w1 = oracle::random_tensor<double>({1, 3}, rng);
    auto icf = oracle::random_tensor<double>({6, 2, 4}, rng);
    const auto a_hat = tgcn::normalize_adjacency(tgcn::build_adjacency<double>(tgcn::TopologySpec{}));

    struct Case {
        const char* op;
        std::vector<T64> inputs;
        std::function<T64()> loss;
    };
    const std::vector<Case> cases{
        {"add", {a, b}, [&] { return probe(add(a, b)); }},
        {"sub", {a, b}, [&] { return probe(sub(a, b)); }},
        {"mul", {a, b}, [&] { return probe(mul(a, b)); }},
        {"scale", {a}, [&] { return probe(scale(a, 2.5)); }},
        {"add_broadcast", {a, vec4}, [&] { return probe(add_broadcast(a, vec4, 1)); }},
        {"mul_broadcast", {a, vec4}, [&] { return probe(mul_broadcast(a, vec4, 1)); }},
        {"sum", {a}, [&] { return sum(a); }},
        {"mean", {a}, [&] { return scale(mean(a), 3.0); }},
        {"mean_axis", {a}, [&] { return probe(mean_axis(a, 0)); }},
        {"reshape", {a}, [&] { return probe(reshape(a, {2, 6})); }},
        {"transpose", {a}, [&] { return probe(transpose(a)); }},
        {"concat", {a, b}, [&] { return probe(concat<double>({a, b}, 1)); }},
        {"slice", {a}, [&] { return probe(slice(a, 1, 1, 3)); }},
        {"matmul", {a, m}, [&] { return probe(matmul(a, m)); }},
        {"conv2d", {x, w, bias}, [&] { return probe(conv2d(x, w, bias)); }},
        {"conv2d/stride", {x, w, bias}, [&] { return probe(conv2d(x, w, bias, {2, 1})); }},
        {"transpose_conv2d", {x, wt, bias}, [&] { return probe(transpose_conv2d(x, wt, bias, 2)); }},
        {"relu", {kinked}, [&] { return probe(relu(kinked)); }},
        {"gelu", {a}, [&] { return probe(gelu(a)); }},
        {"sigmoid", {a}, [&] { return probe(sigmoid(a)); }},
        {"softmax", {a}, [&] { return probe(softmax(a, 1)); }},
        {"layer_norm", {a}, [&] { return probe(layer_norm(a, 1)); }},
        {"mse_loss", {a, b}, [&] { return mse_loss(a, b); }},
        {"bce_loss", {a}, [&] { return bce_loss(a, labels); }},
        {"bce_loss/scalar", {logit}, [&] { return bce_loss(logit, 1.0); }},
        {"mmf", {fl, fg}, [&] { return probe(mmf::local_to_global_fuse(fl, fg, 3)); }},
        {"gcn_layer", {nodes, gw}, [&] { return probe(tgcn::gcn_layer(nodes, a_hat, gw, false)); }},
        {"classify", {nodes, w0, w1}, [&] { return probe(tgcn::classify(nodes, w0, w1)); }},
        {"refine", {nodes, icf}, [&] { return probe(tgcn::refine_heatmaps(nodes, 2, 4, icf)); }},
    };
    double worst_op = 0.0;
    std::string worst_name, over;
    for (const auto& c : cases) {
        const double err = oracle::check_gradients<double>(c.inputs, c.loss, 1e-6).worst();
        if (err > worst_op) worst_op = err, worst_name = c.op;
        if (err >= 1e-6) over += std::string(over.empty() ? "" : " ") + c.op;
    }
    v.require(over.empty(), fmt::format("{} ops, worst 64-bit rel err {:.2e} ({}){}", cases.size(), worst_op,
                                        worst_name, over.empty() ? "" : ", over 1e-6: " + over));

    // 32-bit tape gradient of the 16x16 toy model against 64-bit differences on identical weights
    const auto sample = toy::sample(4);
    TgcnIcfNetwork model(toy::model_config(), 3);
    toy::jitter(model, 99);
    BasicTgcnIcfNetwork<double> twin(toy::model_config(), 3);
    auto wide = parameter_tensors(twin);
    const auto& narrow = model.parameters().entries();
    for (std::size_t i = 0; i < narrow.size(); ++i) {
        auto src = narrow[i].tensor.data();
        std::copy(src.begin(), src.end(), wide[i].data().begin());
    }
    model.parameters().zero_grad();
    training::sample_loss(model, sample, 1.0, 0.1).objective.backward();
    const auto reference = oracle::finite_differences<double>(wide, [&] {
        return training::sample_loss(twin, sample, 1.0, 0.1).objective;
    }, 1e-5);
    double worst_model = 0.0;
    for (std::size_t i = 0; i < narrow.size(); ++i) {
        auto g = narrow[i].tensor.grad();
        worst_model = std::max(worst_model, oracle::relative_error({g.begin(), g.end()}, reference[i]));
    }
    v.require(worst_model < 1e-2, fmt::format("full model 32-bit worst rel err {:.2e} over {} tensors", worst_model,
                                              narrow.size()));
    const double elapsed = seconds_since(start);
    v.require(elapsed < 120.0, fmt::format("{:.1f} s", elapsed));
}

// -- 2: topology ----------------------------------------------------------------

void topology(Verdict& v) {
    const auto a = tgcn::build_adjacency<double>(tgcn::TopologySpec{});
    std::size_t nonzero = 0;
    for (double e : a.data()) nonzero += e != 0.0;
    v.require(nonzero == 6, fmt::format("{} adjacency entries", nonzero));

    const auto a_hat = tgcn::normalize_adjacency(a);
    bool exact = true;
    for (std::size_t i = 0; i < 36; ++i) exact = exact && a_hat.data()[i] == (a.data()[i] + (i % 7 == 0)) / 2.0;
    v.require(exact, "normalised adjacency equals (A + I) / 2 exactly");

    Rng rng(4);
    std::vector<std::size_t> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        for (std::size_t i = 5; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        T64 p({6, 6});
        for (std::size_t i = 0; i < 6; ++i) p.data()[i * 6 + perm[i]] = 1.0;
        auto g = oracle::random_tensor<double>({6, 16}, rng, -1, 1, false);
        auto w = oracle::random_tensor<double>({16, 16}, rng, -1, 1, false);
        const auto lhs = tgcn::gcn_layer(matmul(p, g), matmul(matmul(p, a_hat), transpose(p)), w);
        const auto rhs = matmul(p, tgcn::gcn_layer(g, a_hat, w));
        for (std::size_t i = 0; i < lhs.numel(); ++i) worst = std::max(worst, std::abs(lhs.data()[i] - rhs.data()[i]));
    }
    v.require(worst < 1e-6, fmt::format("100 permutations, worst equivariance gap {:.2e}", worst));
}

// -- 3: fusion ------------------------------------------------------------------

void fusion(Verdict& v) {
    Rng rng(2);
    double worst_ref = 0.0, worst_col = 0.0, worst_identity = 0.0, worst_const = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        auto fl = oracle::random_tensor<float>({2, 5, 5}, rng, -2, 2, false);
        auto fg = oracle::random_tensor<float>({2, 5, 5}, rng, -2, 2, false);
        const auto out = mmf::local_to_global_fuse(fl, fg, 3);
        const auto ref = oracle::mmf_reference(fg, fl, 3);
        for (std::size_t i = 0; i < ref.size(); ++i) worst_ref = std::max(worst_ref, std::abs(out.data()[i] - ref[i]));

        const auto weights = mmf::modulation_weight_map(fg, fl, 3);
        for (std::size_t p = 0; p < 25; ++p) {
            double total = 0.0;
            for (std::size_t s = 0; s < 9; ++s) total += weights.data()[s * 25 + p];
            worst_col = std::max(worst_col, std::abs(total - 1.0));
        }

        const auto same = mmf::local_to_global_fuse(fl, fg, 1);
        for (std::size_t i = 0; i < fl.numel(); ++i)
            worst_identity = std::max(worst_identity, double(std::abs(same.data()[i] - fl.data()[i])));

        const float level = static_cast<float>(rng.uniform(-2, 2));
        const auto flat = Tensor::full({2, 5, 5}, level);
        const auto fused = mmf::local_to_global_fuse(flat, fg, 3);
        for (float e : fused.data())
            worst_const = std::max(worst_const, double(std::abs(e - level)));
    }
    v.require(worst_ref < 1e-5, fmt::format("50 instances vs loop reference {:.2e}", worst_ref));
    v.require(worst_col < 1e-6, fmt::format("weight columns sum to 1 within {:.2e}", worst_col));
    v.require(worst_identity == 0.0, fmt::format("n = 1 identity gap {:.1e}", worst_identity));
    v.require(worst_const < 1e-6, fmt::format("constant-field drift {:.2e}", worst_const));
}

// -- 4: metrics -----------------------------------------------------------------

std::vector<Point> random_points(Rng& rng) {
    std::vector<Point> p(kNumLandmarks);
    for (auto& q : p) q = {rng.uniform(0, 128), rng.uniform(0, 128)};
    return p;
}

void metrics(Verdict& v) {
    Rng rng(3);
    double worst_mre = 0.0, worst_sdr = 0.0;
    bool monotone = true;
    for (int i = 0; i < 1000; ++i) {
        const auto p = random_points(rng), g = random_points(rng);
        const double spacing = rng.uniform(0.05, 0.2);
        worst_mre = std::max(worst_mre, std::abs(eval::mre(p, g, spacing) - oracle::mre_loop(p, g, spacing)));
        std::vector<double> distances(1 + rng.below(40));
        for (auto& d : distances) d = rng.uniform(0.0, 2.0);
        const auto rates = eval::sdr(distances);
        for (std::size_t t = 0; t < 3; ++t) {
            worst_sdr = std::max(worst_sdr, std::abs(rates[t] - oracle::sdr_loop(distances, eval::kSdrThresholdsMm[t])));
        }
        monotone = monotone && rates[0] <= rates[1] && rates[1] <= rates[2];
    }
    v.require(worst_mre < 1e-9 && worst_sdr < 1e-9,
              fmt::format("1000 instances, mre gap {:.1e}, sdr gap {:.1e}", worst_mre, worst_sdr));
    v.require(monotone, "sdr monotone in the threshold");

    const std::vector<double> three{0.4, 0.6, 1.2};
    const auto rates = eval::sdr(three);
    const auto shown = fmt::format("{:.2f}/{:.2f}/{:.2f}", rates[0], rates[1], rates[2]);
    v.require(shown == "33.33/66.67/100.00", "{0.4, 0.6, 1.2} -> " + shown);

    double worst_swap = 0.0;
    for (int i = 0; i < 200; ++i) {
        const auto pts = random_points(rng);
        const auto base = eval::graf_angles(pts);
        for (std::size_t pair = 0; pair < 3; ++pair) {
            auto swapped = pts;
            std::swap(swapped[2 * pair], swapped[2 * pair + 1]);
            const auto a = eval::graf_angles(swapped);
            worst_swap = std::max({worst_swap, std::abs(a.alpha_deg - base.alpha_deg), std::abs(a.beta_deg - base.beta_deg)});
        }
    }
    v.require(worst_swap < 1e-9, fmt::format("endpoint-swap angle gap {:.1e}", worst_swap));

    bool boundaries = true;
    for (double beta : {10.0, 50.0, 76.0, 77.0, 89.0}) boundaries = boundaries && eval::graf_label({60.0, beta}) == 1;
    for (double alpha : {61.0, 70.0, 89.0}) boundaries = boundaries && eval::graf_label({alpha, 77.0}) == 1;
    v.require(boundaries, "(60, b) and (a, 77) abnormal");
}

// -- 5: generator ---------------------------------------------------------------

void generator(Verdict& v) {
    scratch::Dir dir("acceptance_gen");
    synth::SynthConfig cfg;
    cfg.count = 200;
    const auto manifest = synth::generate_dataset(cfg, dir / "a");
    const auto rows = synth::read_manifest(manifest);
    v.require(rows.size() == 200, fmt::format("{} rows", rows.size()));

    std::size_t rule_breaks = 0;
    double worst_angle = 0.0;
    for (const auto& r : rows) {
        const auto recomputed = eval::graf_angles(r.landmarks);
        rule_breaks += r.label != (r.alpha_deg > 60.0 && r.beta_deg < 77.0 ? 0 : 1);
        rule_breaks += r.label != eval::graf_label(recomputed);
        worst_angle = std::max({worst_angle, std::abs(recomputed.alpha_deg - r.alpha_deg),
                                std::abs(recomputed.beta_deg - r.beta_deg)});
    }
    v.require(rule_breaks == 0, fmt::format("{} label rule violations", rule_breaks));
    v.require(worst_angle < 0.1, fmt::format("worst angle deviation {:.2e} deg", worst_angle));

    synth::generate_dataset(cfg, dir / "b");
    std::size_t differing = 0, files = 0;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir / "a")) {
        if (!entry.is_regular_file()) continue;
        ++files;
        const auto twin = dir / "b" / std::filesystem::relative(entry.path(), dir / "a");
        differing += scratch::read_bytes(entry.path()) != scratch::read_bytes(twin);
    }
    v.require(differing == 0, fmt::format("regeneration: {} of {} files differ", differing, files));
}

// -- 6: trainability ------------------------------------------------------------

struct SetScore {
    double l_landmark = 0.0;
    double mre = 0.0;
    double accuracy = 0.0;
};

SetScore score(const TgcnIcfNetwork& model, const std::vector<ImageSample>& data, double sigma) {
    NoGradGuard no_grad;
    SetScore s;
    std::vector<eval::SamplePrediction> predictions;
    for (const auto& sample : data) {
        s.l_landmark += training::sample_loss(model, sample, sigma, 0.0).l_landmark / static_cast<double>(data.size());
        predictions.push_back(eval::predict(model, sample));
    }
    const auto fold = eval::summarize_fold(predictions, 0);
    s.mre = fold.mre_mm.mean;
    s.accuracy = fold.accuracy.value_or(0.0);
    return s;
}

std::unique_ptr<TgcnIcfNetwork> trained_model;

void trainability(Verdict& v, const std::vector<ImageSample>& data) {
    const auto start = Clock::now();
    const cli::RunConfig config;
    auto train = config.train_config();
    train.max_steps = 500;
    trained_model = std::make_unique<TgcnIcfNetwork>(config.model_config(), train.seed);
    const auto before = score(*trained_model, data, train.sigma);
    training::Trainer trainer(*trained_model, train);
    const auto log = trainer.fit(data);
    const auto after = score(*trained_model, data, train.sigma);
    const double elapsed = seconds_since(start);

    v.require(log.size() == 500, fmt::format("{} steps", log.size()));
    v.require(after.l_landmark < 0.5 * before.l_landmark,
              fmt::format("l_landmark {:.5f} -> {:.5f}", before.l_landmark, after.l_landmark));
    v.require(after.mre < 2.0 && after.mre < before.mre,
              fmt::format("train MRE {:.3f} mm (untrained {:.3f} mm)", after.mre, before.mre));
    v.require(after.accuracy > 0.7, fmt::format("accuracy {:.3f}", after.accuracy));
    v.require(elapsed < 1800.0, fmt::format("{:.0f} s", elapsed));
}

// -- 7: ablation ----------------------------------------------------------------

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

void ablation(Verdict& v, const std::filesystem::path& manifest, const std::vector<ImageSample>& data,
              const scratch::Dir& dir) {
    cli::RunConfig config;
    config.set("max_steps", "60");
    const auto out = cli::cmd_ablate(config, manifest, dir / "ablation");

    const auto table = lines_of(scratch::read_bytes(out.table));
    std::size_t rows = 0;
    for (const auto& line : table) rows += !line.empty() && line[0] != '#' && line != eval::kAblationCsvHeader;
    v.require(rows == 4, fmt::format("{} variant rows in {}", rows, out.table.filename().string()));

    // re-derive the per-variant reports from the metrics CSV
    struct Row {
        std::string variant;
        std::string fold;
        double mre = 0.0;
        double sdr[3]{};
        std::size_t n = 0;
    };
    std::vector<Row> parsed;
    for (const auto& line : lines_of(scratch::read_bytes(out.metrics))) {
        if (line.empty() || line == eval::kMetricsCsvHeader) continue;
        std::vector<std::string> f;
        std::istringstream in(line);
        for (std::string field; std::getline(in, field, ',');) f.push_back(field);
        Row r{f[0], f[1], std::stod(f[2]), {std::stod(f[4]), std::stod(f[5]), std::stod(f[6])}, 0};
        r.n = f.size() > 8 ? std::stoul(f[8]) : 0;
        parsed.push_back(r);
    }

    const auto splits = eval::kfold_splits(data, config.experiment_config().kfold);
    bool same_splits = true, valid = true;
    std::vector<std::pair<std::string, double>> means;
    for (const auto& r : parsed) {
        valid = valid && r.mre >= 0.0 && r.sdr[0] <= r.sdr[1] && r.sdr[1] <= r.sdr[2];
        if (r.fold == "mean") {
            means.emplace_back(r.variant, r.mre);
        } else {
            same_splits = same_splits && r.n == splits.at(std::stoul(r.fold)).size();
        }
    }
    v.require(means.size() == 4, fmt::format("{} variants in the metrics file", means.size()));
    const auto full_seed = eval::fold_seed(config.get_u64("seed"), 0);
    v.require(same_splits, fmt::format("every variant scored on the same {} folds (fold-0 init seed {})", splits.size(),
                                       full_seed));
    v.require(valid, "MRE >= 0 and SDR monotone in every row");

    auto mean_of = [&](const std::string& variant) -> double {
        for (const auto& [name, mre] : means) {
            if (name == variant) return mre;
        }
        return NAN;
    };
    const double full = mean_of("full");
    for (const char* other : {"concat_baseline", "wo_mmf", "wo_tgcn"}) {
        const double o = mean_of(other);
        v.note(fmt::format("full {} {} on MRE ({:.3f} vs {:.3f} mm, reported only)", full < o ? "beats" : "does not beat",
                           other, full, o));
    }
}

// -- 8: persistence -------------------------------------------------------------

std::vector<float> forward_values(const TgcnIcfNetwork& model, const Tensor& image) {
    NoGradGuard no_grad;
    const auto out = model.forward(image);
    std::vector<float> v(out.icf_logits.data().begin(), out.icf_logits.data().end());
    if (out.has_tgcn()) {
        v.insert(v.end(), out.refined.data().begin(), out.refined.data().end());
        v.push_back(out.class_logit.item());
    }
    return v;
}

std::vector<std::vector<float>> snapshot(const TgcnIcfNetwork& model) {
    std::vector<std::vector<float>> out;
    for (const auto& e : model.parameters().entries()) out.emplace_back(e.tensor.data().begin(), e.tensor.data().end());
    return out;
}

void persistence(Verdict& v, const std::vector<ImageSample>& data, const scratch::Dir& dir) {
    const cli::RunConfig config;
    if (!trained_model) trained_model = std::make_unique<TgcnIcfNetwork>(config.model_config(), 1);
    const auto path = dir / "model.ckpt";
    training::save_checkpoint(path, *trained_model, nullptr, {training::kCheckpointVersion, 0, 0, config.to_text()});

    TgcnIcfNetwork restored(config.model_config(), 77);
    training::load_checkpoint(path, restored, nullptr);
    bool bitwise = true;
    for (std::size_t i = 0; i < 4; ++i) {
        bitwise = bitwise && forward_values(restored, data[i].image) == forward_values(*trained_model, data[i].image);
    }
    v.require(bitwise, "save -> load -> forward bitwise identical on 4 images");

    const auto bytes = scratch::read_bytes(path);
    TgcnIcfNetwork target(config.model_config(), 78);
    const auto before = snapshot(target);
    std::size_t rejected = 0, untouched = 0;
    const std::size_t cuts[] = {0, 4, 16, bytes.size() / 4, bytes.size() / 2, bytes.size() - 1};
    for (std::size_t cut : cuts) {
        const auto cut_path = dir / fmt::format("cut_{}.ckpt", cut);
        scratch::write_bytes(cut_path, bytes.substr(0, cut));
        try {
            training::load_checkpoint(cut_path, target, nullptr);
        } catch (const FormatError&) {
            ++rejected;
        }
        untouched += snapshot(target) == before;
    }
    v.require(rejected == std::size(cuts) && untouched == std::size(cuts),
              fmt::format("{}/{} truncations rejected, {}/{} left the model unchanged", rejected, std::size(cuts),
                          untouched, std::size(cuts)));
}

}  // namespace

int main() {
    scratch::Dir dir("acceptance");
    std::filesystem::path manifest;
    std::vector<ImageSample> data;
    auto dataset = [&]() -> const std::vector<ImageSample>& {
        if (data.empty()) {
            manifest = cli::cmd_generate(cli::RunConfig{}, dir / "data");
            data = synth::load_dataset(manifest);
        }
        return data;
    };

    const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria{
        {"gradients", gradients},
        {"topology", topology},
        {"fusion", fusion},
        {"metrics", metrics},
        {"generator", generator},
        {"trainability", [&](Verdict& v) { trainability(v, dataset()); }},
        {"ablation", [&](Verdict& v) { ablation(v, manifest, dataset(), dir); }},
        {"persistence", [&](Verdict& v) { persistence(v, dataset(), dir); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        const auto start = Clock::now();
        try {
            criteria[i].second(v);
        } catch (const std::exception& e) {
            v.require(false, std::string("threw: ") + e.what());
        }
        failures += !v.pass;
        std::string detail;
        for (const auto& n : v.notes) detail += (detail.empty() ? "" : "; ") + n;
        std::printf("%s %d %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", static_cast<int>(i + 1), criteria[i].first,
                    seconds_since(start), detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
