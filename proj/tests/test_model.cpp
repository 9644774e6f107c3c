#include <doctest.h>

#include <chrono>
#include <cmath>

#include "hipmark/error.hpp"
#include "hipmark/model/network.hpp"
#include "hipmark/training/trainer.hpp"
#include "support/oracles.hpp"
#include "support/toy.hpp"

using namespace hipmark;

TEST_CASE("output layout per variant") {
    const auto base = toy::model_config();
    const auto sample = toy::sample(1);
    for (Variant v : {Variant::concat_baseline, Variant::without_mmf, Variant::without_tgcn, Variant::full}) {
        CAPTURE(variant_name(v));
        const auto cfg = apply_variant(base, v);
        TgcnIcfNetwork model(cfg, 2);
        const auto out = model.forward(sample.image);
        CHECK(out.icf_heatmaps.shape() == Shape{6, 8, 8});
        const bool tgcn = v == Variant::without_mmf || v == Variant::full;
        CHECK(out.has_tgcn() == tgcn);
        CHECK(model.tgcn() == (tgcn ? model.tgcn() : nullptr));
        CHECK((cfg.fusion.mode == mmf::FusionMode::mmf) == (v == Variant::without_tgcn || v == Variant::full));
        if (tgcn) {
            CHECK(out.refined.shape() == Shape{6, 8, 8});
            CHECK(out.class_logit.shape() == Shape{1});
            CHECK(&out.decode_source() == &out.refined);
        } else {
            CHECK(&out.decode_source() == &out.icf_heatmaps);
        }
        CHECK(parse_variant(variant_name(v)) == v);
    }
    CHECK_THROWS_AS(parse_variant("nothing"), ConfigError);
}

TEST_CASE("initialisation is seeded") {
    const auto cfg = toy::model_config();
    TgcnIcfNetwork a(cfg, 5), b(cfg, 5), c(cfg, 6);
    const auto& ea = a.parameters().entries();
    const auto& eb = b.parameters().entries();
    const auto& ec = c.parameters().entries();
    REQUIRE(ea.size() == eb.size());
    bool any_diff = false;
    for (std::size_t i = 0; i < ea.size(); ++i) {
        CHECK(ea[i].name == eb[i].name);
        for (std::size_t j = 0; j < ea[i].tensor.numel(); ++j) {
            CHECK(ea[i].tensor.data()[j] == eb[i].tensor.data()[j]);
            any_diff = any_diff || ea[i].tensor.data()[j] != ec[i].tensor.data()[j];
        }
    }
    CHECK(any_diff);
}

namespace {

template <typename T>
std::vector<BasicTensor<T>> parameter_tensors(BasicTgcnIcfNetwork<T>& model) {
    std::vector<BasicTensor<T>> out;
    for (const auto& e : model.parameters().entries()) out.push_back(e.tensor);
    return out;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

TEST_CASE("full-model loss gradient in 64-bit") {
    const auto start = std::chrono::steady_clock::now();
    BasicTgcnIcfNetwork<double> model(toy::model_config(), 3);
    toy::jitter(model, 99);
    const auto sample = toy::sample(4);
    const auto check = oracle::check_gradients<double>(parameter_tensors(model), [&] {
        return training::sample_loss(model, sample, 1.0, 0.1).objective;
    }, 1e-5);
    const auto& entries = model.parameters().entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        CAPTURE(entries[i].name);
        CHECK(check.per_tensor[i] < 1e-4);
    }
    MESSAGE("worst relative error " << check.worst() << " in " << elapsed_since(start) << " s");
}

TEST_CASE("full-model loss gradient in 32-bit against a 64-bit twin") {
    const auto start = std::chrono::steady_clock::now();
    const auto sample = toy::sample(4);
    TgcnIcfNetwork model(toy::model_config(), 3);
    toy::jitter(model, 99);
    BasicTgcnIcfNetwork<double> twin(toy::model_config(), 3);
    const auto& narrow = model.parameters().entries();
    const auto& wide = twin.parameters().entries();
    auto wide_params = parameter_tensors(twin);
    REQUIRE(narrow.size() == wide.size());
    for (std::size_t i = 0; i < narrow.size(); ++i) {
        REQUIRE(narrow[i].name == wide[i].name);
        auto src = narrow[i].tensor.data();
        auto dst = wide_params[i].data();
        std::copy(src.begin(), src.end(), dst.begin());
    }

    model.parameters().zero_grad();
    training::sample_loss(model, sample, 1.0, 0.1).objective.backward();
    const auto reference = oracle::finite_differences<double>(wide_params, [&] {
        return training::sample_loss(twin, sample, 1.0, 0.1).objective;
    }, 1e-5);
    for (std::size_t i = 0; i < narrow.size(); ++i) {
        CAPTURE(narrow[i].name);
        auto g = narrow[i].tensor.grad();
        const std::vector<double> analytic(g.begin(), g.end());
        CHECK(oracle::relative_error(analytic, reference[i]) < 1e-2);
    }
    MESSAGE("checked in " << elapsed_since(start) << " s");
}
