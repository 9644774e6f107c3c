#include "hipmark/synthgen/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "hipmark/diffcore/random.hpp"
#include "hipmark/diffcore/tensor_io.hpp"
#include "hipmark/error.hpp"
#include "hipmark/synthgen/geometry.hpp"
#include "hipmark/synthgen/pgm.hpp"

namespace hipmark::synth {

namespace fs = std::filesystem;

namespace {

std::string manifest_header(bool with_group) {
    std::string h = "file";
    for (std::size_t i = 1; i <= kNumLandmarks; ++i) h += fmt::format(",x{0},y{0}", i);
    h += ",label,alpha_deg,beta_deg,spacing_mm_px";
    if (with_group) h += ",group";
    return h;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& where) {
    T value{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw DataError(where + ": cannot parse '" + text + "'");
    return value;
}

std::string sample_id(std::size_t index) { return fmt::format("sample_{:04d}", index); }

}  // namespace

void SynthConfig::validate() const {
    if (count < 1) throw ConfigError("synth.count must be >= 1");
    if (!(balance >= 0.0 && balance <= 1.0)) throw ConfigError("synth.balance must lie in [0, 1]");
    if (!(spacing_mm > 0.0)) throw ConfigError("synth.spacing_mm must be positive");
    if (image_size < 64) throw ConfigError("synth.image_size must be >= 64");
    if (!(speckle >= 0.0 && speckle < 1.0)) throw ConfigError("synth.speckle must lie in [0, 1)");
}

std::size_t abnormal_count(const SynthConfig& config) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(config.count) * config.balance));
}

std::vector<PhantomSample> generate_samples(const SynthConfig& config) {
    config.validate();
    const std::size_t n = config.count;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle(mix_seed(config.seed, 0));
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
    std::vector<bool> abnormal(n, false);
    const std::size_t n_abnormal = abnormal_count(config);
    for (std::size_t i = 0; i < n_abnormal; ++i) abnormal[order[i]] = true;

    RenderOptions render;
    render.speckle = config.speckle;
    std::vector<PhantomSample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        PhantomSample& s = out[i];
        s.seed = mix_seed(config.seed, i + 1);
        Rng rng(s.seed);
        const auto request = abnormal[i] ? ClassRequest::abnormal : ClassRequest::normal;
        Geometry g;
        try {
            g = sample_geometry(request, rng, config.image_size);
        } catch (const GenerationError& e) {
            throw GenerationError(sample_id(i) + ": " + e.what());
        }
        s.angles = g.angles;
        s.sample.id = sample_id(i);
        s.sample.landmarks = g.landmarks;
        s.sample.label = g.label;
        s.sample.spacing_mm = config.spacing_mm;
        s.sample.group = config.subjects > 0 ? static_cast<int>(i % config.subjects) : -1;
        s.sample.image = render_phantom(g.landmarks, rng, config.image_size, render);
    }
    return out;
}

void write_manifest(const fs::path& path, const std::vector<ManifestRow>& rows, bool with_group) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << manifest_header(with_group) << '\n';
    for (const auto& r : rows) {
        if (r.landmarks.size() != kNumLandmarks) throw ContractError("write_manifest: row needs 6 landmarks");
        std::string line = r.file;
        for (const auto& p : r.landmarks) line += fmt::format(",{:.6f},{:.6f}", p.x, p.y);
        line += fmt::format(",{},{:.6f},{:.6f},{}", r.label, r.alpha_deg, r.beta_deg, r.spacing_mm);
        if (with_group) line += fmt::format(",{}", r.group);
        out << line << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<ManifestRow> read_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty manifest");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool with_group = false;
    if (line == manifest_header(true)) {
        with_group = true;
    } else if (line != manifest_header(false)) {
        throw DataError(path.string() + ": unexpected manifest header '" + line + "'");
    }
    const std::size_t expected = with_group ? 18 : 17;
    std::vector<ManifestRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = fmt::format("{}:{}", path.string(), line_no);
        const auto f = split_csv(line);
        if (f.size() != expected) {
            throw DataError(fmt::format("{}: expected {} fields, got {}", where, expected, f.size()));
        }
        ManifestRow r;
        r.file = f[0];
        for (std::size_t i = 0; i < kNumLandmarks; ++i) {
            r.landmarks.push_back({parse_number<double>(f[1 + 2 * i], where), parse_number<double>(f[2 + 2 * i], where)});
        }
        r.label = parse_number<int>(f[13], where);
        if (r.label != 0 && r.label != 1) throw DataError(where + ": label must be 0 or 1");
        r.alpha_deg = parse_number<double>(f[14], where);
        r.beta_deg = parse_number<double>(f[15], where);
        r.spacing_mm = parse_number<double>(f[16], where);
        if (with_group) r.group = parse_number<int>(f[17], where);
        rows.push_back(std::move(r));
    }
    return rows;
}

fs::path generate_dataset(const SynthConfig& config, const fs::path& out_dir) {
    const auto samples = generate_samples(config);
    std::error_code ec;
    fs::create_directories(out_dir / "images", ec);
    if (ec) throw IoError("cannot create " + (out_dir / "images").string() + ": " + ec.message());
    std::vector<ManifestRow> rows;
    for (const auto& s : samples) {
        const fs::path rel = fs::path("images") / (s.sample.id + ".pgm");
        write_pgm(out_dir / rel, s.sample.image);
        const NamedTensor image{"image", s.sample.image};
        save_tensors(out_dir / fs::path(rel).replace_extension(".tgt"), std::span(&image, 1));
        rows.push_back({rel.generic_string(), s.sample.landmarks, s.sample.label, s.angles.alpha_deg,
                        s.angles.beta_deg, s.sample.spacing_mm, s.sample.group});
    }
    const fs::path manifest = out_dir / kManifestName;
    write_manifest(manifest, rows, config.subjects > 0);
    return manifest;
}

std::vector<ImageSample> load_dataset(const fs::path& manifest) {
    const auto rows = read_manifest(manifest);
    const fs::path root = manifest.parent_path();
    std::vector<ImageSample> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        ImageSample s;
        const fs::path file = root / r.file;
        s.id = file.stem().string();
        const fs::path twin = fs::path(file).replace_extension(".tgt");
        if (fs::exists(twin)) {
            auto tensors = load_tensors(twin);
            if (tensors.size() != 1 || tensors[0].tensor.ndim() != 3 || tensors[0].tensor.dim(0) != 1) {
                throw DataError(twin.string() + ": expected a single [1, h, w] image tensor");
            }
            s.image = tensors[0].tensor;
        } else if (fs::exists(file)) {
            s.image = read_pgm(file);
        } else {
            throw DataError("missing image " + file.string());
        }
        s.landmarks = r.landmarks;
        s.label = r.label;
        s.spacing_mm = r.spacing_mm;
        s.group = r.group;
        out.push_back(std::move(s));
    }
    if (out.empty()) throw DataError(manifest.string() + ": no samples");
    return out;
}

}  // namespace hipmark::synth
