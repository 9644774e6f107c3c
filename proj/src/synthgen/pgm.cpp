#include "hipmark/synthgen/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "hipmark/error.hpp"

namespace hipmark::synth {

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string header_token(std::istream& in, const std::string& where) {
    std::string token;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) {
            if (!token.empty()) return token;
            continue;
        }
        token.push_back(static_cast<char>(ch));
    }
    if (token.empty()) throw FormatError(where + ": truncated PGM header");
    return token;
}

std::size_t header_number(std::istream& in, const std::string& where) {
    const std::string t = header_token(in, where);
    if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw FormatError(where + ": bad PGM header field '" + t + "'");
    }
    return std::stoul(t);
}

}  // namespace

void write_pgm(const std::filesystem::path& path, const Tensor& image) {
    std::size_t h = 0, w = 0;
    if (image.ndim() == 3 && image.dim(0) == 1) {
        h = image.dim(1);
        w = image.dim(2);
    } else if (image.ndim() == 2) {
        h = image.dim(0);
        w = image.dim(1);
    } else {
        throw DimensionError("write_pgm: expected [1, h, w] or [h, w], got " + shape_str(image.shape()));
    }
    std::vector<unsigned char> bytes(h * w);
    auto px = image.data();
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const float v = std::clamp(px[i], 0.0f, 1.0f);
        bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0f));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "P5\n" << w << ' ' << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

Tensor read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string where = path.string();
    if (header_token(in, where) != "P5") throw FormatError(where + ": not a binary PGM (P5)");
    const std::size_t w = header_number(in, where);
    const std::size_t h = header_number(in, where);
    const std::size_t maxval = header_number(in, where);
    if (w == 0 || h == 0 || maxval == 0 || maxval > 255) throw FormatError(where + ": unsupported PGM geometry");
    std::vector<unsigned char> bytes(w * h);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw FormatError(where + ": truncated PGM data");
    Tensor image({1, h, w});
    auto px = image.data();
    for (std::size_t i = 0; i < bytes.size(); ++i) px[i] = static_cast<float>(bytes[i]) / static_cast<float>(maxval);
    return image;
}

}  // namespace hipmark::synth
