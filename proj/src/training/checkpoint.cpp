#include "hipmark/training/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "hipmark/diffcore/tensor_io.hpp"
#include "hipmark/error.hpp"

namespace hipmark::training {

namespace {

constexpr std::uint32_t kMaxConfigBytes = 1u << 20;

CheckpointInfo read_header(std::istream& in) {
    const std::string magic = io::get_bytes(in, 4);
    if (std::memcmp(magic.data(), kCheckpointMagic, 4) != 0) throw FormatError("not a checkpoint (bad magic)");
    CheckpointInfo info;
    info.version = io::get_u32(in);
    if (info.version != kCheckpointVersion) {
        throw FormatError("unsupported checkpoint version " + std::to_string(info.version));
    }
    info.epoch = io::get_u64(in);
    info.optimizer_steps = io::get_u64(in);
    const std::uint32_t len = io::get_u32(in);
    if (len > kMaxConfigBytes) throw FormatError("checkpoint config block too large");
    info.config_text = io::get_bytes(in, len);
    return info;
}

Tensor moment_tensor(const Shape& shape, const std::vector<float>& values) { return Tensor(shape, values); }

}  // namespace

void write_checkpoint(std::ostream& out, const TgcnIcfNetwork& model, const Adam* optimizer,
                      const CheckpointInfo& info) {
    out.write(kCheckpointMagic, 4);
    io::put_u32(out, kCheckpointVersion);
    io::put_u64(out, info.epoch);
    io::put_u64(out, optimizer ? optimizer->steps() : info.optimizer_steps);
    io::put_u32(out, static_cast<std::uint32_t>(info.config_text.size()));
    out.write(info.config_text.data(), static_cast<std::streamsize>(info.config_text.size()));

    const auto& entries = model.parameters().entries();
    std::vector<NamedTensor> tensors(entries.begin(), entries.end());
    if (optimizer) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            tensors.push_back({"adam.m/" + entries[i].name,
                               moment_tensor(entries[i].tensor.shape(), optimizer->first_moments()[i])});
            tensors.push_back({"adam.v/" + entries[i].name,
                               moment_tensor(entries[i].tensor.shape(), optimizer->second_moments()[i])});
        }
    }
    write_tensors(out, tensors);
}

void save_checkpoint(const std::filesystem::path& path, const TgcnIcfNetwork& model, const Adam* optimizer,
                     const CheckpointInfo& info) {
    std::ostringstream buffer(std::ios::binary);
    write_checkpoint(buffer, model, optimizer, info);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    const std::string bytes = buffer.str();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

CheckpointInfo read_checkpoint(std::istream& in, TgcnIcfNetwork& model, Adam* optimizer) {
    const CheckpointInfo info = read_header(in);
    std::map<std::string, Tensor> stored;
    for (auto& t : read_tensors(in)) stored.emplace(std::move(t.name), std::move(t.tensor));

    const auto& entries = model.parameters().entries();
    std::vector<std::string> problems;
    auto lookup = [&](const std::string& name, const Shape& shape) -> const Tensor* {
        auto it = stored.find(name);
        if (it == stored.end()) {
            problems.push_back(name + " (missing)");
            return nullptr;
        }
        if (it->second.shape() != shape) {
            problems.push_back(name + " (shape " + shape_str(it->second.shape()) + ", expected " + shape_str(shape) +
                               ")");
            return nullptr;
        }
        return &it->second;
    };
    std::vector<const Tensor*> params, m, v;
    for (const auto& e : entries) {
        params.push_back(lookup(e.name, e.tensor.shape()));
        if (optimizer) {
            m.push_back(lookup("adam.m/" + e.name, e.tensor.shape()));
            v.push_back(lookup("adam.v/" + e.name, e.tensor.shape()));
        }
    }
    if (!problems.empty()) {
        std::string list;
        for (const auto& p : problems) list += (list.empty() ? "" : ", ") + p;
        throw IncompleteCheckpointError("checkpoint does not match the model: " + list);
    }

    for (std::size_t i = 0; i < entries.size(); ++i) {
        Tensor dst = entries[i].tensor;
        auto src = params[i]->data();
        std::copy(src.begin(), src.end(), dst.data().begin());
        if (optimizer) {
            auto ms = m[i]->data();
            auto vs = v[i]->data();
            optimizer->first_moments()[i].assign(ms.begin(), ms.end());
            optimizer->second_moments()[i].assign(vs.begin(), vs.end());
        }
    }
    if (optimizer) optimizer->set_steps(info.optimizer_steps);
    return info;
}

CheckpointInfo load_checkpoint(const std::filesystem::path& path, TgcnIcfNetwork& model, Adam* optimizer) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return read_checkpoint(buffer, model, optimizer);
}

CheckpointInfo peek_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_header(in);
}

}  // namespace hipmark::training
