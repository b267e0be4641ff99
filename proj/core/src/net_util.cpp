#include "deshadow/net_util.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "deshadow/errors.hpp"
#include "deshadow/hashing.hpp"

namespace deshadow {

namespace {

void copy_doubles_into(torch::Tensor t, const std::vector<double>& values) {
    torch::NoGradGuard guard;
    torch::Tensor src = torch::from_blob(const_cast<double*>(values.data()),
                                         {static_cast<std::int64_t>(values.size())},
                                         torch::kFloat64);
    t.view({-1}).copy_(src);
}

std::uint8_t dtype_code(torch::Dtype d) {
    if (d == torch::kFloat32) return 0;
    if (d == torch::kFloat64) return 1;
    if (d == torch::kInt64) return 2;
    throw ValidationError("unsupported tensor dtype in serialization");
}

torch::Dtype code_dtype(std::uint8_t c) {
    switch (c) {
        case 0: return torch::kFloat32;
        case 1: return torch::kFloat64;
        case 2: return torch::kInt64;
    }
    throw FormatError("unknown dtype code in tensor container");
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError("truncated tensor container");
    return v;
}

constexpr char kMagic[8] = {'D', 'S', 'T', 'E', 'N', 'S', 'R', '1'};

}  // namespace

void fill_constant(torch::Tensor t, double value) {
    torch::NoGradGuard guard;
    t.fill_(value);
}

void fill_normal(torch::Tensor t, Rng& rng, double stddev, double mean) {
    std::vector<double> values(static_cast<std::size_t>(t.numel()));
    for (double& v : values) v = rng.normal(mean, stddev);
    copy_doubles_into(t, values);
}

void fill_kaiming_normal(torch::Tensor t, Rng& rng, double gain) {
    if (t.dim() < 2) throw ValidationError("kaiming init expects a weight tensor");
    std::int64_t fan_in = t.size(1);
    for (std::int64_t d = 2; d < t.dim(); ++d) fan_in *= t.size(d);
    const double stddev = gain * std::sqrt(2.0 / static_cast<double>(fan_in));
    fill_normal(t, rng, stddev);
}

std::int64_t parameter_count(const torch::nn::Module& m, bool trainable_only) {
    std::int64_t count = 0;
    for (const auto& p : m.parameters())
        if (!trainable_only || p.requires_grad()) count += p.numel();
    return count;
}

std::uint64_t module_state_hash(const torch::nn::Module& m) {
    Fnv1a h;
    const auto eat = [&h](const std::string& name, const torch::Tensor& t) {
        h.update(name);
        torch::Tensor flat = t.detach().to(torch::kFloat64).contiguous().view({-1});
        h.update(flat.data_ptr<double>(), static_cast<std::size_t>(flat.numel()) * sizeof(double));
    };
    for (const auto& p : m.named_parameters(/*recurse=*/true)) eat(p.key(), p.value());
    for (const auto& b : m.named_buffers(/*recurse=*/true)) eat(b.key(), b.value());
    return h.digest();
}

const torch::Tensor* NamedTensors::find(const std::string& name) const {
    for (const auto& [n, t] : items)
        if (n == name) return &t;
    return nullptr;
}

void write_named_tensors(std::ostream& out, const NamedTensors& tensors) {
    out.write(kMagic, sizeof(kMagic));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.items.size()));
    for (const auto& [name, raw] : tensors.items) {
        torch::Tensor t = raw.detach().contiguous().cpu();
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_pod<std::uint8_t>(out, dtype_code(t.scalar_type()));
        write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(t.dim()));
        for (std::int64_t d = 0; d < t.dim(); ++d) write_pod<std::int64_t>(out, t.size(d));
        const auto bytes = static_cast<std::size_t>(t.numel()) * t.element_size();
        write_pod<std::uint64_t>(out, bytes);
        out.write(static_cast<const char*>(t.data_ptr()), static_cast<std::streamsize>(bytes));
    }
    if (!out) throw IoError("error while writing tensor container");
}

NamedTensors read_named_tensors(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError("not a tensor container (bad magic)");
    const auto count = read_pod<std::uint32_t>(in);
    NamedTensors tensors;
    tensors.items.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto name_len = read_pod<std::uint32_t>(in);
        if (name_len > 4096) throw FormatError("tensor name too long; corrupt container");
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const auto dtype = code_dtype(read_pod<std::uint8_t>(in));
        const auto ndim = read_pod<std::uint8_t>(in);
        std::vector<std::int64_t> dims(ndim);
        std::int64_t numel = 1;
        for (auto& d : dims) {
            d = read_pod<std::int64_t>(in);
            if (d < 0) throw FormatError("negative dimension; corrupt container");
            numel *= d;
        }
        const auto bytes = read_pod<std::uint64_t>(in);
        torch::Tensor t = torch::empty(dims, torch::TensorOptions().dtype(dtype));
        if (bytes != static_cast<std::uint64_t>(numel) * t.element_size())
            throw FormatError("tensor byte count mismatch; corrupt container");
        in.read(static_cast<char*>(t.data_ptr()), static_cast<std::streamsize>(bytes));
        if (!in) throw FormatError("truncated tensor container");
        tensors.add(name, t);
    }
    return tensors;
}

void save_named_tensors(const std::filesystem::path& path, const NamedTensors& tensors) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path.string());
    write_named_tensors(out, tensors);
}

NamedTensors load_named_tensors(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read: " + path.string());
    return read_named_tensors(in);
}

NamedTensors snapshot_module(const torch::nn::Module& m, const std::string& prefix) {
    NamedTensors tensors;
    for (const auto& p : m.named_parameters(/*recurse=*/true))
        tensors.add(prefix + "." + p.key(), p.value().detach().clone());
    for (const auto& b : m.named_buffers(/*recurse=*/true))
        tensors.add(prefix + "." + b.key(), b.value().detach().clone());
    return tensors;
}

void restore_module(torch::nn::Module& m, const NamedTensors& tensors, const std::string& prefix) {
    torch::NoGradGuard guard;
    const auto pull = [&](const std::string& name, torch::Tensor dst) {
        const torch::Tensor* src = tensors.find(prefix + "." + name);
        if (!src) throw ValidationError("checkpoint is missing tensor: " + prefix + "." + name);
        if (src->sizes() != dst.sizes())
            throw ValidationError("checkpoint shape mismatch for " + prefix + "." + name);
        dst.copy_(*src);
    };
    for (const auto& p : m.named_parameters(/*recurse=*/true)) pull(p.key(), p.value());
    for (const auto& b : m.named_buffers(/*recurse=*/true)) pull(b.key(), b.value());
}

}  // namespace deshadow
