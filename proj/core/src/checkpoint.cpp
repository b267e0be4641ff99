#include "deshadow/checkpoint.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "deshadow/errors.hpp"

namespace deshadow {

AdamOptimizer::AdamOptimizer(std::vector<std::pair<std::string, torch::Tensor>> named_params,
                             double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (auto& [name, param] : named_params) {
        Slot slot;
        slot.name = name;
        slot.param = param;
        slot.exp_avg = torch::zeros_like(param);
        slot.exp_avg_sq = torch::zeros_like(param);
        slots_.push_back(std::move(slot));
    }
}

void AdamOptimizer::zero_grad() {
    for (auto& slot : slots_) {
        if (slot.param.grad().defined()) slot.param.grad().zero_();
    }
}

void AdamOptimizer::step() {
    torch::NoGradGuard guard;
    for (auto& slot : slots_) {
        const torch::Tensor grad = slot.param.grad();
        if (!grad.defined()) continue;
        slot.steps += 1;
        slot.exp_avg.mul_(beta1_).add_(grad, 1.0 - beta1_);
        slot.exp_avg_sq.mul_(beta2_).addcmul_(grad, grad, 1.0 - beta2_);
        const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(slot.steps));
        const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(slot.steps));
        const torch::Tensor denom = (slot.exp_avg_sq / bias2).sqrt_().add_(eps_);
        slot.param.addcdiv_(slot.exp_avg, denom, -lr_ / bias1);
    }
}

void AdamOptimizer::export_state(NamedTensors& out, const std::string& prefix) const {
    for (const auto& slot : slots_) {
        out.add(prefix + "." + slot.name + ".m", slot.exp_avg.clone());
        out.add(prefix + "." + slot.name + ".v", slot.exp_avg_sq.clone());
        out.add(prefix + "." + slot.name + ".step", torch::tensor(slot.steps, torch::kInt64));
    }
}

void AdamOptimizer::import_state(const NamedTensors& in, const std::string& prefix) {
    torch::NoGradGuard guard;
    for (auto& slot : slots_) {
        const torch::Tensor* m = in.find(prefix + "." + slot.name + ".m");
        const torch::Tensor* v = in.find(prefix + "." + slot.name + ".v");
        const torch::Tensor* steps = in.find(prefix + "." + slot.name + ".step");
        if (!m || !v || !steps)
            throw ValidationError("checkpoint lacks optimizer state for " + prefix + "." + slot.name);
        slot.exp_avg.copy_(*m);
        slot.exp_avg_sq.copy_(*v);
        slot.steps = steps->item<std::int64_t>();
    }
}

namespace {

constexpr char kMagic[8] = {'D', 'S', 'G', 'A', 'N', 'C', 'K', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError("truncated checkpoint");
    return v;
}

}  // namespace

void Checkpoint::save(const std::filesystem::path& path) const {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write checkpoint: " + path.string());
        out.write(kMagic, sizeof(kMagic));
        write_pod<std::uint32_t>(out, kVersion);
        write_pod<std::uint64_t>(out, config_hash);
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(config_text.size()));
        out.write(config_text.data(), static_cast<std::streamsize>(config_text.size()));
        write_pod<std::uint64_t>(out, master_seed);
        write_pod<std::int32_t>(out, next_phase_index);
        write_pod<std::int64_t>(out, detector_epochs);
        write_pod<std::int64_t>(out, remover_epochs);
        write_pod<std::int64_t>(out, global_step);
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(probe_history.size()));
        for (double p : probe_history) write_pod<double>(out, p);
        write_named_tensors(out, tensors);
        if (!out) throw IoError("error while writing checkpoint: " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read checkpoint: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError("not a checkpoint file (bad magic): " + path.string());
    Checkpoint ckpt;
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(version));
    ckpt.config_hash = read_pod<std::uint64_t>(in);
    const auto config_len = read_pod<std::uint32_t>(in);
    if (config_len > (1u << 20)) throw FormatError("unreasonable config size; corrupt checkpoint");
    ckpt.config_text.resize(config_len);
    in.read(ckpt.config_text.data(), config_len);
    if (!in) throw FormatError("truncated checkpoint");
    ckpt.master_seed = read_pod<std::uint64_t>(in);
    ckpt.next_phase_index = read_pod<std::int32_t>(in);
    ckpt.detector_epochs = read_pod<std::int64_t>(in);
    ckpt.remover_epochs = read_pod<std::int64_t>(in);
    ckpt.global_step = read_pod<std::int64_t>(in);
    const auto n = read_pod<std::uint32_t>(in);
    ckpt.probe_history.resize(n);
    for (auto& p : ckpt.probe_history) p = read_pod<double>(in);
    ckpt.tensors = read_named_tensors(in);
    return ckpt;
}

}  // namespace deshadow
