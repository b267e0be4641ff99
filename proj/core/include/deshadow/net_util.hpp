#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "deshadow/rng.hpp"

namespace deshadow {

// --- deterministic initialization -----------------------------------------
// torch's own reset_parameters() is tied to its global generator and init
// order; these fill tensors from the project Rng instead so weight init is
// reproducible byte-for-byte regardless of construction history.

void fill_constant(torch::Tensor t, double value);
void fill_normal(torch::Tensor t, Rng& rng, double stddev, double mean = 0.0);

// He/Kaiming-normal for convolution kernels: std = gain * sqrt(2 / fan_in)
// with fan_in read from the weight shape (dim 1 x receptive field).
void fill_kaiming_normal(torch::Tensor t, Rng& rng, double gain = 1.0);

// --- module state inspection -----------------------------------------------

std::int64_t parameter_count(const torch::nn::Module& m, bool trainable_only = true);

// FNV-1a over all parameters and buffers (names + raw float64 data) in
// registration order; used for frozen-weights checks.
std::uint64_t module_state_hash(const torch::nn::Module& m);

// --- named tensor container -------------------------------------------------
// Binary format shared by checkpoints and backbone weight files; the write
// order is the caller's, so save(load(x)) is byte-stable.

struct NamedTensors {
    std::vector<std::pair<std::string, torch::Tensor>> items;

    void add(const std::string& name, const torch::Tensor& t) { items.emplace_back(name, t); }
    const torch::Tensor* find(const std::string& name) const;
};

void write_named_tensors(std::ostream& out, const NamedTensors& tensors);
NamedTensors read_named_tensors(std::istream& in);
void save_named_tensors(const std::filesystem::path& path, const NamedTensors& tensors);
NamedTensors load_named_tensors(const std::filesystem::path& path);

// Snapshot of a module's parameters and buffers, prefixed with `prefix.`.
NamedTensors snapshot_module(const torch::nn::Module& m, const std::string& prefix);

// Copies matching tensors back into the module; throws ValidationError on a
// missing name or shape mismatch.
void restore_module(torch::nn::Module& m, const NamedTensors& tensors, const std::string& prefix);

}  // namespace deshadow
