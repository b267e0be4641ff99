#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "deshadow/net_util.hpp"

namespace deshadow {

// Adam with the usual bias corrections, matching the reference formulation
// (beta1 0.9, beta2 0.999, eps 1e-8, no weight decay). Implemented here so
// the optimizer state serializes byte-stably alongside the weights.
class AdamOptimizer {
public:
    AdamOptimizer(std::vector<std::pair<std::string, torch::Tensor>> named_params, double lr,
                  double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    void set_lr(double lr) { lr_ = lr; }
    double lr() const { return lr_; }

    void zero_grad();
    void step();

    // State tensors named "<prefix>.<param>.m|v|step" in parameter order.
    void export_state(NamedTensors& out, const std::string& prefix) const;
    void import_state(const NamedTensors& in, const std::string& prefix);

private:
    struct Slot {
        std::string name;
        torch::Tensor param;
        torch::Tensor exp_avg;
        torch::Tensor exp_avg_sq;
        std::int64_t steps = 0;
    };
    std::vector<Slot> slots_;
    double lr_;
    double beta1_, beta2_, eps_;
};

// Serialized training state: weights + optimizer state for both networks,
// the schedule position and the probe-loss history that drives early
// stopping. save -> load -> save is byte-stable.
struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    std::uint64_t config_hash = 0;
    std::string config_text;  // canonical run config, so checkpoints are self-contained
    std::uint64_t master_seed = 0;
    std::int32_t next_phase_index = 0;
    std::int64_t detector_epochs = 0;  // accumulated, drives lr decay
    std::int64_t remover_epochs = 0;
    std::int64_t global_step = 0;
    std::vector<double> probe_history;
    NamedTensors tensors;

    void save(const std::filesystem::path& path) const;
    static Checkpoint load(const std::filesystem::path& path);
};

}  // namespace deshadow
