#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <memory>
#include <vector>

#include "deshadow/image.hpp"

namespace deshadow {

// Shadow removal generator: 8 downsampling modules (conv k4 s2 -> BN ->
// leaky ReLU; no BN on the first), 8 decoding stages (Up: tconv k4 s2 -> BN
// -> ReLU; skip concatenation; two Refine: conv k3 s1 -> BN -> ReLU with
// dropout in the first `dropout_stages` stages; no BN in the final stage)
// and a 1-filter projection + sigmoid.
struct RemoverConfig {
    int base_filters = 64;   // encoder widths base*{1,2,4,8,8,8,8,8}
    int down_kernel = 4, down_stride = 2;
    int up_kernel = 4, up_stride = 2;
    int refine_kernel = 3, refine_stride = 1;
    double dropout_p = 0.5;
    int dropout_stages = 3;
    double leaky_slope = 0.2;
    torch::Dtype dtype = torch::kFloat32;
    std::uint64_t init_seed = 13;

    void validate() const;
    // Decoder widths base*{8,8,4,4,4,2,1,1}, mirroring the encoder scales.
    std::vector<int> decoder_widths() const;
    std::vector<int> encoder_widths() const;
};

struct BatchTimings {
    double total_ms = 0.0;
    double per_image_ms = 0.0;
    std::int64_t images = 0;
};

class Remover {
public:
    explicit Remover(const RemoverConfig& cfg);

    // Nx1xHxW in [0,1] -> Nx1xHxW in (0,1). Sides must be divisible by 256
    // (eight stride-2 halvings).
    torch::Tensor forward(const torch::Tensor& input);

    void train(bool on = true);
    bool is_training() const;

    // Inference-mode batch: dropout off, batch-norm on running statistics,
    // per-image results independent of batch composition. Timing is recorded
    // per batch.
    std::vector<BScan> infer_batch(const std::vector<BScan>& imgs, BatchTimings* timings = nullptr);

    std::int64_t parameter_count() const;
    std::uint64_t weights_hash() const;
    std::vector<torch::Tensor> parameters();
    void set_requires_grad(bool enabled);
    torch::nn::Module& module();
    const RemoverConfig& config() const { return cfg_; }

    // Spatial sizes the encoder produces for a given input side (eight
    // halvings), exposed for conformance checks.
    static std::vector<int> encoder_spatial_sizes(int side);

    // Number of dropout modules and the stages holding them.
    std::vector<int> dropout_stage_indices() const;

private:
    RemoverConfig cfg_;
    std::shared_ptr<struct RemoverNetImpl> net_;
};

}  // namespace deshadow
