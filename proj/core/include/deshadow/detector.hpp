#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <memory>

#include "deshadow/image.hpp"

namespace deshadow {

// Per-pixel shadow classifier: U-Net-style encoder/decoder ending in a
// sigmoid. Four [conv,conv,pool] encoder levels with widths base*{1,2,4,8},
// a two-conv bottom held at base*8 (no widening), four
// [tconv,concat,conv,conv] decoder levels and a 1-channel projection.
struct DetectorConfig {
    int in_channels = 1;
    int base_filters = 64;  // 64,128,256,512 across the stages
    int depth = 4;          // pooling stages; fixed by the architecture
    int kernel = 3;
    int pool = 2;
    torch::Dtype dtype = torch::kFloat32;
    std::uint64_t init_seed = 11;

    void validate() const;
};

class Detector {
public:
    explicit Detector(const DetectorConfig& cfg);

    // Nx1xHxW in [0,1] -> Nx1xHxW probabilities strictly inside (0,1).
    // H and W must be divisible by 16 (four pooling stages).
    torch::Tensor forward(const torch::Tensor& input);
    torch::Tensor forward_logits(const torch::Tensor& input);

    // Single-scan convenience wrapper (inference mode).
    ShadowMask predict(const BScan& img);

    std::int64_t parameter_count() const;
    std::uint64_t weights_hash() const;
    std::vector<torch::Tensor> parameters();
    void set_requires_grad(bool enabled);
    torch::nn::Module& module();
    const DetectorConfig& config() const { return cfg_; }

private:
    DetectorConfig cfg_;
    std::shared_ptr<struct DetectorNetImpl> net_;
};

// Mean per-pixel binary cross entropy between a predicted soft mask and a
// binary ground-truth mask. Throws ValidationError when gt is not binary.
torch::Tensor detector_bce(const torch::Tensor& pred_probs, const torch::Tensor& gt,
                           double eps = 1e-12);

// Logit-space equivalent used in the training loop for numerical stability.
torch::Tensor detector_bce_with_logits(const torch::Tensor& logits, const torch::Tensor& gt);

}  // namespace deshadow
