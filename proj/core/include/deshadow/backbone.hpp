#pragma once

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "deshadow/image.hpp"

namespace deshadow {

// Fixed (non-trainable) 152-layer residual classification network used only
// as a feature extractor for the content and style losses. Taps are indices
// into the flattened sequence of main-path convolutions (downsample
// projection convolutions excluded, 0-based): 9, 33, 141 and 150 are the
// final convolutions of the four residual stages, right before the next
// stage downsamples.
struct BackboneConfig {
    enum class Mode { pretrained, random_seeded };

    std::vector<int> tap_ids = {9, 33, 141};
    Mode mode = Mode::random_seeded;
    std::filesystem::path weights_path;  // required in pretrained mode
    std::uint64_t seed = 7;              // random_seeded weight stream
    double width_scale = 1.0;            // channel multiplier for desk-scale runs
    torch::Dtype dtype = torch::kFloat32;
};

// Activations at the configured tap layers.
struct FeatureStack {
    std::vector<torch::Tensor> activations;
    std::vector<int> tap_ids;
};

class Backbone {
public:
    explicit Backbone(const BackboneConfig& cfg);

    // Nx1xHxW or Nx3xHxW in [0,1] -> activations at the tap layers. The
    // single-channel input is replicated to 3 channels and standardized with
    // the published ImageNet normalization before entering the stem.
    // Weights stay frozen; gradients flow to the input only.
    std::vector<torch::Tensor> extract(const torch::Tensor& input) const;

    FeatureStack extract_features(const BScan& img) const;

    std::int64_t parameter_count() const;
    std::uint64_t weights_hash() const;
    const BackboneConfig& config() const { return cfg_; }
    torch::nn::Module& module();

    // Conv indices eligible as taps: the stage-end convolutions {9,33,141,150}.
    static const std::vector<int>& stage_end_conv_indices();

    // Writes the current weights in the format load expects (pretrained mode).
    void save_weights(const std::filesystem::path& path) const;

private:
    BackboneConfig cfg_;
    std::shared_ptr<struct ResNetImpl> net_;
};

}  // namespace deshadow
