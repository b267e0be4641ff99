#pragma once

#include <torch/torch.h>

#include <functional>
#include <utility>
#include <vector>

#include "deshadow/backbone.hpp"
#include "deshadow/config.hpp"
#include "deshadow/detector.hpp"

namespace deshadow {

// Weighted mixture for the shadow removal network: content and style on the
// masked image pair, total variation and shadow score on the raw output.
struct LossWeights {
    double content = 100.0;
    double style = 0.1;
    double shadow = 100.0;
    double tv = 1e-5;
    double mask_threshold = 0.5;

    static LossWeights from_config(const Config& cfg);
    void to_config(Config& cfg) const;
    void validate() const;
};

struct LossBreakdown {
    double content = 0.0;
    double style = 0.0;
    double shadow = 0.0;
    double tv = 0.0;
    double total = 0.0;
};

// Hard {0,1} mask from a soft prediction; detached from the graph.
torch::Tensor binarize_mask(const torch::Tensor& pred_mask, double threshold = 0.5);

// Zeroes the pixels under the (binarized) predicted mask in both images.
// Pixels outside the mask pass through untouched.
std::pair<torch::Tensor, torch::Tensor> mask_images(const torch::Tensor& baseline,
                                                    const torch::Tensor& deshadowed,
                                                    const torch::Tensor& pred_mask,
                                                    double threshold = 0.5);

// Sum over taps of (1/(C*H*W)) * squared L2 feature distance; batch mean.
torch::Tensor content_from_features(const std::vector<torch::Tensor>& a,
                                    const std::vector<torch::Tensor>& b);

// NxCxHxW -> NxCxC: features flattened over space, multiplied with their
// transpose.
torch::Tensor gram(const torch::Tensor& features);

// Sum over taps of the squared Frobenius distance between Gram matrices
// (no normalization factor); batch mean.
torch::Tensor style_from_features(const std::vector<torch::Tensor>& a,
                                  const std::vector<torch::Tensor>& b);

// (1/n) * sum of absolute neighbor differences, boundary terms omitted;
// batch mean.
torch::Tensor tv_loss(const torch::Tensor& img);

// Anything mapping an Nx1xHxW image to per-pixel shadow probabilities.
using DetectorFn = std::function<torch::Tensor(const torch::Tensor&)>;

// Detector probabilities on the deshadowed image summed per image, batch
// mean. The caller freezes the detector weights; gradients flow through the
// detector into the image.
torch::Tensor shadow_loss(const torch::Tensor& deshadowed, const DetectorFn& detector);
torch::Tensor shadow_loss(const torch::Tensor& deshadowed, Detector& detector);

struct TotalLossResult {
    torch::Tensor total;   // differentiable
    LossBreakdown values;  // logged per step
};

// Eq-style composition: content/style on the masked pair (mask predicted
// from the baseline), tv and shadow on the raw deshadowed output.
TotalLossResult total_loss(const torch::Tensor& baseline, const torch::Tensor& deshadowed,
                           const torch::Tensor& pred_mask, const Backbone& backbone,
                           const DetectorFn& detector, const LossWeights& weights);
TotalLossResult total_loss(const torch::Tensor& baseline, const torch::Tensor& deshadowed,
                           const torch::Tensor& pred_mask, const Backbone& backbone,
                           Detector& detector, const LossWeights& weights);

}  // namespace deshadow
