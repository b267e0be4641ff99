#include "deshadow/losses.hpp"

#include "deshadow/errors.hpp"

namespace deshadow {

LossWeights LossWeights::from_config(const Config& cfg) {
    LossWeights w;
    w.content = cfg.get_double("loss.w_content", w.content);
    w.style = cfg.get_double("loss.w_style", w.style);
    w.shadow = cfg.get_double("loss.w_shadow", w.shadow);
    w.tv = cfg.get_double("loss.w_tv", w.tv);
    w.mask_threshold = cfg.get_double("loss.mask_threshold", w.mask_threshold);
    w.validate();
    return w;
}

void LossWeights::to_config(Config& cfg) const {
    cfg.set_double("loss.w_content", content);
    cfg.set_double("loss.w_style", style);
    cfg.set_double("loss.w_shadow", shadow);
    cfg.set_double("loss.w_tv", tv);
    cfg.set_double("loss.mask_threshold", mask_threshold);
}

void LossWeights::validate() const {
    if (content < 0.0 || style < 0.0 || shadow < 0.0 || tv < 0.0)
        throw ConfigError("loss weights must be >= 0");
    if (mask_threshold <= 0.0 || mask_threshold >= 1.0)
        throw ConfigError("mask threshold must lie in (0,1)");
}

torch::Tensor binarize_mask(const torch::Tensor& pred_mask, double threshold) {
    return (pred_mask.detach() > threshold).to(pred_mask.dtype());
}

std::pair<torch::Tensor, torch::Tensor> mask_images(const torch::Tensor& baseline,
                                                    const torch::Tensor& deshadowed,
                                                    const torch::Tensor& pred_mask,
                                                    double threshold) {
    if (!baseline.sizes().equals(deshadowed.sizes()) || !baseline.sizes().equals(pred_mask.sizes()))
        throw ValidationError("mask_images: shapes disagree");
    const torch::Tensor keep = 1.0 - binarize_mask(pred_mask, threshold);
    return {baseline * keep, deshadowed * keep};
}

torch::Tensor content_from_features(const std::vector<torch::Tensor>& a,
                                    const std::vector<torch::Tensor>& b) {
    if (a.size() != b.size() || a.empty())
        throw ValidationError("content loss needs matching non-empty feature lists");
    torch::Tensor total;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].sizes().equals(b[i].sizes()))
            throw ValidationError("content loss: feature shapes disagree at tap " + std::to_string(i));
        const auto chw = static_cast<double>(a[i].size(1) * a[i].size(2) * a[i].size(3));
        const torch::Tensor diff = a[i] - b[i];
        const torch::Tensor per_sample = diff.pow(2).sum({1, 2, 3}) / chw;
        total = total.defined() ? total + per_sample : per_sample;
    }
    return total.mean();
}

torch::Tensor gram(const torch::Tensor& features) {
    if (features.dim() != 4) throw ValidationError("gram expects an NxCxHxW tensor");
    const auto n = features.size(0);
    const auto c = features.size(1);
    const torch::Tensor flat = features.reshape({n, c, -1});
    return torch::bmm(flat, flat.transpose(1, 2));
}

torch::Tensor style_from_features(const std::vector<torch::Tensor>& a,
                                  const std::vector<torch::Tensor>& b) {
    if (a.size() != b.size() || a.empty())
        throw ValidationError("style loss needs matching non-empty feature lists");
    torch::Tensor total;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const torch::Tensor diff = gram(a[i]) - gram(b[i]);
        const torch::Tensor per_sample = diff.pow(2).sum({1, 2});
        total = total.defined() ? total + per_sample : per_sample;
    }
    return total.mean();
}

torch::Tensor tv_loss(const torch::Tensor& img) {
    if (img.dim() != 4) throw ValidationError("tv_loss expects an Nx1xHxW tensor");
    if (img.size(2) < 2 || img.size(3) < 2) throw ValidationError("tv_loss needs at least 2x2");
    const auto n = static_cast<double>(img.size(2) * img.size(3));
    using torch::indexing::None;
    using torch::indexing::Slice;
    const torch::Tensor dy =
        (img.index({Slice(), Slice(), Slice(1, None), Slice()}) -
         img.index({Slice(), Slice(), Slice(None, -1), Slice()}))
            .abs()
            .sum({1, 2, 3});
    const torch::Tensor dx =
        (img.index({Slice(), Slice(), Slice(), Slice(1, None)}) -
         img.index({Slice(), Slice(), Slice(), Slice(None, -1)}))
            .abs()
            .sum({1, 2, 3});
    return ((dy + dx) / n).mean();
}

torch::Tensor shadow_loss(const torch::Tensor& deshadowed, const DetectorFn& detector) {
    const torch::Tensor probs = detector(deshadowed);
    if (!probs.sizes().equals(deshadowed.sizes()))
        throw ValidationError("detector must return a per-pixel map of the input shape");
    return probs.sum({1, 2, 3}).mean();
}

torch::Tensor shadow_loss(const torch::Tensor& deshadowed, Detector& detector) {
    return shadow_loss(deshadowed, [&detector](const torch::Tensor& x) { return detector.forward(x); });
}

TotalLossResult total_loss(const torch::Tensor& baseline, const torch::Tensor& deshadowed,
                           const torch::Tensor& pred_mask, const Backbone& backbone,
                           const DetectorFn& detector, const LossWeights& weights) {
    weights.validate();
    auto [b_masked, d_masked] = mask_images(baseline, deshadowed, pred_mask, weights.mask_threshold);

    // The baseline branch carries no gradient.
    std::vector<torch::Tensor> feats_b;
    {
        torch::NoGradGuard guard;
        feats_b = backbone.extract(b_masked);
    }
    const std::vector<torch::Tensor> feats_d = backbone.extract(d_masked);

    const torch::Tensor content = content_from_features(feats_b, feats_d);
    const torch::Tensor style = style_from_features(feats_b, feats_d);
    const torch::Tensor tv = tv_loss(deshadowed);
    const torch::Tensor shadow = shadow_loss(deshadowed, detector);

    TotalLossResult result;
    result.total = weights.content * content + weights.style * style + weights.shadow * shadow +
                   weights.tv * tv;
    result.values.content = content.item<double>();
    result.values.style = style.item<double>();
    result.values.shadow = shadow.item<double>();
    result.values.tv = tv.item<double>();
    result.values.total = weights.content * result.values.content +
                          weights.style * result.values.style +
                          weights.shadow * result.values.shadow + weights.tv * result.values.tv;
    return result;
}

TotalLossResult total_loss(const torch::Tensor& baseline, const torch::Tensor& deshadowed,
                           const torch::Tensor& pred_mask, const Backbone& backbone,
                           Detector& detector, const LossWeights& weights) {
    return total_loss(baseline, deshadowed, pred_mask, backbone,
                      [&detector](const torch::Tensor& x) { return detector.forward(x); }, weights);
}

}  // namespace deshadow

