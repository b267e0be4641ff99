#include "deshadow/detector.hpp"

#include "deshadow/errors.hpp"
#include "deshadow/net_util.hpp"
#include "deshadow/rng.hpp"
#include "deshadow/tensor_bridge.hpp"

namespace deshadow {

void DetectorConfig::validate() const {
    if (in_channels != 1) throw ConfigError("detector expects single-channel input");
    if (base_filters < 1) throw ConfigError("detector base_filters must be >= 1");
    if (depth != 4) throw ConfigError("detector uses exactly 4 pooling stages");
    if (kernel != 3 || pool != 2) throw ConfigError("detector uses 3x3 convs and 2x2 pooling");
}

struct DetectorNetImpl : torch::nn::Module {
    // Encoder conv pairs, decoder tconvs + conv pairs, final projection.
    std::vector<torch::nn::Conv2d> enc_a, enc_b, dec_a, dec_b;
    std::vector<torch::nn::ConvTranspose2d> ups;
    torch::nn::Conv2d bottom_a{nullptr}, bottom_b{nullptr}, head{nullptr};
    int levels = 4;

    explicit DetectorNetImpl(const DetectorConfig& cfg) {
        const int b = cfg.base_filters;
        const int widths[4] = {b, 2 * b, 4 * b, 8 * b};
        int in_ch = cfg.in_channels;
        for (int i = 0; i < levels; ++i) {
            enc_a.push_back(register_module(
                "enc" + std::to_string(i) + "a",
                torch::nn::Conv2d(torch::nn::Conv2dOptions(in_ch, widths[i], 3).padding(1))));
            enc_b.push_back(register_module(
                "enc" + std::to_string(i) + "b",
                torch::nn::Conv2d(torch::nn::Conv2dOptions(widths[i], widths[i], 3).padding(1))));
            in_ch = widths[i];
        }
        bottom_a = register_module(
            "bottom_a", torch::nn::Conv2d(torch::nn::Conv2dOptions(widths[3], widths[3], 3).padding(1)));
        bottom_b = register_module(
            "bottom_b", torch::nn::Conv2d(torch::nn::Conv2dOptions(widths[3], widths[3], 3).padding(1)));

        // Decoder widths 4b, 2b, b, b from deep to shallow.
        const int dec_w[4] = {4 * b, 2 * b, b, b};
        int prev = widths[3];
        for (int i = 0; i < levels; ++i) {
            const int skip_ch = widths[3 - i];
            ups.push_back(register_module(
                "up" + std::to_string(i),
                torch::nn::ConvTranspose2d(
                    torch::nn::ConvTranspose2dOptions(prev, dec_w[i], 2).stride(2))));
            dec_a.push_back(register_module(
                "dec" + std::to_string(i) + "a",
                torch::nn::Conv2d(
                    torch::nn::Conv2dOptions(dec_w[i] + skip_ch, dec_w[i], 3).padding(1))));
            dec_b.push_back(register_module(
                "dec" + std::to_string(i) + "b",
                torch::nn::Conv2d(torch::nn::Conv2dOptions(dec_w[i], dec_w[i], 3).padding(1))));
            prev = dec_w[i];
        }
        head = register_module("head",
                               torch::nn::Conv2d(torch::nn::Conv2dOptions(dec_w[3], 1, 1)));
    }

    torch::Tensor forward_logits(const torch::Tensor& x) {
        std::vector<torch::Tensor> skips;
        torch::Tensor h = x;
        for (int i = 0; i < levels; ++i) {
            h = torch::relu(enc_a[static_cast<std::size_t>(i)](h));
            h = torch::relu(enc_b[static_cast<std::size_t>(i)](h));
            skips.push_back(h);
            h = torch::max_pool2d(h, 2, 2);
        }
        h = torch::relu(bottom_a(h));
        h = torch::relu(bottom_b(h));
        for (int i = 0; i < levels; ++i) {
            h = ups[static_cast<std::size_t>(i)](h);
            h = torch::cat({h, skips[static_cast<std::size_t>(3 - i)]}, 1);
            h = torch::relu(dec_a[static_cast<std::size_t>(i)](h));
            h = torch::relu(dec_b[static_cast<std::size_t>(i)](h));
        }
        return head(h);
    }

    void init_random(std::uint64_t seed) {
        Rng rng(seed);
        for (auto& p : named_parameters(true)) {
            if (p.value().dim() >= 2)
                fill_kaiming_normal(p.value(), rng);
            else
                fill_constant(p.value(), 0.0);
        }
    }
};

Detector::Detector(const DetectorConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    net_ = std::make_shared<DetectorNetImpl>(cfg_);
    net_->init_random(cfg_.init_seed);
    net_->to(cfg_.dtype);
}

namespace {
void check_detector_input(const torch::Tensor& x) {
    if (x.dim() != 4 || x.size(1) != 1)
        throw ValidationError("detector expects an Nx1xHxW tensor");
    if (x.size(2) % 16 != 0 || x.size(3) % 16 != 0 || x.size(2) < 16 || x.size(3) < 16)
        throw ValidationError("detector input sides must be multiples of 16, got " +
                              std::to_string(x.size(2)) + "x" + std::to_string(x.size(3)));
}
}  // namespace

torch::Tensor Detector::forward_logits(const torch::Tensor& input) {
    check_detector_input(input);
    return net_->forward_logits(input.to(cfg_.dtype));
}

torch::Tensor Detector::forward(const torch::Tensor& input) {
    return torch::sigmoid(forward_logits(input));
}

ShadowMask Detector::predict(const BScan& img) {
    torch::NoGradGuard guard;
    const torch::Tensor out = forward(to_tensor(img.pixels, cfg_.dtype));
    ShadowMask mask;
    mask.kind = MaskKind::predicted_soft;
    mask.values = from_tensor(out);
    return mask;
}

std::int64_t Detector::parameter_count() const {
    return deshadow::parameter_count(*net_);
}

std::uint64_t Detector::weights_hash() const {
    return module_state_hash(*net_);
}

std::vector<torch::Tensor> Detector::parameters() {
    return net_->parameters();
}

void Detector::set_requires_grad(bool enabled) {
    for (auto& p : net_->parameters()) p.set_requires_grad(enabled);
}

torch::nn::Module& Detector::module() {
    return *net_;
}

torch::Tensor detector_bce(const torch::Tensor& pred_probs, const torch::Tensor& gt, double eps) {
    if (!pred_probs.sizes().equals(gt.sizes()))
        throw ValidationError("prediction and ground truth shapes differ");
    {
        torch::NoGradGuard guard;
        const torch::Tensor binary = (gt == 0.0).logical_or(gt == 1.0);
        if (!binary.all().item<bool>())
            throw ValidationError("ground-truth mask must be binary for BCE");
    }
    const torch::Tensor p = pred_probs.clamp(eps, 1.0 - eps);
    return -(gt * p.log() + (1.0 - gt) * (1.0 - p).log()).mean();
}

torch::Tensor detector_bce_with_logits(const torch::Tensor& logits, const torch::Tensor& gt) {
    if (!logits.sizes().equals(gt.sizes()))
        throw ValidationError("prediction and ground truth shapes differ");
    return torch::binary_cross_entropy_with_logits(logits, gt);
}

}  // namespace deshadow
