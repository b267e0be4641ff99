#include "deshadow/remover.hpp"

#include <chrono>

#include "deshadow/errors.hpp"
#include "deshadow/net_util.hpp"
#include "deshadow/rng.hpp"
#include "deshadow/tensor_bridge.hpp"

namespace deshadow {

void RemoverConfig::validate() const {
    if (base_filters < 1) throw ConfigError("remover base_filters must be >= 1");
    if (down_kernel != 4 || down_stride != 2 || up_kernel != 4 || up_stride != 2)
        throw ConfigError("remover down/up modules use 4x4 kernels with stride 2");
    if (refine_kernel != 3 || refine_stride != 1)
        throw ConfigError("remover refine modules use 3x3 kernels with stride 1");
    if (dropout_p < 0.0 || dropout_p >= 1.0) throw ConfigError("dropout_p must lie in [0,1)");
    if (dropout_stages < 0 || dropout_stages > 8)
        throw ConfigError("dropout_stages must lie in [0,8]");
    if (leaky_slope <= 0.0 || leaky_slope >= 1.0)
        throw ConfigError("leaky_slope must lie in (0,1)");
}

std::vector<int> RemoverConfig::encoder_widths() const {
    const int b = base_filters;
    return {b, 2 * b, 4 * b, 8 * b, 8 * b, 8 * b, 8 * b, 8 * b};
}

std::vector<int> RemoverConfig::decoder_widths() const {
    const int b = base_filters;
    return {8 * b, 8 * b, 4 * b, 4 * b, 4 * b, 2 * b, b, b};
}

struct RemoverNetImpl : torch::nn::Module {
    std::vector<torch::nn::Conv2d> down;
    std::vector<torch::nn::BatchNorm2d> down_bn;  // index 0 unused (no BN on first module)
    std::vector<torch::nn::ConvTranspose2d> up;
    std::vector<torch::nn::BatchNorm2d> up_bn;
    std::vector<torch::nn::Conv2d> refine1, refine2;
    std::vector<torch::nn::BatchNorm2d> refine1_bn, refine2_bn;
    std::vector<torch::nn::Dropout> drop1, drop2;
    torch::nn::Conv2d head{nullptr};
    RemoverConfig cfg;

    explicit RemoverNetImpl(const RemoverConfig& c) : cfg(c) {
        const auto enc = cfg.encoder_widths();
        const auto dec = cfg.decoder_widths();

        int in_ch = 1;
        for (int i = 0; i < 8; ++i) {
            const bool bn = i != 0;
            down.push_back(register_module(
                "down" + std::to_string(i),
                torch::nn::Conv2d(torch::nn::Conv2dOptions(in_ch, enc[i], cfg.down_kernel)
                                      .stride(cfg.down_stride)
                                      .padding(1)
                                      .bias(!bn))));
            down_bn.push_back(bn ? register_module("down" + std::to_string(i) + "_bn",
                                                   torch::nn::BatchNorm2d(enc[i]))
                                 : torch::nn::BatchNorm2d(nullptr));
            in_ch = enc[i];
        }

        int prev = enc[7];
        for (int j = 0; j < 8; ++j) {
            const bool bn = j != 7;  // final decoding module runs without BN
            const int skip_ch = j < 7 ? enc[6 - j] : 0;
            up.push_back(register_module(
                "up" + std::to_string(j),
                torch::nn::ConvTranspose2d(torch::nn::ConvTranspose2dOptions(prev, dec[j], cfg.up_kernel)
                                               .stride(cfg.up_stride)
                                               .padding(1)
                                               .bias(!bn))));
            up_bn.push_back(bn ? register_module("up" + std::to_string(j) + "_bn",
                                                 torch::nn::BatchNorm2d(dec[j]))
                               : torch::nn::BatchNorm2d(nullptr));
            refine1.push_back(register_module(
                "refine" + std::to_string(j) + "a",
                torch::nn::Conv2d(torch::nn::Conv2dOptions(dec[j] + skip_ch, dec[j], cfg.refine_kernel)
                                      .padding(1)
                                      .bias(!bn))));
            refine1_bn.push_back(bn ? register_module("refine" + std::to_string(j) + "a_bn",
                                                      torch::nn::BatchNorm2d(dec[j]))
                                    : torch::nn::BatchNorm2d(nullptr));
            refine2.push_back(register_module(
                "refine" + std::to_string(j) + "b",
                torch::nn::Conv2d(torch::nn::Conv2dOptions(dec[j], dec[j], cfg.refine_kernel)
                                      .padding(1)
                                      .bias(!bn))));
            refine2_bn.push_back(bn ? register_module("refine" + std::to_string(j) + "b_bn",
                                                      torch::nn::BatchNorm2d(dec[j]))
                                    : torch::nn::BatchNorm2d(nullptr));
            if (j < cfg.dropout_stages) {
                drop1.push_back(register_module("drop" + std::to_string(j) + "a",
                                                torch::nn::Dropout(cfg.dropout_p)));
                drop2.push_back(register_module("drop" + std::to_string(j) + "b",
                                                torch::nn::Dropout(cfg.dropout_p)));
            }
            prev = dec[j];
        }
        head = register_module("head",
                               torch::nn::Conv2d(torch::nn::Conv2dOptions(dec[7], 1, 1)));
    }

    torch::Tensor forward(const torch::Tensor& x) {
        std::vector<torch::Tensor> enc_out;
        torch::Tensor h = x;
        for (int i = 0; i < 8; ++i) {
            h = down[static_cast<std::size_t>(i)](h);
            if (i != 0) h = down_bn[static_cast<std::size_t>(i)](h);
            h = torch::leaky_relu(h, cfg.leaky_slope);
            enc_out.push_back(h);
        }
        for (int j = 0; j < 8; ++j) {
            const auto sj = static_cast<std::size_t>(j);
            h = up[sj](h);
            if (j != 7) h = up_bn[sj](h);
            h = torch::relu(h);
            if (j < 7) h = torch::cat({h, enc_out[static_cast<std::size_t>(6 - j)]}, 1);
            h = refine1[sj](h);
            if (j != 7) h = refine1_bn[sj](h);
            h = torch::relu(h);
            if (j < cfg.dropout_stages) h = drop1[sj](h);
            h = refine2[sj](h);
            if (j != 7) h = refine2_bn[sj](h);
            h = torch::relu(h);
            if (j < cfg.dropout_stages) h = drop2[sj](h);
        }
        return torch::sigmoid(head(h));
    }

    void init_random(std::uint64_t seed) {
        Rng rng(seed);
        for (auto& p : named_parameters(true)) {
            if (p.value().dim() >= 2)
                fill_kaiming_normal(p.value(), rng);
            else if (p.key().ends_with("_bn.weight"))
                fill_constant(p.value(), 1.0);
            else
                fill_constant(p.value(), 0.0);
        }
        for (auto& b : named_buffers(true)) {
            if (b.key().ends_with("running_var"))
                fill_constant(b.value(), 1.0);
            else
                fill_constant(b.value(), 0.0);
        }
    }
};

Remover::Remover(const RemoverConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    net_ = std::make_shared<RemoverNetImpl>(cfg_);
    net_->init_random(cfg_.init_seed);
    net_->to(cfg_.dtype);
    net_->eval();
}

torch::Tensor Remover::forward(const torch::Tensor& input) {
    if (input.dim() != 4 || input.size(1) != 1)
        throw ValidationError("remover expects an Nx1xHxW tensor");
    if (input.size(2) % 256 != 0 || input.size(3) % 256 != 0 || input.size(2) < 256 ||
        input.size(3) < 256)
        throw ValidationError("remover input sides must be multiples of 256, got " +
                              std::to_string(input.size(2)) + "x" + std::to_string(input.size(3)));
    return net_->forward(input.to(cfg_.dtype));
}

void Remover::train(bool on) {
    net_->train(on);
}

bool Remover::is_training() const {
    return net_->is_training();
}

std::vector<BScan> Remover::infer_batch(const std::vector<BScan>& imgs, BatchTimings* timings) {
    if (imgs.empty()) throw ValidationError("infer_batch: empty batch");
    const bool was_training = net_->is_training();
    net_->eval();
    std::vector<const Image*> pixels;
    pixels.reserve(imgs.size());
    for (const BScan& img : imgs) pixels.push_back(&img.pixels);

    const auto start = std::chrono::steady_clock::now();
    torch::Tensor out;
    {
        torch::NoGradGuard guard;
        out = forward(to_batch(pixels, cfg_.dtype));
    }
    const auto stop = std::chrono::steady_clock::now();
    if (timings) {
        timings->total_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        timings->images = static_cast<std::int64_t>(imgs.size());
        timings->per_image_ms = timings->total_ms / static_cast<double>(imgs.size());
    }

    std::vector<BScan> results;
    results.reserve(imgs.size());
    for (std::size_t i = 0; i < imgs.size(); ++i) {
        BScan scan = imgs[i];
        scan.pixels = from_batch(out, static_cast<std::int64_t>(i));
        results.push_back(std::move(scan));
    }
    net_->train(was_training);
    return results;
}

std::int64_t Remover::parameter_count() const {
    return deshadow::parameter_count(*net_);
}

std::uint64_t Remover::weights_hash() const {
    return module_state_hash(*net_);
}

std::vector<torch::Tensor> Remover::parameters() {
    return net_->parameters();
}

void Remover::set_requires_grad(bool enabled) {
    for (auto& p : net_->parameters()) p.set_requires_grad(enabled);
}

torch::nn::Module& Remover::module() {
    return *net_;
}

std::vector<int> Remover::encoder_spatial_sizes(int side) {
    std::vector<int> sizes;
    for (int i = 0; i < 8; ++i) {
        side /= 2;
        sizes.push_back(side);
    }
    return sizes;
}

std::vector<int> Remover::dropout_stage_indices() const {
    std::vector<int> stages;
    for (int j = 0; j < cfg_.dropout_stages; ++j) stages.push_back(j);
    return stages;
}

}  // namespace deshadow
