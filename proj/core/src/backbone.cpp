#include "deshadow/backbone.hpp"

#include <algorithm>
#include <cmath>

#include "deshadow/errors.hpp"
#include "deshadow/net_util.hpp"
#include "deshadow/rng.hpp"

namespace deshadow {

namespace {

int scaled(int channels, double scale) {
    return std::max(1, static_cast<int>(std::lround(channels * scale)));
}

constexpr int kExpansion = 4;
// Blocks per residual stage in the 152-layer configuration.
constexpr int kBlocks[4] = {3, 8, 36, 3};
constexpr int kMids[4] = {64, 128, 256, 512};

}  // namespace

struct BottleneckImpl : torch::nn::Module {
    torch::nn::Conv2d conv1{nullptr}, conv2{nullptr}, conv3{nullptr};
    torch::nn::BatchNorm2d bn1{nullptr}, bn2{nullptr}, bn3{nullptr};
    torch::nn::Conv2d down_conv{nullptr};
    torch::nn::BatchNorm2d down_bn{nullptr};
    bool has_downsample = false;

    BottleneckImpl(int in_ch, int mid_ch, int stride) {
        const int out_ch = mid_ch * kExpansion;
        conv1 = register_module(
            "conv1", torch::nn::Conv2d(torch::nn::Conv2dOptions(in_ch, mid_ch, 1).bias(false)));
        bn1 = register_module("bn1", torch::nn::BatchNorm2d(mid_ch));
        conv2 = register_module(
            "conv2", torch::nn::Conv2d(
                         torch::nn::Conv2dOptions(mid_ch, mid_ch, 3).stride(stride).padding(1).bias(false)));
        bn2 = register_module("bn2", torch::nn::BatchNorm2d(mid_ch));
        conv3 = register_module(
            "conv3", torch::nn::Conv2d(torch::nn::Conv2dOptions(mid_ch, out_ch, 1).bias(false)));
        bn3 = register_module("bn3", torch::nn::BatchNorm2d(out_ch));
        has_downsample = stride != 1 || in_ch != out_ch;
        if (has_downsample) {
            down_conv = register_module(
                "down_conv",
                torch::nn::Conv2d(torch::nn::Conv2dOptions(in_ch, out_ch, 1).stride(stride).bias(false)));
            down_bn = register_module("down_bn", torch::nn::BatchNorm2d(out_ch));
        }
    }

    torch::Tensor forward(const torch::Tensor& x) {
        torch::Tensor out = torch::relu(bn1(conv1(x)));
        out = torch::relu(bn2(conv2(out)));
        out = bn3(conv3(out));
        const torch::Tensor identity = has_downsample ? down_bn(down_conv(x)) : x;
        return torch::relu(out + identity);
    }
};
TORCH_MODULE(Bottleneck);

struct ResNetImpl : torch::nn::Module {
    torch::nn::Conv2d conv1{nullptr};
    torch::nn::BatchNorm2d bn1{nullptr};
    std::vector<torch::nn::Sequential> stages;

    explicit ResNetImpl(double width_scale) {
        const int stem = scaled(64, width_scale);
        conv1 = register_module(
            "conv1",
            torch::nn::Conv2d(torch::nn::Conv2dOptions(3, stem, 7).stride(2).padding(3).bias(false)));
        bn1 = register_module("bn1", torch::nn::BatchNorm2d(stem));

        int in_ch = stem;
        for (int s = 0; s < 4; ++s) {
            torch::nn::Sequential stage;
            const int mid = scaled(kMids[s], width_scale);
            const int stride = s == 0 ? 1 : 2;
            for (int b = 0; b < kBlocks[s]; ++b) {
                stage->push_back(Bottleneck(in_ch, mid, b == 0 ? stride : 1));
                in_ch = mid * kExpansion;
            }
            stages.push_back(register_module("layer" + std::to_string(s + 1), stage));
        }
    }

    // Runs the stem plus residual stages [0, last_stage], returning the
    // output of every stage up to it.
    std::vector<torch::Tensor> stage_outputs(const torch::Tensor& x, int last_stage) {
        torch::Tensor h = torch::relu(bn1(conv1(x)));
        h = torch::max_pool2d(h, /*kernel=*/3, /*stride=*/2, /*padding=*/1);
        std::vector<torch::Tensor> outs;
        for (int s = 0; s <= last_stage; ++s) {
            h = stages[static_cast<std::size_t>(s)]->forward(h);
            outs.push_back(h);
        }
        return outs;
    }

    void init_random(std::uint64_t seed) {
        Rng rng(seed);
        // Registration order matches construction order, so a single pass over
        // named parameters is reproducible.
        for (auto& p : named_parameters(/*recurse=*/true)) {
            const std::string& name = p.key();
            torch::Tensor t = p.value();
            if (t.dim() >= 2) {
                fill_kaiming_normal(t, rng);
            } else if (name.ends_with("bn3.weight") || name.ends_with("down_bn.weight")) {
                fill_constant(t, 0.2);  // damp residual branches so depth stays stable
            } else if (name.ends_with(".weight")) {
                fill_constant(t, 1.0);
            } else {
                fill_constant(t, 0.0);
            }
        }
        for (auto& b : named_buffers(true)) {
            if (b.key().ends_with("running_var"))
                fill_constant(b.value(), 1.0);
            else
                fill_constant(b.value(), 0.0);
        }
    }
};

const std::vector<int>& Backbone::stage_end_conv_indices() {
    // Flattened main-path conv count: stem(1) + 3 convs per bottleneck.
    static const std::vector<int> ends = [] {
        std::vector<int> out;
        int index = 0;  // stem conv = index 0
        for (int s = 0; s < 4; ++s) {
            index += 3 * kBlocks[s];
            out.push_back(index);  // last conv of the stage
        }
        return out;
    }();
    return ends;
}

Backbone::Backbone(const BackboneConfig& cfg) : cfg_(cfg) {
    if (cfg_.tap_ids.empty()) throw ConfigError("backbone needs at least one tap layer");
    const auto& ends = stage_end_conv_indices();
    for (int tap : cfg_.tap_ids)
        if (std::find(ends.begin(), ends.end(), tap) == ends.end())
            throw ConfigError("tap " + std::to_string(tap) +
                              " is not a stage-end convolution index (expected one of 9, 33, 141, 150)");
    if (!std::is_sorted(cfg_.tap_ids.begin(), cfg_.tap_ids.end()))
        throw ConfigError("tap ids must be sorted ascending");

    net_ = std::make_shared<ResNetImpl>(cfg_.width_scale);
    if (cfg_.mode == BackboneConfig::Mode::pretrained) {
        if (cfg_.weights_path.empty() || !std::filesystem::exists(cfg_.weights_path))
            throw IoError("pretrained backbone requires a weights file (missing: " +
                          cfg_.weights_path.string() + ")");
        const NamedTensors tensors = load_named_tensors(cfg_.weights_path);
        if (const torch::Tensor* declared = tensors.find("backbone.__param_count")) {
            const std::int64_t expect = declared->item<std::int64_t>();
            const std::int64_t have = deshadow::parameter_count(*net_, /*trainable_only=*/false);
            if (expect != have)
                throw FormatError("backbone weights manifest declares " + std::to_string(expect) +
                                  " parameters, architecture has " + std::to_string(have));
        }
        restore_module(*net_, tensors, "backbone");
    } else {
        net_->init_random(cfg_.seed);
    }
    net_->to(cfg_.dtype);
    net_->eval();
    for (auto& p : net_->parameters()) p.set_requires_grad(false);
}

std::vector<torch::Tensor> Backbone::extract(const torch::Tensor& input) const {
    if (input.dim() != 4) throw ValidationError("backbone expects an NxCxHxW tensor");
    torch::Tensor x = input.to(cfg_.dtype);
    if (x.size(1) == 1) x = x.repeat({1, 3, 1, 1});
    if (x.size(1) != 3) throw ValidationError("backbone expects 1 or 3 input channels");

    // Published ImageNet channel statistics.
    const auto opts = torch::TensorOptions().dtype(cfg_.dtype);
    torch::Tensor mean = torch::tensor({0.485, 0.456, 0.406}, opts).view({1, 3, 1, 1});
    torch::Tensor stddev = torch::tensor({0.229, 0.224, 0.225}, opts).view({1, 3, 1, 1});
    x = (x - mean) / stddev;

    const auto& ends = stage_end_conv_indices();
    int last_stage = 0;
    for (std::size_t s = 0; s < ends.size(); ++s)
        if (std::find(cfg_.tap_ids.begin(), cfg_.tap_ids.end(), ends[s]) != cfg_.tap_ids.end())
            last_stage = static_cast<int>(s);

    const std::vector<torch::Tensor> stages = net_->stage_outputs(x, last_stage);
    std::vector<torch::Tensor> taps;
    for (int tap : cfg_.tap_ids) {
        const auto stage_index =
            std::find(ends.begin(), ends.end(), tap) - ends.begin();
        taps.push_back(stages[static_cast<std::size_t>(stage_index)]);
    }
    return taps;
}

FeatureStack Backbone::extract_features(const BScan& img) const {
    validate(img);
    if (img.height() < 32 || img.width() < 32)
        throw ValidationError("backbone input must be at least 32x32");
    torch::Tensor t = torch::from_blob(const_cast<double*>(img.pixels.data.data()),
                                       {1, 1, img.height(), img.width()}, torch::kFloat64)
                          .clone();
    FeatureStack stack;
    stack.tap_ids = cfg_.tap_ids;
    torch::NoGradGuard guard;
    stack.activations = extract(t);
    return stack;
}

std::int64_t Backbone::parameter_count() const {
    return deshadow::parameter_count(*net_, /*trainable_only=*/false);
}

std::uint64_t Backbone::weights_hash() const {
    return module_state_hash(*net_);
}

torch::nn::Module& Backbone::module() {
    return *net_;
}

void Backbone::save_weights(const std::filesystem::path& path) const {
    NamedTensors tensors;
    tensors.add("backbone.__param_count",
                torch::tensor(parameter_count(), torch::kInt64));
    NamedTensors state = snapshot_module(*net_, "backbone");
    for (auto& item : state.items) tensors.items.push_back(std::move(item));
    save_named_tensors(path, tensors);
}

}  // namespace deshadow
