#include "deshadow/tensor_bridge.hpp"

namespace deshadow {

torch::Tensor to_tensor(const Image& img, torch::Dtype dtype) {
    if (img.rows <= 0 || img.cols <= 0) throw ValidationError("empty image");
    torch::Tensor t = torch::from_blob(const_cast<double*>(img.data.data()),
                                       {1, 1, img.rows, img.cols}, torch::kFloat64)
                          .clone();
    return t.to(dtype);
}

torch::Tensor to_batch(const std::vector<const Image*>& imgs, torch::Dtype dtype) {
    if (imgs.empty()) throw ValidationError("empty batch");
    std::vector<torch::Tensor> items;
    items.reserve(imgs.size());
    for (const Image* img : imgs) {
        if (!img->same_shape(*imgs.front()))
            throw ValidationError("batch images must share a shape");
        items.push_back(to_tensor(*img, dtype));
    }
    return torch::cat(items, 0);
}

Image from_tensor(const torch::Tensor& t) {
    torch::Tensor flat = t.squeeze();
    if (flat.dim() != 2) throw ValidationError("expected a single 2-D image tensor");
    flat = flat.to(torch::kFloat64).contiguous();
    Image img(static_cast<int>(flat.size(0)), static_cast<int>(flat.size(1)));
    const double* src = flat.data_ptr<double>();
    std::copy(src, src + img.data.size(), img.data.begin());
    return img;
}

Image from_batch(const torch::Tensor& t, std::int64_t n) {
    if (t.dim() != 4) throw ValidationError("expected an Nx1xHxW batch");
    return from_tensor(t.index({n}));
}

}  // namespace deshadow
