#pragma once

#include <torch/torch.h>

#include <vector>

#include "deshadow/image.hpp"

namespace deshadow {

// Image (row-major doubles) -> 1x1xHxW tensor of the given dtype.
torch::Tensor to_tensor(const Image& img, torch::Dtype dtype = torch::kFloat32);

// Batch of images -> Nx1xHxW. All images must share a shape.
torch::Tensor to_batch(const std::vector<const Image*>& imgs, torch::Dtype dtype = torch::kFloat32);

// Any 1x1xHxW / 1xHxW / HxW tensor -> Image (doubles).
Image from_tensor(const torch::Tensor& t);

// n-th item of an Nx1xHxW batch -> Image.
Image from_batch(const torch::Tensor& t, std::int64_t n);

}  // namespace deshadow
