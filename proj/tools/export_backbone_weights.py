#!/usr/bin/env python3
"""Convert torchvision ResNet-152 weights into the deshadow container format.

The C++ backbone loads a named-tensor container ("DSTENSR1"). This script
maps a torchvision state dict onto the names the C++ module registers and
prepends the declared parameter count so the loader can verify the
architecture before copying tensors.

Usage:
    python3 tools/export_backbone_weights.py --out resnet152.weights
    python3 tools/export_backbone_weights.py --state-dict path.pth --out resnet152.weights

Without --state-dict the script downloads the published ImageNet weights
through torchvision (network access required).
"""

import argparse
import struct
import sys

import torch

MAGIC = b"DSTENSR1"
DTYPE_CODES = {torch.float32: 0, torch.float64: 1, torch.int64: 2}


def remap_name(name: str):
    """torchvision parameter name -> deshadow backbone tensor name."""
    if name.startswith("fc."):
        return None  # classifier head is not part of the feature extractor
    name = name.replace("downsample.0.", "down_conv.")
    name = name.replace("downsample.1.", "down_bn.")
    return "backbone." + name


def write_tensor(out, name: str, tensor: torch.Tensor) -> None:
    tensor = tensor.detach().contiguous().cpu()
    if tensor.dtype not in DTYPE_CODES:
        tensor = tensor.to(torch.float32)
    encoded = name.encode()
    out.write(struct.pack("<I", len(encoded)))
    out.write(encoded)
    out.write(struct.pack("<BB", DTYPE_CODES[tensor.dtype], tensor.dim()))
    for d in tensor.shape:
        out.write(struct.pack("<q", d))
    data = tensor.numpy().tobytes()
    out.write(struct.pack("<Q", len(data)))
    out.write(data)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--state-dict", help="local .pth state dict (else download)")
    parser.add_argument("--out", required=True, help="output .weights path")
    args = parser.parse_args()

    if args.state_dict:
        state = torch.load(args.state_dict, map_location="cpu", weights_only=True)
    else:
        from torchvision.models import ResNet152_Weights, resnet152

        state = resnet152(weights=ResNet152_Weights.IMAGENET1K_V1).state_dict()

    items = []
    param_count = 0
    for name, tensor in state.items():
        mapped = remap_name(name)
        if mapped is None:
            continue
        items.append((mapped, tensor))
        # Parameters only (buffers like running stats are excluded from the
        # declared count, matching the C++ loader's check).
        if name.endswith((".weight", ".bias")) and "running" not in name:
            param_count += tensor.numel()

    with open(args.out, "wb") as out:
        out.write(MAGIC)
        out.write(struct.pack("<I", len(items) + 1))
        write_tensor(out, "backbone.__param_count", torch.tensor(param_count, dtype=torch.int64))
        for name, tensor in items:
            write_tensor(out, name, tensor)

    print(f"wrote {len(items)} tensors ({param_count} parameters) to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
