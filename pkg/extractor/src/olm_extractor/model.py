"""VGG-16 convolutional trunk with taps at relu5 and pool5.

Only the feature layers are built (the 100M-parameter classifier head is
never used here). All max-pools run with ceil_mode so a grid of size H
comes out as ceil(H/16) at relu5 and ceil(H/32) at pool5 for any input
size, matching the shapes the miner expects for odd resolutions.
"""

import numpy as np
import torch
from torch import nn

# channel widths per block; "M" is a 2x2/2 max-pool
VGG16_LAYOUT = (64, 64, "M", 128, 128, "M", 256, 256, 256, "M",
                512, 512, 512, "M", 512, 512, 512, "M")

# canonical preprocessing of the reference pretrained model
INPUT_MEAN = (0.485, 0.456, 0.406)
INPUT_STD = (0.229, 0.224, 0.225)

# module indices in the sequential trunk: relu5 is the activation after
# the last block-5 convolution, pool5 the max-pool right after it
RELU5_INDEX = 29
POOL5_INDEX = 30


def build_trunk(seed: int = 0) -> nn.Sequential:
    torch.manual_seed(seed)
    layers: list[nn.Module] = []
    in_ch = 3
    for item in VGG16_LAYOUT:
        if item == "M":
            layers.append(nn.MaxPool2d(kernel_size=2, stride=2, ceil_mode=True))
        else:
            layers.append(nn.Conv2d(in_ch, item, kernel_size=3, padding=1))
            layers.append(nn.ReLU(inplace=True))
            in_ch = item
    trunk = nn.Sequential(*layers)
    assert isinstance(trunk[RELU5_INDEX], nn.ReLU)
    assert isinstance(trunk[POOL5_INDEX], nn.MaxPool2d)
    trunk.eval()
    return trunk


def load_weights(trunk: nn.Sequential, path: str) -> None:
    """Accepts either a trunk-only state dict or a full-model checkpoint
    whose feature keys are prefixed "features." (classifier keys are
    dropped)."""
    state = torch.load(path, map_location="cpu", weights_only=True)
    if any(k.startswith("features.") for k in state):
        state = {
            k[len("features."):]: v
            for k, v in state.items()
            if k.startswith("features.")
        }
    trunk.load_state_dict(state)
    trunk.eval()


def preprocess(rgb: np.ndarray) -> torch.Tensor:
    """uint8 (H, W, 3) image -> normalized float32 (1, 3, H, W) batch."""
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) RGB array, got shape {rgb.shape}")
    scaled = rgb.astype(np.float32) / 255.0
    mean = np.asarray(INPUT_MEAN, dtype=np.float32)
    std = np.asarray(INPUT_STD, dtype=np.float32)
    normed = (scaled - mean) / std
    return torch.from_numpy(normed.transpose(2, 0, 1)).unsqueeze(0)


@torch.no_grad()
def forward_taps(trunk: nn.Sequential, batch: torch.Tensor) -> tuple[np.ndarray, np.ndarray]:
    """Returns (relu5, pool5) as float32 (C, H, W) arrays."""
    x = batch
    relu5 = None
    for i, module in enumerate(trunk):
        x = module(x)
        if i == RELU5_INDEX:
            relu5 = x
        if i == POOL5_INDEX:
            pool5 = x
            break
    else:
        raise RuntimeError("trunk shorter than the pool5 tap")
    assert relu5 is not None
    return (
        relu5.squeeze(0).contiguous().numpy().astype(np.float32, copy=False),
        pool5.squeeze(0).contiguous().numpy().astype(np.float32, copy=False),
    )
