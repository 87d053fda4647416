"""Image preprocessing shared by every model."""

from __future__ import annotations

from pathlib import Path

import torch
from PIL import Image
from torchvision import transforms

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)

RESIZE_SIZE = 256
CROP_SIZE = 224


def build_transform() -> transforms.Compose:
    """Resize short side to 256, center-crop 224, normalize with the
    training-set statistics.

    One pipeline for every model, including the 299-native inception
    family, so records stay comparable across models.
    """
    return transforms.Compose([
        transforms.Resize(RESIZE_SIZE),
        transforms.CenterCrop(CROP_SIZE),
        transforms.ToTensor(),
        transforms.Normalize(IMAGENET_MEAN, IMAGENET_STD),
    ])


def load_image(path: str | Path) -> Image.Image:
    """Open an image as RGB; raises OSError for unreadable files."""
    with Image.open(path) as img:
        return img.convert("RGB")


def preprocess_batch(images: list[Image.Image],
                     transform: transforms.Compose) -> torch.Tensor:
    return torch.stack([transform(img) for img in images])
