"""Classifier construction for the evaluated model set."""

from __future__ import annotations

import torch
from torchvision.models import get_model, get_model_weights

MODEL_NAMES = (
    "resnet18",
    "resnet50",
    "resnet152",
    "efficientnet_b0",
    "densenet121",
    "densenet169",
    "inception_v3",
    "convnext_base",
)

WEIGHT_MODES = ("default", "none")

# Random initialization is seeded so re-running a job rebuilds the exact
# same classifier.
RANDOM_INIT_SEED = 0


class ModelError(ValueError):
    """Unknown model name, bad weight mode, or a registry mismatch."""


def build_model(name: str, weights: str,
                num_classes: int) -> tuple[torch.nn.Module, str]:
    """Return an eval-mode classifier with num_classes outputs plus the
    identifier of the weights it carries."""
    if name not in MODEL_NAMES:
        raise ModelError(f"unknown model {name!r}; choose from {MODEL_NAMES}")
    if weights not in WEIGHT_MODES:
        raise ModelError(f"weights must be one of {WEIGHT_MODES}, got {weights!r}")
    if num_classes < 2:
        raise ModelError("num_classes must be at least 2")

    if weights == "default":
        enum = get_model_weights(name).DEFAULT
        trained = len(enum.meta["categories"])
        # Checked before get_model so a mismatch never triggers a weight fetch.
        if trained != num_classes:
            raise ModelError(
                f"registry mismatch: {name} default weights emit {trained} "
                f"classes but the registry defines {num_classes} objects")
        model = get_model(name, weights=enum)
        weight_id = str(enum)
    else:
        kwargs: dict[str, object] = {"num_classes": num_classes}
        if name == "inception_v3":
            kwargs["init_weights"] = True
        torch.manual_seed(RANDOM_INIT_SEED)
        model = get_model(name, weights=None, **kwargs)
        weight_id = f"random-init-seed{RANDOM_INIT_SEED}"

    model.eval()
    return model, weight_id
