import json

import pytest
from PIL import Image

TEXTURES = ["dots", "stripes"]
OBJECTS = ["bear", "bottle", "car", "cat", "clock", "dog", "elephant"]


def make_image(path, seed):
    # Deterministic flat-color images; content does not matter, format does.
    rgb = ((seed * 37) % 256, (seed * 91) % 256, (seed * 53) % 256)
    Image.new("RGB", (48, 36), rgb).save(path)


def make_class_folders(root, class_names, per_class):
    k = 0
    for name in class_names:
        sub = root / name
        sub.mkdir()
        for i in range(per_class):
            make_image(sub / f"img_{i:03d}.png", k)
            k += 1
    return k


@pytest.fixture
def registry_path(tmp_path):
    path = tmp_path / "registry.json"
    path.write_text(json.dumps({"textures": TEXTURES, "objects": OBJECTS}),
                    encoding="utf-8")
    return path


@pytest.fixture
def texture_folder(tmp_path):
    # 2 texture classes x 5 images = the 10-image toy dataset.
    root = tmp_path / "texture_data"
    root.mkdir()
    make_class_folders(root, TEXTURES, 5)
    return root


@pytest.fixture
def object_folder(tmp_path):
    root = tmp_path / "object_data"
    root.mkdir()
    make_class_folders(root, OBJECTS[:2], 5)
    return root
