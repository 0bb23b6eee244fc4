import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import corpus, scene_rgb, xray_gray  # noqa: E402

import sgmask as sg  # noqa: E402


@pytest.fixture(scope="session")
def fixture_corpus():
    """20 deterministic (name, array) pairs: scenes and xray-like images."""
    return corpus()


@pytest.fixture(scope="session")
def dataset_root(tmp_path_factory):
    """A root/<class>/<image> tree with 10 scene and 10 xray images."""
    root = tmp_path_factory.mktemp("dataset")
    counters = {}
    for label, arr in corpus():
        counters[label] = counters.get(label, 0) + 1
        d = root / label
        d.mkdir(exist_ok=True)
        sg.save_image(sg.Image.from_array(arr), d / f"{label}_{counters[label]:02d}.png")
    return root


@pytest.fixture(scope="session")
def small_dataset_root(tmp_path_factory):
    """10 equal-size single-class images for one-to-one batch tests."""
    root = tmp_path_factory.mktemp("dataset10")
    d = root / "scene"
    d.mkdir()
    for i in range(10):
        sg.save_image(
            sg.Image.from_array(scene_rgb(400 + i, 60, 80)), d / f"img_{i:02d}.png"
        )
    return root


@pytest.fixture(scope="session")
def scene_image():
    return sg.Image.from_array(scene_rgb(11))


@pytest.fixture(scope="session")
def xray_image():
    return sg.Image.from_array(xray_gray(12))


@pytest.fixture(scope="session")
def warm_kernels(scene_image):
    """Compile (or load cached) jit kernels once, outside timed sections."""
    sg.slic_segment(scene_image, sg.SlicParams(superpixels=50))
    return True


def constant_image(value, h, w, channels=3):
    return sg.Image.from_array(np.full((h, w, channels), value, np.uint8))
