import gzip
import os
from pathlib import Path

import numpy as np
import pytest

from curvglyph.fixtures import random_smooth_images
from curvglyph.idx import encode_idx_images, encode_idx_labels
from curvglyph.schemas import Architecture

DATA_DIR_ENV = "CURVGLYPH_DATA_DIR"


@pytest.fixture
def data_dir() -> Path:
    value = os.getenv(DATA_DIR_ENV)
    if not value:
        pytest.skip(f"{DATA_DIR_ENV} is not set")
    return Path(value)


@pytest.fixture
def tiny_architecture() -> Architecture:
    return Architecture(input_dim=6, hidden_dims=(5, 4), dropout_rates=(0.0, 0.0))


def write_idx_pair(directory: Path, images_name: str, labels_name: str, images, labels, compress: bool = False) -> None:
    image_bytes, label_bytes = encode_idx_images(images), encode_idx_labels(labels)
    if compress:
        image_bytes, label_bytes = gzip.compress(image_bytes), gzip.compress(label_bytes)
        images_name, labels_name = f"{images_name}.gz", f"{labels_name}.gz"
    (directory / images_name).write_bytes(image_bytes)
    (directory / labels_name).write_bytes(label_bytes)


@pytest.fixture
def mnist_dir(tmp_path) -> Path:
    """200 training and 50 test glyphs in upstream MNIST file names, test half gzipped."""
    root = tmp_path / "mnist"
    root.mkdir()
    images = random_smooth_images(250, seed=3)
    labels = np.arange(250) % 10
    write_idx_pair(root, "train-images-idx3-ubyte", "train-labels-idx1-ubyte", images[:200], labels[:200])
    write_idx_pair(root, "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte", images[200:], labels[200:], compress=True)
    return root


@pytest.fixture
def letters_dir(tmp_path) -> Path:
    """EMNIST Letters layout: labels 1..26, glyphs stored transposed."""
    root = tmp_path / "letters"
    root.mkdir()
    images = random_smooth_images(312, seed=5)
    labels = np.arange(312) % 26 + 1
    write_idx_pair(root, "emnist-letters-train-images-idx3-ubyte", "emnist-letters-train-labels-idx1-ubyte",
                   images[:260], labels[:260])
    write_idx_pair(root, "emnist-letters-test-images-idx3-ubyte", "emnist-letters-test-labels-idx1-ubyte",
                   images[260:], labels[260:])
    return root
