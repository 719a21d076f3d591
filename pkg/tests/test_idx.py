import gzip
import io
import struct

import numpy as np
import pytest

from curvglyph.errors import BadMagic, DimMismatch, IndexOutOfRange, LabelOutOfRange, MissingFile, Truncated
from curvglyph.idx import (
    IMAGE_MAGIC,
    LabeledDataset,
    encode_idx_images,
    encode_idx_labels,
    load_dataset,
    normalize_emnist,
    parse_idx_images,
    parse_idx_images_raw,
    parse_idx_labels,
)


@pytest.fixture
def raw_images():
    return np.random.default_rng(0).integers(0, 256, size=(5, 28, 28), dtype=np.uint8)


def test_image_bytes_survive_encode_and_parse(raw_images):
    data = encode_idx_images(raw_images)
    assert data[:4] == b"\x00\x00\x08\x03"
    assert len(data) == 16 + 5 * 784
    np.testing.assert_array_equal(parse_idx_images_raw(data), raw_images)
    assert encode_idx_images(parse_idx_images_raw(data)) == data


def test_pixels_are_scaled_to_unit_interval(raw_images):
    images = parse_idx_images(encode_idx_images(raw_images))
    assert images.dtype == np.float32
    assert images.shape == (5, 28, 28)
    np.testing.assert_array_equal(images, raw_images.astype(np.float32) / np.float32(255))


def test_gzip_is_detected_from_content(raw_images):
    data = encode_idx_images(raw_images)
    np.testing.assert_array_equal(parse_idx_images_raw(gzip.compress(data)), raw_images)
    np.testing.assert_array_equal(parse_idx_images_raw(io.BytesIO(data)), raw_images)


def test_labels_are_returned_unshifted():
    labels = parse_idx_labels(encode_idx_labels([1, 26, 13]))
    assert labels.tolist() == [1, 26, 13]
    assert labels.dtype == np.int64


def test_label_stream_is_not_an_image_stream():
    with pytest.raises(BadMagic):
        parse_idx_images(encode_idx_labels([0, 1, 2]))
    with pytest.raises(BadMagic):
        parse_idx_labels(encode_idx_images(np.zeros((1, 28, 28), dtype=np.uint8)))


def test_short_payload_is_truncated(raw_images):
    data = encode_idx_images(raw_images)
    with pytest.raises(Truncated):
        parse_idx_images(data[:-1])
    with pytest.raises(Truncated):
        parse_idx_images(data[:3])
    with pytest.raises(Truncated):
        parse_idx_labels(encode_idx_labels([1, 2, 3])[:-1])


def test_truncated_gzip_stream():
    data = gzip.compress(encode_idx_labels(list(range(100))))
    with pytest.raises(Truncated):
        parse_idx_labels(data[:-10])


def test_wrong_image_size_is_rejected():
    header = struct.pack(">IIII", IMAGE_MAGIC, 1, 27, 28)
    with pytest.raises(DimMismatch):
        parse_idx_images(header + bytes(27 * 28))


def test_emnist_normalisation_shifts_and_transposes():
    images = np.zeros((2, 28, 28), dtype=np.float32)
    images[0, 3, 20] = 1.0
    dataset = normalize_emnist([1, 26], images)
    assert dataset.labels.tolist() == [0, 25]
    assert dataset.num_classes == 26
    assert dataset.images[0, 20, 3] == 1.0
    assert dataset.images[0, 3, 20] == 0.0


@pytest.mark.parametrize("bad", [0, 27])
def test_emnist_labels_outside_one_to_26(bad):
    with pytest.raises(LabelOutOfRange):
        normalize_emnist([1, bad], np.zeros((2, 28, 28), dtype=np.float32))


def test_dataset_rejects_labels_beyond_class_count():
    with pytest.raises(LabelOutOfRange):
        LabeledDataset(images=np.zeros((2, 28, 28), np.float32), labels=np.array([0, 10]), num_classes=10, name="x")


def test_glyph_access_is_bounds_checked():
    dataset = LabeledDataset(images=np.zeros((2, 28, 28), np.float32), labels=np.array([0, 1]), num_classes=10, name="x")
    assert dataset.glyph(1).source_index == 1
    with pytest.raises(IndexOutOfRange):
        dataset.glyph(2)


def test_load_dataset_concatenates_train_then_test(mnist_dir):
    dataset = load_dataset("mnist", mnist_dir)
    assert len(dataset) == 250
    assert dataset.num_classes == 10
    assert dataset.labels[:10].tolist() == list(range(10))
    assert dataset.class_counts().tolist() == [25] * 10


def test_load_letters_shifts_labels(letters_dir):
    dataset = load_dataset("emnist-letters", letters_dir)
    assert len(dataset) == 312
    assert dataset.labels.min() == 0 and dataset.labels.max() == 25


def test_missing_labels_file_names_the_path(mnist_dir):
    (mnist_dir / "train-labels-idx1-ubyte").unlink()
    with pytest.raises(MissingFile) as excinfo:
        load_dataset("mnist", mnist_dir)
    assert "train-labels-idx1-ubyte" in excinfo.value.detail


@pytest.mark.slow
def test_real_mnist_has_70000_glyphs(data_dir):
    dataset = load_dataset("mnist", data_dir)
    assert len(dataset) == 70000
    assert dataset.images.min() >= 0.0 and dataset.images.max() <= 1.0
