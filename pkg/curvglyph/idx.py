"""
IDX tensor files as distributed for MNIST and EMNIST: parsing, encoding and
dataset loading.

An IDX file is a big-endian header (a 4-byte magic whose third byte is the
element type and fourth byte the rank, then one uint32 per dimension)
followed by the raw tensor. Either plain or gzip-compressed streams are
accepted; gzip is detected from its 0x1F8B prefix rather than the file name.
"""
import gzip
import logging
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Sequence, Union

import numpy as np

from .errors import (
    BadMagic,
    DataMismatch,
    DimMismatch,
    IndexOutOfRange,
    LabelOutOfRange,
    MissingFile,
    Truncated,
)
from .schemas import DatasetName

logger = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803  # unsigned byte, rank 3
LABEL_MAGIC = 0x00000801  # unsigned byte, rank 1
GZIP_PREFIX = b"\x1f\x8b"
GLYPH_SIZE = 28
SUPPORTED_CLASS_COUNTS = (10, 26)

ByteStream = Union[bytes, bytearray, memoryview, BinaryIO]

# Upstream file stems; each may also be present with a ".gz" suffix.
DATASET_FILES: dict[DatasetName, dict[str, tuple[str, ...]]] = {
    DatasetName.mnist: {
        "train_images": ("train-images-idx3-ubyte", "train-images.idx3-ubyte"),
        "train_labels": ("train-labels-idx1-ubyte", "train-labels.idx1-ubyte"),
        "test_images": ("t10k-images-idx3-ubyte", "t10k-images.idx3-ubyte"),
        "test_labels": ("t10k-labels-idx1-ubyte", "t10k-labels.idx1-ubyte"),
    },
    DatasetName.emnist_letters: {
        "train_images": ("emnist-letters-train-images-idx3-ubyte",),
        "train_labels": ("emnist-letters-train-labels-idx1-ubyte",),
        "test_images": ("emnist-letters-test-images-idx3-ubyte",),
        "test_labels": ("emnist-letters-test-labels-idx1-ubyte",),
    },
}


# ── Domain types ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class GlyphImage:
    pixels: np.ndarray
    source_index: int = 0

    def __post_init__(self):
        if self.pixels.shape != (GLYPH_SIZE, GLYPH_SIZE):
            raise DimMismatch(f"Glyph must be {GLYPH_SIZE}x{GLYPH_SIZE}, got {self.pixels.shape}")
        if self.source_index < 0:
            raise IndexOutOfRange(f"source_index must be non-negative, got {self.source_index}")
        if self.pixels.size and (self.pixels.min() < 0.0 or self.pixels.max() > 1.0):
            raise DataMismatch("Glyph pixel values must lie in [0, 1]")


@dataclass(frozen=True)
class LabeledDataset:
    """Images stacked as an (N, 28, 28) float32 array with integer labels."""

    images: np.ndarray
    labels: np.ndarray
    num_classes: int
    name: str

    def __post_init__(self):
        if self.images.ndim != 3 or self.images.shape[1:] != (GLYPH_SIZE, GLYPH_SIZE):
            raise DimMismatch(f"Expected an (N, 28, 28) image stack, got {self.images.shape}")
        if len(self.images) != len(self.labels):
            raise DataMismatch(
                f"{self.name}: {len(self.images)} images but {len(self.labels)} labels"
            )
        if self.num_classes not in SUPPORTED_CLASS_COUNTS:
            raise DataMismatch(f"num_classes must be one of {SUPPORTED_CLASS_COUNTS}")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise LabelOutOfRange(
                f"{self.name}: labels must lie in [0, {self.num_classes}), "
                f"found [{self.labels.min()}, {self.labels.max()}]"
            )

    def __len__(self) -> int:
        return len(self.labels)

    def glyph(self, index: int) -> GlyphImage:
        if not 0 <= index < len(self):
            raise IndexOutOfRange(f"Index {index} outside [0, {len(self)}) for {self.name}")
        return GlyphImage(pixels=self.images[index], source_index=index)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_classes)


# ── Parsing ────────────────────────────────────────────────────────────────────

def _as_bytes(data: ByteStream) -> bytes:
    if hasattr(data, "read"):
        data = data.read()
    data = bytes(data)
    if data[:2] == GZIP_PREFIX:
        logger.debug("gzip stream detected")
        try:
            return gzip.decompress(data)
        except (EOFError, OSError, zlib.error) as exc:
            raise Truncated(f"Corrupt or truncated gzip stream: {exc}") from exc
    return data


def _read_header(data: bytes, magic: int, rank: int, kind: str) -> tuple[int, ...]:
    if len(data) < 4:
        raise Truncated(f"{kind} stream is {len(data)} bytes, shorter than the IDX magic")
    (found,) = struct.unpack(">I", data[:4])
    if found != magic:
        raise BadMagic(f"Not an IDX {kind} file: expected magic 0x{magic:08X}, found 0x{found:08X}")
    header_len = 4 + 4 * rank
    if len(data) < header_len:
        raise Truncated(f"{kind} header needs {header_len} bytes, stream has {len(data)}")
    return struct.unpack(f">{rank}I", data[4:header_len])


def parse_idx_images(data: ByteStream) -> np.ndarray:
    """
    Parse an IDX rank-3 unsigned-byte stream into an (N, 28, 28) float32
    array; row i holds the pixels of glyph i with each byte b mapped to b/255.
    """
    raw = parse_idx_images_raw(data)
    return raw.astype(np.float32) / np.float32(255.0)


def parse_idx_images_raw(data: ByteStream) -> np.ndarray:
    data = _as_bytes(data)
    n, rows, cols = _read_header(data, IMAGE_MAGIC, 3, "image")
    if (rows, cols) != (GLYPH_SIZE, GLYPH_SIZE):
        raise DimMismatch(f"Images are {rows}x{cols}, expected {GLYPH_SIZE}x{GLYPH_SIZE}")
    expected = n * rows * cols
    available = len(data) - 16
    if available < expected:
        raise Truncated(f"Header promises {n} images ({expected} bytes), stream has {available}")
    if available > expected:
        logger.debug("Ignoring %d trailing bytes after image tensor", available - expected)
    return np.frombuffer(data, dtype=np.uint8, count=expected, offset=16).reshape(n, rows, cols)


def parse_idx_labels(data: ByteStream) -> np.ndarray:
    """Parse an IDX rank-1 unsigned-byte stream into raw, unshifted int64 labels."""
    data = _as_bytes(data)
    (n,) = _read_header(data, LABEL_MAGIC, 1, "label")
    available = len(data) - 8
    if available < n:
        raise Truncated(f"Header promises {n} labels, stream has {available} bytes")
    return np.frombuffer(data, dtype=np.uint8, count=n, offset=8).astype(np.int64)


# ── Encoding ───────────────────────────────────────────────────────────────────

def encode_idx_images(images: np.ndarray) -> bytes:
    """Serialise an (N, 28, 28) stack; float input in [0, 1] is mapped with round(p*255)."""
    images = np.asarray(images)
    if images.ndim != 3 or images.shape[1:] != (GLYPH_SIZE, GLYPH_SIZE):
        raise DimMismatch(f"Expected an (N, 28, 28) image stack, got {images.shape}")
    if images.dtype != np.uint8:
        images = np.rint(np.clip(images, 0.0, 1.0) * 255.0).astype(np.uint8)
    header = struct.pack(">IIII", IMAGE_MAGIC, len(images), GLYPH_SIZE, GLYPH_SIZE)
    return header + np.ascontiguousarray(images).tobytes()


def encode_idx_labels(labels: Sequence[int]) -> bytes:
    labels = np.asarray(labels)
    if len(labels) and (labels.min() < 0 or labels.max() > 255):
        raise LabelOutOfRange("IDX unsigned-byte labels must lie in [0, 255]")
    return struct.pack(">II", LABEL_MAGIC, len(labels)) + labels.astype(np.uint8).tobytes()


# ── Label / orientation normalisation ─────────────────────────────────────────

def normalize_emnist(
    labels: Sequence[int], images: np.ndarray, name: str = DatasetName.emnist_letters.value
) -> LabeledDataset:
    """
    Shift EMNIST Letters labels from 1..26 to 0..25 and transpose every image,
    since the upstream files store glyphs transposed relative to MNIST.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) and (labels.min() < 1 or labels.max() > 26):
        bad = labels[(labels < 1) | (labels > 26)][0]
        raise LabelOutOfRange(f"EMNIST Letters label {bad} outside [1, 26]")
    upright = np.ascontiguousarray(np.asarray(images).transpose(0, 2, 1))
    return LabeledDataset(images=upright, labels=labels - 1, num_classes=26, name=name)


# ── Loading from disk ──────────────────────────────────────────────────────────

def _locate(data_dir: Path, stems: tuple[str, ...]) -> Path:
    for stem in stems:
        for candidate in (data_dir / stem, data_dir / f"{stem}.gz"):
            if candidate.is_file():
                return candidate
    raise MissingFile(f"{data_dir / stems[0]} (or {stems[0]}.gz)")


def _read_pair(images_path: Path, labels_path: Path) -> tuple[np.ndarray, np.ndarray]:
    images = parse_idx_images(images_path.read_bytes())
    labels = parse_idx_labels(labels_path.read_bytes())
    if len(images) != len(labels):
        raise DataMismatch(
            f"{images_path.name} has {len(images)} images but {labels_path.name} has {len(labels)} labels"
        )
    logger.info("Parsed %d glyphs from %s", len(images), images_path.name)
    return images, labels


def load_dataset(name: Union[DatasetName, str], data_dir: Union[Path, str]) -> LabeledDataset:
    """
    Load the upstream train and test files of ``name`` from ``data_dir`` and
    concatenate them, train first, as the split protocol expects.
    """
    name = DatasetName(name)
    data_dir = Path(data_dir)
    files = {key: _locate(data_dir, stems) for key, stems in DATASET_FILES[name].items()}

    train_x, train_y = _read_pair(files["train_images"], files["train_labels"])
    test_x, test_y = _read_pair(files["test_images"], files["test_labels"])
    images = np.concatenate([train_x, test_x])
    labels = np.concatenate([train_y, test_y])

    if name is DatasetName.emnist_letters:
        return normalize_emnist(labels, images, name=name.value)
    return LabeledDataset(images=images, labels=labels, num_classes=10, name=name.value)
