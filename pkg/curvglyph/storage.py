"""
On-disk artefacts: model checkpoints, the feature cache and TrainReport files.

Checkpoint directory
    manifest.txt   UTF-8 ``key=value`` lines (see README for the exact keys)
    weights.bin    every tensor of ``MlpModel.state()`` as little-endian
                   float32, row-major, concatenated in manifest order
    report.json    the TrainReport (optional)
    epochs.jsonl   one EpochRecord per line (optional)

Feature cache file
    b"CGF1" | uint32 LE header length | JSON FeatureCacheHeader |
    float32 LE features (rows × cols) | int32 LE labels (rows) |
    int32 LE fit, val, test indices (lengths from the header's split summary)
"""
import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
from pydantic import ValidationError

from .errors import ClassCountMismatch, CorruptBlob, IoFailure, MissingFile, VersionMismatch
from .models import MlpModel
from .nn import init_model
from .schemas import Architecture, CheckpointManifest, FeatureCacheHeader, TensorSpec, TrainReport
from .splits import SplitPlan

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
MANIFEST_FILE = "manifest.txt"
WEIGHTS_FILE = "weights.bin"
REPORT_FILE = "report.json"
EPOCHS_FILE = "epochs.jsonl"

FEATURE_MAGIC = b"CGF1"
FLOAT_LE = np.dtype("<f4")
INT_LE = np.dtype("<i4")

PathLike = Union[Path, str]


def _join(values) -> str:
    return ",".join(repr(v) if isinstance(v, float) else str(v) for v in values)


# ── Checkpoints ────────────────────────────────────────────────────────────────

def manifest_for(model: MlpModel) -> CheckpointManifest:
    return CheckpointManifest(
        format_version=CHECKPOINT_VERSION,
        num_classes=model.num_classes,
        architecture=model.architecture,
        seed=model.seed,
        tensors=[TensorSpec(name=name, shape=t.shape) for name, t in model.state().items()],
    )


def render_manifest(manifest: CheckpointManifest) -> str:
    arch = manifest.architecture
    lines = [
        f"format_version={manifest.format_version}",
        f"num_classes={manifest.num_classes}",
        f"input_dim={arch.input_dim}",
        f"hidden_dims={_join(arch.hidden_dims)}",
        f"dropout_rates={_join(arch.dropout_rates)}",
        f"bn_momentum={arch.bn_momentum!r}",
        f"bn_eps={arch.bn_eps!r}",
        f"seed={manifest.seed}",
        "dtype=float32-le",
        f"tensors={len(manifest.tensors)}",
    ]
    lines += [f"tensor.{i}={t.name}:{'x'.join(map(str, t.shape))}" for i, t in enumerate(manifest.tensors)]
    return "\n".join(lines) + "\n"


def parse_manifest(text: str) -> CheckpointManifest:
    try:
        pairs = dict(line.split("=", 1) for line in text.splitlines() if line.strip())
        version = int(pairs["format_version"])
        if version != CHECKPOINT_VERSION:
            raise VersionMismatch(f"Checkpoint format {version} is not supported (expected {CHECKPOINT_VERSION})")
        tensors = []
        for i in range(int(pairs["tensors"])):
            name, dims = pairs[f"tensor.{i}"].rsplit(":", 1)
            tensors.append(TensorSpec(name=name, shape=tuple(int(d) for d in dims.split("x") if d)))
        architecture = Architecture(
            input_dim=int(pairs["input_dim"]),
            hidden_dims=tuple(int(v) for v in pairs["hidden_dims"].split(",") if v),
            dropout_rates=tuple(float(v) for v in pairs["dropout_rates"].split(",") if v),
            bn_momentum=float(pairs["bn_momentum"]),
            bn_eps=float(pairs["bn_eps"]),
        )
        return CheckpointManifest(
            format_version=version,
            num_classes=int(pairs["num_classes"]),
            architecture=architecture,
            seed=int(pairs["seed"]),
            tensors=tensors,
        )
    except (KeyError, ValueError, ValidationError) as exc:
        raise CorruptBlob(f"Malformed checkpoint manifest: {exc}") from exc


def save_checkpoint(model: MlpModel, report: Optional[TrainReport], path: PathLike) -> Path:
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
        (path / MANIFEST_FILE).write_text(render_manifest(manifest_for(model)), encoding="utf-8")
        with open(path / WEIGHTS_FILE, "wb") as f:
            for tensor in model.state().values():
                f.write(np.ascontiguousarray(tensor, dtype=FLOAT_LE).tobytes())
        if report is not None:
            write_report(report, path)
    except OSError as exc:
        raise IoFailure(f"Cannot write checkpoint to {path}: {exc}") from exc
    logger.info("Checkpoint written to %s", path)
    return path


def load_checkpoint(path: PathLike, expected_num_classes: Optional[int] = None) -> MlpModel:
    path = Path(path)
    try:
        manifest = parse_manifest((path / MANIFEST_FILE).read_text(encoding="utf-8"))
        blob = (path / WEIGHTS_FILE).read_bytes()
    except FileNotFoundError as exc:
        raise IoFailure(f"Incomplete checkpoint at {path}: {exc.filename} is missing") from exc
    except OSError as exc:
        raise IoFailure(f"Cannot read checkpoint at {path}: {exc}") from exc

    if expected_num_classes is not None and manifest.num_classes != expected_num_classes:
        raise ClassCountMismatch(
            f"Checkpoint has {manifest.num_classes} classes but {expected_num_classes} were requested"
        )

    sizes = [int(np.prod(t.shape)) for t in manifest.tensors]
    if len(blob) != FLOAT_LE.itemsize * sum(sizes):
        raise CorruptBlob(
            f"{WEIGHTS_FILE} holds {len(blob)} bytes, manifest dims imply {FLOAT_LE.itemsize * sum(sizes)}"
        )

    model = init_model(manifest.num_classes, manifest.seed, manifest.architecture, dtype=np.float32)
    expected = [TensorSpec(name=n, shape=t.shape) for n, t in model.state().items()]
    if expected != manifest.tensors:
        raise CorruptBlob("Manifest tensor list does not match its declared architecture")

    values = np.frombuffer(blob, dtype=FLOAT_LE).astype(np.float32)
    tensors, offset = {}, 0
    for spec, size in zip(manifest.tensors, sizes):
        tensors[spec.name] = values[offset : offset + size].reshape(spec.shape)
        offset += size
    model.load_state(tensors)
    return model


# ── TrainReport ────────────────────────────────────────────────────────────────

def write_report(report: TrainReport, directory: PathLike) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / REPORT_FILE).write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    with open(directory / EPOCHS_FILE, "w", encoding="utf-8") as f:
        for record in report.records:
            f.write(record.model_dump_json() + "\n")


def read_report(directory: PathLike) -> TrainReport:
    return TrainReport.model_validate_json(Path(directory, REPORT_FILE).read_text(encoding="utf-8"))


# ── Feature cache ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class FeatureCache:
    features: np.ndarray
    labels: np.ndarray
    split: SplitPlan
    header: FeatureCacheHeader


def save_feature_cache(
    path: PathLike, features: np.ndarray, labels: np.ndarray, split: SplitPlan, header: FeatureCacheHeader
) -> Path:
    path = Path(path)
    header_bytes = header.model_dump_json().encode("utf-8")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            f.write(FEATURE_MAGIC)
            f.write(struct.pack("<I", len(header_bytes)))
            f.write(header_bytes)
            f.write(np.ascontiguousarray(features, dtype=FLOAT_LE).tobytes())
            for array in (labels, split.fit_indices, split.val_indices, split.test_indices):
                f.write(np.ascontiguousarray(array, dtype=INT_LE).tobytes())
    except OSError as exc:
        raise IoFailure(f"Cannot write feature cache {path}: {exc}") from exc
    logger.info("Feature cache written to %s (%d x %d)", path, header.rows, header.cols)
    return path


def load_feature_cache(path: PathLike) -> FeatureCache:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(path)
    data = path.read_bytes()
    if data[:4] != FEATURE_MAGIC or len(data) < 8:
        raise CorruptBlob(f"{path} is not a curvglyph feature cache")
    (header_len,) = struct.unpack("<I", data[4:8])
    try:
        header = FeatureCacheHeader.model_validate(json.loads(data[8 : 8 + header_len]))
    except (ValueError, ValidationError) as exc:
        raise CorruptBlob(f"{path}: unreadable header: {exc}") from exc

    split = header.split
    counts = [header.rows * header.cols, header.rows, split.fit, split.val, split.test]
    item_sizes = [FLOAT_LE.itemsize] + [INT_LE.itemsize] * 4
    expected = 8 + header_len + sum(c * s for c, s in zip(counts, item_sizes))
    if len(data) != expected:
        raise CorruptBlob(f"{path} holds {len(data)} bytes, header implies {expected}")

    offset = 8 + header_len
    arrays = []
    for count, dtype in zip(counts, [FLOAT_LE] + [INT_LE] * 4):
        arrays.append(np.frombuffer(data, dtype=dtype, count=count, offset=offset))
        offset += count * dtype.itemsize
    features, labels, fit, val, test = arrays

    plan = SplitPlan(
        fit_indices=fit.astype(np.int64),
        val_indices=val.astype(np.int64),
        test_indices=test.astype(np.int64),
        seed=split.seed,
        dataset=split.dataset,
        test_fraction=split.test_fraction,
        val_fraction_of_train=split.val_fraction_of_train,
        stratify_val=split.stratify_val,
        test_per_class=tuple(split.test_per_class),
    )
    return FeatureCache(
        features=features.astype(np.float32, copy=False).reshape(header.rows, header.cols),
        labels=labels.astype(np.int64),
        split=plan,
        header=header,
    )
