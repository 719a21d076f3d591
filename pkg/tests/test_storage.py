import numpy as np
import pytest

from curvglyph.errors import ClassCountMismatch, CorruptBlob, IoFailure, MissingFile, VersionMismatch
from curvglyph.features import EXTRACTOR_VERSION
from curvglyph.nn import init_model
from curvglyph.schemas import EpochRecord, FeatureCacheHeader, FeatureConfig, TrainConfig, TrainReport
from curvglyph.splits import SplitPlan
from curvglyph.storage import (
    MANIFEST_FILE,
    WEIGHTS_FILE,
    load_checkpoint,
    load_feature_cache,
    read_report,
    save_checkpoint,
    save_feature_cache,
)


@pytest.fixture
def trained_looking_model(tiny_architecture):
    model = init_model(3, 7, tiny_architecture)
    rng = np.random.default_rng(0)
    for tensor in model.state().values():
        tensor[...] = rng.normal(size=tensor.shape).astype(tensor.dtype)
    return model


@pytest.fixture
def report():
    records = [
        EpochRecord(epoch=1, train_loss=1.2, train_acc=0.5, val_loss=1.0, val_acc=0.6, lr=1e-3, wall_time=0.0),
        EpochRecord(epoch=2, train_loss=0.9, train_acc=0.7, val_loss=0.8, val_acc=0.7, lr=1e-3, wall_time=0.0),
    ]
    return TrainReport(records=records, best_epoch=2, test_accuracy=0.69, config=TrainConfig())


def test_checkpoint_round_trip_is_bit_exact(tmp_path, trained_looking_model, report):
    path = save_checkpoint(trained_looking_model, report, tmp_path / "ckpt")
    loaded = load_checkpoint(path, expected_num_classes=3)
    assert loaded.architecture == trained_looking_model.architecture
    assert loaded.seed == 7
    for name, tensor in trained_looking_model.state().items():
        np.testing.assert_array_equal(loaded.state()[name], tensor)

    again = save_checkpoint(loaded, None, tmp_path / "again")
    assert (again / WEIGHTS_FILE).read_bytes() == (path / WEIGHTS_FILE).read_bytes()
    assert (again / MANIFEST_FILE).read_text() == (path / MANIFEST_FILE).read_text()


def test_manifest_lists_every_tensor(tmp_path, trained_looking_model):
    path = save_checkpoint(trained_looking_model, None, tmp_path / "ckpt")
    lines = (path / MANIFEST_FILE).read_text().splitlines()
    assert lines[0] == "format_version=1"
    assert "hidden_dims=5,4" in lines
    assert "tensor.0=hidden.0.W:5x6" in lines
    assert lines[-1] == "tensor.13=output.b:3"
    assert (path / WEIGHTS_FILE).stat().st_size == 4 * sum(t.size for t in trained_looking_model.state().values())


def test_report_round_trip(tmp_path, trained_looking_model, report):
    path = save_checkpoint(trained_looking_model, report, tmp_path / "ckpt")
    assert read_report(path) == report
    assert len((path / "epochs.jsonl").read_text().splitlines()) == 2


def test_class_count_mismatch(tmp_path, trained_looking_model):
    path = save_checkpoint(trained_looking_model, None, tmp_path / "ckpt")
    with pytest.raises(ClassCountMismatch) as excinfo:
        load_checkpoint(path, expected_num_classes=26)
    assert excinfo.value.exit_code == 2


def test_short_weights_blob(tmp_path, trained_looking_model):
    path = save_checkpoint(trained_looking_model, None, tmp_path / "ckpt")
    blob = (path / WEIGHTS_FILE).read_bytes()
    (path / WEIGHTS_FILE).write_bytes(blob[:-4])
    with pytest.raises(CorruptBlob):
        load_checkpoint(path)


def test_unknown_format_version(tmp_path, trained_looking_model):
    path = save_checkpoint(trained_looking_model, None, tmp_path / "ckpt")
    manifest = (path / MANIFEST_FILE).read_text().replace("format_version=1", "format_version=9")
    (path / MANIFEST_FILE).write_text(manifest)
    with pytest.raises(VersionMismatch):
        load_checkpoint(path)


def test_missing_checkpoint(tmp_path):
    with pytest.raises(IoFailure):
        load_checkpoint(tmp_path / "nowhere")


def make_cache(tmp_path):
    rng = np.random.default_rng(1)
    features = rng.random((20, 2352), dtype=np.float32)
    labels = np.arange(20) % 10
    split = SplitPlan(fit_indices=np.arange(12), val_indices=np.arange(12, 14), test_indices=np.arange(14, 20),
                      seed=42, dataset="mnist")
    header = FeatureCacheHeader(
        dataset="mnist", extractor_version=EXTRACTOR_VERSION, rows=20, cols=2352, num_classes=10,
        feature_config=FeatureConfig(), split=split.summary(),
    )
    return save_feature_cache(tmp_path / "cache.cgf", features, labels, split, header), features, labels, split


def test_feature_cache_round_trip(tmp_path):
    path, features, labels, split = make_cache(tmp_path)
    assert path.read_bytes()[:4] == b"CGF1"
    cache = load_feature_cache(path)
    np.testing.assert_array_equal(cache.features, features)
    np.testing.assert_array_equal(cache.labels, labels)
    np.testing.assert_array_equal(cache.split.test_indices, split.test_indices)
    assert cache.header.num_classes == 10
    assert cache.split.summary() == split.summary()


def test_feature_cache_corruption(tmp_path):
    path, *_ = make_cache(tmp_path)
    data = path.read_bytes()
    path.write_bytes(data[:-1])
    with pytest.raises(CorruptBlob):
        load_feature_cache(path)
    path.write_bytes(b"XXXX" + data[4:])
    with pytest.raises(CorruptBlob):
        load_feature_cache(path)
    with pytest.raises(MissingFile):
        load_feature_cache(tmp_path / "absent.cgf")
