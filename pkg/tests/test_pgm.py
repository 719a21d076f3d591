import numpy as np
import pytest

from curvglyph.errors import CorruptBlob
from curvglyph.pgm import read_pgm, write_pgm


def test_write_then_read(tmp_path):
    image = np.arange(28 * 28, dtype=np.uint16).reshape(28, 28).astype(np.uint8)
    path = write_pgm(tmp_path / "glyph.pgm", image)
    data = path.read_bytes()
    assert data.startswith(b"P5\n28 28\n255\n")
    assert len(data) == len(b"P5\n28 28\n255\n") + 784
    np.testing.assert_array_equal(read_pgm(path), image)


def test_non_rectangular_widths(tmp_path):
    image = np.zeros((3, 5), dtype=np.uint8)
    assert write_pgm(tmp_path / "wide.pgm", image).read_bytes().startswith(b"P5\n5 3\n255\n")


def test_only_uint8_planes_are_written(tmp_path):
    with pytest.raises(ValueError):
        write_pgm(tmp_path / "bad.pgm", np.zeros((28, 28)))


def test_reader_rejects_other_formats(tmp_path):
    path = tmp_path / "ascii.pgm"
    path.write_bytes(b"P2\n2 2\n255\n0 0 0 0\n")
    with pytest.raises(CorruptBlob):
        read_pgm(path)
    path.write_bytes(b"P5\n2 2\n255\n\x00")
    with pytest.raises(CorruptBlob):
        read_pgm(path)
