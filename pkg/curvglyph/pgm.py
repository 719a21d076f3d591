"""Binary (P5) PGM files with maxval 255."""
import re
from pathlib import Path
from typing import Union

import numpy as np

from .errors import CorruptBlob, IoFailure

_HEADER = re.compile(rb"^P5\s+(\d+)\s+(\d+)\s+(\d+)\s")


def write_pgm(path: Union[Path, str], image: np.ndarray) -> Path:
    image = np.asarray(image)
    if image.ndim != 2 or image.dtype != np.uint8:
        raise ValueError(f"PGM writer needs a 2-D uint8 array, got {image.dtype} {image.shape}")
    path = Path(path)
    height, width = image.shape
    try:
        with open(path, "wb") as f:
            f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
            f.write(np.ascontiguousarray(image).tobytes())
    except OSError as exc:
        raise IoFailure(f"Cannot write {path}: {exc}") from exc
    return path


def read_pgm(path: Union[Path, str]) -> np.ndarray:
    data = Path(path).read_bytes()
    match = _HEADER.match(data)
    if not match:
        raise CorruptBlob(f"{path} is not a binary PGM file")
    width, height, maxval = (int(g) for g in match.groups())
    if maxval != 255:
        raise CorruptBlob(f"{path}: only maxval 255 is supported, found {maxval}")
    body = data[match.end():]
    if len(body) != width * height:
        raise CorruptBlob(f"{path}: expected {width * height} pixel bytes, found {len(body)}")
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width)
