"""
stzero Storage Module
======================
Raw tensor files and JSON manifests on disk.

Tensors are headerless little-endian IEEE-754 float32, row-major, no
padding; their shapes live in the owning manifest.
"""

import json
import logging
import os
from typing import Dict, Tuple

import numpy as np

from errors import DataError, MissingFileError, NaNPayloadError, SizeMismatchError

logger = logging.getLogger(__name__)

STORAGE_DTYPE = np.dtype('<f4')
COMPUTE_DTYPE = np.float64


def to_storage_grid(array: np.ndarray) -> np.ndarray:
    """Round float64 values onto the float32 grid, staying float64."""
    return np.asarray(array, dtype=COMPUTE_DTYPE).astype(STORAGE_DTYPE).astype(COMPUTE_DTYPE)


def write_f32(path: str, array: np.ndarray):
    """Write ``array`` as raw little-endian float32."""
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    payload = np.ascontiguousarray(array, dtype=COMPUTE_DTYPE).astype(STORAGE_DTYPE)
    with open(path, 'wb') as handle:
        handle.write(payload.tobytes(order='C'))
    logger.debug('Wrote %s %s', path, payload.shape)


def read_f32(path: str, shape: Tuple[int, ...], check_finite: bool = True) -> np.ndarray:
    """
    Read a raw float32 file of known shape, promoted to float64.

    Raises:
        MissingFileError: the file does not exist
        SizeMismatchError: the byte count disagrees with ``shape``
        NaNPayloadError: non-finite values, when ``check_finite`` is set
    """
    if not os.path.isfile(path):
        raise MissingFileError(f"Missing file: {path}")
    expected = int(np.prod(shape)) * STORAGE_DTYPE.itemsize
    actual = os.path.getsize(path)
    if actual != expected:
        raise SizeMismatchError(
            f"{path}: {actual} bytes on disk, expected {expected} for shape {tuple(shape)}"
        )
    array = np.fromfile(path, dtype=STORAGE_DTYPE).astype(COMPUTE_DTYPE).reshape(shape)
    if check_finite and not np.all(np.isfinite(array)):
        raise NaNPayloadError(f"{path}: payload contains NaN or infinite values")
    return array


def read_f32_rows(path: str, width: int) -> np.ndarray:
    """Read a raw float32 matrix whose row count follows from its size."""
    if not os.path.isfile(path):
        raise MissingFileError(f"Missing file: {path}")
    row_bytes = width * STORAGE_DTYPE.itemsize
    size = os.path.getsize(path)
    if width < 1 or size % row_bytes:
        raise SizeMismatchError(f"{path}: {size} bytes is not a whole number of {width}-wide rows")
    return read_f32(path, (size // row_bytes, width))


def dump_json(data: Dict) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2) + '\n'


def write_json(path: str, data: Dict):
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(dump_json(data))


def read_json(path: str) -> Dict:
    if not os.path.isfile(path):
        raise MissingFileError(f"Missing file: {path}")
    with open(path, 'r', encoding='utf-8') as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as e:
            raise DataError(f"{path}: invalid JSON ({e})") from None
