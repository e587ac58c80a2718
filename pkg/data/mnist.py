"""
MNIST reader for the IDX format.

Image files (big-endian):
    [offset] [type]          [value]          [description]
    0000     32 bit integer  0x00000803(2051) magic number
    0004     32 bit integer  N                number of images
    0008     32 bit integer  28               number of rows
    0012     32 bit integer  28               number of columns
    0016     unsigned byte   ??               pixels, row-major

Label files:
    0000     32 bit integer  0x00000801(2049) magic number
    0004     32 bit integer  N                number of items
    0008     unsigned byte   ??               label

Files ending in .gz are decompressed transparently.
"""

import gzip
import logging
import struct

import numpy as np

from data.dataset import Dataset
from utils.errors import CountMismatchError, IdxFormatError, TruncatedPayloadError

logger = logging.getLogger(__name__)

IMAGES_MAGIC = 2051
LABELS_MAGIC = 2049


def _read_bytes(path: str) -> bytes:
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rb") as f:
        return f.read()


def _check_magic(raw: bytes, expected: int, kind: str, source: str) -> None:
    if len(raw) < 4:
        raise TruncatedPayloadError(f"{source}: IDX {kind} file needs a 4-byte magic number, got {len(raw)} bytes")
    magic = struct.unpack(">I", raw[:4])[0]
    if magic != expected:
        raise IdxFormatError(f"{source}: {kind} magic {magic}, expected {expected}")


def parse_idx_images(raw: bytes, source: str = "<bytes>") -> np.ndarray:
    """(N, rows * cols) uint8 pixels from an IDX image payload."""
    _check_magic(raw, IMAGES_MAGIC, "image", source)
    if len(raw) < 16:
        raise TruncatedPayloadError(f"{source}: IDX image header needs 16 bytes, got {len(raw)}")
    _, count, rows, cols = struct.unpack(">IIII", raw[:16])
    expected = count * rows * cols
    payload = raw[16:]
    if len(payload) < expected:
        raise TruncatedPayloadError(
            f"{source}: {count} images of {rows}x{cols} need {expected} bytes, got {len(payload)}"
        )
    return np.frombuffer(payload, dtype=np.uint8, count=expected).reshape(count, rows * cols)


def parse_idx_labels(raw: bytes, source: str = "<bytes>") -> np.ndarray:
    """(N,) uint8 labels from an IDX label payload."""
    _check_magic(raw, LABELS_MAGIC, "label", source)
    if len(raw) < 8:
        raise TruncatedPayloadError(f"{source}: IDX label header needs 8 bytes, got {len(raw)}")
    _, count = struct.unpack(">II", raw[:8])
    payload = raw[8:]
    if len(payload) < count:
        raise TruncatedPayloadError(f"{source}: {count} labels declared, {len(payload)} present")
    return np.frombuffer(payload, dtype=np.uint8, count=count)


def load_mnist(images_path: str, labels_path: str) -> Dataset:
    """
    Load an MNIST image/label file pair.

    Pixels are divided by 255 so every value lies in [0, 1].

    Raises:
        IdxFormatError: wrong magic number
        TruncatedPayloadError: file shorter than its header declares
        CountMismatchError: image and label counts differ
    """
    pixels = parse_idx_images(_read_bytes(images_path), images_path)
    labels = parse_idx_labels(_read_bytes(labels_path), labels_path)
    if pixels.shape[0] != labels.shape[0]:
        raise CountMismatchError(
            f"{images_path} has {pixels.shape[0]} images but {labels_path} has {labels.shape[0]} labels"
        )
    features = pixels.astype(np.float64) / 255.0
    logger.info(f"Loaded {features.shape[0]} MNIST images ({features.shape[1]} pixels) from {images_path}")
    names = [f"px{j}" for j in range(features.shape[1])]
    return Dataset(features=features, labels=labels.astype(np.int64), task="multiclass", feature_names=names)

