"""IDX dataset ingestion, batching, and the two corruption operators.

IDX containers, bit-exact:
  images: u32 big-endian magic 0x00000803, u32 count, u32 rows, u32 cols,
          then count*rows*cols unsigned bytes (row-major pixels)
  labels: u32 big-endian magic 0x00000801, u32 count, then count bytes
"""

import struct
from dataclasses import dataclass

import numpy as np

from .errors import IdxFormatError
from .ndcore import as_matrix, bernoulli_mask, gaussian

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801

# canonical filenames of the MNIST / Fashion-MNIST distributions
CANONICAL_FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}

N_CLASSES = 10


@dataclass
class Dataset:
    """Images as an (N x d) float64 matrix in [0,1] plus integer labels."""
    images: np.ndarray
    labels: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.images = as_matrix(self.images)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.ndim != 1 or len(self.labels) != len(self.images):
            raise IdxFormatError(
                f"{len(self.images)} images vs {self.labels.shape} labels")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= N_CLASSES):
            raise IdxFormatError(
                f"labels outside [0,{N_CLASSES - 1}]: "
                f"min={self.labels.min()}, max={self.labels.max()}")
        if len(self.images) and (self.images.min() < 0.0 or self.images.max() > 1.0):
            raise IdxFormatError("pixels outside [0,1]")

    def __len__(self):
        return len(self.images)


@dataclass
class NoiseSpec:
    """Corruption model: pixel zeroing with probability ``level`` (mask) or
    additive zero-mean Gaussian noise with std ``level``."""
    kind: str
    level: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "mask", "gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "mask" and not 0.0 <= self.level <= 1.0:
            raise ValueError(f"mask probability must be in [0,1], got {self.level}")
        if self.kind == "gaussian" and self.level < 0.0:
            raise ValueError(f"gaussian std must be >= 0, got {self.level}")

    def describe(self):
        return "clean" if self.kind == "none" else f"{self.kind} {self.level:g}"


def _read_exact(f, n, what):
    buf = f.read(n)
    if len(buf) != n:
        raise IOError(f"truncated IDX file: expected {n} bytes for {what}, got {len(buf)}")
    return buf


def _read_u32(f, what):
    return struct.unpack(">I", _read_exact(f, 4, what))[0]


def read_idx_images(path) -> np.ndarray:
    """Raw (count, rows, cols) uint8 pixel array from an IDX image file."""
    with open(path, "rb") as f:
        magic = _read_u32(f, "magic")
        if magic != IMAGES_MAGIC:
            raise IdxFormatError(
                f"bad image magic in {path}: got 0x{magic:08x}, want 0x{IMAGES_MAGIC:08x}")
        count = _read_u32(f, "count")
        rows = _read_u32(f, "rows")
        cols = _read_u32(f, "cols")
        payload = _read_exact(f, count * rows * cols, "pixels")
    return np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols)


def read_idx_labels(path) -> np.ndarray:
    with open(path, "rb") as f:
        magic = _read_u32(f, "magic")
        if magic != LABELS_MAGIC:
            raise IdxFormatError(
                f"bad label magic in {path}: got 0x{magic:08x}, want 0x{LABELS_MAGIC:08x}")
        count = _read_u32(f, "count")
        payload = _read_exact(f, count, "labels")
    return np.frombuffer(payload, dtype=np.uint8)


def write_idx_images(path, images_u8) -> None:
    """Inverse of read_idx_images; images_u8 is (count, rows, cols) uint8."""
    images_u8 = np.asarray(images_u8, dtype=np.uint8)
    count, rows, cols = images_u8.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", IMAGES_MAGIC, count, rows, cols))
        f.write(images_u8.tobytes())


def write_idx_labels(path, labels) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">II", LABELS_MAGIC, len(labels)))
        f.write(labels.tobytes())


def load_idx(images_path, labels_path, name="") -> Dataset:
    """Load an IDX image/label pair, normalizing pixels into [0,1] by /255."""
    raw = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if len(raw) != len(labels):
        raise IdxFormatError(
            f"count mismatch: {len(raw)} images in {images_path} "
            f"but {len(labels)} labels in {labels_path}")
    images = raw.reshape(len(raw), -1).astype(np.float64) / 255.0
    return Dataset(images, labels, name=name or str(images_path))


def corrupt(batch, noise: NoiseSpec, rng) -> np.ndarray:
    """Apply a corruption model; always returns a new array, never clips."""
    batch = as_matrix(batch)
    if noise is None or noise.kind == "none":
        return batch.copy()
    if noise.kind == "mask":
        keep = bernoulli_mask(rng, batch.shape[0], batch.shape[1], 1.0 - noise.level)
        return batch * keep
    return batch + gaussian(rng, batch.shape[0], batch.shape[1], 0.0, noise.level)


def batch_indices(n, batch_size, rng=None, shuffle=False):
    """Partition 0..n-1 into consecutive chunks; the last may be short."""
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    if batch_size > n:
        raise ValueError(f"batch_size {batch_size} exceeds dataset size {n}")
    order = rng.permutation(n) if shuffle else np.arange(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def batches(ds: Dataset, batch_size, rng=None, shuffle=False):
    """Image batches covering the dataset exactly once, in file order unless
    shuffled (each call draws one fresh permutation from rng)."""
    for idx in batch_indices(len(ds), batch_size, rng, shuffle):
        yield ds.images[idx]


def sample_subset(ds: Dataset, n, rng) -> Dataset:
    """n rows drawn without replacement, labels kept aligned."""
    if n > len(ds):
        raise ValueError(f"cannot sample {n} from {len(ds)} points")
    idx = rng.choice(len(ds), size=int(n), replace=False)
    return Dataset(ds.images[idx], ds.labels[idx], name=ds.name)
