"""Dense float64 matrix arithmetic and deterministic random number generation.

Matrices are plain 2-D ``numpy.ndarray`` objects with dtype float64, row-major,
one data sample per row. All operations return new arrays; inputs are never
mutated. Randomness always flows through an explicit generator created by
:func:`make_rng` or :func:`derive_rng`, never through module-level numpy state.
"""

import hashlib

import numpy as np

from .errors import ShapeError

# The one generator algorithm used everywhere. PCG64 produces the same stream
# for the same seed on every platform numpy supports.
RNG_ALGORITHM = "pcg64"


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-D float64 array (no copy when already one)."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={m.ndim}")
    return m


def matmul(a, b) -> np.ndarray:
    """Matrix product a @ b with explicit shape checking."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} x {b.shape}")
    return a @ b


def transpose(a) -> np.ndarray:
    return as_matrix(a).T


def elementwise(op, a, b=None, *, scalar=None, fn=None) -> np.ndarray:
    """Per-entry arithmetic.

    op is one of ``add``, ``sub``, ``mul`` (binary, equal shapes), ``scale``
    (matrix times scalar) or ``map-unary`` (apply ``fn`` entrywise).
    """
    a = as_matrix(a)
    if op in ("add", "sub", "mul"):
        b = as_matrix(b)
        if a.shape != b.shape:
            raise ShapeError(f"elementwise {op}: shapes differ, {a.shape} vs {b.shape}")
        if op == "add":
            return a + b
        if op == "sub":
            return a - b
        return a * b
    if op == "scale":
        if scalar is None:
            raise ValueError("elementwise scale: scalar required")
        return a * float(scalar)
    if op == "map-unary":
        if fn is None:
            raise ValueError("elementwise map-unary: fn required")
        return np.asarray(fn(a), dtype=np.float64)
    raise ValueError(f"unknown elementwise op {op!r}")


def make_rng(seed) -> np.random.Generator:
    """Deterministic generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def derive_rng(seed, *labels) -> np.random.Generator:
    """Independent generator derived from a master seed and a label path.

    Labels are hashed with sha256 so the derivation does not depend on
    Python's per-process string hashing.
    """
    keys = [int(seed)]
    for label in labels:
        digest = hashlib.sha256(str(label).encode("utf-8")).digest()
        keys.append(int.from_bytes(digest[:8], "big"))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(keys)))


def derive_seed(seed, *labels) -> int:
    """Stable 63-bit sub-seed for a master seed and a label path."""
    text = "/".join([str(int(seed))] + [str(label) for label in labels])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def gaussian(rng, rows, cols, mean=0.0, std=1.0) -> np.ndarray:
    """rows x cols matrix of i.i.d. normal draws."""
    if std < 0:
        raise ValueError(f"gaussian: std must be >= 0, got {std}")
    return rng.normal(loc=mean, scale=std, size=(int(rows), int(cols)))


def bernoulli_mask(rng, rows, cols, keep_prob) -> np.ndarray:
    """0/1 matrix where each entry is 1 with probability keep_prob."""
    if not 0.0 <= keep_prob <= 1.0:
        raise ValueError(f"bernoulli_mask: keep_prob must be in [0,1], got {keep_prob}")
    u = rng.random(size=(int(rows), int(cols)))
    return (u < keep_prob).astype(np.float64)
