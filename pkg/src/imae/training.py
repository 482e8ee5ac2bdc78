"""Mini-batch gradient descent training and checkpoint persistence.

Checkpoint layout (all integers little-endian u32 unless noted):
  magic "IMAE", version, config-text length, config text (utf-8 key = value
  lines), array count, then per parameter array: name length, name bytes,
  ndim, dims..., float64 little-endian payload. Tied decoder weights and
  untrained biases never hit the file; they are reconstructed on load.
"""

import struct
import time
from dataclasses import dataclass, field

import numpy as np

from . import nn, objectives
from .data import Dataset, NoiseSpec, batches, corrupt
from .errors import CheckpointFormatError, ConfigurationError, TrainingDiverged
from .ndcore import derive_rng

CHECKPOINT_MAGIC = b"IMAE"
CHECKPOINT_VERSION = 1


@dataclass
class TrainConfig:
    arch: nn.Arch
    loss: objectives.LossSpec
    learning_rate: float
    epochs: int
    batch_size: int
    tied: bool = False
    seed: int = 0
    biases: bool = True
    shuffle: bool = False

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ConfigurationError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ConfigurationError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size}")


@dataclass
class EpochRecord:
    epoch: int
    total: float
    reconstruction: float
    latent: float
    seconds: float


@dataclass
class TrainHistory:
    records: list = field(default_factory=list)

    def to_csv(self, path):
        with open(path, "w") as f:
            f.write("epoch,total,reconstruction,latent,seconds\n")
            for r in self.records:
                f.write(f"{r.epoch},{r.total!r},{r.reconstruction!r},"
                        f"{r.latent!r},{r.seconds:.3f}\n")


def build_network(cfg: TrainConfig, rng) -> nn.Network:
    return nn.init_params(cfg.arch, rng, vae=(cfg.loss.variant == objectives.VAE),
                          tied=cfg.tied, biases=cfg.biases)


def train(cfg: TrainConfig, ds: Dataset):
    """Train a fresh network on ``ds``; returns (network, history).

    Plain SGD, theta <- theta - lr * grad per batch. Everything random (init,
    batch order, corruption draws, latent samples) derives from cfg.seed, so
    equal configs give bit-identical parameters. Aborts on non-finite loss.
    """
    if ds.images.shape[1] != cfg.arch.input_dim:
        raise ConfigurationError(
            f"network expects {cfg.arch.input_dim} inputs, dataset has {ds.images.shape[1]}")
    init_rng = derive_rng(cfg.seed, "init")
    batch_rng = derive_rng(cfg.seed, "batches")
    noise_rng = derive_rng(cfg.seed, "corruption")
    latent_rng = derive_rng(cfg.seed, "latent-sample")
    net = build_network(cfg, init_rng)
    params = net.param_items()
    is_dae = cfg.loss.variant == objectives.DAE
    is_vae = cfg.loss.variant == objectives.VAE
    history = TrainHistory()
    for epoch in range(cfg.epochs):
        t0 = time.perf_counter()
        tot = rec = lat = 0.0
        seen = 0
        for xb in batches(ds, cfg.batch_size, batch_rng, cfg.shuffle):
            x_in = corrupt(xb, cfg.loss.noise, noise_rng) if is_dae else xb
            trace = nn.forward(net, x_in, rng=latent_rng if is_vae else None)
            total, terms = objectives.total_loss(cfg.loss, trace, xb)
            if not np.isfinite(total):
                raise TrainingDiverged(epoch, {"total": total, **terms})
            grads = nn.backward(net, trace, cfg.loss, xb)
            for name, p in params.items():
                p -= cfg.learning_rate * grads[name]
            b = len(xb)
            tot += total * b
            rec += terms["reconstruction"] * b
            lat += terms["latent"] * b
            seen += b
        history.records.append(EpochRecord(
            epoch, tot / seen, rec / seen, lat / seen, time.perf_counter() - t0))
    return net, history


# --- config text (embedded in checkpoints, also written as snapshots) ---

_CONFIG_KEYS = ("variant", "lambda", "noise_kind", "noise_level", "input_dim",
                "layers", "latent_index", "learning_rate", "epochs",
                "batch_size", "tied", "seed", "biases", "shuffle")


def config_to_text(cfg: TrainConfig) -> str:
    layers = ",".join(f"{w}:{a}" for w, a in cfg.arch.layers)
    noise = cfg.loss.noise
    values = {
        "variant": cfg.loss.variant,
        "lambda": repr(cfg.loss.lam),
        "noise_kind": noise.kind if noise else "none",
        "noise_level": repr(noise.level) if noise else repr(0.0),
        "input_dim": cfg.arch.input_dim,
        "layers": layers,
        "latent_index": cfg.arch.latent_index,
        "learning_rate": repr(cfg.learning_rate),
        "epochs": cfg.epochs,
        "batch_size": cfg.batch_size,
        "tied": str(cfg.tied).lower(),
        "seed": cfg.seed,
        "biases": str(cfg.biases).lower(),
        "shuffle": str(cfg.shuffle).lower(),
    }
    return "".join(f"{k} = {values[k]}\n" for k in _CONFIG_KEYS)


def config_from_text(text: str) -> TrainConfig:
    kv = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        kv[key.strip()] = value.strip()
    missing = [k for k in _CONFIG_KEYS if k not in kv]
    if missing:
        raise CheckpointFormatError(f"config block missing keys: {missing}")
    unknown = [k for k in kv if k not in _CONFIG_KEYS]
    if unknown:
        raise CheckpointFormatError(f"config block has unknown keys: {unknown}")
    layers = tuple((int(w), a) for w, _, a in
                   (part.partition(":") for part in kv["layers"].split(",")))
    arch = nn.Arch(int(kv["input_dim"]), layers, int(kv["latent_index"]))
    noise = None
    if kv["noise_kind"] != "none":
        noise = NoiseSpec(kv["noise_kind"], float(kv["noise_level"]))
    loss = objectives.LossSpec(kv["variant"], lam=float(kv["lambda"]), noise=noise)
    return TrainConfig(
        arch=arch, loss=loss,
        learning_rate=float(kv["learning_rate"]),
        epochs=int(kv["epochs"]), batch_size=int(kv["batch_size"]),
        tied=kv["tied"] == "true", seed=int(kv["seed"]),
        biases=kv["biases"] == "true", shuffle=kv["shuffle"] == "true")


# --- checkpoint io ---

def _read_exact(f, n, what):
    buf = f.read(n)
    if len(buf) != n:
        raise IOError(f"truncated checkpoint: expected {n} bytes for {what}, got {len(buf)}")
    return buf


def save_checkpoint(net: nn.Network, cfg: TrainConfig, path) -> None:
    cfg_bytes = config_to_text(cfg).encode("utf-8")
    params = net.param_items()
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(struct.pack("<I", CHECKPOINT_VERSION))
        f.write(struct.pack("<I", len(cfg_bytes)))
        f.write(cfg_bytes)
        f.write(struct.pack("<I", len(params)))
        for name, arr in params.items():
            name_bytes = name.encode("ascii")
            f.write(struct.pack("<I", len(name_bytes)))
            f.write(name_bytes)
            f.write(struct.pack("<I", arr.ndim))
            f.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            f.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path):
    """Rebuild (network, config) from a checkpoint; exact round trip."""
    with open(path, "rb") as f:
        magic = _read_exact(f, 4, "magic")
        if magic != CHECKPOINT_MAGIC:
            raise CheckpointFormatError(f"bad checkpoint magic: {magic!r}")
        (version,) = struct.unpack("<I", _read_exact(f, 4, "version"))
        if version != CHECKPOINT_VERSION:
            raise CheckpointFormatError(f"unsupported checkpoint version {version}")
        (cfg_len,) = struct.unpack("<I", _read_exact(f, 4, "config length"))
        cfg = config_from_text(_read_exact(f, cfg_len, "config").decode("utf-8"))
        net = build_network(cfg, derive_rng(0, "checkpoint-skeleton"))
        params = net.param_items()
        (count,) = struct.unpack("<I", _read_exact(f, 4, "array count"))
        if count != len(params):
            raise CheckpointFormatError(
                f"checkpoint holds {count} arrays, network needs {len(params)}")
        for _ in range(count):
            (name_len,) = struct.unpack("<I", _read_exact(f, 4, "name length"))
            name = _read_exact(f, name_len, "name").decode("ascii")
            if name not in params:
                raise CheckpointFormatError(f"unexpected array {name!r} in checkpoint")
            (ndim,) = struct.unpack("<I", _read_exact(f, 4, "ndim"))
            shape = struct.unpack(f"<{ndim}I", _read_exact(f, 4 * ndim, "shape"))
            dst = params[name]
            if shape != dst.shape:
                raise CheckpointFormatError(
                    f"array {name!r} has shape {shape}, network needs {dst.shape}")
            payload = _read_exact(f, 8 * dst.size, f"data of {name}")
            np.copyto(dst, np.frombuffer(payload, dtype="<f8").reshape(shape))
    return net, cfg
