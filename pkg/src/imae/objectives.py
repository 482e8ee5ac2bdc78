"""Loss terms for the five autoencoder variants and total-loss assembly.

All reductions follow one convention: sum over latent units / pixels,
mean over the samples of the batch.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ConfigurationError, ShapeError
from .ndcore import as_matrix

AE = "AE"
CAE = "CAE"
DAE = "DAE"
IMAE = "IMAE"
VAE = "VAE"
VARIANTS = (AE, CAE, DAE, IMAE, VAE)

# latent-loss weights used throughout the experiments
DEFAULT_LAMBDA = {AE: 0.0, CAE: 0.1, DAE: 0.0, IMAE: 1.0, VAE: 0.0}


@dataclass
class LossSpec:
    """Tagged choice of training objective.

    ``lam`` weights the latent term and must be zero for AE/DAE/VAE;
    ``noise`` is the training corruption and is required exactly for DAE.
    """
    variant: str
    lam: float = 0.0
    noise: object = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown loss variant {self.variant!r}")
        if self.variant in (AE, DAE, VAE) and self.lam != 0.0:
            raise ConfigurationError(f"{self.variant} takes no latent weight, got lam={self.lam}")
        if self.lam < 0:
            raise ConfigurationError(f"lam must be >= 0, got {self.lam}")
        if (self.noise is not None) != (self.variant == DAE):
            raise ConfigurationError("training noise is required for DAE and only for DAE")

    @classmethod
    def ae(cls):
        return cls(AE)

    @classmethod
    def cae(cls, lam=0.1):
        return cls(CAE, lam=lam)

    @classmethod
    def dae(cls, noise):
        return cls(DAE, noise=noise)

    @classmethod
    def imae(cls, lam=1.0):
        return cls(IMAE, lam=lam)

    @classmethod
    def vae(cls):
        return cls(VAE)


def check_spec_matches_net(spec: LossSpec, net) -> None:
    """Raise ConfigurationError when a loss cannot be computed on a network."""
    has_heads = net.vae_heads is not None
    if (spec.variant == VAE) != has_heads:
        raise ConfigurationError(
            f"{spec.variant} loss on a network "
            f"{'with' if has_heads else 'without'} Gaussian-latent heads")
    if spec.variant in (IMAE, CAE):
        latent = net.layers[net.latent_index]
        if latent.activation != "sigmoid":
            raise ConfigurationError(
                f"{spec.variant} needs a sigmoid latent layer, got {latent.activation!r}")
    if spec.variant == CAE and net.latent_index != 0:
        raise ConfigurationError(
            "the contractive penalty is defined for a single-layer encoder "
            f"(latent_index 0), got latent_index={net.latent_index}")


def reconstruction_l2(x, xhat) -> float:
    """Mean over samples of the squared Euclidean reconstruction distance."""
    x = as_matrix(x)
    xhat = as_matrix(xhat)
    if x.shape != xhat.shape:
        raise ShapeError(f"reconstruction_l2: shapes differ, {x.shape} vs {xhat.shape}")
    diff = x - xhat
    return float(np.einsum("ij,ij->i", diff, diff).mean())


def log_cosh(x) -> np.ndarray:
    """log(cosh(x)) without overflow: |x| + log1p(exp(-2|x|)) - log 2."""
    ax = np.abs(np.asarray(x, dtype=np.float64))
    return ax + np.log1p(np.exp(-2.0 * ax)) - np.log(2.0)


def imae_latent_entropy(y0) -> float:
    """Entropy proxy of the latent code from its pre-activations.

    Per sample, sums sigma(y0)(1 - sigma(y0)) - log(cosh(y0))^2 over the
    latent units; returns the batch mean. Maximal (0.25 per unit) at y0 = 0.
    """
    y0 = as_matrix(y0)
    s = expit(y0)
    terms = s * (1.0 - s) - log_cosh(y0) ** 2
    return float(terms.sum(axis=1).mean())


def entropy_grad_y0(y0) -> np.ndarray:
    """Entrywise derivative of the entropy proxy's unit term w.r.t. y0."""
    y0 = np.asarray(y0, dtype=np.float64)
    s = expit(y0)
    d = s * (1.0 - s)
    return d * (1.0 - 2.0 * s) - 2.0 * log_cosh(y0) * np.tanh(y0)


def cae_penalty(y, w0) -> float:
    """Squared Frobenius norm of the encoder Jacobian, batch mean.

    Exact for a linear-then-sigmoid encoder: sum_i (y_i(1-y_i))^2 * sum_j w_ij^2
    with y the latent activations and w0 the (latent x input) encoder weights.
    """
    y = as_matrix(y)
    w0 = as_matrix(w0)
    if y.shape[1] != w0.shape[0]:
        raise ShapeError(
            f"cae_penalty: latent width {y.shape[1]} does not match encoder rows {w0.shape[0]}")
    d = y * (1.0 - y)
    row_sq = np.einsum("ij,ij->i", w0, w0)
    return float((d * d @ row_sq).mean())


def vae_kl(mu, logvar) -> float:
    """Divergence of the diagonal-Gaussian code from the unit prior.

    Per sample: sum_i mu_i^2 + exp(logvar_i) - logvar_i - 1, batch mean.
    (Twice the textbook KL; kept in this form to match the rest of the
    objective scaling.) Non-negative, zero only at mu=0, logvar=0.
    """
    mu = as_matrix(mu)
    logvar = as_matrix(logvar)
    if mu.shape != logvar.shape:
        raise ShapeError(f"vae_kl: shapes differ, {mu.shape} vs {logvar.shape}")
    per_unit = mu * mu + np.exp(logvar) - logvar - 1.0
    return float(per_unit.sum(axis=1).mean())


def reparameterize(mu, logvar, rng) -> np.ndarray:
    """Sample mu + exp(logvar/2) * eps with eps ~ N(0, I)."""
    mu = as_matrix(mu)
    logvar = as_matrix(logvar)
    if mu.shape != logvar.shape:
        raise ShapeError(f"reparameterize: shapes differ, {mu.shape} vs {logvar.shape}")
    eps = rng.standard_normal(mu.shape)
    return mu + np.exp(0.5 * logvar) * eps


def total_loss(spec: LossSpec, trace, x_clean):
    """Total objective and its term breakdown for one forward trace.

    Returns (total, {"reconstruction": ..., "latent": ...}); the latent entry
    is signed as it enters the total, so the terms always sum to it.
    """
    check_spec_matches_net(spec, trace.net)
    rec = reconstruction_l2(x_clean, trace.xhat)
    if spec.variant == IMAE:
        latent = -spec.lam * imae_latent_entropy(trace.latent_pre)
    elif spec.variant == CAE:
        w0 = trace.net.layers[trace.net.latent_index].weights
        latent = spec.lam * cae_penalty(trace.latent_act, w0)
    elif spec.variant == VAE:
        latent = vae_kl(trace.mu, trace.logvar)
    else:  # AE and DAE are pure reconstruction
        latent = 0.0
    return rec + latent, {"reconstruction": rec, "latent": latent}
