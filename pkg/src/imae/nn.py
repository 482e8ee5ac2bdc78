"""Feed-forward autoencoder networks: layers, forward pass, analytic gradients.

Layout conventions: weights are (out x in), batches are row-major (one sample
per row), so a layer computes ``act(x @ W.T + b)``. The layer whose output is
the hidden representation is marked by ``latent_index``. Gaussian-latent
networks replace that layer with a pair of linear heads (mean, log-variance)
and sample the code with the reparameterization trick.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import objectives
from .errors import ConfigurationError, ShapeError
from .ndcore import as_matrix

ACTIVATIONS = ("sigmoid", "softplus", "identity")


def sigmoid(x):
    """Logistic function, overflow-safe for any finite input."""
    return expit(x)


def softplus(x):
    """log(1 + exp(x)) computed without overflow for |x| up to ~700."""
    return np.logaddexp(0.0, x)


def sigmoid_derivative(y):
    """Derivative of the logistic function expressed in its output y: y(1-y)."""
    y = np.asarray(y, dtype=np.float64)
    return y * (1.0 - y)


def _activate(tag, z):
    if tag == "sigmoid":
        return expit(z)
    if tag == "softplus":
        return softplus(z)
    if tag == "identity":
        return z.copy()
    raise ConfigurationError(f"unknown activation {tag!r}")


def _activation_deriv(tag, pre, act):
    if tag == "sigmoid":
        return act * (1.0 - act)
    if tag == "softplus":
        return expit(pre)
    if tag == "identity":
        return np.ones_like(pre)
    raise ConfigurationError(f"unknown activation {tag!r}")


@dataclass
class DenseLayer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray     # (out,)
    activation: str


@dataclass
class Arch:
    """Widths and activations of a network, independent of its parameters.

    ``layers`` lists (width, activation) pairs after the input;
    ``latent_index`` points at the layer producing the hidden code.
    """
    input_dim: int
    layers: tuple
    latent_index: int

    def widths(self):
        return (self.input_dim,) + tuple(w for w, _ in self.layers)


def shallow_arch(n_hidden, input_dim=784):
    """input -> n_hidden (sigmoid) -> input (linear decoder)."""
    return Arch(input_dim, ((n_hidden, "sigmoid"), (input_dim, "identity")), 0)


def deep_arch(n_h, input_dim=784, trunk=(1100, 700)):
    """Symmetric softplus trunk around a sigmoid code of n_h units."""
    enc = tuple((w, "softplus") for w in trunk)
    dec = tuple((w, "softplus") for w in reversed(trunk))
    layers = enc + ((n_h, "sigmoid"),) + dec + ((input_dim, "identity"),)
    return Arch(input_dim, layers, len(trunk))


@dataclass
class Network:
    layers: list
    latent_index: int
    tied: bool = False
    vae_heads: tuple = None  # (mean head, log-variance head) or None
    biases: bool = True
    arch: Arch = None

    def param_items(self):
        """Unique trainable parameters in a fixed order, name -> array.

        Tied decoder weights are transpose views of the encoder arrays and are
        not listed separately; their gradient is accumulated into the encoder
        entry.
        """
        half = len(self.layers) // 2
        items = {}
        for k, layer in enumerate(self.layers):
            if not (self.tied and k >= half):
                items[f"layers.{k}.W"] = layer.weights
            if self.biases:
                items[f"layers.{k}.b"] = layer.bias
        if self.vae_heads is not None:
            for tag, head in zip(("mu", "logvar"), self.vae_heads):
                items[f"heads.{tag}.W"] = head.weights
                if self.biases:
                    items[f"heads.{tag}.b"] = head.bias
        return items

    def clone(self):
        """Deep copy preserving weight tying."""
        half = len(self.layers) // 2
        layers = []
        for k, layer in enumerate(self.layers):
            if self.tied and k >= half:
                w = layers[len(self.layers) - 1 - k].weights.T
            else:
                w = layer.weights.copy()
            layers.append(DenseLayer(w, layer.bias.copy(), layer.activation))
        heads = None
        if self.vae_heads is not None:
            heads = tuple(DenseLayer(h.weights.copy(), h.bias.copy(), h.activation)
                          for h in self.vae_heads)
        return Network(layers, self.latent_index, self.tied, heads, self.biases, self.arch)


@dataclass
class ForwardTrace:
    net: Network
    x: np.ndarray          # batch actually fed to the first layer
    pre: list              # per-layer pre-activations
    act: list              # per-layer activations
    mu: np.ndarray = None
    logvar: np.ndarray = None
    eps: np.ndarray = None
    z: np.ndarray = None   # sampled latent (Gaussian-latent networks only)

    @property
    def xhat(self):
        return self.act[-1]

    @property
    def latent_pre(self):
        return self.pre[self.net.latent_index]

    @property
    def latent_act(self):
        return self.act[self.net.latent_index]

    def layer_input(self, k):
        if self.net.vae_heads is not None and k == self.net.latent_index:
            return self.z
        return self.x if k == 0 else self.act[k - 1]

    @property
    def trunk_out(self):
        i = self.net.latent_index
        return self.x if i == 0 else self.act[i - 1]


def _glorot(rng, out_dim, in_dim):
    s = np.sqrt(6.0 / (in_dim + out_dim))
    return rng.uniform(-s, s, size=(out_dim, in_dim))


def init_params(arch: Arch, rng, scheme="glorot", *, vae=False, tied=False,
                biases=True) -> Network:
    """Build a network with freshly initialized parameters.

    Weights are uniform in +-sqrt(6/(fan_in+fan_out)); biases start at zero.
    ``vae=True`` replaces the latent layer with linear mean/log-variance heads.
    ``tied=True`` stores encoder weights once and exposes decoder weights as
    transpose views of them.
    """
    if scheme != "glorot":
        raise ValueError(f"unknown init scheme {scheme!r}")
    if not arch.layers:
        raise ValueError("empty architecture")
    widths = arch.widths()
    if any(w < 1 for w in widths):
        raise ValueError(f"layer widths must be >= 1, got {widths}")
    acts = [a for _, a in arch.layers]
    if any(a not in ACTIVATIONS for a in acts):
        raise ConfigurationError(f"unknown activation in {acts}")
    if not 0 <= arch.latent_index < len(arch.layers):
        raise ConfigurationError(f"latent_index {arch.latent_index} out of range")
    if vae and tied:
        raise ConfigurationError("tied weights are not supported with Gaussian-latent heads")
    n_layers = len(arch.layers)
    if tied:
        if n_layers % 2 != 0:
            raise ConfigurationError("tied weights require an even layer count")
        if list(widths) != list(reversed(widths)):
            raise ConfigurationError(f"tied weights require palindromic widths, got {widths}")

    layers = []
    heads = None
    half = n_layers // 2
    for k, (out_dim, act) in enumerate(arch.layers):
        in_dim = widths[k]
        if vae and k == arch.latent_index:
            # the latent layer gives way to the mean/log-variance heads; the
            # next layer then consumes the sampled code (same width)
            heads = tuple(DenseLayer(_glorot(rng, out_dim, in_dim), np.zeros(out_dim), "identity")
                          for _ in range(2))
            continue
        if tied and k >= half:
            w = layers[n_layers - 1 - k].weights.T
        else:
            w = _glorot(rng, out_dim, in_dim)
        layers.append(DenseLayer(w, np.zeros(out_dim), act))
    return Network(layers, arch.latent_index, tied, heads, biases, arch)


def _linear(layer, a):
    if a.shape[1] != layer.weights.shape[1]:
        raise ShapeError(
            f"layer expects {layer.weights.shape[1]} inputs, batch has {a.shape}")
    return a @ layer.weights.T + layer.bias


def forward(net: Network, batch, rng=None, eps=None) -> ForwardTrace:
    """Run the network on a batch, recording every pre-activation and activation.

    Gaussian-latent networks need ``rng`` to sample the code (or ``eps`` to
    replay a fixed standard-normal draw, e.g. for finite differences).
    """
    a = as_matrix(batch)
    trace = ForwardTrace(net, a, [], [])
    for k, layer in enumerate(net.layers):
        if net.vae_heads is not None and k == net.latent_index:
            mu_head, lv_head = net.vae_heads
            trace.mu = _linear(mu_head, a)
            trace.logvar = _linear(lv_head, a)
            if eps is None:
                if rng is None:
                    raise ConfigurationError("Gaussian-latent forward pass needs rng or eps")
                eps = rng.standard_normal(trace.mu.shape)
            trace.eps = np.asarray(eps, dtype=np.float64)
            trace.z = trace.mu + np.exp(0.5 * trace.logvar) * trace.eps
            a = trace.z
        z = _linear(layer, a)
        a = _activate(layer.activation, z)
        trace.pre.append(z)
        trace.act.append(a)
    return trace


def encode(net: Network, batch) -> np.ndarray:
    """Hidden code for a batch: latent activations, or the mean head for
    Gaussian-latent networks (no sampling)."""
    a = as_matrix(batch)
    for layer in net.layers[:net.latent_index]:
        a = _activate(layer.activation, _linear(layer, a))
    if net.vae_heads is not None:
        return _linear(net.vae_heads[0], a)
    layer = net.layers[net.latent_index]
    return _activate(layer.activation, _linear(layer, a))


def backward(net: Network, trace: ForwardTrace, spec, batch_clean) -> dict:
    """Gradient of the total loss w.r.t. every trainable parameter.

    ``batch_clean`` is the reconstruction target; for denoising training it
    differs from the (corrupted) forward input. Returns a dict keyed like
    ``Network.param_items``; gradients are means over the batch. For tied
    networks the decoder contribution is accumulated, transposed, into the
    shared encoder entry.
    """
    objectives.check_spec_matches_net(spec, net)
    clean = as_matrix(batch_clean)
    if trace.act[-1].shape != clean.shape:
        raise ShapeError(
            f"target shape {clean.shape} does not match output {trace.act[-1].shape}")
    n_layers = len(net.layers)
    half = n_layers // 2
    batch = clean.shape[0]
    grads = {}

    def accumulate(key, value):
        if key in grads:
            grads[key] += value
        else:
            grads[key] = value

    g = (2.0 / batch) * (trace.act[-1] - clean)  # d(loss)/d(output activations)
    for k in range(n_layers - 1, -1, -1):
        layer = net.layers[k]
        dz = g * _activation_deriv(layer.activation, trace.pre[k], trace.act[k])
        if k == net.latent_index and net.vae_heads is None:
            if spec.variant == objectives.IMAE:
                # total loss carries -lambda * entropy
                dz -= (spec.lam / batch) * objectives.entropy_grad_y0(trace.pre[k])
            elif spec.variant == objectives.CAE:
                y = trace.act[k]
                d = y * (1.0 - y)
                w0 = layer.weights
                row_sq = np.einsum("ij,ij->i", w0, w0)
                dz += (2.0 * spec.lam / batch) * d * d * (1.0 - 2.0 * y) * row_sq
                # dependence of the penalty on the encoder weights themselves
                wkey = f"layers.{k}.W"
                accumulate(wkey, (2.0 * spec.lam / batch)
                           * (d * d).sum(axis=0)[:, None] * w0)
        a_prev = trace.layer_input(k)
        if net.tied and k >= half:
            accumulate(f"layers.{n_layers - 1 - k}.W", (dz.T @ a_prev).T)
        else:
            accumulate(f"layers.{k}.W", dz.T @ a_prev)
        if net.biases:
            accumulate(f"layers.{k}.b", dz.sum(axis=0))
        g = dz @ layer.weights
        if net.vae_heads is not None and k == net.latent_index:
            # g is now d(loss)/d(sampled code); route through the heads
            mu_head, lv_head = net.vae_heads
            std = np.exp(0.5 * trace.logvar)
            dmu = g + (2.0 / batch) * trace.mu
            dlv = 0.5 * g * trace.eps * std + (np.exp(trace.logvar) - 1.0) / batch
            h = trace.trunk_out
            accumulate("heads.mu.W", dmu.T @ h)
            accumulate("heads.logvar.W", dlv.T @ h)
            if net.biases:
                accumulate("heads.mu.b", dmu.sum(axis=0))
                accumulate("heads.logvar.b", dlv.sum(axis=0))
            g = dmu @ mu_head.weights + dlv @ lv_head.weights
    return grads
