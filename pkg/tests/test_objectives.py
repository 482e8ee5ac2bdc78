import numpy as np
import pytest

from imae import nn
from imae.errors import ConfigurationError, ShapeError
from imae.ndcore import make_rng
from imae.objectives import (LossSpec, cae_penalty, imae_latent_entropy,
                             log_cosh, reconstruction_l2, reparameterize,
                             total_loss, vae_kl)

# single-unit entropy term at y0 = 1, frozen from a 40-digit mpmath evaluation
# of sigma(1)(1 - sigma(1)) - log(cosh(1))^2
ENTROPY_AT_ONE = 0.0084461243469370841023


def l2_oracle(x, xhat):
    """Independent double loop: mean over rows of sum of squared differences."""
    total = 0.0
    for i in range(x.shape[0]):
        row = 0.0
        for j in range(x.shape[1]):
            row += (x[i, j] - xhat[i, j]) ** 2
        total += row
    return total / x.shape[0]


def jacobian_frobenius_oracle(w0, b, x, h=1e-5):
    """Frobenius norm^2 of the encoder Jacobian by central differences.

    Differentiates the full encoder x -> sigmoid(w0 @ x + b) per input
    coordinate; independent of the closed-form penalty it checks.
    """
    def enc(v):
        return 1.0 / (1.0 + np.exp(-(w0 @ v + b)))

    total = 0.0
    for row in x:
        jac = np.empty((w0.shape[0], w0.shape[1]))
        for j in range(len(row)):
            up, down = row.copy(), row.copy()
            up[j] += h
            down[j] -= h
            jac[:, j] = (enc(up) - enc(down)) / (2 * h)
        total += (jac ** 2).sum()
    return total / x.shape[0]


class TestLossSpec:
    def test_lambda_rejected_for_plain_variants(self):
        for variant in ("AE", "VAE"):
            with pytest.raises(ConfigurationError):
                LossSpec(variant, lam=0.5)

    def test_noise_iff_dae(self):
        from imae.data import NoiseSpec
        with pytest.raises(ConfigurationError):
            LossSpec("DAE")
        with pytest.raises(ConfigurationError):
            LossSpec("AE", noise=NoiseSpec("mask", 0.3))
        LossSpec.dae(NoiseSpec("mask", 0.3))

    def test_defaults(self):
        assert LossSpec.cae().lam == 0.1
        assert LossSpec.imae().lam == 1.0


class TestReconstructionL2:
    def test_identical_is_zero(self, rng):
        x = rng.random((3, 5))
        assert reconstruction_l2(x, x) == 0.0

    def test_single_row(self):
        assert reconstruction_l2([[1.0, 0.0]], [[0.0, 0.0]]) == 1.0

    def test_against_double_loop(self, rng):
        x = rng.random((6, 9))
        xhat = rng.random((6, 9))
        np.testing.assert_allclose(reconstruction_l2(x, xhat),
                                   l2_oracle(x, xhat), rtol=0, atol=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            reconstruction_l2(np.zeros((2, 3)), np.zeros((3, 2)))

    def test_row_permutation_invariant(self, rng):
        x = rng.random((8, 4))
        xhat = rng.random((8, 4))
        perm = rng.permutation(8)
        np.testing.assert_allclose(reconstruction_l2(x, xhat),
                                   reconstruction_l2(x[perm], xhat[perm]), rtol=1e-12)


class TestLatentEntropy:
    def test_zero_vector_maximum(self):
        for l in (1, 7, 32):
            assert imae_latent_entropy(np.zeros((1, l))) == 0.25 * l

    def test_single_unit_at_one(self):
        value = imae_latent_entropy(np.array([[1.0]]))
        np.testing.assert_allclose(value, ENTROPY_AT_ONE, rtol=0, atol=1e-15)

    def test_frozen_value_matches_live_high_precision(self):
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 40
        s = 1 / (1 + mp.e ** -1)
        live = s * (1 - s) - mp.log(mp.cosh(1)) ** 2
        assert abs(float(live) - ENTROPY_AT_ONE) < 1e-17

    def test_never_exceeds_zero_point(self, rng):
        y0 = rng.standard_normal((10, 6)) * 3
        assert imae_latent_entropy(y0) <= imae_latent_entropy(np.zeros((10, 6)))

    def test_even_in_y0(self, rng):
        y0 = rng.standard_normal((5, 8)) * 2
        np.testing.assert_allclose(imae_latent_entropy(y0),
                                   imae_latent_entropy(-y0), rtol=0, atol=1e-12)

    def test_log_cosh_overflow_safe(self):
        big = np.array([[500.0, -500.0, 0.0]])
        out = log_cosh(big)
        assert np.all(np.isfinite(out))
        np.testing.assert_allclose(out[0, :2], 500.0 - np.log(2.0), rtol=1e-12)
        assert out[0, 2] == 0.0


class TestCaePenalty:
    def test_zero_weights(self):
        assert cae_penalty(np.full((3, 4), 0.5), np.zeros((4, 6))) == 0.0

    def test_hand_checked_single_unit(self):
        # y=0.5, w=2: (0.25)^2 * 4
        assert cae_penalty([[0.5]], [[2.0]]) == 0.25

    def test_matches_numeric_jacobian(self, rng):
        w0 = rng.standard_normal((3, 5))
        b = rng.standard_normal(3) * 0.2
        x = rng.random((4, 5))
        y = 1.0 / (1.0 + np.exp(-(x @ w0.T + b)))
        oracle = jacobian_frobenius_oracle(w0, b, x)
        np.testing.assert_allclose(cae_penalty(y, w0), oracle, rtol=1e-4)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            cae_penalty(np.full((2, 3), 0.5), np.zeros((4, 5)))

    def test_row_permutation_invariant(self, rng):
        y = rng.uniform(0.1, 0.9, (6, 4))
        w0 = rng.standard_normal((4, 7))
        perm = rng.permutation(6)
        np.testing.assert_allclose(cae_penalty(y, w0), cae_penalty(y[perm], w0),
                                   rtol=1e-12)


class TestVaeKl:
    def test_matched_prior_is_zero(self):
        assert vae_kl(np.zeros((3, 4)), np.zeros((3, 4))) == 0.0

    def test_unit_mean(self):
        assert vae_kl([[1.0]], [[0.0]]) == 1.0

    def test_nonnegative(self, rng):
        mu = rng.standard_normal((10, 5))
        logvar = rng.standard_normal((10, 5))
        assert vae_kl(mu, logvar) >= 0.0
        assert vae_kl(mu, logvar) > 0.0  # generic inputs never hit the minimum


class TestReparameterize:
    def test_tiny_variance_returns_mean(self, rng):
        mu = rng.standard_normal((4, 6))
        out = reparameterize(mu, np.full((4, 6), -60.0), make_rng(1))
        np.testing.assert_allclose(out, mu, rtol=0, atol=1e-12)

    def test_unit_variance_moments(self):
        out = reparameterize(np.zeros((1000, 100)), np.zeros((1000, 100)), make_rng(2))
        assert abs(out.std() - 1.0) < 0.01

    def test_same_seed_identical(self, rng):
        mu = rng.standard_normal((3, 3))
        lv = rng.standard_normal((3, 3))
        a = reparameterize(mu, lv, make_rng(7))
        b = reparameterize(mu, lv, make_rng(7))
        assert np.array_equal(a, b)


class TestTotalLoss:
    def _net_and_trace(self, rng, variant="AE", lam=0.0, latent=6, d=10, batch=4):
        vae = variant == "VAE"
        net = nn.init_params(nn.shallow_arch(latent, d), make_rng(3), vae=vae)
        x = rng.random((batch, d))
        trace = nn.forward(net, x, rng=make_rng(4) if vae else None)
        return net, trace, x

    def test_zero_lambda_degenerates_to_ae(self, rng):
        _, trace, x = self._net_and_trace(rng)
        base, _ = total_loss(LossSpec.ae(), trace, x)
        for spec in (LossSpec("CAE", lam=0.0), LossSpec("IMAE", lam=0.0)):
            value, _ = total_loss(spec, trace, x)
            assert value == base

    def test_imae_perfect_reconstruction_zero_code(self):
        l = 6
        net = nn.init_params(nn.shallow_arch(l, 10), make_rng(1))
        for arr in net.param_items().values():
            arr[:] = 0.0
        x = np.zeros((3, 10))
        trace = nn.forward(net, x)
        value, terms = total_loss(LossSpec.imae(1.0), trace, x)
        assert value == -0.25 * l
        assert terms["reconstruction"] == 0.0

    @pytest.mark.parametrize("variant", ["AE", "CAE", "IMAE", "VAE"])
    def test_terms_sum_to_total(self, rng, variant):
        lam = {"CAE": 0.1, "IMAE": 1.0}.get(variant, 0.0)
        _, trace, x = self._net_and_trace(rng, variant)
        value, terms = total_loss(LossSpec(variant, lam=lam), trace, x)
        np.testing.assert_allclose(value, terms["reconstruction"] + terms["latent"],
                                   rtol=0, atol=1e-12)

    def test_dae_scores_against_clean_target(self, rng):
        from imae.data import NoiseSpec, corrupt
        net = nn.init_params(nn.shallow_arch(6, 10), make_rng(5))
        x = rng.random((4, 10))
        noisy = corrupt(x, NoiseSpec("mask", 0.5), make_rng(6))
        trace = nn.forward(net, noisy)
        spec = LossSpec.dae(NoiseSpec("mask", 0.5))
        value, terms = total_loss(spec, trace, x)
        assert value == reconstruction_l2(x, trace.xhat)
        assert terms["latent"] == 0.0

    def test_mismatched_spec_rejected(self, rng):
        _, trace, x = self._net_and_trace(rng)
        with pytest.raises(ConfigurationError):
            total_loss(LossSpec.vae(), trace, x)
