#!/usr/bin/env python3
"""Verify every analytic gradient against central finite differences.

Each of the five objectives (AE, CAE, DAE, IMAE, VAE) gets a random small
autoencoder and a random batch; backpropagation is compared parameter by
parameter with (L(p+h) - L(p-h)) / 2h. The numeric side only ever calls the
forward pass and the loss, so it cannot share a bug with the backward pass.
"""

from imae import gradcheck, objectives

for variant in objectives.VARIANTS:
    print(f"--- {variant} ---")
    for seed in range(3):
        result = gradcheck.check_variant(variant, seed)
        status = "ok" if result.passed else "MISMATCH"
        print(f"  seed {seed}: {status:8s} worst relative error {result.max_rel_err:.2e}")
        if seed == 0:
            for block in result.blocks:
                print(f"    {block.name:16s} max |analytic - numeric| = {block.max_abs_diff:.2e}")

print()
print("A network with tied decoder weights holds one shared matrix; its")
print("gradient is the sum of the encoder contribution and the transposed")
print("decoder contribution, which the same check covers:")
result = gradcheck.check_variant("IMAE", 7, tied=True)
print(f"  tied IMAE: {'ok' if result.passed else 'MISMATCH'} "
      f"(worst {result.max_rel_err:.2e})")
