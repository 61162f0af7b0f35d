"""
How good is the small-bandwidth approximation?
==============================================

The variance of every estimator is governed by an integral of the kernel
transform against exp(sigma^2 s^2 / (2 h^2)). Its small-bandwidth
equivalent is only accurate for quite small h.
"""

from atomdecon import DECONV_W, SEXTIC_W, ATOM_K, default_schedule, lemma51_ratio
from atomdecon.asymptotics import bias_f
from atomdecon.simulation import ModelSpec, NormalFamily

for kernel in (DECONV_W, ATOM_K, SEXTIC_W):
    ratios = [lemma51_ratio(kernel, h, 1.0) for h in (0.5, 0.3, 0.2, 0.1, 0.05)]
    print(f"{kernel.name:9s}", " ".join(f"{r:.4f}" for r in ratios))

# The w-kernels overshoot 1 before settling; the atom kernel rises monotonically.

# Logarithmic bandwidths are forced by the Gaussian noise.
for n in (10**3, 10**6, 10**9):
    s = default_schedule(n, sigma=1.0)
    print(f"n={n:>10d} h={s.h:.4f} g={s.g:.4f} eps={s.eps_n:.2f} (raw {s.eps_raw:.2f})")

# The bias of the known-p estimator vanishes as h shrinks.
model = ModelSpec(0.1, NormalFamily(3.0, 9.0), 1.0)
for h in (0.5, 0.2, 0.1, 0.05):
    print(f"h={h:.2f} bias at x=3: {bias_f(model, 3.0, h):+.2e}")
