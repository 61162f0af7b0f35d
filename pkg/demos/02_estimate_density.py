"""
Estimating the atom and the density
===================================

Simulate the reference normal model, estimate the atom mass p and plug it
into the density estimator on an FFT grid.
"""

import numpy as np

from atomdecon import EstimatorConfig, ModelSpec, NormalFamily, draw_sample, f_star_grid, p_hat

# X = B V + sigma Z with P(B = 0) = 0.1, V ~ N(3, 9), sigma = 1.
model = ModelSpec(p=0.1, family=NormalFamily(3.0, 9.0), sigma=1.0)
sample = draw_sample(model, n=1000, seed=1)

# The atom estimator at bandwidth g; truncation only acts above 1 - eps.
est = p_hat(sample, g=0.5, eps_n=0.01)
print(f"p_raw = {est.p_raw:.4f}, p_hat = {est.p_hat:.4f}, truncated = {est.truncated}")

# The density estimate on the default grid of 2^16 points.
config = EstimatorConfig(h=0.58, g=0.5)
grid = f_star_grid(sample, config).crop(-10, 16)

true = model.family.pdf(grid.xs)
print(f"grid step {grid.config.delta:.4f}, {grid.xs.size} points kept")
print(f"max |f* - f| = {np.max(np.abs(grid.values - true)):.4f}")
print(f"mass on grid = {grid.values.sum() * grid.config.delta:.4f}")
print(f"negative part = {grid.values.clip(max=0).sum() * grid.config.delta:.2e}")

# Optional post-processing: clip at zero and renormalize.
clipped = grid.clipped()
print(f"after clipping, min = {clipped.values.min():.1e}")
