"""Deconvolution estimators for the density f and the atom mass p.

Model: X = U V + sigma Z with P(U = 0) = p, V ~ f and Z standard normal.

* ``fhat``      -- classical deconvolution estimator, ignores the atom.
* ``f_known_p`` -- density estimator when p is known.
* ``p_raw`` / ``p_hat`` -- atom estimator and its truncation at 1 - eps.
* ``f_star``    -- plug-in density estimator with p replaced by ``p_hat``.

Each estimator has a pointwise path (cosine sums integrated by adaptive
Simpson) and a grid path driven by :func:`atomdecon.numerics.fft_grid_eval`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import ATOM_K, DECONV_W, Kernel, eval_closed_form, get_kernel
from .numerics import (DEFAULT_TOL, DensityGrid, GridConfig, Sample, damped_breakpoints,
                       damping_exponent, fft_grid_eval, integrate)


def _cosine_integral(sample: Sample, x: float, bw: float, kernel: Kernel, tol: float) -> float:
    """int_0^1 (1/n) sum_j cos(s (X_j - x) / bw) phi(s) exp(sigma^2 s^2 / (2 bw^2)) ds."""
    expo = damping_exponent(sample.sigma, bw)
    scaled = (sample.values - x) / bw

    def integrand(s):
        s = np.asarray(s, dtype=float)
        c = np.cos(np.outer(s, scaled)).mean(axis=1)
        return c * kernel.ft(s) * np.exp(expo * s * s)

    return integrate(integrand, 0.0, 1.0, tol=tol, breakpoints=damped_breakpoints(expo))


def _pointwise(fn, x):
    x_arr = np.asarray(x, dtype=float)
    if x_arr.ndim == 0:
        return fn(float(x_arr))
    return np.array([fn(float(v)) for v in x_arr.ravel()]).reshape(x_arr.shape)


def fhat_direct(sample: Sample, x, h: float, kernel_w: Kernel | str = DECONV_W,
                tol: float = DEFAULT_TOL):
    """Classical deconvolution estimate at ``x`` from the cosine representation

        (1 / (pi n h)) sum_j int_0^1 cos(s (X_j - x) / h) phi_w(s) exp(sigma^2 s^2 / (2 h^2)) ds.
    """
    kernel_w = get_kernel(kernel_w)
    return _pointwise(lambda v: _cosine_integral(sample, v, h, kernel_w, tol) / (math.pi * h), x)


def w_h(x, h: float, kernel_w: Kernel | str = DECONV_W):
    """Rescaled kernel (1/h) w(x/h)."""
    kernel_w = get_kernel(kernel_w)
    return eval_closed_form(kernel_w, np.asarray(x, dtype=float) / h) / h


def f_known_p(sample: Sample, x, h: float, p: float, kernel_w: Kernel | str = DECONV_W,
              tol: float = DEFAULT_TOL):
    """Density estimate for known atom mass: fhat/(1-p) - p/(1-p) * w_h. Not clipped at zero."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p!r}")
    fh = fhat_direct(sample, x, h, kernel_w, tol)
    return fh / (1.0 - p) - p / (1.0 - p) * w_h(x, h, kernel_w)


def p_raw(sample: Sample, g: float, kernel_k: Kernel | str = ATOM_K, tol: float = DEFAULT_TOL) -> float:
    """Atom estimator (g/2) int_{-1/g}^{1/g} phi_emp(t) phi_k(g t) exp(sigma^2 t^2 / 2) dt.

    After t = s/g the odd (imaginary) part integrates to zero over [-1, 1],
    leaving the cosine integral over [0, 1]. Identical to g*pi*fhat(0) with
    the k-kernel in place of the w-kernel.
    """
    kernel_k = get_kernel(kernel_k)
    return _cosine_integral(sample, 0.0, g, kernel_k, tol)


def damped_kernel(x, bw: float, sigma: float, kernel: Kernel | str = ATOM_K, tol: float = 1e-12):
    """k_g(x) = (1/2pi) int_{-1}^{1} exp(-itx) phi(t) exp(sigma^2 t^2 / (2 bw^2)) dt."""
    kernel = get_kernel(kernel)
    expo = damping_exponent(sigma, bw)

    def one(v):
        return integrate(lambda t: np.cos(t * v) * kernel.ft(t) * np.exp(expo * t * t),
                         0.0, 1.0, tol=tol, breakpoints=damped_breakpoints(expo)) / math.pi

    return _pointwise(one, x)


def p_raw_kernel_sum(sample: Sample, g: float, kernel_k: Kernel | str = ATOM_K,
                     tol: float = 1e-12) -> float:
    """Atom estimator as an average of damped kernels, (pi/n) sum_j k_g(-X_j/g)."""
    vals = damped_kernel(-sample.values / g, g, sample.sigma, kernel_k, tol)
    return math.pi * math.fsum(vals) / sample.n


@dataclass(frozen=True)
class PEstimate:
    p_raw: float
    p_hat: float
    g_used: float
    eps_used: float
    truncated: bool


def truncate_p(p_value: float, eps_n: float) -> tuple[float, bool]:
    """min(p, 1 - eps_n); only the upper side is truncated."""
    if not 0.0 < eps_n < 1.0:
        raise ValueError(f"eps_n must lie in (0, 1), got {eps_n!r}")
    cap = 1.0 - eps_n
    return (cap, True) if p_value > cap else (p_value, False)


def p_hat(sample: Sample, g: float, eps_n: float, kernel_k: Kernel | str = ATOM_K,
          tol: float = DEFAULT_TOL) -> PEstimate:
    raw = p_raw(sample, g, kernel_k, tol)
    value, truncated = truncate_p(raw, eps_n)
    return PEstimate(raw, value, g, eps_n, truncated)


@dataclass(frozen=True)
class EstimatorConfig:
    """Bandwidths, truncation level, kernels and FFT grid for the plug-in estimator."""

    h: float
    g: float
    eps_n: float = 0.01
    kernel_w: Kernel = DECONV_W
    kernel_k: Kernel = ATOM_K
    grid: GridConfig | None = None

    def __post_init__(self):
        if not (self.h > 0 and self.g > 0):
            raise ValueError("bandwidths h and g must be positive")
        if not 0.0 < self.eps_n < 1.0:
            raise ValueError(f"eps_n must lie in (0, 1), got {self.eps_n!r}")
        object.__setattr__(self, "kernel_w", get_kernel(self.kernel_w))
        object.__setattr__(self, "kernel_k", get_kernel(self.kernel_k))
        k = self.kernel_k
        if k.kind != "k" or abs(k.ft_integral - 2.0) > 1e-8:
            raise ValueError(f"kernel_k {k.name!r} must be k-type with int phi = 2")
        t = np.linspace(0.0, 1.0, 101)
        if not np.allclose(k.ft(t), k.ft(-t)):
            raise ValueError(f"kernel_k {k.name!r} must have a symmetric transform")
        if self.grid is None:
            object.__setattr__(self, "grid", GridConfig.for_bandwidth(self.h))


def f_star(sample: Sample, x, config: EstimatorConfig, tol: float = DEFAULT_TOL):
    """Plug-in estimate fhat/(1 - p_hat) - p_hat/(1 - p_hat) * w_h at ``x``."""
    est = p_hat(sample, config.g, config.eps_n, config.kernel_k, tol)
    p = est.p_hat
    fh = fhat_direct(sample, x, config.h, config.kernel_w, tol)
    return fh / (1.0 - p) - p / (1.0 - p) * w_h(x, config.h, config.kernel_w)


def fhat_grid(sample: Sample, h: float, kernel_w: Kernel | str = DECONV_W,
              grid: GridConfig | None = None) -> DensityGrid:
    kernel_w = get_kernel(kernel_w)
    grid = grid or GridConfig.for_bandwidth(h)
    return fft_grid_eval(sample, kernel_w.ft, h, grid, estimator_tag="fhat")


def w_h_grid(h: float, kernel_w: Kernel | str = DECONV_W,
             grid: GridConfig | None = None) -> DensityGrid:
    """w_h on the grid, as the undamped FFT of a single observation at zero."""
    kernel_w = get_kernel(kernel_w)
    grid = grid or GridConfig.for_bandwidth(h)
    point = Sample(np.zeros(1), 0.0)
    return fft_grid_eval(point, kernel_w.ft, h, grid, damping=False, estimator_tag="w_h")


def _combine(fh: DensityGrid, wh: DensityGrid, p: float, tag: str) -> DensityGrid:
    vals = fh.values / (1.0 - p) - p / (1.0 - p) * wh.values
    return DensityGrid(fh.xs, vals, fh.config, tag)


def f_known_p_grid(sample: Sample, h: float, p: float, kernel_w: Kernel | str = DECONV_W,
                   grid: GridConfig | None = None) -> DensityGrid:
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p!r}")
    grid = grid or GridConfig.for_bandwidth(h)
    out = _combine(fhat_grid(sample, h, kernel_w, grid), w_h_grid(h, kernel_w, grid), p, "f_known_p")
    out.meta["p"] = p
    return out


def f_star_grid(sample: Sample, config: EstimatorConfig, tol: float = DEFAULT_TOL) -> DensityGrid:
    """Grid version of :func:`f_star`; the atom estimate is stored in ``meta``."""
    est = p_hat(sample, config.g, config.eps_n, config.kernel_k, tol)
    fh = fhat_grid(sample, config.h, config.kernel_w, config.grid)
    wh = w_h_grid(config.h, config.kernel_w, config.grid)
    out = _combine(fh, wh, est.p_hat, "f_star")
    out.meta.update(p_raw=est.p_raw, p_hat=est.p_hat, truncated=est.truncated,
                    h=config.h, g=config.g, eps_n=config.eps_n)
    return out
