"""Bandwidth schedules, variance predictors and exact mean/bias formulas.

The standard deviations of the estimators are governed by the integral

    I(h) = int_0^1 phi(s) exp(sigma^2 s^2 / (2 h^2)) ds
         ~ const * Gamma(1 + alpha) * sigma^(-2(1+alpha)) * h^(2(1+alpha)) * exp(sigma^2 / (2 h^2))

as h -> 0. The "asymptotic" predictors use the right-hand side; the
"corrected" ones use I(h) itself, which is far more accurate at practical
bandwidths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kernels import DECONV_W, Kernel, get_kernel
from .numerics import damped_breakpoints, damping_exponent, integrate


@dataclass(frozen=True)
class BandwidthSchedule:
    n: int
    sigma: float
    eta_n: float
    delta_n: float
    h: float
    g: float
    eps_n: float
    eps_raw: float


def default_schedule(n: int, sigma: float, eps_cap: float = 0.99) -> BandwidthSchedule:
    """Logarithmic bandwidths h = sigma((1+eta) log n)^(-1/2), g = sigma((1+delta) log n)^(-1/2).

    Uses eta = 2 L/log n, delta = L/log n and eps = 1/L with L = log log log n.
    Since 1/L exceeds one for every practical n, eps is clamped to ``eps_cap``.
    """
    if n < 16:
        raise DomainError(f"the default schedule needs n >= 16 (log log log n > 0), got {n}")
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    log_n = math.log(n)
    lll = math.log(math.log(log_n))
    eta = 2.0 * lll / log_n
    delta = lll / log_n
    h = sigma / math.sqrt((1.0 + eta) * log_n)
    g = sigma / math.sqrt((1.0 + delta) * log_n)
    eps_raw = 1.0 / lll
    eps = min(eps_raw, eps_cap)
    return BandwidthSchedule(n, sigma, eta, delta, h, g, eps, eps_raw)


def _check_sigma(sigma: float):
    if not sigma > 0:
        raise DomainError("the variance asymptotics need sigma > 0")


def lemma51_rhs(kernel: Kernel | str, h: float, sigma: float, delta: float = 0.0) -> float:
    """const * Gamma(1+alpha+delta) * sigma^(-2(1+alpha+delta)) * h^(2(1+alpha+delta)) * exp(sigma^2/(2h^2))."""
    kernel = get_kernel(kernel)
    _check_sigma(sigma)
    expo = damping_exponent(sigma, h)
    a = 1.0 + kernel.alpha + delta
    return kernel.edge_const * math.gamma(a) * (h * h / (sigma * sigma)) ** a * math.exp(expo)


def lemma51_integral(kernel: Kernel | str, h: float, sigma: float, delta: float = 0.0,
                     rtol: float = 1e-10) -> float:
    """int_0^1 (1-s)^delta phi(s) exp(sigma^2 s^2 / (2 h^2)) ds."""
    kernel = get_kernel(kernel)
    expo = damping_exponent(sigma, h)

    # exp(expo) is factored out; a rough pass sets the scale for the relative tolerance
    def f(s):
        return (1.0 - s) ** delta * kernel.ft(s) * np.exp(expo * (s * s - 1.0))

    breaks = damped_breakpoints(expo)
    rough = integrate(f, 0.0, 1.0, tol=1e-6 * kernel.sup_ft(), breakpoints=breaks)
    value = integrate(f, 0.0, 1.0, tol=rtol * abs(rough), breakpoints=breaks)
    return value * math.exp(expo)


def lemma51_ratio(kernel: Kernel | str, h: float, sigma: float) -> float:
    """Exact integral divided by its small-bandwidth equivalent; tends to 1 as h -> 0."""
    return lemma51_integral(kernel, h, sigma) / lemma51_rhs(kernel, h, sigma)


def asymptotic_sd_p(g: float, n: int, sigma: float, kernel_k: Kernel | str) -> float:
    """Limit SD of the atom estimator: g^(2+2a) e^(s^2/(2g^2)) / sqrt(n) * C Gamma(1+a) s^(-2(1+a)) / sqrt(2)."""
    return lemma51_rhs(kernel_k, g, sigma) / math.sqrt(2.0 * n)


def corrected_sd_p(g: float, n: int, sigma: float, kernel_k: Kernel | str) -> float:
    """SD of the atom estimator with the exact integral as normalizer, I(g) / sqrt(2n)."""
    return lemma51_integral(kernel_k, g, sigma) / math.sqrt(2.0 * n)


def asymptotic_sd_f(h: float, n: int, sigma: float, p: float, kernel_w: Kernel | str = DECONV_W) -> float:
    """Limit SD of the known-p density estimator at any fixed x.

    Uses the normalization sqrt(n) h^-(1+2a) exp(-sigma^2/(2h^2)), giving
    h^(1+2a) e^(s^2/(2h^2)) / sqrt(n) * A Gamma(1+a) s^(-2(1+a)) / ((1-p) pi sqrt 2).
    """
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p!r}")
    return lemma51_rhs(kernel_w, h, sigma) / (h * (1.0 - p) * math.pi * math.sqrt(2.0 * n))


def corrected_sd_f(h: float, n: int, sigma: float, p: float, kernel_w: Kernel | str = DECONV_W) -> float:
    """Density-estimator SD with the exact integral: I(h) / (pi h (1-p) sqrt(2n))."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p!r}")
    return lemma51_integral(kernel_w, h, sigma) / (h * (1.0 - p) * math.pi * math.sqrt(2.0 * n))


def _w_h(x, h, kernel):
    return kernel(np.asarray(x, dtype=float) / h) / h


def smoothed_density(model, x: float, h: float, kernel_w: Kernel | str = DECONV_W,
                     tol: float = 1e-11) -> float:
    """(f * w_h)(x) = int f(v) w_h(x - v) dv, integrated over the support of f."""
    kernel_w = get_kernel(kernel_w)
    lo, hi = model.family.support()
    return integrate(lambda v: model.family.pdf(v) * _w_h(x - v, h, kernel_w), lo, hi, tol=tol,
                     panels=64)


def smoothed_density_fourier(model, x: float, h: float, kernel_w: Kernel | str = DECONV_W,
                             tol: float = 1e-11) -> float:
    """(f * w_h)(x) = (1/2pi) int exp(-itx) phi_f(t) phi_w(ht) dt."""
    kernel_w = get_kernel(kernel_w)

    def f(t):
        return (np.exp(-1j * t * x) * model.family.cf(t)).real * kernel_w.ft(h * t)

    return integrate(f, 0.0, 1.0 / h, tol=tol, panels=64) / math.pi


def expected_fhat(model, x: float, h: float, kernel_w: Kernel | str = DECONV_W,
                  p: float | None = None) -> float:
    """Exact mean of the classical estimator: p w_h(x) + (1-p) (f * w_h)(x).

    ``p`` overrides the model's atom mass (p = 1 is allowed here).
    """
    kernel_w = get_kernel(kernel_w)
    p = model.p if p is None else p
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    atom = p * float(_w_h(x, h, kernel_w))
    if p == 1.0:
        return atom
    return atom + (1.0 - p) * smoothed_density(model, x, h, kernel_w)


def bias_f(model, x: float, h: float, kernel_w: Kernel | str = DECONV_W, tol: float = 1e-12) -> float:
    """E[f_nh(x)] - f(x) = (1/2pi) int exp(-itx) phi_f(t) (phi_w(ht) - 1) dt."""
    kernel_w = get_kernel(kernel_w)

    def f(t):
        return (np.exp(-1j * t * x) * model.family.cf(t)).real * (kernel_w.ft(h * t) - 1.0)

    cutoff = model.family.cf_cutoff()
    inner = integrate(f, 0.0, min(1.0 / h, cutoff), tol=tol, panels=64)
    outer = integrate(f, 1.0 / h, cutoff, tol=tol, panels=64) if cutoff > 1.0 / h else 0.0
    return (inner + outer) / math.pi
