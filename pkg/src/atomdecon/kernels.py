"""Band-limited smoothing kernels and their Fourier transforms.

A kernel is described by its Fourier transform phi, supported on [-1, 1];
the kernel itself is recovered as

    w(x) = (1/2pi) int_{-1}^{1} exp(-i t x) phi(t) dt = (1/pi) int_0^1 cos(t x) phi(t) dt.

Two families are used. ``w``-type kernels have phi(0) = 1 (unit mass) and
smooth the density estimate; ``k``-type kernels have int phi = 2 and vanish
to order gamma at the origin, which is what the atom estimator needs.
For even polynomial transforms the closed form follows from repeated
integration by parts,

    int_0^1 phi(t) cos(t x) dt = sum_m (-1)^m [phi^(2m)(1) sin x / x^(2m+1)
                                             + phi^(2m+1)(1) cos x / x^(2m+2)],

which is exact but cancels catastrophically for small |x|; there the
Gauss-Legendre inverse transform is used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss
from scipy.special import sici

from .errors import NonIntegrableMoment
from .numerics import integrate

MAX_MOMENT_ORDER = 12


@dataclass(frozen=True, eq=False)
class Kernel:
    """A smoothing kernel described through its Fourier transform.

    Attributes
    ----------
    name : str
    ft : callable
        Vectorized t -> phi(t); must return 0 for |t| > 1.
    kind : {"w", "k"}
    alpha, edge_const : float
        phi(1 - t) ~ edge_const * t**alpha as t -> 0 (A for w-type, C for k-type).
    origin_const, origin_order : float or None
        phi(t) ~ origin_const * t**origin_order as t -> 0 (B, gamma); k-type only.
    poly : Polynomial or None
        phi on [-1, 1] as an even polynomial, when available.
    switch_radius : float
        Below this |x| the closed form is evaluated by quadrature.
    """

    name: str
    ft: Callable[[np.ndarray], np.ndarray]
    kind: str
    alpha: float
    edge_const: float
    origin_const: float | None = None
    origin_order: float | None = None
    poly: Polynomial | None = None
    switch_radius: float = 0.5

    def __post_init__(self):
        if self.kind not in ("w", "k"):
            raise ValueError(f"kind must be 'w' or 'k', got {self.kind!r}")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.kind == "k" and (self.origin_const is None or self.origin_order is None):
            raise ValueError("k-type kernels need origin_const (B) and origin_order (gamma)")

    @classmethod
    def from_polynomial(cls, name: str, coeffs, kind: str, switch_radius: float = 0.5,
                        origin_const: float | None = None,
                        origin_order: float | None = None) -> "Kernel":
        """Kernel whose transform is the polynomial sum_i coeffs[i] t**i on [-1, 1].

        The edge expansion (alpha, edge constant) is read off the Taylor
        coefficients of phi at t = 1.
        """
        poly = Polynomial(np.asarray(coeffs, dtype=float))
        odd = poly.coef[1::2]
        if np.any(odd != 0):
            raise ValueError("the transform polynomial must be even")
        alpha, edge = _edge_expansion(poly)
        return cls(name=name, ft=_polynomial_ft(poly), kind=kind, alpha=float(alpha),
                   edge_const=edge, origin_const=origin_const, origin_order=origin_order,
                   poly=poly, switch_radius=switch_radius)

    def __call__(self, x):
        return eval_closed_form(self, x)

    @cached_property
    def ft_integral(self) -> float:
        return 2.0 * integrate(self.ft, 0.0, 1.0, tol=1e-13)

    @cached_property
    def edge_derivatives(self) -> np.ndarray:
        """phi^(m)(1) for m = 0..deg (polynomial kernels only)."""
        if self.poly is None:
            raise ValueError(f"kernel {self.name!r} has no polynomial transform")
        p = self.poly
        out = []
        for _ in range(p.degree() + 1):
            out.append(float(p(1.0)))
            p = p.deriv()
        return np.array(out)

    @property
    def tail_order(self) -> int | None:
        """d such that the kernel decays like |x|^-d (oscillating); polynomial kernels only."""
        if self.poly is None:
            return None
        nz = np.nonzero(self.edge_derivatives)[0]
        return int(nz[0]) + 1

    def sup_ft(self) -> float:
        t = np.linspace(0.0, 1.0, 20001)
        return float(np.max(np.abs(self.ft(t))))

    def __repr__(self) -> str:
        return f"Kernel(name={self.name!r}, kind={self.kind!r}, alpha={self.alpha}, edge_const={self.edge_const})"


def _polynomial_ft(poly: Polynomial):
    # near the edge the monomial form cancels badly, so expand in u = 1 - |t| there
    edge = poly(Polynomial([1.0, -1.0]))

    def ft(t):
        t = np.asarray(t, dtype=float)
        a = np.abs(t)
        inner = np.where(a < 0.5, poly(t), edge(1.0 - a))
        return np.where(a <= 1.0, inner, 0.0)

    return ft


def _edge_expansion(poly: Polynomial) -> tuple[int, float]:
    # phi(1 - t) = sum_m phi^(m)(1) (-t)^m / m!
    p = poly
    for m in range(poly.degree() + 1):
        val = float(p(1.0))
        if val != 0.0:
            return m, val * (-1) ** m / math.factorial(m)
        p = p.deriv()
    raise ValueError("zero polynomial")


def eval_ft(kernel: Kernel, t):
    """phi(t), exactly zero outside [-1, 1]."""
    t_arr = np.asarray(t, dtype=float)
    out = np.where(np.abs(t_arr) <= 1.0, kernel.ft(np.clip(t_arr, -1.0, 1.0)), 0.0)
    return float(out) if out.ndim == 0 else out


def _quadrature_branch(kernel: Kernel, x: np.ndarray) -> np.ndarray:
    """(1/pi) int_0^1 phi(t) cos(t x) dt by Gauss-Legendre; node count grows with |x|."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    if x.size == 0:
        return out
    ax = np.abs(x)
    # bucket by magnitude so each bucket uses enough nodes for its largest |x|
    buckets = np.ceil(np.log2(np.maximum(ax, 1.0))).astype(int)
    for b in np.unique(buckets):
        sel = buckets == b
        nodes = 48 + int(1.5 * 2.0 ** b)
        s, wts = leggauss(nodes)
        t = 0.5 * (s + 1.0)
        phi_w = 0.5 * wts * kernel.ft(t)
        out[sel] = np.cos(np.outer(x[sel], t)) @ phi_w / math.pi
    return out


def _edge_series(kernel: Kernel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    d = kernel.edge_derivatives
    s, c = np.sin(x), np.cos(x)
    total = np.zeros_like(x)
    inv = 1.0 / x
    power = inv.copy()
    for m, dm in enumerate(d):
        sign = -1.0 if (m // 2) % 2 else 1.0
        if dm != 0.0:
            total += sign * dm * (s if m % 2 == 0 else c) * power
        power = power * inv
    return total / math.pi


def eval_closed_form(kernel: Kernel, x):
    """Kernel value w(x) for the transform phi under the 1/(2 pi) inversion convention."""
    x_arr = np.asarray(x, dtype=float)
    flat = x_arr.ravel()
    out = np.empty_like(flat)
    if kernel.poly is None:
        out[:] = _quadrature_branch(kernel, flat)
    else:
        near = np.abs(flat) < kernel.switch_radius
        out[near] = _quadrature_branch(kernel, flat[near])
        out[~near] = _edge_series(kernel, flat[~near])
    if x_arr.ndim == 0:
        return float(out[0])
    return out.reshape(x_arr.shape)


def inverse_ft_reference(kernel: Kernel, x: float, tol: float = 1e-12) -> float:
    """Independent adaptive-Simpson evaluation of (1/2pi) int cos(t x) phi(t) dt."""
    return integrate(lambda t: np.cos(t * x) * kernel.ft(t), 0.0, 1.0, tol=tol) / math.pi


def fourier_pair_residual(kernel: Kernel, xs=None) -> float:
    """Max |closed form - inverse-transform quadrature| over ``xs`` (default 101 points on [-20, 20])."""
    if xs is None:
        xs = np.linspace(-20.0, 20.0, 101)
    closed = eval_closed_form(kernel, np.asarray(xs, dtype=float))
    ref = np.array([inverse_ft_reference(kernel, float(x)) for x in xs])
    return float(np.max(np.abs(closed - ref)))


def edge_expansion_error(kernel: Kernel, t: float = 1e-4) -> float:
    """Relative error |phi(1-t)/t^alpha - const| / const at a small t."""
    ratio = float(kernel.ft(np.array([1.0 - t]))[0]) / t ** kernel.alpha
    return abs(ratio - kernel.edge_const) / abs(kernel.edge_const)


def origin_expansion_error(kernel: Kernel, t: float = 1e-4) -> float:
    if kernel.origin_const is None:
        raise ValueError(f"kernel {kernel.name!r} has no origin expansion")
    ratio = float(kernel.ft(np.array([t]))[0]) / t ** kernel.origin_order
    return abs(ratio - kernel.origin_const) / abs(kernel.origin_const)


def _tail_integrals(R: float, m_max: int) -> tuple[np.ndarray, np.ndarray]:
    """S_m = int_R^inf sin(x) x^-m dx and C_m = int_R^inf cos(x) x^-m dx for m = 1..m_max."""
    si, ci = sici(R)
    S = np.zeros(m_max + 1)
    C = np.zeros(m_max + 1)
    S[1] = math.pi / 2 - si
    C[1] = -ci
    for m in range(2, m_max + 1):
        S[m] = (math.sin(R) * R ** (1 - m) + C[m - 1]) / (m - 1)
        C[m] = (math.cos(R) * R ** (1 - m) - S[m - 1]) / (m - 1)
    return S, C


def kernel_moment(kernel: Kernel, j: int, tol: float = 1e-6, radius: float = 20.0 * math.pi) -> float:
    """int x^j w(x) dx over the real line.

    The kernel tails oscillate and decay like |x|^-(alpha+1), so moments up to
    order alpha exist as (conditionally convergent) improper integrals. The
    integral is split at ``radius``: the core is integrated by adaptive
    Simpson to ``tol`` and the tail beyond is summed exactly from the
    integration-by-parts expansion using generalized sine/cosine integrals.

    Raises
    ------
    NonIntegrableMoment
        If ``j`` exceeds the order allowed by the kernel's tail.
    """
    j = int(j)
    if j < 0:
        raise ValueError("moment order must be non-negative")
    if j > MAX_MOMENT_ORDER:
        raise ValueError(f"moment order must be at most {MAX_MOMENT_ORDER}")
    if kernel.poly is None:
        raise ValueError(f"moments need a polynomial transform; kernel {kernel.name!r} has none")
    d = kernel.tail_order
    if j >= d:
        raise NonIntegrableMoment(
            f"x^{j} w(x) is not integrable for kernel {kernel.name!r} (tail ~ |x|^-{d})"
        )
    if j % 2 == 1:
        return 0.0

    core = integrate(lambda x: x ** j * eval_closed_form(kernel, x), 0.0, radius, tol=tol / 4)
    derivs = kernel.edge_derivatives
    S, C = _tail_integrals(radius, len(derivs) + 1)
    tail = 0.0
    for m, dm in enumerate(derivs):
        if dm == 0.0:
            continue
        sign = -1.0 if (m // 2) % 2 else 1.0
        trig = S if m % 2 == 0 else C
        tail += sign * dm * trig[m + 1 - j]
    return 2.0 * (core + tail / math.pi)


DECONV_W = Kernel.from_polynomial("deconv_w", [1.0, 0.0, -2.0, 0.0, 1.0], kind="w")
ATOM_K = Kernel.from_polynomial(
    "atom_k", 693.0 / 8.0 * np.array([0, 0, 0, 0, 0, 0, 1.0, 0, -2.0, 0, 1.0]), kind="k",
    switch_radius=6.0, origin_const=693.0 / 8.0, origin_order=6.0,
)
SEXTIC_W = Kernel.from_polynomial("sextic_w", [1.0, 0.0, -3.0, 0.0, 3.0, 0.0, -1.0], kind="w",
                                  switch_radius=2.0)

BUILTIN_KERNELS = {k.name: k for k in (DECONV_W, ATOM_K, SEXTIC_W)}


def get_kernel(name: str | Kernel) -> Kernel:
    if isinstance(name, Kernel):
        return name
    try:
        return BUILTIN_KERNELS[name]
    except KeyError:
        raise KeyError(f"unknown kernel {name!r}; choose from {sorted(BUILTIN_KERNELS)}") from None
