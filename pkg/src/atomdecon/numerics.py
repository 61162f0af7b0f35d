"""Quadrature, the empirical characteristic function and the FFT grid engine.

Every estimator in the package reduces to a Fourier integral of the form

    (1/2pi) * int exp(-i t x) phi_emp(t) phi(h t) exp(sigma^2 t^2 / 2) dt

which is evaluated either pointwise by adaptive Simpson quadrature or on a
whole regular grid by two FFTs with Simpson weights.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import CoverageError, ExponentOverflow, MaxDepthExceeded, NumericalError

MAX_EXPONENT = 700.0
DEFAULT_TOL = 1e-9
DEFAULT_MAX_DEPTH = 40
DEFAULT_N_POINTS = 2**16
DEFAULT_COVERAGE = 64.0

# Chunk size (observations x frequencies) for the empirical characteristic function.
_CF_BLOCK = 2**22


def damping_exponent(sigma: float, bandwidth: float) -> float:
    """Return sigma^2 / (2 bandwidth^2), raising if exp() of it would overflow."""
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth!r}")
    expo = sigma * sigma / (2.0 * bandwidth * bandwidth)
    if expo > MAX_EXPONENT:
        raise ExponentOverflow(
            f"sigma^2/(2 h^2) = {expo:.4g} exceeds {MAX_EXPONENT:g} for "
            f"sigma={sigma:g}, h={bandwidth:g}; increase h (the bandwidth)"
        )
    return expo


@dataclass(frozen=True)
class Sample:
    """Observations X_1..X_n together with the known noise level sigma."""

    values: np.ndarray
    sigma: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size < 1:
            raise ValueError("a sample needs at least one observation")
        if not np.all(np.isfinite(values)):
            raise ValueError("sample values must be finite")
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be finite and non-negative, got {self.sigma!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sigma", float(self.sigma))

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n


def empirical_cf(sample: Sample, t) -> np.ndarray | complex:
    """Empirical characteristic function (1/n) sum_j exp(i t X_j).

    ``t`` may be a scalar or an array; the result has the same shape.
    """
    t_arr = np.asarray(t, dtype=float)
    flat = t_arr.ravel()
    x = sample.values
    out = np.empty(flat.size, dtype=complex)
    step = max(1, _CF_BLOCK // max(1, x.size))
    for start in range(0, flat.size, step):
        tt = flat[start:start + step]
        out[start:start + step] = np.exp(1j * np.outer(tt, x)).mean(axis=1)
    if t_arr.ndim == 0:
        return complex(out[0])
    return out.reshape(t_arr.shape)


def _as_vector_function(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def g(x: np.ndarray) -> np.ndarray:
        try:
            y = np.asarray(f(x), dtype=float)
        except TypeError:
            y = np.asarray(np.vectorize(f, otypes=[float])(x))
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape)
        return y

    return g


def integrate(f: Callable, a: float, b: float, tol: float = DEFAULT_TOL,
              max_depth: int = DEFAULT_MAX_DEPTH, panels: int = 16,
              breakpoints: Sequence[float] = ()) -> float:
    """Adaptive Simpson quadrature of ``f`` over [a, b].

    The interval is first cut into ``panels`` equal pieces; every piece is then
    refined independently until the Richardson estimate |S2 - S1| / 15 is below
    its share of ``tol`` (shares are proportional to length). All pending
    pieces are refined together, so ``f`` is called on arrays of abscissae;
    plain scalar functions are vectorized automatically.

    Raises
    ------
    MaxDepthExceeded
        If some piece still fails the test after ``max_depth`` halvings.

    Notes
    -----
    Extra ``breakpoints`` inside (a, b) are added to the initial panel edges.
    They keep narrow features (such as a boundary layer) from being missed
    by the coarse first pass.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if a == b:
        return 0.0
    if b < a:
        return -integrate(f, b, a, tol, max_depth, panels, breakpoints)
    fv = _as_vector_function(f)

    edges = np.linspace(a, b, panels + 1)
    extra = [float(p) for p in breakpoints if a < p < b]
    if extra:
        edges = np.unique(np.concatenate([edges, extra]))
        panels = edges.size - 1
    mids = 0.5 * (edges[:-1] + edges[1:])
    fe = fv(edges)
    fm = fv(mids)
    lo, hi, mid = edges[:-1], edges[1:], mids
    flo, fhi, fmid = fe[:-1], fe[1:], fm
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
    ptol = tol * (hi - lo) / (b - a)
    accepted: list[float] = []
    depth = 0
    if not (np.all(np.isfinite(fe)) and np.all(np.isfinite(fm))):
        raise ValueError("integrand is not finite on the integration range")
    while lo.size:
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        vals = fv(np.concatenate([lm, rm]))
        if not np.all(np.isfinite(vals)):
            raise ValueError("integrand is not finite on the integration range")
        flm, frm = vals[:lo.size], vals[lo.size:]
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        diff = left + right - whole
        ok = np.abs(diff) <= 15.0 * ptol
        if np.any(ok):
            accepted.extend((left[ok] + right[ok] + diff[ok] / 15.0).tolist())
        bad = ~ok
        if not np.any(bad):
            break
        depth += 1
        if depth > max_depth:
            worst = float(np.max(np.abs(diff[bad])))
            raise MaxDepthExceeded(
                f"adaptive Simpson did not converge within depth {max_depth} "
                f"(worst local error {worst:.3g})"
            )
        lo, mid, hi = lo[bad], mid[bad], hi[bad]
        flo, fmid, fhi = flo[bad], fmid[bad], fhi[bad]
        flm, frm = flm[bad], frm[bad]
        left, right = left[bad], right[bad]
        half = ptol[bad] / 2.0
        lo, mid, hi = (np.concatenate([lo, mid]), np.concatenate([lm[bad], rm[bad]]),
                       np.concatenate([mid, hi]))
        flo, fmid, fhi = (np.concatenate([flo, fmid]), np.concatenate([flm, frm]),
                          np.concatenate([fmid, fhi]))
        whole = np.concatenate([left, right])
        ptol = np.concatenate([half, half])
    return math.fsum(accepted)


def damped_breakpoints(expo: float) -> list[float]:
    """Points 1 - 2^k / expo in (0, 1) for integrands on [0, 1] weighted by exp(expo s^2).

    Such integrands concentrate in a layer of width about 1/expo below s = 1.
    """
    if expo <= 4.0:
        return []
    pts = []
    u = 0.25 / expo
    while u < 0.5:
        pts.append(1.0 - u)
        u *= 2.0
    return sorted(pts)


def simpson_weights(n_points: int, eta: float) -> np.ndarray:
    """Weights (eta/3)(3 + (-1)^j - delta_{j-1}), j = 1..N, i.e. eta/3 * [1, 4, 2, 4, ..., 2, 4]."""
    j = np.arange(1, n_points + 1)
    w = 3.0 + np.where(j % 2 == 0, 1.0, -1.0)
    w[0] -= 1.0
    return w * (eta / 3.0)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridConfig:
    """FFT grid: N frequency nodes eta*(j-1) and N spatial points x_u = -N delta/2 + delta (u-1).

    The spatial step is tied to the frequency step by delta * eta = 2 pi / N.
    """

    n_points: int
    eta: float

    def __post_init__(self):
        if not _is_power_of_two(int(self.n_points)):
            raise ValueError(f"n_points must be a power of two, got {self.n_points!r}")
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta!r}")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "eta", float(self.eta))

    @classmethod
    def for_bandwidth(cls, h: float, n_points: int = DEFAULT_N_POINTS,
                      coverage_factor: float = DEFAULT_COVERAGE) -> "GridConfig":
        """Grid whose frequency range N*eta equals coverage_factor / h."""
        return cls(n_points, coverage_factor / (h * n_points))

    @property
    def delta(self) -> float:
        return 2.0 * math.pi / (self.n_points * self.eta)

    @property
    def xs(self) -> np.ndarray:
        n = self.n_points
        return -n * self.delta / 2.0 + self.delta * np.arange(n)

    @property
    def frequencies(self) -> np.ndarray:
        return self.eta * np.arange(self.n_points)

    def covers(self, h: float) -> bool:
        return self.n_points * self.eta >= 1.0 / h

    def to_dict(self) -> dict:
        return {"n_points": self.n_points, "eta": self.eta, "delta": self.delta}


@dataclass
class DensityGrid:
    """Estimate values on a regular grid, as produced by the FFT engine."""

    xs: np.ndarray
    values: np.ndarray
    config: GridConfig
    estimator_tag: str
    meta: dict = field(default_factory=dict)

    def __call__(self, x):
        """Linear interpolation between neighbouring grid points (0 outside the grid)."""
        return np.interp(x, self.xs, self.values, left=0.0, right=0.0)

    def crop(self, lo: float, hi: float) -> "DensityGrid":
        keep = (self.xs >= lo) & (self.xs <= hi)
        return DensityGrid(self.xs[keep], self.values[keep], self.config,
                           self.estimator_tag, dict(self.meta))

    def clipped(self) -> "DensityGrid":
        """Copy with negative values set to zero and renormalized to unit mass on the grid."""
        vals = np.clip(self.values, 0.0, None)
        mass = vals.sum() * self.config.delta
        if mass > 0:
            vals = vals / mass
        return DensityGrid(self.xs.copy(), vals, self.config, self.estimator_tag,
                           dict(self.meta, clipped=True))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write("x,value\n")
        for x, v in zip(self.xs, self.values):
            buf.write(f"{float(x)!r},{float(v)!r}\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, newline="\n")
        return text

    def to_dict(self) -> dict:
        return {
            "xs": [float(x) for x in self.xs],
            "values": [float(v) for v in self.values],
            "config": self.config.to_dict(),
            "estimator_tag": self.estimator_tag,
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict())
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_json(cls, text: str) -> "DensityGrid":
        d = json.loads(text)
        cfg = GridConfig(d["config"]["n_points"], d["config"]["eta"])
        return cls(np.array(d["xs"], dtype=float), np.array(d["values"], dtype=float),
                   cfg, d["estimator_tag"])

    @classmethod
    def from_csv(cls, text: str, config: GridConfig, estimator_tag: str) -> "DensityGrid":
        data = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 0], data[:, 1], config, estimator_tag)


def fft_grid_eval(sample: Sample, ft_weight: Callable[[np.ndarray], np.ndarray], h: float,
                  config: GridConfig, damping: bool = True,
                  estimator_tag: str = "fhat") -> DensityGrid:
    """Evaluate (1/2pi) int exp(-itx) phi_emp(t) ft_weight(h t) exp(sigma^2 t^2/2) dt on the grid.

    The integral is split into the half-lines t > 0 and t < 0; each half is a
    Simpson-weighted sum over v_j = eta (j-1) that becomes one DFT because
    delta * eta = 2 pi / N. ``ft_weight`` must vanish outside [-1, 1].
    With ``damping=False`` the exp(sigma^2 t^2 / 2) factor is omitted.
    """
    if h <= 0:
        raise ValueError(f"bandwidth must be positive, got {h!r}")
    if not config.covers(h):
        raise CoverageError(
            f"N*eta = {config.n_points * config.eta:.4g} < 1/h = {1.0 / h:.4g}"
        )
    sigma = sample.sigma if damping else 0.0
    expo = damping_exponent(sigma, h)
    n = config.n_points
    v = config.frequencies
    active = np.nonzero(h * v <= 1.0)[0]
    va = v[active]

    psi = np.zeros(n, dtype=complex)
    damp = np.exp(expo * (h * va) ** 2)
    psi[active] = empirical_cf(sample, va) * np.asarray(ft_weight(h * va), dtype=float) * damp

    weights = simpson_weights(n, config.eta)
    # exp(i v_j N delta / 2) = exp(i pi (j-1)) = (-1)^(j-1)
    sign = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    a = sign * weights * psi
    first = np.fft.fft(a)
    second = np.fft.ifft(np.conj(a)) * n
    total = (first + second) / (2.0 * math.pi)

    scale = float(np.max(np.abs(total.real))) if n else 0.0
    if scale > 0 and float(np.max(np.abs(total.imag))) >= 1e-8 * scale:
        raise NumericalError("FFT result has a non-negligible imaginary part")
    return DensityGrid(config.xs, total.real.copy(), config, estimator_tag)


def as_sample(values: Sequence[float] | np.ndarray | Sample, sigma: float | None = None) -> Sample:
    if isinstance(values, Sample):
        return values
    if sigma is None:
        raise ValueError("sigma is required when passing raw values")
    return Sample(np.asarray(values, dtype=float), sigma)
