"""Ground-truth models, seeded sampling and the Monte Carlo harness.

Samples follow X = B V + sigma Z with P(B = 0) = p. Randomness comes from
Philox (counter-based) generators keyed by ``numpy.random.SeedSequence``;
B, V and Z use three separate child streams, so the j-th observation
depends only on the seed and j, not on n. Gamma variates use numpy's
Marsaglia-Tsang squeeze/rejection sampler.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special, stats

from .asymptotics import asymptotic_sd_p, corrected_sd_p
from .errors import DegenerateModel, EmptyInput
from .estimators import p_raw
from .kernels import ATOM_K, BUILTIN_KERNELS, Kernel, get_kernel
from .numerics import Sample


@dataclass(frozen=True)
class NormalFamily:
    mean: float
    variance: float

    def pdf(self, v):
        return stats.norm.pdf(v, self.mean, math.sqrt(self.variance))

    def cf(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * self.mean * t - 0.5 * self.variance * t * t)

    @property
    def expectation(self) -> float:
        return self.mean

    @property
    def var(self) -> float:
        return self.variance

    def support(self) -> tuple[float, float]:
        sd = math.sqrt(self.variance)
        return self.mean - 12.0 * sd, self.mean + 12.0 * sd

    def cf_cutoff(self, eps: float = 1e-17) -> float:
        return math.sqrt(-2.0 * math.log(eps) / self.variance)

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.mean, math.sqrt(self.variance), size)

    def describe(self) -> str:
        return f"normal:{self.mean:g},{self.variance:g}"


@dataclass(frozen=True)
class GammaFamily:
    """Gamma(shape, rate) density v^(a-1) e^(-rate v) rate^a / Gamma(a) on v > 0."""

    shape: float
    rate: float = 1.0

    def pdf(self, v):
        return stats.gamma.pdf(v, self.shape, scale=1.0 / self.rate)

    def cf(self, t):
        t = np.asarray(t, dtype=float)
        return (1.0 - 1j * t / self.rate) ** (-self.shape)

    @property
    def expectation(self) -> float:
        return self.shape / self.rate

    @property
    def var(self) -> float:
        return self.shape / self.rate ** 2

    def support(self) -> tuple[float, float]:
        return 0.0, float(stats.gamma.isf(1e-17, self.shape, scale=1.0 / self.rate))

    def cf_cutoff(self, eps: float = 1e-17) -> float:
        # |cf(t)| = (1 + (t/rate)^2)^(-shape/2) <= (t/rate)^(-shape); tail integral ~ t^(1-shape)
        return self.rate * eps ** (-1.0 / (self.shape - 1.0)) if self.shape > 1 else 1e6

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.standard_gamma(self.shape, size) / self.rate

    def describe(self) -> str:
        return f"gamma:{self.shape:g}" + (f",{self.rate:g}" if self.rate != 1.0 else "")


@dataclass(frozen=True)
class MixtureFamily:
    weights: tuple[float, ...]
    means: tuple[float, ...]
    variances: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.weights) == len(self.means) == len(self.variances)):
            raise ValueError("mixture weights, means and variances must have equal length")
        if abs(sum(self.weights) - 1.0) > 1e-12 or min(self.weights) < 0:
            raise ValueError("mixture weights must be non-negative and sum to one")

    def _parts(self):
        return [NormalFamily(m, v) for m, v in zip(self.means, self.variances)]

    def pdf(self, v):
        return sum(w * part.pdf(v) for w, part in zip(self.weights, self._parts()))

    def cf(self, t):
        return sum(w * part.cf(t) for w, part in zip(self.weights, self._parts()))

    @property
    def expectation(self) -> float:
        return float(np.dot(self.weights, self.means))

    @property
    def var(self) -> float:
        second = sum(w * (v + m * m) for w, m, v in zip(self.weights, self.means, self.variances))
        return second - self.expectation ** 2

    def support(self) -> tuple[float, float]:
        spans = [part.support() for part in self._parts()]
        return min(s[0] for s in spans), max(s[1] for s in spans)

    def cf_cutoff(self, eps: float = 1e-17) -> float:
        return max(part.cf_cutoff(eps) for part in self._parts())

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        # one uniform pair per observation keeps draws prefix-stable in ``size``
        u = rng.random((size, 2))
        cum = np.cumsum(self.weights)
        comp = np.minimum(np.searchsorted(cum, u[:, 0], side="right"), len(cum) - 1)
        means = np.asarray(self.means)[comp]
        sds = np.sqrt(np.asarray(self.variances))[comp]
        return means + sds * special.ndtri(u[:, 1] + 2.0**-54)

    def describe(self) -> str:
        parts = ",".join(f"{w:g},{m:g},{v:g}" for w, m, v in zip(self.weights, self.means, self.variances))
        return f"mixture:{parts}"


Family = NormalFamily | GammaFamily | MixtureFamily


@dataclass(frozen=True)
class ModelSpec:
    """Atom mass p, law of V and noise level sigma."""

    p: float
    family: Family
    sigma: float

    def __post_init__(self):
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"p must lie in [0, 1), got {self.p!r}")
        if not self.sigma >= 0.0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma!r}")

    @property
    def var_y(self) -> float:
        return (1.0 - self.p) * (self.family.var + self.p * self.family.expectation ** 2)

    @property
    def mean_x(self) -> float:
        return (1.0 - self.p) * self.family.expectation

    def cf_y(self, t):
        return self.p + (1.0 - self.p) * self.family.cf(t)

    def cf_x(self, t):
        t = np.asarray(t, dtype=float)
        return self.cf_y(t) * np.exp(-0.5 * self.sigma ** 2 * t * t)


def parse_family(text: str) -> Family:
    """Parse ``normal:mean,var``, ``gamma:shape[,rate]`` or ``mixture:w,m,v,w,m,v,...``."""
    try:
        kind, _, args = text.partition(":")
        nums = [float(a) for a in args.split(",")] if args else []
        if kind == "normal" and len(nums) == 2 and nums[1] > 0:
            return NormalFamily(nums[0], nums[1])
        if kind == "gamma" and len(nums) in (1, 2) and nums[0] > 0:
            return GammaFamily(*nums)
        if kind == "mixture" and nums and len(nums) % 3 == 0:
            w, m, v = nums[0::3], nums[1::3], nums[2::3]
            return MixtureFamily(tuple(w), tuple(m), tuple(v))
    except ValueError as exc:
        raise ValueError(f"invalid model {text!r}: {exc}") from None
    raise ValueError(f"invalid model {text!r}")


def nsr(model: ModelSpec) -> float:
    """Noise-to-signal ratio 100 * sigma^2 / Var[Y], in percent."""
    var_y = model.var_y
    if model.sigma == 0.0:
        return 0.0
    if var_y <= 0.0:
        raise DegenerateModel("Var[Y] = 0; the noise-to-signal ratio is undefined")
    return 100.0 * model.sigma ** 2 / var_y


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, (tuple, list)):
        return np.random.SeedSequence([int(s) for s in seed])
    return np.random.SeedSequence(int(seed))


def draw_sample(model: ModelSpec, n: int, seed) -> Sample:
    """n observations B_j V_j + sigma Z_j; ``seed`` is an int or a tuple of ints."""
    if n < 1:
        raise ValueError("n must be at least 1")
    s_b, s_v, s_z = _seed_sequence(seed).spawn(3)
    rng_b = np.random.Generator(np.random.Philox(s_b))
    rng_v = np.random.Generator(np.random.Philox(s_v))
    rng_z = np.random.Generator(np.random.Philox(s_z))
    keep = rng_b.random(n) >= model.p
    v = model.family.draw(rng_v, n)
    z = rng_z.standard_normal(n)
    return Sample(np.where(keep, v, 0.0) + model.sigma * z, model.sigma)


@dataclass
class MCSummary:
    g: float
    R: int
    n: int
    estimates: np.ndarray
    sample_mean: float
    sample_sd: float
    asymptotic_sd: float
    corrected_sd: float
    seed: int
    kernel: str = "atom_k"
    extra: dict = field(default_factory=dict)

    def row(self) -> dict:
        return {"g": self.g, "R": self.R, "n": self.n, "mean": self.sample_mean,
                "sd": self.sample_sd, "asymptotic_sd": self.asymptotic_sd,
                "corrected_sd": self.corrected_sd, "seed": self.seed}

    def to_dict(self) -> dict:
        d = self.row()
        d["estimates"] = [float(e) for e in self.estimates]
        return d


CSV_COLUMNS = ["g", "R", "n", "mean", "sd", "asymptotic_sd", "corrected_sd", "seed"]


def summaries_to_csv(summaries: Sequence[MCSummary]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for s in summaries:
        r = s.row()
        writer.writerow([repr(float(r[c])) if isinstance(r[c], float) else r[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def summaries_to_json(summaries: Sequence[MCSummary]) -> str:
    return json.dumps([s.to_dict() for s in summaries])


def _one_replication(args) -> float:
    model, n, seed_key, g, kernel_name = args
    return p_raw(draw_sample(model, n, seed_key), g, get_kernel(kernel_name))


def mc_study(model: ModelSpec, n: int, bandwidths: Sequence[float], R: int, seed: int,
             kernel_k: Kernel | str = ATOM_K, workers: int = 1) -> list[MCSummary]:
    """Repeat the atom estimator on R fresh samples for every bandwidth.

    Replication r at bandwidth index i uses the seed key (seed, i, r), so
    results do not depend on ``workers``.
    """
    if R < 2:
        raise ValueError("R must be at least 2")
    kernel_k = get_kernel(kernel_k)
    out = []
    for i, g in enumerate(bandwidths):
        # builtin kernels travel by name so jobs pickle for worker processes
        ref = kernel_k.name if BUILTIN_KERNELS.get(kernel_k.name) is kernel_k else kernel_k
        jobs = [(model, n, (seed, i, r), g, ref) for r in range(R)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                est = np.array(list(pool.map(_one_replication, jobs, chunksize=8)))
        else:
            est = np.array([_one_replication(j) for j in jobs])
        out.append(MCSummary(
            g=float(g), R=R, n=n, estimates=est,
            sample_mean=float(np.mean(est)), sample_sd=float(np.std(est, ddof=1)),
            asymptotic_sd=asymptotic_sd_p(g, n, model.sigma, kernel_k),
            corrected_sd=corrected_sd_p(g, n, model.sigma, kernel_k),
            seed=seed, kernel=kernel_k.name,
        ))
    return out


def histogram(values: Sequence[float], bin_count: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Equal-width bins over [min, max]; the last bin is closed on the right."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EmptyInput("histogram of an empty sequence")
    if bin_count < 1:
        raise ValueError("bin_count must be at least 1")
    counts, edges = np.histogram(values, bins=bin_count)
    return edges, counts


PRESETS = {
    "table1": dict(model=ModelSpec(0.1, NormalFamily(3.0, 9.0), 1.0), n=1000,
                   bandwidths=[0.5, 0.55, 0.6, 0.65]),
    "table2": dict(model=ModelSpec(0.1, NormalFamily(3.0, 9.0), 0.3), n=500,
                   bandwidths=[0.45, 0.5, 0.6, 0.65]),
    "fig5": dict(model=ModelSpec(0.1, NormalFamily(3.0, 9.0), 1.0), n=1000, h=0.58, g=0.5),
    "fig7": dict(model=ModelSpec(0.25, GammaFamily(8.0), 1.0), n=1000, h=0.6, g=0.6),
}
