"""Discrete convolution averages, maximal functions, and norm probes on finite grids."""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .errors import InputError, UndefinedMeasureError
from .numtheory import PrimeTable
from .surface import (
    SurfaceMeasure,
    gamma_member_mask,
    max_weight_array,
    rep_count_array,
    rep_weight_array,
)


@dataclass(frozen=True)
class GridFunction:
    """Complex values on the centered box {-K, ..., K}^n, dense storage."""

    K: int
    values: np.ndarray

    def __post_init__(self):
        if self.K < 1:
            raise InputError("box radius K must be >= 1")
        side = 2 * self.K + 1
        if self.values.shape != (side,) * self.values.ndim:
            raise InputError("values must form a (2K+1)^n cube")

    @property
    def n(self) -> int:
        return self.values.ndim

    @classmethod
    def zeros(cls, n: int, K: int):
        return cls(K=K, values=np.zeros((2 * K + 1,) * n, dtype=complex))

    @classmethod
    def delta(cls, n: int, K: int):
        g = cls.zeros(n, K)
        g.values[(K,) * n] = 1.0
        return g

    @classmethod
    def constant(cls, n: int, K: int, value=1.0):
        g = cls.zeros(n, K)
        g.values[...] = value
        return g

    def at(self, point) -> complex:
        if any(abs(int(p)) > self.K for p in point):
            raise InputError(f"point {tuple(point)} lies outside the radius-{self.K} box")
        idx = tuple(int(p) + self.K for p in point)
        return complex(self.values[idx])


def _pruned(measure: SurfaceMeasure, K: int):
    """Solutions that can move any box point into the box again."""
    reps = measure.representations
    keep = (np.abs(reps) <= 2 * K).all(axis=1)
    return reps[keep], measure.weights[keep]


def _convolve_direct(f: GridFunction, reps, weights) -> np.ndarray:
    K = f.K
    out = np.zeros_like(f.values)
    for p, w in zip(reps, weights):
        dst = []
        src = []
        for pi in p:
            lo = max(-K, -K + pi)
            hi = min(K, K + pi)
            if lo > hi:
                break
            dst.append(slice(lo + K, hi + K + 1))
            src.append(slice(lo - pi + K, hi - pi + K + 1))
        else:
            out[tuple(dst)] += w * f.values[tuple(src)]
    return out


def _convolve_fft(f: GridFunction, reps, weights) -> np.ndarray:
    K, n = f.K, f.n
    kern = np.zeros((4 * K + 1,) * n, dtype=float)
    np.add.at(kern, tuple((reps + 2 * K).T), weights)
    full = fftconvolve(f.values, kern, mode="full")
    window = (slice(2 * K, 4 * K + 1),) * n
    return full[window]


def convolve(
    f: GridFunction,
    measure: SurfaceMeasure,
    normalized: bool = True,
    method: str = "auto",
) -> GridFunction:
    """(measure * f)(x) = sum over solutions p of weight(p) f(x - p), on the box.

    f is treated as zero outside its box.  ``method`` selects the sparse
    accumulation path ("direct"), the transform path ("fft"), or a size
    heuristic ("auto"); the two paths agree to roundoff.
    """
    if f.n != measure.instance.n:
        raise InputError("grid dimension does not match the measure")
    if normalized and measure.R <= 0:
        raise UndefinedMeasureError("cannot normalize a zero-mass measure")
    reps, weights = _pruned(measure, f.K)
    if method == "auto":
        method = "fft" if len(reps) > 64 else "direct"
    if method == "direct":
        out = _convolve_direct(f, reps, weights)
    elif method == "fft":
        out = _convolve_fft(f, reps, weights)
    else:
        raise InputError(f"unknown convolution method {method!r}")
    if normalized:
        out = out / measure.R
    return GridFunction(K=f.K, values=out)


def maximal(f: GridFunction, measures: Sequence[SurfaceMeasure]) -> GridFunction:
    """Pointwise supremum of |measure * f| over the given family."""
    if len(measures) == 0:
        raise InputError("maximal function needs at least one measure")
    kn = {(m.instance.k, m.instance.n) for m in measures}
    if len(kn) != 1:
        raise InputError("measures must share one (k, n)")
    out = np.zeros(f.values.shape)
    for m in measures:
        out = np.maximum(out, np.abs(convolve(f, m).values))
    return GridFunction(K=f.K, values=out.astype(complex))


def lp_norm(f: GridFunction, p: float) -> float:
    """Discrete p-norm over the box; p = inf gives the sup norm."""
    mags = np.abs(f.values)
    if p == np.inf or p == float("inf"):
        return float(mags.max())
    if p < 1:
        raise InputError("p-norm needs p >= 1")
    return float((mags**p).sum() ** (1.0 / p))


@dataclass(frozen=True)
class OperatorReport:
    """Norm growth of a maximal operator over a family of cutoffs."""

    p: float
    lam_values: tuple
    norms: tuple
    slope: Optional[float]


def delta_scaling_probe(
    k: int,
    n: int,
    p: float,
    lam_values: Sequence[int],
    table: PrimeTable,
) -> OperatorReport:
    """lp norm of sup over admissible lam <= L of the delta-convolution, per cutoff L.

    Distinct lam have disjoint supports (a lattice point determines its
    power sum), so the supremum splits and the p-th power of the norm is
    an additive total over lam.  The fitted slope is the log-log
    regression of the norm against the cutoff; growth is expected for
    p < n/(n - k), while p = inf just reports the largest single weight.
    """
    lam_values = sorted(int(v) for v in lam_values)
    lam_max = lam_values[-1]
    weight_tot = rep_weight_array(k, n, lam_max, table)
    counts = rep_count_array(k, n, lam_max, table)
    lams = np.arange(lam_max + 1)
    gate = (counts > 0) & gamma_member_mask(k, n, lams)
    if np.isinf(p):
        ratio = np.zeros(lam_max + 1)
        maxw = max_weight_array(k, n, lam_max, table)
        ratio[gate] = maxw[gate] / weight_tot[gate]
        running = np.maximum.accumulate(ratio)
        norms = [float(running[L]) for L in lam_values]
    else:
        if p < 1:
            raise InputError("p-norm needs p >= 1")
        powsum = rep_weight_array(k, n, lam_max, table, power=p)
        contrib = np.zeros(lam_max + 1)
        contrib[gate] = powsum[gate] / weight_tot[gate] ** p
        running = np.cumsum(contrib)
        norms = [float(running[L] ** (1.0 / p)) for L in lam_values]
    slope = None
    if len(lam_values) >= 2 and all(v > 0 for v in norms):
        slope = float(np.polyfit(np.log(lam_values), np.log(norms), 1)[0])
    return OperatorReport(p=p, lam_values=tuple(lam_values), norms=tuple(norms), slope=slope)
