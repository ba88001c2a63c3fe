"""Averages along prime points on torus rotation systems, and equidistribution diagnostics."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError, NumericError, UndefinedMeasureError
from .numtheory import PrimeTable
from .surface import (
    SurfaceMeasure,
    fourier_numerator_array,
    gamma_member_mask,
    omega_hat,
    rep_count_array,
    rep_weight_array,
)


@dataclass(frozen=True)
class TorusSystem:
    """Commuting coordinate rotations x -> x + alpha_i e_i on the n-torus.

    ``rational_flags`` records which coordinates are declared rational;
    rationality is a declared property of the model, never decided from
    the float values.
    """

    alpha: tuple
    rational_flags: Optional[tuple] = None

    def __post_init__(self):
        if len(self.alpha) == 0:
            raise InputError("rotation vector must be nonempty")
        if self.rational_flags is not None and len(self.rational_flags) != len(self.alpha):
            raise InputError("one rationality flag per coordinate")

    @property
    def n(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class TrigPolynomial:
    """Finite combination of harmonics e(m . x) with complex coefficients."""

    terms: tuple  # of (frequency tuple, coefficient)

    def __post_init__(self):
        if len(self.terms) == 0:
            raise InputError("trigonometric polynomial needs at least one term")
        dims = {len(m) for m, _ in self.terms}
        if len(dims) != 1:
            raise InputError("all frequencies must share one dimension")

    @property
    def n(self) -> int:
        return len(self.terms[0][0])

    @classmethod
    def harmonic(cls, m):
        return cls(terms=((tuple(int(v) for v in m), 1.0 + 0j),))

    @classmethod
    def constant(cls, n: int, value=1.0):
        return cls(terms=(((0,) * n, complex(value)),))

    @property
    def mean(self) -> complex:
        zero = (0,) * self.n
        return sum((c for m, c in self.terms if m == zero), 0j)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(len(points), dtype=complex)
        for m, c in self.terms:
            out += c * np.exp(2j * np.pi * (points @ np.asarray(m, dtype=float)))
        return out


def ergodic_average(
    system: TorusSystem,
    f: TrigPolynomial,
    measure: SurfaceMeasure,
    x,
) -> complex:
    """Weighted average of f over the orbit points x + (p_1 alpha_1, ..., p_n alpha_n).

    For a single harmonic e(m . x) the result equals
    e(m . x) * omega_hat(m_1 alpha_1, ..., m_n alpha_n); the module checks
    this identity on the fly for one-term polynomials (frequencies enter
    the transform as m_i alpha_i, without conjugation).
    """
    if measure.R <= 0:
        raise UndefinedMeasureError("measure has zero mass")
    x = np.asarray(x, dtype=float)
    if len(x) != measure.instance.n or f.n != measure.instance.n or system.n != measure.instance.n:
        raise InputError("system, function, measure, and point must share one dimension")
    alpha = np.asarray(system.alpha, dtype=float)
    orbit = (x[None, :] + measure.representations * alpha[None, :]) % 1.0
    value = complex((measure.weights * f(orbit)).sum() / measure.R)
    if len(f.terms) == 1:
        m, c = f.terms[0]
        freq = np.asarray(m, dtype=float) * alpha
        predicted = c * np.exp(2j * np.pi * float(np.dot(m, x))) * omega_hat(measure, freq)
        if abs(value - predicted) > 1e-9 * (1.0 + abs(value)):
            raise NumericError("harmonic average disagrees with its transform value")
    return value


@dataclass(frozen=True)
class WeylBlock:
    """Largest transform modulus over one dyadic block of admissible lam."""

    lam_lo: int
    lam_hi: int
    count: int
    max_abs: float
    argmax_lam: int


def weyl_decay_scan(
    k: int,
    n: int,
    xi,
    lam_min: int,
    num_blocks: int,
    table: PrimeTable,
) -> list[WeylBlock]:
    """max |omega_hat(xi)| over admissible lam in [L, 2L), L = lam_min * 2^j.

    Computed for the whole range at once by convolving the per-coordinate
    value arrays, so the scan touches every admissible lam below the top
    block without per-lam enumeration.
    """
    if lam_min < 1 or num_blocks < 1:
        raise InputError("need lam_min >= 1 and num_blocks >= 1")
    lam_max = lam_min * 2**num_blocks - 1
    numer = fourier_numerator_array(k, n, lam_max, table, xi)
    weights = rep_weight_array(k, n, lam_max, table)
    counts = rep_count_array(k, n, lam_max, table)
    lams = np.arange(lam_max + 1)
    valid = (counts > 0) & gamma_member_mask(k, n, lams)
    blocks = []
    for j in range(num_blocks):
        lo, hi = lam_min * 2**j, lam_min * 2 ** (j + 1)
        idx = np.flatnonzero(valid[lo:hi]) + lo
        if len(idx) == 0:
            blocks.append(WeylBlock(lam_lo=lo, lam_hi=hi, count=0, max_abs=0.0, argmax_lam=0))
            continue
        mags = np.abs(numer[idx]) / weights[idx]
        best = int(np.argmax(mags))
        blocks.append(
            WeylBlock(
                lam_lo=lo,
                lam_hi=hi,
                count=len(idx),
                max_abs=float(mags[best]),
                argmax_lam=int(idx[best]),
            )
        )
    return blocks


def discrepancy(points, num_boxes: int = 10_000, seed: int = 0) -> float:
    """Randomized star-discrepancy estimate of a point set on the torus.

    Samples ``num_boxes`` anchored boxes [0, b) and reports the largest
    deviation between the empirical fraction and the box volume.  This is
    an estimator (a lower bound up to sampling): exact star discrepancy
    is exponential in the dimension.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float)) % 1.0
    if points.size == 0:
        raise InputError("discrepancy needs a nonempty point set")
    m, n = points.shape
    rng = np.random.default_rng(seed)
    worst = 0.0
    chunk = max(1, int(2_000_000 // max(m * n, 1)))
    done = 0
    while done < num_boxes:
        take = min(chunk, num_boxes - done)
        boxes = rng.random((take, n))
        inside = (points[None, :, :] < boxes[:, None, :]).all(axis=2).sum(axis=1) / m
        vols = boxes.prod(axis=1)
        worst = max(worst, float(np.abs(inside - vols).max()))
        done += take
    return worst


def orbit_points(measure: SurfaceMeasure, alpha) -> np.ndarray:
    """The set {(alpha_1 p_1, ..., alpha_n p_n) mod 1 : solution p}."""
    alpha = np.asarray(alpha, dtype=float)
    return (measure.representations * alpha[None, :]) % 1.0
