"""Prime points on diagonal surfaces and the approximation of their Fourier transform.

Central objects: the admissible progressions for x_1^k + ... + x_n^k = lam
over primes, the weighted representation measure, its Fourier transform,
the truncated singular series, and the main/error split of the
approximation formula at a frequency point.
"""

import json
import os
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor, gcd, log
from typing import Optional

import numpy as np

from .errors import InputError, NumericError, UndefinedMeasureError
from .expsums import _g_over_a, _roots
from .numtheory import PrimeTable, int_kth_root, units
from .oscint import SurfaceQuery, singular_integral, surface_transform

CACHE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ProblemInstance:
    """Degree k, dimension n, and the target value lam."""

    k: int
    n: int
    lam: int

    def __post_init__(self):
        if self.k < 2 or self.n < 2 or self.lam < 1:
            raise InputError("need k >= 2, n >= 2, lam >= 1")


@dataclass(frozen=True)
class GammaVerdict:
    """Admissibility verdict; ``exact`` marks the explicitly known progressions."""

    member: bool
    exact: bool

    def label(self) -> str:
        tag = "member" if self.member else "non_member"
        return tag if self.exact else f"heuristic_{tag}"


@dataclass(frozen=True)
class DimensionGates:
    """Dimension thresholds and the critical exponent for a given (k, n)."""

    n0: int
    n1: int
    n2: int
    p_crit: Optional[Fraction]


def _n0(k: int) -> int:
    if k in (2, 3, 4):
        return 2**k + 1
    best = max(
        ceil(Fraction(k * j - min(2**j, j * j + j), k - j + 1)) for j in range(1, k - 1)
    )
    return k * k + 3 - best


def _n1(k: int) -> int:
    if k == 2:
        return 7
    if k == 3:
        return 13
    return k * k + k + 3


def _n2(k: int) -> int:
    if k >= 7:
        return k * k * (k - 1) + 1
    return k * 2 ** (k - 1) + 1


def dimension_gates(k: int, n: int) -> DimensionGates:
    if k < 2 or n < 1:
        raise InputError("need k >= 2 and n >= 1")
    n2 = _n2(k)
    p_crit = Fraction(2 * n, 2 * n - n2) if 2 * n > n2 else None
    return DimensionGates(n0=_n0(k), n1=_n1(k), n2=n2, p_crit=p_crit)


def _v_p(m: int, p: int) -> int:
    e = 0
    while m % p == 0:
        m //= p
        e += 1
    return e


@lru_cache(maxsize=None)
def _local_unit_sum_masks(k: int, n: int) -> tuple:
    """(modulus, admissible-residue mask) pairs for every prime p <= k + 1.

    The modulus is p^(v_p(k) + 2), one power higher at p = 2; the mask
    marks residues reachable as a sum of n k-th powers of units.
    """
    pairs = []
    for p in range(2, k + 2):
        if any(p % d == 0 for d in range(2, p)):
            continue
        gam = _v_p(k, p) + 2 + (1 if p == 2 else 0)
        m = p**gam
        kth_powers = sorted({pow(x, k, m) for x in range(m) if gcd(x, m) == 1})
        reach = np.zeros(m, dtype=bool)
        reach[0] = True
        for _ in range(n):
            nxt = np.zeros(m, dtype=bool)
            for s in kth_powers:
                nxt[np.roll(reach, s)] = True
            reach = nxt
        pairs.append((m, reach))
    return tuple(pairs)


def gamma_membership(instance: ProblemInstance) -> GammaVerdict:
    """Admissibility of lam for (k, n).

    Exact for odd k (parity), for (k, n) = (2, 5) (residue 5 mod 24) and
    for (k, n) = (4, 17) (residue 17 mod 240).  Every other case is a
    congruence-solubility heuristic over sums of unit k-th powers modulo
    small prime powers, and is labeled as such.
    """
    k, n, lam = instance.k, instance.n, instance.lam
    if k % 2 == 1:
        return GammaVerdict(member=(lam - n) % 2 == 0, exact=True)
    if (k, n) == (2, 5):
        return GammaVerdict(member=lam % 24 == 5, exact=True)
    if (k, n) == (4, 17):
        return GammaVerdict(member=lam % 240 == 17, exact=True)
    ok = all(mask[lam % m] for m, mask in _local_unit_sum_masks(k, n))
    return GammaVerdict(member=ok, exact=False)


def gamma_member_mask(k: int, n: int, lams: np.ndarray) -> np.ndarray:
    """Vectorized admissibility over an array of lam values."""
    lams = np.asarray(lams, dtype=np.int64)
    if k % 2 == 1:
        return (lams - n) % 2 == 0
    if (k, n) == (2, 5):
        return lams % 24 == 5
    if (k, n) == (4, 17):
        return lams % 240 == 17
    mask = np.ones(len(lams), dtype=bool)
    for m, reach in _local_unit_sum_masks(k, n):
        mask &= reach[lams % m]
    return mask


@dataclass(frozen=True)
class SurfaceMeasure:
    """All ordered solutions of x_1^k + ... + x_n^k = lam over the base set.

    ``log_weighted`` marks the prime measure carrying the weight
    prod_i log(x_i); the integer measure carries unit weights.  R is the
    total weight, r the raw solution count.
    """

    instance: ProblemInstance
    representations: np.ndarray
    log_weighted: bool
    weights: np.ndarray = field(repr=False)
    R: float
    r: int

    @classmethod
    def build(cls, instance, representations, log_weighted):
        reps = np.asarray(representations, dtype=np.int64).reshape(-1, instance.n)
        if len(reps) and not ((reps**instance.k).sum(axis=1) == instance.lam).all():
            raise InputError("a representation does not solve the equation")
        if log_weighted:
            weights = np.log(reps.astype(np.float64)).prod(axis=1) if len(reps) else np.zeros(0)
        else:
            weights = np.ones(len(reps))
        return cls(
            instance=instance,
            representations=reps,
            log_weighted=log_weighted,
            weights=weights,
            R=float(weights.sum()),
            r=len(reps),
        )


def _half_sums(powers: np.ndarray, half: int) -> np.ndarray:
    sums = powers.copy()
    for _ in range(half - 1):
        sums = (sums[:, None] + powers[None, :]).ravel()
    return sums


def _decode(flat: np.ndarray, half: int, base: int) -> np.ndarray:
    digits = np.empty((len(flat), half), dtype=np.int64)
    for j in range(half - 1, -1, -1):
        digits[:, j] = flat % base
        flat = flat // base
    return digits


def _mitm_solutions(values: np.ndarray, n: int, k: int, lam: int) -> np.ndarray:
    """All ordered n-tuples from ``values`` whose k-th powers sum to lam.

    Meet in the middle: tabulate the partial sums of the first ceil(n/2)
    coordinates, then join against the complementary sums.
    """
    values = np.asarray(values, dtype=np.int64)
    if len(values) == 0:
        return np.empty((0, n), dtype=np.int64)
    n_a = (n + 1) // 2
    n_b = n - n_a
    if len(values) ** n_a > 80_000_000:
        raise InputError("enumeration table too large; reduce lam or the prime bound")
    powers = values**k
    left = _half_sums(powers, n_a)
    order = np.argsort(left, kind="stable")
    left_sorted = left[order]
    right = _half_sums(powers, n_b) if n_b else np.zeros(1, dtype=np.int64)
    targets = lam - right
    lo = np.searchsorted(left_sorted, targets, side="left")
    hi = np.searchsorted(left_sorted, targets, side="right")
    counts = hi - lo
    total = int(counts.sum())
    if total == 0:
        return np.empty((0, n), dtype=np.int64)
    right_idx = np.repeat(np.arange(len(right)), counts)
    starts = np.repeat(lo, counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    left_idx = order[starts + offsets]
    cols = [values[_decode(left_idx, n_a, len(values))]]
    if n_b:
        cols.append(values[_decode(right_idx, n_b, len(values))])
    tuples = np.hstack(cols)
    order = np.lexsort(tuple(tuples[:, j] for j in range(n - 1, -1, -1)))
    return tuples[order]


def _cache_path(cache_dir: str, instance: ProblemInstance) -> str:
    name = f"wg_k{instance.k}_n{instance.n}_lam{instance.lam}.json"
    return os.path.join(cache_dir, name)


def _cache_load(cache_dir: str, instance: ProblemInstance) -> Optional[np.ndarray]:
    path = _cache_path(cache_dir, instance)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("version") != CACHE_FORMAT_VERSION:
        return None
    return np.asarray(doc["tuples"], dtype=np.int64).reshape(-1, instance.n)


def _cache_store(cache_dir: str, instance: ProblemInstance, reps: np.ndarray) -> None:
    os.makedirs(cache_dir, exist_ok=True)
    doc = {
        "version": CACHE_FORMAT_VERSION,
        "k": instance.k,
        "n": instance.n,
        "lambda": instance.lam,
        "tuples": reps.tolist(),
    }
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(doc, fh)
    os.replace(tmp, _cache_path(cache_dir, instance))


def enumerate_prime_points(
    instance: ProblemInstance,
    table: PrimeTable,
    cache_dir: Optional[str] = None,
) -> SurfaceMeasure:
    """The log-weighted measure on prime solutions of the degree-k equation.

    Results are cached to ``cache_dir`` (one JSON document per (k, n, lam),
    with a leading format-version integer) so sweeps can reuse them.
    """
    root = int_kth_root(instance.lam, instance.k)
    if table.limit < root:
        raise InputError(f"prime table covers {table.limit} < lam^(1/k) = {root}")
    reps = _cache_load(cache_dir, instance) if cache_dir else None
    if reps is None:
        reps = _mitm_solutions(table.primes_leq(root), instance.n, instance.k, instance.lam)
        if cache_dir:
            _cache_store(cache_dir, instance, reps)
    return SurfaceMeasure.build(instance, reps, log_weighted=True)


def enumerate_integer_points(instance: ProblemInstance) -> SurfaceMeasure:
    """The unit-weighted measure on positive-integer solutions."""
    root = int_kth_root(instance.lam, instance.k)
    values = np.arange(1, root + 1, dtype=np.int64)
    reps = _mitm_solutions(values, instance.n, instance.k, instance.lam)
    return SurfaceMeasure.build(instance, reps, log_weighted=False)


def naive_solutions(values, n: int, k: int, lam: int) -> np.ndarray:
    """Plain nested-loop enumeration; the oracle for the split enumeration."""
    from itertools import product

    values = [int(v) for v in values]
    out = [t for t in product(values, repeat=n) if sum(v**k for v in t) == lam]
    return np.asarray(sorted(out), dtype=np.int64).reshape(-1, n)


def omega_hat(measure: SurfaceMeasure, xi) -> complex:
    """Normalized Fourier transform of the measure at the frequency vector xi."""
    if measure.R <= 0:
        raise UndefinedMeasureError("measure has zero mass; transform undefined")
    xi = np.asarray(xi, dtype=float)
    phases = measure.representations @ xi
    vals = np.exp(2j * np.pi * (phases - np.rint(phases)))
    return complex((measure.weights * vals).sum() / measure.R)


@dataclass(frozen=True)
class BumpProfile:
    """Product bump: 1 on [-inner, inner], 0 outside (-outer, outer), smooth ramp between."""

    inner: float = 1.0
    outer: float = 2.0

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise InputError("need 0 < inner < outer")

    def eta(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        s = np.clip((t - self.inner) / (self.outer - self.inner), 0.0, 1.0)
        out = np.zeros_like(s)
        ramp = (s > 0.0) & (s < 1.0)
        out[ramp] = np.exp(1.0 - 1.0 / (1.0 - s[ramp] ** 2))
        out[s == 0.0] = 1.0
        return out if out.ndim else float(out)

    def psi(self, x) -> float:
        return float(np.prod(self.eta(np.asarray(x, dtype=float))))


@dataclass(frozen=True)
class ApproxParams:
    """Tunables of the approximation formula: scales, truncations, bump."""

    C: float
    B: float
    N: float
    Qsing: int
    bump: BumpProfile = BumpProfile()

    @classmethod
    def for_instance(cls, instance, C=2.0, B=1.0, N=None, Qsing=100, bump=None):
        base = instance.lam ** (1.0 / instance.k)
        if N is None:
            N = base
        if not base * (1 - 1e-12) <= N <= 2 * base * (1 + 1e-12):
            raise InputError("N must lie between lam^(1/k) and 2*lam^(1/k)")
        return cls(C=C, B=B, N=float(N), Qsing=int(Qsing), bump=bump or BumpProfile())

    @property
    def Q(self) -> float:
        return log(self.N) ** self.C


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    tail_estimate: float


_TAIL_EPS = 0.25


def singular_series(instance: ProblemInstance, avec, qvec, Qsing: int) -> SeriesResult:
    """Truncated modulus sum of the arithmetic factor at center avec/qvec.

    Sums, over q <= Qsing and units a mod q, the phase e(-lam a / q) times
    the product over coordinates of g(a, q; a_i, q_i).  The tail estimate
    follows the q^(1 - n/2 + eps) envelope of the terms, with the constant
    fitted on the computed range (finite for n >= 5).
    """
    n, k, lam = instance.n, instance.k, instance.lam
    avec = [int(v) for v in avec]
    qvec = [int(v) for v in qvec]
    if len(avec) != n or len(qvec) != n:
        raise InputError("avec and qvec must have length n")
    for ai, qi in zip(avec, qvec):
        if qi < 1 or gcd(ai, qi) != 1:
            raise InputError("each center pair (a_i, q_i) must be reduced")
    if Qsing < 1:
        raise InputError("Qsing must be >= 1")
    pairs = Counter((ai % qi, qi) for ai, qi in zip(avec, qvec))
    term_mags = np.empty(Qsing)
    total = 0j
    for q in range(1, Qsing + 1):
        us = units(q).elements
        phases = _roots(q)[((-lam % q) * us) % q]
        prod = np.ones(len(us), dtype=complex)
        for (ai, qi), mult in pairs.items():
            prod *= _g_over_a(q, ai, qi, k) ** mult
        term = complex((phases * prod).sum())
        term_mags[q - 1] = abs(term)
        total += term
    exponent = 1.0 - n / 2.0 + _TAIL_EPS
    fit_lo = max(2, Qsing // 2)
    qs = np.arange(fit_lo, Qsing + 1, dtype=float)
    c_fit = float((term_mags[fit_lo - 1 :] / qs**exponent).max()) if Qsing >= 2 else 0.0
    decay = n / 2.0 - 2.0 - _TAIL_EPS
    tail = c_fit * Qsing ** (2.0 - n / 2.0 + _TAIL_EPS) / decay if decay > 0 else float("inf")
    return SeriesResult(value=total, tail_estimate=tail)


def _locate_center(xi_i: float, Q: float, N: float, bump: BumpProfile):
    """Smallest-q rational a/q with q <= Q whose bump window covers xi_i.

    Returns (q, a, d) with d = q*xi_i - a the signed offset, or None.
    Candidates within one q are tried nearest first, ties to the smaller a.
    """
    radius = bump.outer * Q / N
    for q in range(1, floor(Q) + 1):
        t = q * xi_i
        candidates = sorted(
            range(ceil(t - radius), floor(t + radius) + 1),
            key=lambda a: (abs(t - a), a),
        )
        for a in candidates:
            if gcd(a % q, q) == 1:
                return q, a, t - a
    return None


def main_term(measure: SurfaceMeasure, params: ApproxParams, xi) -> complex:
    """Main term of the approximation formula at frequency xi.

    Locates, coordinate by coordinate, the lowest-denominator rational
    a_i/q_i (q_i <= Q) whose bump window contains xi_i; if every
    coordinate has one, evaluates
    (N^(n-k)/R) * G(avec, qvec) * psi((N/Q)(q xi - a)) * ds(N(xi - a/q)),
    and otherwise returns 0.
    """
    if measure.R <= 0:
        raise UndefinedMeasureError("measure has zero mass")
    inst = measure.instance
    n, k = inst.n, inst.k
    xi = np.asarray(xi, dtype=float)
    if len(xi) != n:
        raise InputError("xi must have length n")
    N, Q = params.N, params.Q
    lam0 = inst.lam / N**k
    qvec, avec, dvec = [], [], []
    for i in range(n):
        hit = _locate_center(float(xi[i] % 1.0), Q, N, params.bump)
        if hit is None:
            return 0j
        q, a, d = hit
        qvec.append(q)
        avec.append(a % q)
        dvec.append(d)
    psival = float(np.prod([params.bump.eta((N / Q) * d) for d in dvec]))
    if psival == 0.0:
        return 0j
    eta = tuple(N * d / q for d, q in zip(dvec, qvec))
    series = singular_series(inst, avec, qvec, params.Qsing)
    # absolute tolerance: the transform factor is bounded by its zero value,
    # so 1e-5 absolute keeps the main term far below the error-decay scales
    ds = surface_transform(SurfaceQuery(n=n, k=k, lam0=lam0, eta=eta), abs_tol=1e-5)
    return (N ** (n - k) / measure.R) * series.value * psival * ds.value


def error_term(measure: SurfaceMeasure, params: ApproxParams, xi) -> complex:
    """Transform minus main term at xi."""
    return omega_hat(measure, xi) - main_term(measure, params, xi)


@lru_cache(maxsize=None)
def _mu_infinity(n: int, k: int) -> float:
    return singular_integral(n, k, 1.0)


def hua_ratio(measure: SurfaceMeasure, Qsing: int = 100) -> float:
    """Weighted count over its predicted size S_trunc * mu_inf * lam^(n/k - 1)."""
    if measure.R <= 0:
        raise UndefinedMeasureError("measure has zero mass")
    inst = measure.instance
    n, k, lam = inst.n, inst.k, inst.lam
    series = singular_series(inst, [0] * n, [1] * n, Qsing)
    sval = series.value
    if abs(sval.imag) > 1e-8 * (1.0 + abs(sval)):
        raise NumericError(f"singular series came out non-real: {sval!r}")
    return measure.R / (sval.real * _mu_infinity(n, k) * lam ** (n / k - 1.0))


# ---------------------------------------------------------------------------
# Whole-range totals on the value axis.  The count, weight, and transform
# numerators of every lam <= lam_max come from n-fold additive convolution
# of single-coordinate arrays indexed by p^k, so block sweeps never
# enumerate solutions lam by lam.
# ---------------------------------------------------------------------------


def _fft_selfconv(arr: np.ndarray, n: int, out_len: int) -> np.ndarray:
    full = n * (len(arr) - 1) + 1
    size = 1
    while size < full:
        size *= 2
    if np.iscomplexobj(arr):
        spectrum = np.fft.fft(arr, size)
        return np.fft.ifft(spectrum**n)[:out_len]
    spectrum = np.fft.rfft(arr, size)
    return np.fft.irfft(spectrum**n, size)[:out_len]


def _coordinate_array(k: int, lam_max: int, table: PrimeTable, fill) -> np.ndarray:
    primes = table.primes_leq(int_kth_root(lam_max, k))
    vals = fill(primes.astype(np.float64))
    arr = np.zeros(lam_max + 1, dtype=vals.dtype)
    arr[primes**k] = vals
    return arr


def rep_count_array(k: int, n: int, lam_max: int, table: PrimeTable) -> np.ndarray:
    """r(lam) for every lam <= lam_max, via convolution (exact after rounding)."""
    arr = _coordinate_array(k, lam_max, table, lambda p: np.ones(len(p)))
    return np.rint(_fft_selfconv(arr, n, lam_max + 1)).astype(np.int64)


def rep_weight_array(k: int, n: int, lam_max: int, table: PrimeTable, power: float = 1.0) -> np.ndarray:
    """Sum over solutions of prod_i (log p_i)^power, for every lam <= lam_max."""
    arr = _coordinate_array(k, lam_max, table, lambda p: np.log(p) ** power)
    return _fft_selfconv(arr, n, lam_max + 1)


def fourier_numerator_array(k: int, n: int, lam_max: int, table: PrimeTable, xi) -> np.ndarray:
    """R(lam) * omega_hat(lam, xi) for every lam <= lam_max."""
    xi = np.asarray(xi, dtype=float)
    if len(xi) != n:
        raise InputError("xi must have length n")
    full = n * lam_max + 1
    size = 1
    while size < full:
        size *= 2
    spectrum = np.ones(size, dtype=complex)
    for j in range(n):
        primes = table.primes_leq(int_kth_root(lam_max, k))
        arr = np.zeros(lam_max + 1, dtype=complex)
        ph = primes * xi[j]
        arr[primes**k] = np.log(primes.astype(np.float64)) * np.exp(
            2j * np.pi * (ph - np.rint(ph))
        )
        spectrum *= np.fft.fft(arr, size)
    return np.fft.ifft(spectrum)[: lam_max + 1]


def max_weight_array(k: int, n: int, lam_max: int, table: PrimeTable) -> np.ndarray:
    """Largest single-solution weight prod log(p_i) per lam (log-domain max-plus)."""
    primes = table.primes_leq(int_kth_root(lam_max, k))
    if len(primes) == 0:
        return np.full(lam_max + 1, -np.inf)
    base = np.full(lam_max + 1, -np.inf)
    base[primes**k] = np.log(np.log(primes.astype(np.float64)))
    acc = base.copy()
    for _ in range(n - 1):
        nxt = np.full(lam_max + 1, -np.inf)
        for p in primes:
            v = int(p) ** k
            w = log(log(int(p)))
            nxt[v:] = np.maximum(nxt[v:], acc[: lam_max + 1 - v] + w)
        acc = nxt
    return np.exp(acc)
